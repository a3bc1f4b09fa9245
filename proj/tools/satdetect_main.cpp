// Copyright 2026 The satdetect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: pipeline stages, evaluation, prediction and a few
// corpus utilities.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "satdetect/corpus.hpp"
#include "satdetect/error.hpp"
#include "satdetect/metrics.hpp"
#include "satdetect/pipeline.hpp"
#include "satdetect/pipeline_config.hpp"
#include "satdetect/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using satdetect::Error;
using satdetect::ErrorCode;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

int exit_code_for(const Error& e) {
  switch (e.category()) {
    case satdetect::ErrorCategory::kUsage:
      return kUsage;
    case satdetect::ErrorCategory::kNumeric:
      return kNumeric;
    case satdetect::ErrorCategory::kData:
      break;
  }
  return kData;
}

/// Pipeline flags shared by the stage subcommands. Only flags given on the
/// command line become overrides.
struct PipelineFlags {
  std::string config_file;
  std::vector<std::string> sets;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "Key = value config file")->check(CLI::ExistingFile);
    auto flag = [&](const std::string& name, const std::string& key, const std::string& help) {
      options[key] = cmd->add_option(name, values[key], help);
    };
    flag("--corpus", "corpus", "Corpus JSONL with id, text and label fields");
    flag("--out-dir", "out_dir", "Directory for artifacts, manifest and report");
    flag("--preset", "preset", "Parameter preset: desk or paper");
    flag("--seed", "seed", "Master seed");
    flag("--train-fraction", "train_fraction", "Training share of the split");
    flag("--min-df", "min_df", "Lower document-frequency fraction");
    flag("--max-df", "max_df", "Upper document-frequency fraction");
    flag("--max-terms", "max_terms", "Vocabulary size cap");
    flag("--dim", "dim", "Embedding dimension");
    flag("--epochs", "epochs", "CNN training epochs");
    flag("--lr", "lr", "CNN learning rate");
    flag("--batch-size", "batch_size", "CNN mini-batch size");
    flag("--threshold", "threshold", "Decision threshold on P(satire)");
    cmd->add_option("--set", sets, "Any other config key as key=value (repeatable)");
  }

  std::vector<std::pair<std::string, std::string>> overrides() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) out.emplace_back(key, values.at(key));
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "--set expects key=value, got '" + s + "'");
      out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    return out;
  }

  /// Later stages start from the config recorded in an existing manifest,
  /// so a stage can be rerun with only --out-dir.
  satdetect::PipelineConfig resolve(bool from_manifest) const {
    const auto over = overrides();
    std::vector<std::pair<std::string, std::string>> base;
    if (!config_file.empty()) base = satdetect::read_config_file(config_file);

    fs::path out_dir = "satdetect-out";
    for (const auto& entries : {std::cref(base), std::cref(over)}) {
      for (const auto& [k, v] : entries.get()) {
        if (k == "out_dir" || k == "out-dir") out_dir = v;
      }
    }
    if (from_manifest) {
      const auto mpath = out_dir / satdetect::artifact::kManifest;
      if (fs::exists(mpath)) {
        std::ifstream in(mpath);
        const auto manifest = json::parse(in, nullptr, false);
        if (manifest.is_discarded() || !manifest.contains("config")) {
          throw Error(ErrorCode::kFormatError, mpath.string() + " is not a readable manifest");
        }
        std::vector<std::pair<std::string, std::string>> recorded;
        for (const auto& [k, v] : manifest["config"].items()) recorded.emplace_back(k, v.get<std::string>());
        recorded.insert(recorded.end(), base.begin(), base.end());
        base = std::move(recorded);
      }
    }
    return satdetect::resolve_config(base, over);
  }
};

void log_config(const satdetect::PipelineConfig& config) { spdlog::info("resolved config:\n{}", config.to_text()); }

void print_eval(const satdetect::EvalResult& r) {
  json j;
  r.metrics.to_json(j);
  std::cout << j.dump(2) << "\n\n";
  std::cout << "confusion matrix (counts)\n" << r.counts_table << "\n";
  std::cout << "confusion matrix (percent of true class)\n" << r.percent_table;
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("satdetect");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S] %^%l%$ %v");

  CLI::App app{"Satire detection with TF-IDF weighted embedding images and a CNN"};
  app.require_subcommand(1);
  app.fallthrough();
  bool quiet = false;
  bool verbose = false;
  app.add_flag("-q,--quiet", quiet, "Only log warnings and errors");
  app.add_flag("-v,--verbose", verbose, "Log debug detail");

  struct StageCommand {
    CLI::App* cmd;
    PipelineFlags flags;
  };
  const std::vector<std::pair<std::string, std::string>> stage_names = {
      {"build-vocab", "Preprocess, split and build the TF-IDF vocabulary"},
      {"train-embeddings", "Train skip-gram embeddings on the training split"},
      {"encode", "Encode train and test documents as two-channel images"},
      {"train", "Train the CNN on the encoded training split"},
      {"report", "Evaluate on the test split and write the report"},
      {"run", "Run every stage in order"},
  };
  std::map<std::string, StageCommand> stages;
  std::size_t repeats = 0;
  for (const auto& [name, help] : stage_names) {
    auto& sc = stages[name];
    sc.cmd = app.add_subcommand(name, help);
    sc.flags.attach(sc.cmd);
  }
  stages["run"].cmd->add_option("--repeats", repeats, "Run this many consecutive seeds and summarize");

  std::string manifest;
  std::string eval_corpus;
  auto* eval_cmd = app.add_subcommand("eval", "Score a labeled corpus with a finished run");
  eval_cmd->add_option("--manifest", manifest, "Manifest file or output directory")->required();
  eval_cmd->add_option("--corpus", eval_corpus, "Labeled corpus JSONL")->required();

  std::string predict_input = "-";
  bool predict_lines = false;
  auto* predict_cmd = app.add_subcommand("predict", "Classify new documents, one JSON line per document");
  predict_cmd->add_option("--manifest", manifest, "Manifest file or output directory")->required();
  predict_cmd->add_option("--input", predict_input, "Input file, '-' for standard input");
  predict_cmd->add_flag("--lines", predict_lines, "Treat each input line as raw text instead of JSONL");

  satdetect::SyntheticCorpusParams synth;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic two-class corpus");
  synth_cmd->add_option("--out", synth_out, "Output JSONL path")->required();
  synth_cmd->add_option("--documents", synth.documents, "Number of documents");
  synth_cmd->add_option("--shared-vocabulary", synth.shared_vocabulary, "Shared vocabulary size");
  synth_cmd->add_option("--marker-vocabulary", synth.marker_vocabulary, "Per-class marker vocabulary size");
  synth_cmd->add_option("--marker-fraction", synth.marker_fraction, "Share of tokens drawn from class markers");
  synth_cmd->add_option("--zipf", synth.zipf_exponent, "Zipf exponent");
  synth_cmd->add_option("--seed", synth.seed, "Generator seed");

  std::string balance_corpus;
  auto* balance_cmd = app.add_subcommand("balance", "Print class counts of a corpus as JSON");
  balance_cmd->add_option("--corpus", balance_corpus, "Corpus JSONL")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }
  spdlog::set_level(quiet ? spdlog::level::warn : verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    for (auto& [name, sc] : stages) {
      if (!sc.cmd->parsed()) continue;
      const bool fresh = name == "build-vocab" || name == "run";
      auto config = sc.flags.resolve(!fresh);
      if (name == "run" && repeats > 0) config.repeats = repeats;
      log_config(config);
      if (name == "run" && config.repeats > 1) {
        const auto summary = satdetect::run_repeats(config);
        std::cout << summary.dump(2) << "\n";
        return kOk;
      }
      satdetect::PipelineRunner runner(config);
      if (name == "build-vocab") runner.build_vocab();
      if (name == "train-embeddings") runner.train_embeddings();
      if (name == "encode") runner.encode();
      if (name == "train") runner.train();
      if (name == "report" || name == "run") {
        const auto report = name == "run" ? runner.run() : runner.report();
        std::cout << satdetect::render_report_text(report);
      }
      return kOk;
    }

    if (eval_cmd->parsed()) {
      const auto predictor = satdetect::Predictor::open(manifest);
      print_eval(satdetect::run_eval(predictor, satdetect::load_corpus(eval_corpus)));
      return kOk;
    }

    if (predict_cmd->parsed()) {
      const auto predictor = satdetect::Predictor::open(manifest);
      const auto format = predict_lines ? satdetect::InputFormat::kLines : satdetect::InputFormat::kJsonl;
      if (predict_input == "-") {
        satdetect::run_predict(predictor, std::cin, std::cout, format);
      } else {
        std::ifstream in(predict_input, std::ios::binary);
        if (!in) throw Error(ErrorCode::kMissingFile, "input not found: " + predict_input);
        satdetect::run_predict(predictor, in, std::cout, format);
      }
      return kOk;
    }

    if (synth_cmd->parsed()) {
      satdetect::save_corpus(satdetect::make_synthetic_corpus(synth), synth_out);
      return kOk;
    }

    if (balance_cmd->parsed()) {
      const auto corpus = satdetect::load_corpus(balance_corpus);
      const auto b = satdetect::class_balance(corpus);
      const json j = {{"documents", b.total()},
                      {"satire", b.satire},
                      {"real", b.real},
                      {"satire_fraction", b.satire_fraction()},
                      {"real_fraction", b.real_fraction()}};
      std::cout << j.dump(2) << "\n";
      return kOk;
    }
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kData;
  }
  return kUsage;
}
