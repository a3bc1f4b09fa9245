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

#include "satdetect/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "satdetect/corpus.hpp"
#include "satdetect/embedding.hpp"
#include "satdetect/error.hpp"
#include "satdetect/fingerprint.hpp"
#include "satdetect/nn/serialize.hpp"
#include "satdetect/rng.hpp"
#include "satdetect/tfidf.hpp"

namespace satdetect {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kManifestVersion = 1;
constexpr int kReportVersion = 1;

std::string file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "artifact not found: " + path.string());
  Fnv1a64 h;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    h.update(std::string_view(buf, static_cast<std::size_t>(in.gcount())));
  }
  return h.hex();
}

void write_text_file(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "file not found: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, path.string() + ": " + e.what());
  }
}

std::string content_fingerprint(const Corpus& corpus) {
  Fnv1a64 h;
  h.update_u64(corpus.size());
  for (const auto& d : corpus.docs()) {
    h.update_field(d.id).update_field(d.text).update_u64(static_cast<std::uint64_t>(label_value(d.label)));
  }
  return h.hex();
}

std::string lineage_fingerprint(const Corpus& train, const PreprocessConfig& pre) {
  Fnv1a64 h;
  h.update_field("satdetect-lineage").update_field(content_fingerprint(train)).update_field(pre.fingerprint());
  return h.hex();
}

json balance_json(const Corpus& corpus) {
  const auto b = class_balance(corpus);
  return {{"documents", b.total()}, {"satire", b.satire}, {"real", b.real}};
}

std::string stopword_file_text(const StopList& stops) {
  std::string out = "# stop list\n";
  for (const auto& e : stops.sorted_entries()) out += e + "\n";
  return out;
}

std::string suffix_file_text(const SuffixTable& table) {
  std::string out = "# suffix table\n";
  for (const auto& s : table.suffixes()) out += s + "\n";
  return out;
}

std::vector<TokenList> preprocess_all(const Corpus& corpus, const PreprocessConfig& pre) {
  std::vector<TokenList> out;
  out.reserve(corpus.size());
  for (const auto& d : corpus.docs()) out.push_back(preprocess(d.text, pre));
  return out;
}

fs::path resolve_manifest(const fs::path& p) {
  std::error_code ec;
  if (fs::is_directory(p, ec)) return p / artifact::kManifest;
  return p;
}

class StageTimer {
 public:
  explicit StageTimer(std::string_view name) : name_(name), start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    spdlog::info("stage {} finished in {:.2f} s", name_, elapsed);
  }

 private:
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

StageSeeds StageSeeds::derive(std::uint64_t master) noexcept {
  return {master, derive_seed(master, "split"), derive_seed(master, "embedding"), derive_seed(master, "init"),
          derive_seed(master, "training")};
}

json StageSeeds::to_json() const {
  return {{"master", master}, {"split", split}, {"embedding", embedding}, {"init", init}, {"training", training}};
}

template <typename T>
Metrics evaluate(const nn::Model<T>& model, std::span<const nn::Example> data, double threshold) {
  if (data.empty()) throw Error(ErrorCode::kEmptyTestSet, "nothing to evaluate");
  ConfusionMatrix cm;
  nn::Workspace<T> ws;
  for (const auto& ex : data) {
    const auto x = nn::to_tensor<T>(ex.image, model.input_shape());
    const auto p = model.forward(x, ws, false, nullptr);
    cm.add(ex.label, nn::classify(static_cast<double>(p), threshold).label);
  }
  return metrics_from_confusion(cm);
}

template Metrics evaluate<float>(const nn::Model<float>&, std::span<const nn::Example>, double);
template Metrics evaluate<double>(const nn::Model<double>&, std::span<const nn::Example>, double);

std::vector<nn::Example> as_examples(const EncodedDataset& dataset) {
  std::vector<nn::Example> out;
  out.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) out.push_back({dataset.images[i].data, dataset.labels[i]});
  return out;
}

// ---------------------------------------------------------------------------
// PipelineRunner

struct PipelineRunner::State {
  PipelineConfig config;
  StageSeeds seeds;
  fs::path dir;
  json manifest;

  std::optional<Corpus> corpus;
  std::optional<SplitResult> split;
  std::optional<PreprocessConfig> pre;
  std::vector<TokenList> train_tokens;
  std::vector<TokenList> test_tokens;
  bool tokens_ready = false;
  std::string lineage;

  std::optional<Vocabulary> vocab;
  std::optional<EmbeddingTable> table;
  std::optional<EncodedDataset> train_set;
  std::optional<EncodedDataset> test_set;
  std::optional<nn::Model<float>> model;

  fs::path path(std::string_view name) const { return dir / name; }

  void fresh_manifest() {
    json cfg;
    config.to_json(cfg);
    manifest = {{"format", "satdetect-manifest"}, {"version", kManifestVersion},
                {"status", "incomplete"},         {"config", cfg},
                {"seeds", seeds.to_json()},       {"artifacts", json::object()},
                {"stages", json::object()},       {"completed_stages", json::array()}};
  }

  void write_manifest() const {
    write_text_file(path(artifact::kManifest), manifest.dump(2) + "\n");
    write_text_file(path(artifact::kResolvedConfig), config.to_text());
  }

  void record_artifact(const std::string& key, std::string_view file) {
    manifest["artifacts"][key] = {{"path", std::string(file)}, {"digest", file_digest(path(file))}};
  }

  /// Verifies that an artifact on disk still matches the manifest record.
  void check_artifact(const std::string& key) const {
    const auto& arts = manifest.at("artifacts");
    if (!arts.contains(key)) {
      throw Error(ErrorCode::kMissingFile, "the manifest has no " + key + " artifact; run the earlier stages first");
    }
    const auto file = arts[key].at("path").get<std::string>();
    if (file_digest(path(file)) != arts[key].at("digest").get<std::string>()) {
      throw Error(ErrorCode::kFingerprintMismatch, file + " changed since it was recorded in the manifest");
    }
  }

  void ensure_corpus() {
    if (corpus) return;
    if (config.corpus.empty()) throw Error(ErrorCode::kInvalidArgument, "no corpus path given");
    corpus = load_corpus(config.corpus);
  }

  void ensure_split() {
    if (split) return;
    ensure_corpus();
    split = satdetect::split(*corpus, config.split_spec(seeds.split));
  }

  void ensure_tokens() {
    if (tokens_ready) return;
    ensure_split();
    if (!pre) pre = config.preprocess_config();
    train_tokens = preprocess_all(split->train, *pre);
    test_tokens = preprocess_all(split->test, *pre);
    lineage = lineage_fingerprint(split->train, *pre);
    tokens_ready = true;
  }

  const std::string& ensure_lineage() {
    ensure_tokens();
    return lineage;
  }

  void ensure_vocab() {
    if (vocab) return;
    check_artifact("vocabulary");
    vocab = Vocabulary::load(path(artifact::kVocabulary));
    if (vocab->fingerprint() != ensure_lineage()) {
      throw Error(ErrorCode::kFingerprintMismatch,
                  "vocabulary was built from a different corpus lineage than the current config");
    }
  }

  void ensure_table() {
    if (table) return;
    check_artifact("embeddings");
    table = EmbeddingTable::load_binary(path(artifact::kEmbeddingsBinary));
    if (table->fingerprint() != ensure_lineage()) {
      throw Error(ErrorCode::kFingerprintMismatch,
                  "embeddings were trained on a different corpus lineage than the current config");
    }
  }

  EncodedDataset& ensure_encoded(std::optional<EncodedDataset>& slot, const std::string& key, std::string_view file) {
    if (!slot) {
      check_artifact(key);
      slot = load_encoded(path(file));
      if (slot->fingerprint != ensure_lineage()) {
        throw Error(ErrorCode::kFingerprintMismatch, std::string(file) + " belongs to a different corpus lineage");
      }
    }
    return *slot;
  }

  void ensure_model() {
    if (model) return;
    check_artifact("model");
    model = nn::load_model<float>(path(artifact::kModel));
  }

  template <typename F>
  void stage(const std::string& name, std::initializer_list<std::string_view> outputs, F&& body) {
    spdlog::info("stage {} started", name);
    StageTimer timer(name);
    auto fail = [&](ErrorCode code, const std::string& detail) -> Error {
      for (auto f : outputs) {
        std::error_code ec;
        fs::remove(path(f), ec);
      }
      manifest["status"] = "incomplete";
      manifest["failed_stage"] = name;
      manifest["error"] = std::string(error_code_name(code)) + ": " + detail;
      try {
        write_manifest();
      } catch (const std::exception&) {
        // the original error is more useful than a failure to record it
      }
      return Error(code, "stage '" + name + "': " + detail);
    };
    try {
      body();
    } catch (const Error& e) {
      throw fail(e.code(), e.detail());
    } catch (const fs::filesystem_error& e) {
      throw fail(ErrorCode::kIoError, e.what());
    } catch (const json::exception& e) {
      throw fail(ErrorCode::kFormatError, e.what());
    }
    manifest.erase("failed_stage");
    manifest.erase("error");
    auto& done = manifest["completed_stages"];
    if (std::find(done.begin(), done.end(), name) == done.end()) done.push_back(name);
    write_manifest();
  }
};

PipelineRunner::PipelineRunner(PipelineConfig config) : s_(std::make_unique<State>()) {
  config.validate();
  s_->config = std::move(config);
  s_->seeds = StageSeeds::derive(s_->config.seed);
  s_->dir = s_->config.out_dir;
  std::error_code ec;
  fs::create_directories(s_->dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + s_->dir.string() + ": " + ec.message());
  const auto mpath = s_->path(artifact::kManifest);
  if (fs::exists(mpath)) {
    s_->manifest = read_json_file(mpath);
    json cfg;
    s_->config.to_json(cfg);
    s_->manifest["config"] = cfg;
    s_->manifest["seeds"] = s_->seeds.to_json();
  } else {
    s_->fresh_manifest();
  }
}

PipelineRunner::~PipelineRunner() = default;
PipelineRunner::PipelineRunner(PipelineRunner&&) noexcept = default;
PipelineRunner& PipelineRunner::operator=(PipelineRunner&&) noexcept = default;

const PipelineConfig& PipelineRunner::config() const noexcept { return s_->config; }
const StageSeeds& PipelineRunner::seeds() const noexcept { return s_->seeds; }
fs::path PipelineRunner::manifest_path() const { return s_->path(artifact::kManifest); }

void PipelineRunner::build_vocab() {
  auto& s = *s_;
  s.fresh_manifest();
  s.stage("build-vocab", {artifact::kStopwords, artifact::kSuffixes, artifact::kSplit, artifact::kVocabulary}, [&] {
    s.ensure_tokens();
    const auto& cfg = s.config;
    write_text_file(s.path(artifact::kStopwords), stopword_file_text(s.pre->stopwords));
    write_text_file(s.path(artifact::kSuffixes), suffix_file_text(s.pre->suffixes));
    s.record_artifact("stopwords", artifact::kStopwords);
    s.record_artifact("suffixes", artifact::kSuffixes);

    json split_json = {{"seed", s.seeds.split},
                       {"train_fraction", cfg.train_fraction},
                       {"stratified", cfg.stratified},
                       {"train_ids", json::array()},
                       {"test_ids", json::array()}};
    for (const auto& d : s.split->train.docs()) split_json["train_ids"].push_back(d.id);
    for (const auto& d : s.split->test.docs()) split_json["test_ids"].push_back(d.id);
    write_text_file(s.path(artifact::kSplit), split_json.dump() + "\n");
    s.record_artifact("split", artifact::kSplit);

    s.vocab = build_vocabulary(s.train_tokens, cfg.vocabulary_params(), s.lineage);
    s.vocab->save(s.path(artifact::kVocabulary));
    s.record_artifact("vocabulary", artifact::kVocabulary);

    const auto [lo, hi] = df_band(cfg.vocabulary_params(), s.split->train.size());
    s.manifest["corpus"] = {{"path", cfg.corpus.string()},
                            {"documents", s.corpus->size()},
                            {"fingerprint", content_fingerprint(*s.corpus)}};
    s.manifest["split"] = {{"seed", s.seeds.split},
                           {"train_fraction", cfg.train_fraction},
                           {"stratified", cfg.stratified},
                           {"train", balance_json(s.split->train)},
                           {"test", balance_json(s.split->test)}};
    s.manifest["preprocess_fingerprint"] = s.pre->fingerprint();
    s.manifest["lineage_fingerprint"] = s.lineage;
    s.manifest["stages"]["build-vocab"] = {{"terms", s.vocab->size()},
                                           {"documents", s.vocab->n_docs()},
                                           {"df_band", {lo, hi}},
                                           {"stopwords", s.pre->stopwords.size()},
                                           {"suffixes", s.pre->suffixes.suffixes().size()}};
    spdlog::info("vocabulary: {} terms from {} training documents", s.vocab->size(), s.vocab->n_docs());
  });
}

void PipelineRunner::train_embeddings() {
  auto& s = *s_;
  s.stage("train-embeddings", {artifact::kEmbeddingsText, artifact::kEmbeddingsBinary}, [&] {
    s.ensure_tokens();
    EmbeddingTrainReport rep;
    s.table =
        satdetect::train_embeddings(s.train_tokens, s.config.embedding_params(s.seeds.embedding), s.lineage, &rep);
    s.table->save_text(s.path(artifact::kEmbeddingsText));
    s.table->save_binary(s.path(artifact::kEmbeddingsBinary));
    s.record_artifact("embeddings", artifact::kEmbeddingsBinary);
    s.record_artifact("embeddings_text", artifact::kEmbeddingsText);
    s.manifest["stages"]["train-embeddings"] = {{"dim", s.table->dim()},
                                                {"terms", rep.vocabulary_size},
                                                {"training_tokens", rep.training_tokens},
                                                {"epoch_loss", rep.epoch_loss}};
    spdlog::info("embeddings: {} terms, {} dimensions", s.table->size(), s.table->dim());
  });
}

void PipelineRunner::encode() {
  auto& s = *s_;
  s.stage("encode", {artifact::kTrainCache, artifact::kTestCache}, [&] {
    s.ensure_tokens();
    s.ensure_vocab();
    s.ensure_table();
    const Encoder encoder(*s.vocab, *s.table);
    auto make = [&](const Corpus& part, const std::vector<TokenList>& tokens) {
      EncodedDataset ds;
      ds.rows = encoder.rows();
      ds.cols = encoder.cols();
      ds.fingerprint = s.lineage;
      ds.images = encoder.encode_batch(tokens);
      for (const auto& d : part.docs()) {
        ds.ids.push_back(d.id);
        ds.labels.push_back(d.label);
      }
      return ds;
    };
    s.train_set = make(s.split->train, s.train_tokens);
    s.test_set = make(s.split->test, s.test_tokens);
    save_encoded(*s.train_set, s.path(artifact::kTrainCache));
    save_encoded(*s.test_set, s.path(artifact::kTestCache));
    s.record_artifact("train_cache", artifact::kTrainCache);
    s.record_artifact("test_cache", artifact::kTestCache);
    s.manifest["stages"]["encode"] = {{"rows", encoder.rows()},
                                      {"cols", encoder.cols()},
                                      {"channels", 2},
                                      {"missing_terms", encoder.missing_terms()},
                                      {"train", s.train_set->size()},
                                      {"test", s.test_set->size()}};
  });
}

void PipelineRunner::train(const EpochCallback& on_epoch) {
  auto& s = *s_;
  s.stage("train", {artifact::kModel}, [&] {
    auto& data = s.ensure_encoded(s.train_set, "train_cache", artifact::kTrainCache);
    s.ensure_vocab();
    s.ensure_table();
    const nn::Shape shape{data.rows, data.cols, 2};
    s.model = nn::build_paper_model<float>(shape, s.seeds.init, s.config.model_options());
    const auto examples = as_examples(data);
    const auto tc = s.config.train_config(s.seeds.training);
    const auto rep = nn::train(*s.model, examples, tc, [&](const nn::EpochStats& st) {
      spdlog::info("epoch {}: loss {:.6f}, accuracy {:.4f}", st.epoch, st.loss, st.accuracy);
      if (on_epoch) on_epoch(st);
    });

    nn::ModelMetadata meta;
    meta.vocabulary_fingerprint = s.vocab->fingerprint();
    meta.embedding_fingerprint = s.table->fingerprint();
    meta.train_config = tc;
    meta.extra = {{"threshold", s.config.threshold}, {"lineage_fingerprint", s.lineage}};
    nn::save_model(*s.model, meta, s.path(artifact::kModel));
    s.record_artifact("model", artifact::kModel);

    json epochs = json::array();
    for (const auto& e : rep.epochs) epochs.push_back({{"epoch", e.epoch}, {"loss", e.loss}, {"accuracy", e.accuracy}});
    json layers = json::array();
    for (std::size_t i = 0; i < s.model->layer_count(); ++i) layers.push_back(s.model->layer(i).spec().describe());
    s.manifest["stages"]["train"] = {{"input_shape", shape},
                                     {"layers", layers},
                                     {"parameters", s.model->parameter_count()},
                                     {"epochs", epochs},
                                     {"stopped_early", rep.stopped_early}};
  });
}

json PipelineRunner::report() {
  auto& s = *s_;
  json report;
  s.stage("report", {artifact::kReportJson, artifact::kReportText}, [&] {
    auto& data = s.ensure_encoded(s.test_set, "test_cache", artifact::kTestCache);
    s.ensure_model();
    const auto examples = as_examples(data);
    const auto metrics = evaluate(*s.model, examples, s.config.threshold);
    json test;
    metrics.to_json(test);
    test["threshold"] = s.config.threshold;
    test["documents"] = data.size();

    const auto& m = s.manifest;
    report = {{"format", "satdetect-report"},
              {"version", kReportVersion},
              {"config", m.at("config")},
              {"seeds", m.at("seeds")},
              {"corpus", m.value("corpus", json::object())},
              {"split", m.value("split", json::object())},
              {"lineage_fingerprint", m.value("lineage_fingerprint", "")},
              {"vocabulary", m.at("stages").value("build-vocab", json::object())},
              {"embedding", m.at("stages").value("train-embeddings", json::object())},
              {"encoding", m.at("stages").value("encode", json::object())},
              {"model", m.at("stages").value("train", json::object())},
              {"test", test}};
    write_text_file(s.path(artifact::kReportJson), report.dump(2) + "\n");
    write_text_file(s.path(artifact::kReportText), render_report_text(report));
    s.record_artifact("report", artifact::kReportJson);
    s.manifest["status"] = "complete";
    spdlog::info("test accuracy {:.4f}, f1 {:.4f}", metrics.accuracy, metrics.f1);
  });
  return report;
}

json PipelineRunner::run(const EpochCallback& on_epoch) {
  build_vocab();
  train_embeddings();
  encode();
  train(on_epoch);
  return report();
}

json run_repeats(const PipelineConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  json runs = json::array();
  std::vector<double> acc, prec, rec, f1;
  for (std::size_t r = 0; r < config.repeats; ++r) {
    PipelineConfig c = config;
    c.seed = config.seed + r;
    c.repeats = 1;
    c.out_dir = config.out_dir / ("seed-" + std::to_string(c.seed));
    PipelineRunner runner(c);
    const auto rep = runner.run(on_epoch);
    const auto& t = rep.at("test");
    acc.push_back(t.at("accuracy").get<double>());
    prec.push_back(t.at("precision").get<double>());
    rec.push_back(t.at("recall").get<double>());
    f1.push_back(t.at("f1").get<double>());
    runs.push_back({{"seed", c.seed},
                    {"out_dir", c.out_dir.string()},
                    {"accuracy", acc.back()},
                    {"precision", prec.back()},
                    {"recall", rec.back()},
                    {"f1", f1.back()}});
  }
  auto stats = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    return json{{"mean", mean},
                {"std", sd},
                {"min", *std::min_element(v.begin(), v.end())},
                {"max", *std::max_element(v.begin(), v.end())}};
  };
  json summary = {
      {"format", "satdetect-summary"}, {"repeats", config.repeats}, {"runs", runs},   {"accuracy", stats(acc)},
      {"precision", stats(prec)},      {"recall", stats(rec)},      {"f1", stats(f1)}};
  write_text_file(config.out_dir / artifact::kSummary, summary.dump(2) + "\n");
  return summary;
}

std::string render_report_text(const json& report) {
  std::ostringstream os;
  os << std::fixed;
  const auto& cfg = report.at("config");
  os << "satdetect report\n";
  os << "preset " << cfg.value("preset", "") << ", master seed " << report.at("seeds").value("master", 0ULL) << "\n\n";

  if (const auto& c = report.value("corpus", json::object()); !c.empty()) {
    os << "corpus       " << c.value("documents", 0) << " documents\n";
  }
  if (const auto& sp = report.value("split", json::object()); !sp.empty()) {
    const auto& tr = sp.at("train");
    const auto& te = sp.at("test");
    os << "split        " << tr.value("documents", 0) << " train (" << tr.value("satire", 0) << " satire, "
       << tr.value("real", 0) << " real) / " << te.value("documents", 0) << " test (" << te.value("satire", 0)
       << " satire, " << te.value("real", 0) << " real)" << (sp.value("stratified", false) ? ", stratified" : "")
       << "\n";
  }
  if (const auto& v = report.value("vocabulary", json::object()); !v.empty()) {
    const auto band = v.at("df_band");
    os << "vocabulary   " << v.value("terms", 0) << " terms, df band [" << band[0].get<std::size_t>() << ", "
       << band[1].get<std::size_t>() << "] of " << v.value("documents", 0) << " documents\n";
  }
  if (const auto& e = report.value("embedding", json::object()); !e.empty()) {
    os << "embeddings   " << e.value("terms", 0) << " terms x " << e.value("dim", 0) << " dims";
    const auto& loss = e.at("epoch_loss");
    if (!loss.empty()) os << ", final loss " << std::setprecision(4) << loss.back().get<double>();
    os << "\n";
  }
  if (const auto& en = report.value("encoding", json::object()); !en.empty()) {
    os << "images       " << en.value("rows", 0) << " x " << en.value("cols", 0) << " x 2, "
       << en.value("missing_terms", 0) << " vocabulary terms without embedding\n";
  }
  if (const auto& m = report.value("model", json::object()); !m.empty()) {
    os << "model        " << m.value("parameters", 0) << " parameters\n";
    for (const auto& l : m.at("layers")) os << "  " << l.get<std::string>() << "\n";
    os << "\ntraining\n";
    for (const auto& ep : m.at("epochs")) {
      os << "  epoch " << std::setw(3) << ep.value("epoch", 0) << "  loss " << std::setprecision(6)
         << ep.value("loss", 0.0) << "  accuracy " << std::setprecision(4) << ep.value("accuracy", 0.0) << "\n";
    }
    if (m.value("stopped_early", false)) os << "  stopped early\n";
  }

  const auto& t = report.at("test");
  os << "\ntest set (" << t.value("documents", 0) << " documents, threshold " << std::setprecision(2)
     << t.value("threshold", 0.5) << ", positive class satire)\n";
  os << std::setprecision(4);
  os << "  accuracy   " << t.value("accuracy", 0.0) << "\n";
  os << "  precision  " << t.value("precision", 0.0) << "\n";
  os << "  recall     " << t.value("recall", 0.0) << "\n";
  os << "  f1         " << t.value("f1", 0.0) << "  (" << t.value("f1_definition", "") << ")\n";

  ConfusionMatrix cm;
  const auto& c = t.at("confusion");
  cm.tn = c[0][0].get<std::size_t>();
  cm.fp = c[0][1].get<std::size_t>();
  cm.fn = c[1][0].get<std::size_t>();
  cm.tp = c[1][1].get<std::size_t>();
  os << "\nconfusion matrix (counts)\n" << render_confusion_counts(cm);
  os << "\nconfusion matrix (percent of true class)\n" << render_confusion_percent(cm);
  return os.str();
}

// ---------------------------------------------------------------------------
// Predictor

struct Predictor::Impl {
  PipelineConfig config;
  PreprocessConfig pre;
  Vocabulary vocab;
  EmbeddingTable table;
  std::optional<Encoder> encoder;
  std::optional<nn::Model<float>> model;
  double threshold = 0.5;
};

Predictor::Predictor(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
Predictor::~Predictor() = default;
Predictor::Predictor(Predictor&&) noexcept = default;
Predictor& Predictor::operator=(Predictor&&) noexcept = default;

Predictor Predictor::open(const fs::path& manifest_arg) {
  const auto mpath = resolve_manifest(manifest_arg);
  const auto dir = mpath.parent_path();
  const json m = read_json_file(mpath);
  if (m.value("format", "") != "satdetect-manifest") {
    throw Error(ErrorCode::kFormatError, mpath.string() + " is not a satdetect manifest");
  }
  auto impl = std::make_unique<Impl>();
  try {
    impl->config = PipelineConfig::from_json(m.at("config"));
    const auto& arts = m.at("artifacts");
    auto artifact_path = [&](const std::string& key) {
      if (!arts.contains(key)) {
        throw Error(ErrorCode::kMissingFile, "the manifest has no " + key + " artifact; the run did not finish");
      }
      const fs::path p = dir / arts[key].at("path").get<std::string>();
      if (file_digest(p) != arts[key].at("digest").get<std::string>()) {
        throw Error(ErrorCode::kFingerprintMismatch, p.string() + " changed since it was recorded in the manifest");
      }
      return p;
    };

    const auto& cfg = impl->config;
    impl->pre.stopwords = StopList::load(artifact_path("stopwords"));
    impl->pre.suffixes = SuffixTable::load(artifact_path("suffixes"), cfg.min_stem_len);
    impl->pre.remove_stopwords = cfg.remove_stopwords;
    impl->pre.stem = cfg.stem;
    if (impl->pre.fingerprint() != m.at("preprocess_fingerprint").get<std::string>()) {
      throw Error(ErrorCode::kFingerprintMismatch, "stored preprocessing does not match the manifest");
    }

    const auto lineage = m.at("lineage_fingerprint").get<std::string>();
    impl->vocab = Vocabulary::load(artifact_path("vocabulary"));
    impl->table = EmbeddingTable::load_binary(artifact_path("embeddings"));
    nn::ModelMetadata meta;
    impl->model = nn::load_model<float>(artifact_path("model"), &meta);
    if (impl->vocab.fingerprint() != lineage) {
      throw Error(ErrorCode::kFingerprintMismatch, "vocabulary lineage differs from the manifest");
    }
    if (impl->table.fingerprint() != lineage) {
      throw Error(ErrorCode::kFingerprintMismatch, "embedding lineage differs from the manifest");
    }
    if (meta.vocabulary_fingerprint != lineage || meta.embedding_fingerprint != lineage) {
      throw Error(ErrorCode::kFingerprintMismatch, "model was trained on a different lineage than the manifest");
    }
    const nn::Shape expected{impl->vocab.size(), impl->table.dim(), 2};
    if (impl->model->input_shape() != expected) {
      throw Error(ErrorCode::kShapeMismatch, "model input " + nn::shape_string(impl->model->input_shape()) +
                                                 " does not match the encoder output " + nn::shape_string(expected));
    }
    impl->threshold = cfg.threshold;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, mpath.string() + ": " + e.what());
  }
  impl->encoder.emplace(impl->vocab, impl->table);
  return Predictor(std::move(impl));
}

DocImage Predictor::encode(std::string_view text) const { return impl_->encoder->encode(preprocess(text, impl_->pre)); }

nn::Prediction Predictor::predict(std::string_view text) const {
  const auto image = encode(text);
  const auto x = nn::to_tensor<float>(image.data, impl_->model->input_shape());
  return nn::classify(static_cast<double>(impl_->model->predict_proba(x)), impl_->threshold);
}

double Predictor::threshold() const noexcept { return impl_->threshold; }
const nn::Model<float>& Predictor::model() const noexcept { return *impl_->model; }
const PipelineConfig& Predictor::config() const noexcept { return impl_->config; }

std::size_t run_predict(const Predictor& predictor, std::istream& input, std::ostream& output, InputFormat format) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t count = 0;
  while (std::getline(input, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    json record = {{"index", count}};
    std::string text;
    if (format == InputFormat::kJsonl) {
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      json in;
      try {
        in = json::parse(line);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kMalformedInput, "line " + std::to_string(line_no) + ": " + e.what());
      }
      if (!in.is_object() || !in.contains("text") || !in["text"].is_string()) {
        throw Error(ErrorCode::kMalformedInput,
                    "line " + std::to_string(line_no) + ": expected an object with a string \"text\"");
      }
      text = in["text"].get<std::string>();
      if (in.contains("id")) {
        if (!in["id"].is_string() && !in["id"].is_number_integer()) {
          throw Error(ErrorCode::kMalformedInput,
                      "line " + std::to_string(line_no) + ": \"id\" must be a string or integer");
        }
        record["id"] = in["id"];
      }
    } else {
      text = std::move(line);
    }
    const auto p = predictor.predict(text);
    record["label"] = std::string(label_name(p.label));
    record["probability"] = p.probability;
    output << record.dump() << '\n';
    ++count;
  }
  return count;
}

EvalResult run_eval(const Predictor& predictor, const Corpus& corpus) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyTestSet, "the evaluation corpus is empty");
  ConfusionMatrix cm;
  for (const auto& d : corpus.docs()) cm.add(d.label, predictor.predict(d.text).label);
  EvalResult r;
  r.metrics = metrics_from_confusion(cm);
  r.counts_table = render_confusion_counts(cm);
  r.percent_table = render_confusion_percent(cm);
  return r;
}

}  // namespace satdetect
