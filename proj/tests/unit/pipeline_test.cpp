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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <memory>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "satdetect/error.hpp"
#include "satdetect/synthetic.hpp"

namespace satdetect {
namespace {

using nlohmann::json;
using testing::read_file;
using testing::TempDir;
using testing::write_file;

json read_json(const std::filesystem::path& p) { return json::parse(read_file(p)); }

PipelineConfig small_config(const TempDir& dir) {
  PipelineConfig c;
  c.corpus = dir / "corpus.jsonl";
  c.out_dir = dir / "run";
  c.max_terms = 40;
  c.epochs = 2;
  c.batch_size = 16;
  c.seed = 3;
  return c;
}

void write_small_corpus(const TempDir& dir) {
  SyntheticCorpusParams p;
  p.documents = 120;
  p.shared_vocabulary = 120;
  p.marker_vocabulary = 15;
  p.min_length = 30;
  p.max_length = 50;
  save_corpus(make_synthetic_corpus(p), dir / "corpus.jsonl");
}

/// One finished run shared by the tests that only read from it.
class FinishedRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = std::make_unique<TempDir>();
    write_small_corpus(*dir_);
    PipelineRunner runner(small_config(*dir_));
    report_ = runner.run();
  }
  static void TearDownTestSuite() { dir_.reset(); }

  static std::filesystem::path out() { return dir_->path() / "run"; }

  static std::unique_ptr<TempDir> dir_;
  static json report_;
};

std::unique_ptr<TempDir> FinishedRun::dir_;
json FinishedRun::report_;

TEST_F(FinishedRun, ReportHasMetricsAndLineage) {
  for (const char* key :
       {"config", "seeds", "split", "vocabulary", "embedding", "model", "test", "lineage_fingerprint"}) {
    EXPECT_TRUE(report_.contains(key)) << key;
  }
  const auto& t = report_["test"];
  EXPECT_GE(t["accuracy"].get<double>(), 0.0);
  EXPECT_LE(t["accuracy"].get<double>(), 1.0);
  EXPECT_EQ(t["documents"].get<std::size_t>(), 36u);
  EXPECT_EQ(read_json(out() / "report.json"), report_);
  EXPECT_EQ(read_json(out() / "manifest.json")["status"], "complete");
  EXPECT_FALSE(read_file(out() / "report.txt").empty());
}

TEST_F(FinishedRun, PredictorAgreesWithReport) {
  const auto predictor = Predictor::open(out());
  const auto corpus = load_corpus(dir_->path() / "corpus.jsonl");
  const auto parts = split(corpus, predictor.config().split_spec(StageSeeds::derive(3).split));
  const auto r = run_eval(predictor, parts.test);
  EXPECT_EQ(r.metrics.confusion.total(), parts.test.size());
  EXPECT_DOUBLE_EQ(r.metrics.accuracy, report_["test"]["accuracy"].get<double>());
  EXPECT_DOUBLE_EQ(r.metrics.f1, report_["test"]["f1"].get<double>());
  EXPECT_FALSE(r.percent_table.empty());
}

TEST_F(FinishedRun, ReopenedPredictorIsBitIdentical) {
  const auto a = Predictor::open(out());
  const auto b = Predictor::open(out() / "manifest.json");
  const auto corpus = load_corpus(dir_->path() / "corpus.jsonl");
  for (std::size_t i = 0; i < 20; ++i) {
    EXPECT_EQ(a.predict(corpus[i].text).probability, b.predict(corpus[i].text).probability);
  }
}

TEST_F(FinishedRun, PredictEdgeDocuments) {
  const auto predictor = Predictor::open(out());
  for (const char* text : {"", "এবং ও কিন্তু", "১২৩ !!! ..."}) {
    const auto p = predictor.predict(text);
    EXPECT_GT(p.probability, 0.0);
    EXPECT_LT(p.probability, 1.0);
    for (double x : predictor.encode(text).data) EXPECT_EQ(x, 0.0);
  }
}

TEST_F(FinishedRun, RunPredictKeepsOrderAndIds) {
  const auto predictor = Predictor::open(out());
  const auto corpus = load_corpus(dir_->path() / "corpus.jsonl");
  std::ostringstream in_text;
  for (std::size_t i = 0; i < 5; ++i) {
    json j = {{"text", corpus[i].text}};
    if (i % 2 == 0) j["id"] = corpus[i].id;
    in_text << j.dump() << "\n";
    if (i == 2) in_text << "\n";
  }
  std::istringstream in(in_text.str());
  std::ostringstream out_text;
  EXPECT_EQ(run_predict(predictor, in, out_text), 5u);
  std::istringstream lines(out_text.str());
  std::string line;
  for (std::size_t i = 0; i < 5; ++i) {
    ASSERT_TRUE(std::getline(lines, line));
    const auto j = json::parse(line);
    EXPECT_EQ(j["index"].get<std::size_t>(), i);
    EXPECT_EQ(j.contains("id"), i % 2 == 0);
    const auto p = predictor.predict(corpus[i].text);
    EXPECT_EQ(j["probability"].get<double>(), p.probability);
    EXPECT_EQ(j["label"].get<std::string>(), std::string(label_name(p.label)));
  }
  EXPECT_FALSE(std::getline(lines, line));

  std::istringstream empty("");
  std::ostringstream none;
  EXPECT_EQ(run_predict(predictor, empty, none), 0u);
  EXPECT_TRUE(none.str().empty());

  std::istringstream raw("first line\nsecond line\n");
  std::ostringstream raw_out;
  EXPECT_EQ(run_predict(predictor, raw, raw_out, InputFormat::kLines), 2u);
}

TEST_F(FinishedRun, RunPredictRejectsMalformedLines) {
  const auto predictor = Predictor::open(out());
  for (const char* bad :
       {"{\"text\": \"ok\"}\n[1, 2]\n", "{\"text\": \"ok\"}\n{\"id\": \"x\"}\n", "{\"text\": \"ok\"}\n{\"text\": 5}\n",
        "{\"text\": \"ok\"}\n{broken\n", "{\"text\": \"ok\"}\n{\"text\": \"a\", \"id\": [1]}\n"}) {
    std::istringstream in(bad);
    std::ostringstream sink;
    try {
      run_predict(predictor, in, sink);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kMalformedInput);
      EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
  }
}

TEST(Pipeline, RerunGivesByteIdenticalReport) {
  TempDir dir;
  write_small_corpus(dir);
  const auto config = small_config(dir);
  PipelineRunner(config).run();
  const auto first = read_file(config.out_dir / "report.json");
  const auto first_model = read_file(config.out_dir / "model.bin");
  PipelineRunner(config).run();
  EXPECT_EQ(read_file(config.out_dir / "report.json"), first);
  EXPECT_EQ(read_file(config.out_dir / "model.bin"), first_model);
}

TEST(Pipeline, StageByStageMatchesRun) {
  TempDir dir;
  write_small_corpus(dir);
  auto config = small_config(dir);
  const auto whole = PipelineRunner(config).run();
  config.out_dir = dir / "staged";
  // A fresh runner per stage forces every artifact through disk.
  PipelineRunner(config).build_vocab();
  PipelineRunner(config).train_embeddings();
  PipelineRunner(config).encode();
  PipelineRunner(config).train();
  const auto staged = PipelineRunner(config).report();
  EXPECT_EQ(staged["test"], whole["test"]);
  EXPECT_EQ(staged["lineage_fingerprint"], whole["lineage_fingerprint"]);
  EXPECT_EQ(read_file(config.out_dir / "model.bin"), read_file(dir / "run" / "model.bin"));
}

TEST(Pipeline, MissingCorpusNamesStage) {
  TempDir dir;
  auto config = small_config(dir);
  try {
    PipelineRunner(config).build_vocab();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingFile);
    EXPECT_NE(std::string(e.what()).find("build-vocab"), std::string::npos) << e.what();
  }
  const auto manifest = read_json(config.out_dir / "manifest.json");
  EXPECT_EQ(manifest["status"], "incomplete");
  EXPECT_EQ(manifest["failed_stage"], "build-vocab");
}

TEST(Pipeline, LaterStageWithoutPrerequisitesFails) {
  TempDir dir;
  write_small_corpus(dir);
  const auto config = small_config(dir);
  EXPECT_THROW(PipelineRunner(config).train(), Error);
}

TEST(Pipeline, TamperedArtifactIsDetected) {
  TempDir dir;
  write_small_corpus(dir);
  const auto config = small_config(dir);
  PipelineRunner(config).run();
  auto vocab = read_json(config.out_dir / "vocabulary.json");
  write_file(config.out_dir / "vocabulary.json", vocab.dump(1));
  try {
    Predictor::open(config.out_dir);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFingerprintMismatch);
  }
}

TEST(Pipeline, RepeatsWriteSummary) {
  TempDir dir;
  write_small_corpus(dir);
  auto config = small_config(dir);
  config.epochs = 1;
  config.repeats = 2;
  const auto summary = run_repeats(config);
  EXPECT_TRUE(std::filesystem::exists(config.out_dir / "seed-3" / "report.json"));
  EXPECT_TRUE(std::filesystem::exists(config.out_dir / "seed-4" / "report.json"));
  EXPECT_EQ(read_json(config.out_dir / "summary.json"), summary);
  EXPECT_TRUE(summary.contains("accuracy"));
}

/// Threshold model on a one-value input: p = sigmoid(20 x - 10).
nn::Model<double> step_model() {
  nn::Model<double> m({1}, {nn::LayerSpec::dense(1, nn::Activation::kSigmoid)}, 0);
  m.layer(0).import_parameter(0, std::vector<double>{20.0});
  m.layer(0).import_parameter(1, std::vector<double>{-10.0});
  return m;
}

TEST(Evaluate, AllCorrectAndInverted) {
  const auto model = step_model();
  const std::vector<double> one{1.0}, zero{0.0};
  const std::vector<nn::Example> right{{one, Label::kSatire}, {zero, Label::kReal}, {one, Label::kSatire}};
  const std::vector<nn::Example> wrong{{one, Label::kReal}, {zero, Label::kSatire}};
  EXPECT_EQ(evaluate(model, right).accuracy, 1.0);
  EXPECT_EQ(evaluate(model, right).f1, 1.0);
  EXPECT_EQ(evaluate(model, wrong).accuracy, 0.0);
  EXPECT_THROW(evaluate(model, std::vector<nn::Example>{}), Error);
}

TEST(Evaluate, MatchesBruteForce) {
  const auto model = step_model();
  Rng rng(99);
  std::vector<std::vector<double>> values;
  for (int i = 0; i < 200; ++i) values.push_back({rng.uniform(0, 1)});
  std::vector<nn::Example> data;
  std::vector<Label> truth, predicted;
  for (const auto& v : values) {
    const Label y = rng.below(2) ? Label::kSatire : Label::kReal;
    data.push_back({v, y});
    truth.push_back(y);
    const double p = 1.0 / (1.0 + std::exp(-(20.0 * v[0] - 10.0)));
    predicted.push_back(p >= 0.7 ? Label::kSatire : Label::kReal);
  }
  const auto got = evaluate(model, data, 0.7);
  const auto expected = compute_metrics(truth, predicted);
  EXPECT_EQ(got.confusion.tp, expected.confusion.tp);
  EXPECT_EQ(got.confusion.fp, expected.confusion.fp);
  EXPECT_EQ(got.confusion.fn, expected.confusion.fn);
  EXPECT_EQ(got.confusion.tn, expected.confusion.tn);
}

TEST(StageSeeds, DerivedFromMaster) {
  const auto s = StageSeeds::derive(42);
  EXPECT_EQ(s.master, 42u);
  EXPECT_EQ(s.split, derive_seed(42, "split"));
  EXPECT_EQ(s.training, derive_seed(42, "training"));
  EXPECT_NE(s.init, s.embedding);
}

}  // namespace
}  // namespace satdetect
