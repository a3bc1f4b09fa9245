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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <functional>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "satdetect/embedding.hpp"
#include "satdetect/encoder.hpp"
#include "satdetect/error.hpp"
#include "satdetect/nn/model.hpp"
#include "satdetect/nn/serialize.hpp"
#include "satdetect/nn/train.hpp"
#include "satdetect/pipeline.hpp"
#include "satdetect/synthetic.hpp"
#include "satdetect/tfidf.hpp"

namespace {

using namespace satdetect;
using nlohmann::json;
using testing::TempDir;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double cpu_seconds_since(std::clock_t c0) { return static_cast<double>(std::clock() - c0) / CLOCKS_PER_SEC; }

template <typename... Args>
std::string format(const char* fmt, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

Outcome full_architecture() {
  const auto t0 = Clock::now();
  const auto model = nn::build_paper_model<float>({1000, 10, 2}, 1);
  const std::vector<nn::LayerSpec> expected = {
      nn::LayerSpec::conv2d(256, 3, 3, nn::Activation::kNone),
      nn::LayerSpec::conv2d(128, 3, 3, nn::Activation::kRelu),
      nn::LayerSpec::max_pool2d(2, 2),
      nn::LayerSpec::dropout(0.25),
      nn::LayerSpec::flatten(),
      nn::LayerSpec::dense(512, nn::Activation::kRelu),
      nn::LayerSpec::dropout(0.5),
      nn::LayerSpec::dense(1, nn::Activation::kSigmoid),
  };
  if (model.specs() != expected) return {false, "layer stack differs from the expected architecture"};
  Rng rng(2);
  nn::Tensor<float> x({1000, 10, 2});
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.below(10) == 0 ? static_cast<float>(rng.uniform(0, 3)) : 0.0f;
  const auto t1 = Clock::now();
  const float p = model.predict_proba(x);
  const double forward = seconds_since(t1);
  const double total = seconds_since(t0);
  const bool ok = p > 0.0f && p < 1.0f && forward < 60.0;
  return {ok, format("p=%.6f, %zu parameters, forward %.2fs (build+forward %.2fs)", static_cast<double>(p),
                     model.parameter_count(), forward, total)};
}

struct SyntheticRun {
  std::uint64_t seed;
  double accuracy;
  double wall;
  double cpu;
};

std::vector<SyntheticRun> g_runs;
json g_first_report;

Outcome synthetic_accuracy(const TempDir& dir) {
  const auto corpus = dir / "synthetic.jsonl";
  save_corpus(make_synthetic_corpus({}), corpus);
  int passing = 0;
  std::ostringstream detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto config = PipelineConfig::for_preset("desk");
    config.corpus = corpus;
    config.out_dir = dir / ("seed-" + std::to_string(seed));
    config.seed = seed;
    const auto t0 = Clock::now();
    const auto c0 = std::clock();
    const auto report = PipelineRunner(config).run();
    SyntheticRun r{seed, report.at("test").at("accuracy").get<double>(), seconds_since(t0), cpu_seconds_since(c0)};
    if (seed == 1) g_first_report = report;
    g_runs.push_back(r);
    const bool ok = r.accuracy >= 0.95 && r.cpu < 600.0;
    passing += ok ? 1 : 0;
    detail << format("seed %llu acc=%.4f cpu=%.0fs; ", static_cast<unsigned long long>(seed), r.accuracy, r.cpu);
    std::fprintf(stderr, "  synthetic seed %llu: accuracy %.4f, wall %.1fs, cpu %.1fs\n",
                 static_cast<unsigned long long>(seed), r.accuracy, r.wall, r.cpu);
  }
  detail << passing << "/5 seeds pass";
  return {passing >= 4, detail.str()};
}

Outcome tfidf_oracle() {
  Rng rng(1234);
  std::size_t vectors = 0;
  std::size_t empty = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto docs = testing::random_token_corpus(rng, 20, 50);
    const std::size_t cap = trial % 2 == 0 ? 1000 : 1 + rng.below(10);
    const auto brute = testing::brute_vocabulary(docs, 0.10, 0.70, cap);
    if (brute.terms.empty()) {
      try {
        build_vocabulary(docs, {0.10, 0.70, cap});
        return {false, format("corpus %d: expected EmptyVocabulary", trial)};
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kEmptyVocabulary) return {false, format("corpus %d: wrong error", trial)};
      }
      ++empty;
      continue;
    }
    const auto vocab = build_vocabulary(docs, {0.10, 0.70, cap});
    if (vocab.terms() != brute.terms || vocab.df() != brute.df) {
      return {false, format("corpus %d: vocabulary differs", trial)};
    }
    for (const auto& d : docs) {
      const auto got = tfidf_vector(d, vocab);
      const auto want = testing::brute_tfidf(d, brute);
      for (std::size_t i = 0; i < want.size(); ++i) {
        if (!same_bits(got[i], want[i])) return {false, format("corpus %d: tf-idf value differs", trial)};
      }
      ++vectors;
    }
  }
  return {true, format("100 corpora, %zu vectors compared exactly, %zu empty-vocabulary cases", vectors, empty)};
}

Outcome gradient_check_tiny() {
  const auto t0 = Clock::now();
  const std::vector<nn::LayerSpec> specs = {
      nn::LayerSpec::conv2d(2, 3, 3, nn::Activation::kNone),
      nn::LayerSpec::conv2d(2, 3, 3, nn::Activation::kRelu),
      nn::LayerSpec::max_pool2d(2, 2),
      nn::LayerSpec::flatten(),
      nn::LayerSpec::dense(4, nn::Activation::kRelu),
      nn::LayerSpec::dense(1, nn::Activation::kSigmoid),
  };
  Rng rng(77);
  double worst = 0.0;
  std::size_t checked = 0;
  for (int draw = 0; draw < 10; ++draw) {
    nn::Model<double> model({8, 6, 2}, specs, 1000 + draw);
    for (auto* param : model.parameters()) {
      for (auto& v : param->value) v += rng.uniform(-0.1, 0.1);
    }
    nn::Tensor<double> x({8, 6, 2});
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(0.0, 2.0);
    const auto r = nn::gradient_check(model, x, draw % 2);
    if (!r.valid) return {false, r.message};
    worst = std::max(worst, r.max_relative_error);
    checked += r.checked;
  }
  const double elapsed = seconds_since(t0);
  return {worst <= 1e-4 && elapsed < 120.0,
          format("10 draws, %zu parameters checked, max relative error %.3e, %.2fs", checked, worst, elapsed)};
}

Outcome sign_split_properties() {
  Rng rng(55);
  std::size_t elements = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t rows = 1 + rng.below(50), cols = 1 + rng.below(12);
    std::vector<double> m(rows * cols);
    for (auto& v : m) v = rng.below(4) == 0 ? 0.0 : rng.uniform(-100, 100);
    const auto img = sign_split(m, rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        const double p = img.at(i, j, 0), n = img.at(i, j, 1);
        if (!same_bits(p - n, m[i * cols + j]) && !(p - n == 0.0 && m[i * cols + j] == 0.0)) {
          return {false, format("matrix %d: reconstruction differs", trial)};
        }
        if (std::min(p, n) != 0.0) return {false, format("matrix %d: both channels nonzero", trial)};
        ++elements;
      }
    }
  }
  return {true, format("1000 matrices, %zu elements", elements)};
}

Outcome cosine_and_analogy() {
  Rng rng(66);
  double worst_self = 0.0, worst_scale = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 1 + rng.below(32);
    std::vector<double> u(d), v(d), s(d);
    for (auto& x : u) x = rng.uniform(-10, 10);
    for (auto& x : v) x = rng.uniform(-10, 10);
    const double alpha = std::exp(rng.uniform(-6, 6));
    for (std::size_t i = 0; i < d; ++i) s[i] = alpha * u[i];
    worst_self = std::max(worst_self, std::abs(cosine(u, u) - 1.0));
    worst_scale = std::max(worst_scale, std::abs(cosine(s, v) - cosine(u, v)));
  }
  int planted_first = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 10;
    const std::size_t n = 5 + rng.below(20);
    std::vector<std::string> terms;
    std::vector<double> flat;
    std::vector<std::vector<double>> vecs;
    for (std::size_t t = 0; t < n; ++t) {
      std::vector<double> v(d);
      for (auto& x : v) x = rng.uniform(-1, 1);
      vecs.push_back(v);
    }
    // Term 3 is planted at exactly V_1 - V_0 + V_2.
    for (std::size_t j = 0; j < d; ++j) vecs[3][j] = vecs[1][j] - vecs[0][j] + vecs[2][j];
    for (std::size_t t = 0; t < n; ++t) {
      terms.push_back("w" + std::to_string(t));
      flat.insert(flat.end(), vecs[t].begin(), vecs[t].end());
    }
    const EmbeddingTable table(terms, flat, d);
    const auto r = analogy("w0", "w1", "w2", table);
    if (!r.neighbors.empty() && r.neighbors.front().first == "w3") ++planted_first;
  }
  const bool ok = worst_self <= 1e-12 && worst_scale <= 1e-12 && planted_first == 100;
  return {ok, format("max |cos(v,v)-1|=%.2e, max scale drift=%.2e, planted answer first in %d/100", worst_self,
                     worst_scale, planted_first)};
}

Outcome embedding_signal() {
  const auto docs = testing::shared_context_corpus();
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    EmbeddingParams params;
    params.seed = seed;
    params.min_count = 1;
    const auto t = train_embeddings(docs, params);
    if (cosine(t.vector("alpha"), t.vector("beta")) > cosine(t.vector("alpha"), t.vector("gamma"))) ++wins;
  }
  return {wins >= 19, format("cos(A,B) > cos(A,C) for %d/20 seeds", wins)};
}

Outcome determinism_and_round_trip(const TempDir& dir) {
  std::ostringstream detail;
  bool ok = true;

  // Same config and seed in a second directory.
  if (g_first_report.is_null()) {
    ok = false;
    detail << "no first run to compare; ";
  } else {
    auto config = PipelineConfig::for_preset("desk");
    config.corpus = dir / "synthetic.jsonl";
    config.out_dir = dir / "rerun";
    config.seed = 1;
    auto again = PipelineRunner(config).run();
    auto first = g_first_report;
    first["config"].erase("out_dir");
    again["config"].erase("out_dir");
    const bool same_metrics = first.at("test") == again.at("test");
    const bool same_report = first == again;
    ok = ok && same_metrics && same_report;
    detail << "rerun metrics " << (same_metrics ? "identical" : "DIFFER") << ", full report "
           << (same_report ? "identical" : "DIFFERS") << "; ";
  }

  // Save and reload vocabulary, embeddings and model outside the pipeline.
  const auto corpus = make_synthetic_corpus({});
  const auto pre = PreprocessConfig::bangla_default();
  std::vector<TokenList> train;
  std::vector<Label> labels;
  for (std::size_t i = 0; i < 200; ++i) {
    train.push_back(preprocess(corpus[i * 5].text, pre));
    labels.push_back(corpus[i * 5].label);
  }
  const auto vocab = build_vocabulary(train, {0.10, 0.70, 200}, "acceptance");
  EmbeddingParams ep;
  ep.seed = 9;
  const auto table = train_embeddings(train, ep, "acceptance");
  const Encoder encoder(vocab, table);
  const nn::Shape shape{vocab.size(), table.dim(), 2};
  auto model = nn::build_paper_model<float>(shape, 11);
  {
    std::vector<DocImage> images;
    for (const auto& d : train) images.push_back(encoder.encode(d));
    std::vector<nn::Example> examples;
    for (std::size_t i = 0; i < 64; ++i) examples.push_back({images[i].data, labels[i]});
    nn::TrainConfig tc;
    tc.epochs = 1;
    tc.seed = 12;
    nn::train(model, std::span<const nn::Example>(examples), tc);
  }
  vocab.save(dir / "rt-vocabulary.json");
  table.save_text(dir / "rt-embeddings.txt");
  table.save_binary(dir / "rt-embeddings.bin");
  nn::save_model(model, {}, dir / "rt-model.bin");
  const auto vocab2 = Vocabulary::load(dir / "rt-vocabulary.json");
  const auto table_text = EmbeddingTable::load_text(dir / "rt-embeddings.txt");
  const auto table_bin = EmbeddingTable::load_binary(dir / "rt-embeddings.bin");
  const auto model2 = nn::load_model<float>(dir / "rt-model.bin");
  const Encoder enc_text(vocab2, table_text);
  const Encoder enc_bin(vocab2, table_bin);

  Rng rng(13);
  const auto& terms = vocab.terms();
  int identical = 0;
  for (int doc = 0; doc < 100; ++doc) {
    TokenList tokens;
    for (std::size_t k = 0, n = rng.below(80); k < n; ++k) {
      tokens.push_back(rng.below(5) == 0 ? "unseen" + std::to_string(rng.below(50)) : terms[rng.below(terms.size())]);
    }
    const float p0 = model.predict_proba(nn::to_tensor<float>(encoder.encode(tokens).data, shape));
    const float p1 = model2.predict_proba(nn::to_tensor<float>(enc_text.encode(tokens).data, shape));
    const float p2 = model2.predict_proba(nn::to_tensor<float>(enc_bin.encode(tokens).data, shape));
    if (std::memcmp(&p0, &p1, sizeof(float)) == 0 && std::memcmp(&p0, &p2, sizeof(float)) == 0) ++identical;
  }
  ok = ok && identical == 100;
  detail << "round trip bit-identical on " << identical << "/100 documents";
  return {ok, detail.str()};
}

}  // namespace

int main() {
  TempDir dir;
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"full-architecture", full_architecture},
      {"synthetic-accuracy", [&] { return synthetic_accuracy(dir); }},
      {"tfidf-oracle", tfidf_oracle},
      {"gradient-check", gradient_check_tiny},
      {"sign-split", sign_split_properties},
      {"cosine-analogy", cosine_and_analogy},
      {"embedding-signal", embedding_signal},
      {"determinism-round-trip", [&] { return determinism_and_round_trip(dir); }},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("[%s] %-24s %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
