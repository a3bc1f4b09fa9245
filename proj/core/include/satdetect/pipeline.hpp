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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "satdetect/encoder.hpp"
#include "satdetect/metrics.hpp"
#include "satdetect/nn/model.hpp"
#include "satdetect/nn/train.hpp"
#include "satdetect/pipeline_config.hpp"

namespace satdetect {

/// Per-stage seeds derived from the master seed.
struct StageSeeds {
  std::uint64_t master = 0;
  std::uint64_t split = 0;
  std::uint64_t embedding = 0;
  std::uint64_t init = 0;
  std::uint64_t training = 0;  ///< shuffling and dropout

  static StageSeeds derive(std::uint64_t master) noexcept;
  nlohmann::json to_json() const;
};

/// Scores `model` on `data`; SATIRE iff p >= threshold. Throws EmptyTestSet.
template <typename T>
Metrics evaluate(const nn::Model<T>& model, std::span<const nn::Example> data, double threshold = 0.5);

extern template Metrics evaluate<float>(const nn::Model<float>&, std::span<const nn::Example>, double);
extern template Metrics evaluate<double>(const nn::Model<double>&, std::span<const nn::Example>, double);

/// Labeled examples viewing the images of an encoded dataset.
std::vector<nn::Example> as_examples(const EncodedDataset& dataset);

/// Artifact file names inside the output directory.
namespace artifact {
inline constexpr std::string_view kManifest = "manifest.json";
inline constexpr std::string_view kResolvedConfig = "config.resolved";
inline constexpr std::string_view kStopwords = "stopwords.txt";
inline constexpr std::string_view kSuffixes = "suffixes.txt";
inline constexpr std::string_view kSplit = "split.json";
inline constexpr std::string_view kVocabulary = "vocabulary.json";
inline constexpr std::string_view kEmbeddingsText = "embeddings.txt";
inline constexpr std::string_view kEmbeddingsBinary = "embeddings.bin";
inline constexpr std::string_view kTrainCache = "train.cache";
inline constexpr std::string_view kTestCache = "test.cache";
inline constexpr std::string_view kModel = "model.bin";
inline constexpr std::string_view kReportJson = "report.json";
inline constexpr std::string_view kReportText = "report.txt";
inline constexpr std::string_view kSummary = "summary.json";
}  // namespace artifact

using EpochCallback = std::function<void(const nn::EpochStats&)>;

/// Runs the pipeline stages against one output directory. Each stage reuses
/// what earlier stages computed in this process and otherwise reloads their
/// artifacts through the manifest. A failing stage removes the files it was
/// writing, marks the manifest incomplete and rethrows with the stage name.
class PipelineRunner {
 public:
  explicit PipelineRunner(PipelineConfig config);
  ~PipelineRunner();
  PipelineRunner(PipelineRunner&&) noexcept;
  PipelineRunner& operator=(PipelineRunner&&) noexcept;

  const PipelineConfig& config() const noexcept;
  const StageSeeds& seeds() const noexcept;
  std::filesystem::path manifest_path() const;

  /// preprocess -> split -> build_vocabulary
  void build_vocab();
  void train_embeddings();
  void encode();
  void train(const EpochCallback& on_epoch = {});
  /// Evaluates on the test split and writes report.json and report.txt.
  nlohmann::json report();
  /// All stages in order; returns the report.
  nlohmann::json run(const EpochCallback& on_epoch = {});

 private:
  struct State;
  std::unique_ptr<State> s_;
};

/// Runs config.repeats pipelines with seeds seed, seed+1, ... in
/// out_dir/seed-<n>, and writes a summary of the test metrics.
nlohmann::json run_repeats(const PipelineConfig& config, const EpochCallback& on_epoch = {});

/// Plain-text rendering of a report.
std::string render_report_text(const nlohmann::json& report);

/// Loads a finished run and classifies raw text. Opening checks that the
/// stored preprocessing, vocabulary, embeddings and model share one lineage
/// and that no artifact changed since it was recorded.
class Predictor {
 public:
  /// Accepts the manifest file or the directory holding it.
  /// Throws FingerprintMismatch, MissingFile or FormatError.
  static Predictor open(const std::filesystem::path& manifest);

  ~Predictor();
  Predictor(Predictor&&) noexcept;
  Predictor& operator=(Predictor&&) noexcept;

  nn::Prediction predict(std::string_view text) const;
  DocImage encode(std::string_view text) const;
  double threshold() const noexcept;
  const nn::Model<float>& model() const noexcept;
  const PipelineConfig& config() const noexcept;

 private:
  struct Impl;
  explicit Predictor(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

enum class InputFormat {
  kJsonl,  ///< one {"text": ..., "id": optional} object per non-blank line
  kLines,  ///< each line is one document
};

/// Writes one {"index", "id"?, "label", "probability"} JSON line per input
/// document, in input order. Throws MalformedInput with the line number.
/// Returns the number of documents.
std::size_t run_predict(const Predictor& predictor, std::istream& input, std::ostream& output,
                        InputFormat format = InputFormat::kJsonl);

struct EvalResult {
  Metrics metrics;
  std::string counts_table;
  std::string percent_table;
};

/// Classifies every document of a labeled corpus.
EvalResult run_eval(const Predictor& predictor, const Corpus& corpus);

}  // namespace satdetect
