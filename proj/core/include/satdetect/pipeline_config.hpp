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
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "satdetect/corpus.hpp"
#include "satdetect/embedding.hpp"
#include "satdetect/nn/model.hpp"
#include "satdetect/nn/train.hpp"
#include "satdetect/text.hpp"
#include "satdetect/tfidf.hpp"

namespace satdetect {

/// Fully resolved pipeline settings. Sources apply in order: preset
/// defaults, then the config file, then command-line overrides.
struct PipelineConfig {
  std::string preset = "desk";
  std::filesystem::path corpus;
  std::filesystem::path out_dir = "satdetect-out";
  std::uint64_t seed = 42;

  double train_fraction = 0.7;
  bool stratified = true;

  std::string stopwords;  ///< empty = bundled Bangla list
  std::string suffixes;   ///< empty = bundled Bangla table
  std::size_t min_stem_len = SuffixTable::kDefaultMinStemLength;
  bool stem = true;
  bool remove_stopwords = true;

  double min_df = 0.10;
  double max_df = 0.70;
  std::size_t max_terms = 200;

  std::size_t dim = 10;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t emb_epochs = 5;
  double emb_lr = 0.025;
  std::size_t min_count = 2;

  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  double lr = 1e-3;
  std::string optimizer = "adam";
  std::size_t kernel = 3;
  std::string conv1_activation = "none";
  std::size_t patience = 0;  ///< 0 disables early stopping
  double threshold = 0.5;
  std::size_t repeats = 1;

  /// "desk" (200 terms) or "paper" (1000 terms); both use 10-d embeddings.
  static PipelineConfig for_preset(std::string_view preset);

  /// Sets one key; dashes in keys are treated as underscores. Throws
  /// InvalidArgument for unknown keys or unparsable values.
  void set(std::string_view key, std::string_view value);
  /// Validates ranges; throws InvalidArgument.
  void validate() const;

  /// "key = value" lines in a stable order.
  std::string to_text() const;
  void to_json(nlohmann::json& j) const;
  static PipelineConfig from_json(const nlohmann::json& j);

  PreprocessConfig preprocess_config() const;
  VocabularyParams vocabulary_params() const;
  EmbeddingParams embedding_params(std::uint64_t seed) const;
  nn::PaperModelOptions model_options() const;
  nn::TrainConfig train_config(std::uint64_t seed) const;
  SplitSpec split_spec(std::uint64_t seed) const;
};

/// Parses "key = value" lines; blank lines and '#' comments are skipped.
std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text);
std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path);

/// Resolves a config from file entries and overrides, picking the preset
/// from the overrides first, then the file, then "desk".
PipelineConfig resolve_config(const std::vector<std::pair<std::string, std::string>>& file_entries,
                              const std::vector<std::pair<std::string, std::string>>& overrides);

}  // namespace satdetect
