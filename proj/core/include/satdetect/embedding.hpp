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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "satdetect/text.hpp"

namespace satdetect {

struct EmbeddingParams {
  std::size_t dim = 10;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  std::size_t min_count = 2;
  std::uint64_t seed = 1;
};

/// Dense term vectors stored row-major in one buffer.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::vector<std::string> terms, std::vector<double> vectors, std::size_t dim,
                 std::string fingerprint = {});

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return terms_.size(); }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::string& fingerprint() const noexcept { return fingerprint_; }
  std::span<const double> data() const noexcept { return vectors_; }

  std::optional<std::size_t> index_of(std::string_view term) const;
  bool contains(std::string_view term) const { return index_of(term).has_value(); }
  std::span<const double> vector(std::size_t row) const { return {vectors_.data() + row * dim_, dim_}; }
  /// Throws UnknownTerm.
  std::span<const double> vector(std::string_view term) const;

  /// Header "count dim [fingerprint]", then "term v1 ... v_dim" per line.
  /// Values use shortest round-trip formatting, independent of locale.
  void save_text(const std::filesystem::path& path) const;
  static EmbeddingTable load_text(const std::filesystem::path& path);
  /// Magic "SDEMB\0\0\1", u64 count, u64 dim, length-prefixed fingerprint,
  /// then per term a length-prefixed UTF-8 string and dim little-endian doubles.
  void save_binary(const std::filesystem::path& path) const;
  static EmbeddingTable load_binary(const std::filesystem::path& path);

 private:
  std::vector<std::string> terms_;
  std::vector<double> vectors_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t dim_ = 0;
  std::string fingerprint_;
};

struct EmbeddingTrainReport {
  std::vector<double> epoch_loss;  ///< mean loss per (center, context) pair
  std::size_t vocabulary_size = 0;
  std::size_t training_tokens = 0;
};

/// Skip-gram with negative sampling, single-threaded and bit-reproducible for
/// a given seed. Throws EmptyTrainingVocabulary when every term falls below
/// min_count.
EmbeddingTable train_embeddings(std::span<const TokenList> docs, const EmbeddingParams& params,
                                std::string fingerprint = {}, EmbeddingTrainReport* report = nullptr);

/// Throws ZeroVector or DimensionMismatch.
double cosine(std::span<const double> u, std::span<const double> v);

struct SimilarityResult {
  std::vector<std::pair<std::string, double>> neighbors;
};

/// Top-k terms by cosine to `term`, excluding it. Ties break lexicographically.
SimilarityResult most_similar(std::string_view term, std::size_t k, const EmbeddingTable& table);

/// Terms ranked by cosine to V_b - V_a + V_c, excluding a, b and c.
SimilarityResult analogy(std::string_view a, std::string_view b, std::string_view c, const EmbeddingTable& table,
                         std::size_t k = 5);

/// Ranks every table term except `excluded` by cosine to `query`.
SimilarityResult rank_by_cosine(std::span<const double> query, const EmbeddingTable& table,
                                std::span<const std::size_t> excluded, std::size_t k);

}  // namespace satdetect
