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
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "satdetect/text.hpp"

namespace satdetect {

struct VocabularyParams {
  double min_df_frac = 0.10;
  double max_df_frac = 0.70;
  std::size_t max_terms = 1000;
};

/// Filtered, size-capped term list with document frequencies. Row i of every
/// TF-IDF vector and document image corresponds to terms()[i].
class Vocabulary {
 public:
  Vocabulary() = default;
  /// Recomputes idf = ln(N / df) from the stored counts.
  Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> df, std::size_t n_docs, VocabularyParams params,
             std::string fingerprint = {});

  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::vector<std::size_t>& df() const noexcept { return df_; }
  const std::vector<double>& idf() const noexcept { return idf_; }
  std::size_t n_docs() const noexcept { return n_docs_; }
  const VocabularyParams& params() const noexcept { return params_; }
  const std::string& fingerprint() const noexcept { return fingerprint_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }

  std::optional<std::size_t> index_of(std::string_view term) const;

  nlohmann::json to_json() const;
  static Vocabulary from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

 private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::vector<double> idf_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t n_docs_ = 0;
  VocabularyParams params_;
  std::string fingerprint_;
};

/// Inclusive document-frequency band [ceil(min*N), floor(max*N)]. Products
/// within 1e-9 of an integer snap to it, so 0.1 * 30 counts as exactly 3.
std::pair<std::size_t, std::size_t> df_band(const VocabularyParams& params, std::size_t n_docs);

/// Keeps terms inside the df band, then the max_terms most frequent by total
/// corpus count (ties broken lexicographically). Throws EmptyVocabulary.
Vocabulary build_vocabulary(std::span<const TokenList> docs, const VocabularyParams& params,
                            std::string fingerprint = {});

std::size_t term_frequency(std::string_view term, const TokenList& doc);

/// ln(N / df) for a vocabulary term; throws UnknownTerm otherwise.
double idf(std::string_view term, const Vocabulary& vocab);

/// values[i] = tf(terms[i], doc) * idf[i]. Out-of-vocabulary tokens are ignored.
std::vector<double> tfidf_vector(const TokenList& doc, const Vocabulary& vocab);

}  // namespace satdetect
