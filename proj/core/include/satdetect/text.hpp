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
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace satdetect {

/// A token is a UTF-8 string in NFC with no whitespace or punctuation.
using Token = std::string;
using TokenList = std::vector<Token>;

/// Exact-match stopword set over normalized token surfaces.
class StopList {
 public:
  StopList() = default;
  /// Entries are normalized; duplicates and empty strings are dropped.
  explicit StopList(const std::vector<std::string>& entries);

  /// One entry per line; blank lines and '#' comment lines are ignored.
  static StopList parse(std::string_view contents);
  static StopList load(const std::filesystem::path& path);
  static StopList bangla_default();

  bool contains(std::string_view token) const;
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  /// Sorted entries, for fingerprinting and display.
  std::vector<std::string> sorted_entries() const;

 private:
  std::unordered_set<std::string> entries_;
};

/// Suffix-stripping rule table. Suffixes are kept sorted by descending
/// code-point length (ties lexicographic) and deduplicated.
class SuffixTable {
 public:
  static constexpr std::size_t kDefaultMinStemLength = 2;

  SuffixTable() = default;
  SuffixTable(const std::vector<std::string>& suffixes, std::size_t min_stem_length);

  static SuffixTable parse(std::string_view contents, std::size_t min_stem_length = kDefaultMinStemLength);
  static SuffixTable load(const std::filesystem::path& path, std::size_t min_stem_length = kDefaultMinStemLength);
  static SuffixTable bangla_default(std::size_t min_stem_length = kDefaultMinStemLength);

  const std::vector<std::string>& suffixes() const noexcept { return suffixes_; }
  std::size_t min_stem_length() const noexcept { return min_stem_length_; }
  bool empty() const noexcept { return suffixes_.empty(); }

 private:
  std::vector<std::string> suffixes_;
  std::size_t min_stem_length_ = kDefaultMinStemLength;
};

struct PreprocessConfig {
  StopList stopwords;
  SuffixTable suffixes;
  bool remove_stopwords = true;
  bool stem = true;
  /// Drop tokens made only of decimal digits (any script).
  bool drop_numeric = true;

  /// Bundled Bangla stop list and suffix table.
  static PreprocessConfig bangla_default();
  /// Stable digest of every field; feeds the corpus lineage fingerprint.
  std::string fingerprint() const;
};

/// NFC normalization, control characters removed, whitespace runs collapsed
/// to one ASCII space, leading and trailing whitespace trimmed.
std::string normalize(std::string_view raw);

/// Splits on whitespace and on Unicode punctuation (P*) and symbol (S*)
/// characters. With drop_numeric, all-digit (Nd) fragments are dropped.
TokenList tokenize(std::string_view text, bool drop_numeric = true);

TokenList remove_stopwords(const TokenList& tokens, const StopList& stops);

/// Strips the single longest suffix that leaves at least min_stem_length
/// code points. Returns the token unchanged when nothing applies.
Token stem(std::string_view token, const SuffixTable& table);

/// stem . remove_stopwords . tokenize . normalize
TokenList preprocess(std::string_view raw, const PreprocessConfig& config);

/// Number of Unicode code points in a UTF-8 string.
std::size_t utf8_length(std::string_view s) noexcept;

namespace resources {
std::string_view bangla_stopwords();
std::string_view bangla_suffixes();
}  // namespace resources

}  // namespace satdetect
