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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace satdetect {

enum class Label : std::uint8_t { kReal = 0, kSatire = 1 };

/// Canonical lowercase name ("satire" / "real").
std::string_view label_name(Label label) noexcept;
/// Case-insensitive parse; nullopt for anything else.
std::optional<Label> parse_label(std::string_view text);
inline int label_value(Label label) noexcept { return label == Label::kSatire ? 1 : 0; }

struct Document {
  std::string id;
  std::string text;
  Label label = Label::kReal;
};

/// Ordered, immutable-after-load collection of documents with unique ids.
class Corpus {
 public:
  Corpus() = default;
  /// Throws DuplicateId when two documents share an id.
  explicit Corpus(std::vector<Document> docs);

  const std::vector<Document>& docs() const noexcept { return docs_; }
  std::size_t size() const noexcept { return docs_.size(); }
  bool empty() const noexcept { return docs_.empty(); }
  const Document& operator[](std::size_t i) const { return docs_[i]; }

  /// Digest of the ordered document ids.
  std::string id_fingerprint() const;

 private:
  std::vector<Document> docs_;
};

/// Reads a JSONL corpus: one {"id", "text", "label"} object per line.
/// Blank lines are skipped. Errors: MissingFile, MalformedRecord (with line
/// number), DuplicateId, UnknownLabel.
Corpus load_corpus(const std::filesystem::path& path);
Corpus parse_corpus(std::string_view contents);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

struct SplitSpec {
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
  bool stratified = true;
};

struct SplitResult {
  Corpus train;
  Corpus test;
};

/// Seeded shuffle followed by an exact-count cut. The train side gets
/// round(train_fraction * N) documents, clamped to [1, N - 1]. Both sides
/// keep the corpus order.
SplitResult split(const Corpus& corpus, const SplitSpec& spec);

/// Index form of split(); returns sorted train and test indices.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(const Corpus& corpus,
                                                                            const SplitSpec& spec);

struct ClassBalance {
  std::size_t satire = 0;
  std::size_t real = 0;
  std::size_t total() const noexcept { return satire + real; }
  double satire_fraction() const noexcept { return total() ? double(satire) / double(total()) : 0.0; }
  double real_fraction() const noexcept { return total() ? double(real) / double(total()) : 0.0; }
};

ClassBalance class_balance(const Corpus& corpus);

}  // namespace satdetect
