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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "satdetect/corpus.hpp"
#include "satdetect/embedding.hpp"
#include "satdetect/text.hpp"
#include "satdetect/tfidf.hpp"

namespace satdetect {

/// Two-channel nonnegative document image of shape (rows, cols, 2), stored
/// channels-last: element (i, j, c) lives at (i * cols + j) * 2 + c.
struct DocImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DocImage() = default;
  DocImage(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c * 2, 0.0) {}

  double& at(std::size_t i, std::size_t j, std::size_t channel) { return data[(i * cols + j) * 2 + channel]; }
  double at(std::size_t i, std::size_t j, std::size_t channel) const { return data[(i * cols + j) * 2 + channel]; }

  bool operator==(const DocImage&) const = default;
};

/// Positive part into channel 0, negated negative part into channel 1.
/// `matrix` is row-major with `rows * cols` entries.
DocImage sign_split(std::span<const double> matrix, std::size_t rows, std::size_t cols);

/// Binds a vocabulary to an embedding table. Construction checks that both
/// carry the same corpus fingerprint and resolves each vocabulary term to its
/// embedding row; terms without an embedding encode as zero rows.
class Encoder {
 public:
  Encoder(const Vocabulary& vocab, const EmbeddingTable& table);

  std::size_t rows() const noexcept { return vocab_->size(); }
  std::size_t cols() const noexcept { return table_->dim(); }
  /// Vocabulary terms that have no embedding.
  std::size_t missing_terms() const noexcept { return missing_; }

  /// Row i is tfidf_i * embedding(term_i), sign-split into two channels.
  DocImage encode(const TokenList& doc) const;
  /// The signed matrix before the sign split.
  std::vector<double> hybrid_matrix(const TokenList& doc) const;
  std::vector<DocImage> encode_batch(std::span<const TokenList> docs) const;

 private:
  const Vocabulary* vocab_;
  const EmbeddingTable* table_;
  std::vector<std::optional<std::size_t>> rows_;
  std::size_t missing_ = 0;
};

DocImage encode(const TokenList& doc, const Vocabulary& vocab, const EmbeddingTable& table);
std::vector<DocImage> encode_batch(std::span<const TokenList> docs, const Vocabulary& vocab,
                                   const EmbeddingTable& table);

/// Labeled, encoded dataset with its lineage fingerprint.
struct EncodedDataset {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string fingerprint;
  std::vector<std::string> ids;
  std::vector<DocImage> images;
  std::vector<Label> labels;

  std::size_t size() const noexcept { return images.size(); }
};

/// Cache file: magic "SDIMG\0\0\1", u64 rows, u64 cols, u64 count,
/// fingerprint string, then per document an id string, a label byte and
/// rows*cols*2 little-endian doubles.
void save_encoded(const EncodedDataset& dataset, const std::filesystem::path& path);
EncodedDataset load_encoded(const std::filesystem::path& path);

}  // namespace satdetect
