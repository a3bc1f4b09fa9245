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

#include "satdetect/encoder.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>

#include "satdetect/binary_io.hpp"
#include "satdetect/error.hpp"

namespace satdetect {
namespace {
constexpr std::string_view kCacheMagic{"SDIMG\0\0\1", 8};
}

DocImage sign_split(std::span<const double> matrix, std::size_t rows, std::size_t cols) {
  if (matrix.size() != rows * cols) throw Error(ErrorCode::kShapeMismatch, "matrix size does not match rows x cols");
  DocImage image(rows, cols);
  for (std::size_t k = 0; k < matrix.size(); ++k) {
    const double v = matrix[k];
    if (v > 0.0) {
      image.data[2 * k] = v;
    } else if (v < 0.0) {
      image.data[2 * k + 1] = -v;
    }
  }
  return image;
}

Encoder::Encoder(const Vocabulary& vocab, const EmbeddingTable& table) : vocab_(&vocab), table_(&table) {
  if (vocab.fingerprint() != table.fingerprint()) {
    throw Error(ErrorCode::kFingerprintMismatch, "vocabulary fingerprint '" + vocab.fingerprint() +
                                                     "' differs from embedding fingerprint '" + table.fingerprint() +
                                                     "'");
  }
  rows_.reserve(vocab.size());
  for (const auto& term : vocab.terms()) {
    auto row = table.index_of(term);
    if (!row) ++missing_;
    rows_.push_back(row);
  }
  if (missing_ > 0) {
    spdlog::warn("{} of {} vocabulary terms have no embedding and encode as zero rows", missing_, vocab.size());
  }
}

std::vector<double> Encoder::hybrid_matrix(const TokenList& doc) const {
  const auto weights = tfidf_vector(doc, *vocab_);
  const std::size_t dim = cols();
  std::vector<double> matrix(rows() * dim, 0.0);
  for (std::size_t i = 0; i < rows(); ++i) {
    if (weights[i] == 0.0 || !rows_[i]) continue;
    const auto v = table_->vector(*rows_[i]);
    for (std::size_t j = 0; j < dim; ++j) matrix[i * dim + j] = weights[i] * v[j];
  }
  return matrix;
}

DocImage Encoder::encode(const TokenList& doc) const { return sign_split(hybrid_matrix(doc), rows(), cols()); }

std::vector<DocImage> Encoder::encode_batch(std::span<const TokenList> docs) const {
  std::vector<DocImage> images;
  images.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    try {
      images.push_back(encode(docs[i]));
    } catch (const Error& e) {
      throw Error(e.code(), "document " + std::to_string(i) + ": " + e.what());
    }
  }
  return images;
}

DocImage encode(const TokenList& doc, const Vocabulary& vocab, const EmbeddingTable& table) {
  return Encoder(vocab, table).encode(doc);
}

std::vector<DocImage> encode_batch(std::span<const TokenList> docs, const Vocabulary& vocab,
                                   const EmbeddingTable& table) {
  return Encoder(vocab, table).encode_batch(docs);
}

void save_encoded(const EncodedDataset& dataset, const std::filesystem::path& path) {
  if (dataset.labels.size() != dataset.images.size() || dataset.ids.size() != dataset.images.size()) {
    throw Error(ErrorCode::kInvalidArgument, "encoded dataset ids/labels/images differ in length");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  binio::write_magic(out, kCacheMagic);
  binio::write_u64(out, dataset.rows);
  binio::write_u64(out, dataset.cols);
  binio::write_u64(out, dataset.size());
  binio::write_string(out, dataset.fingerprint);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& img = dataset.images[i];
    if (img.rows != dataset.rows || img.cols != dataset.cols) {
      throw Error(ErrorCode::kShapeMismatch, "image " + std::to_string(i) + " has the wrong shape");
    }
    binio::write_string(out, dataset.ids[i]);
    out.put(static_cast<char>(label_value(dataset.labels[i])));
    binio::write_f64_array(out, img.data);
  }
}

EncodedDataset load_encoded(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "encoded dataset not found: " + path.string());
  binio::expect_magic(in, kCacheMagic, "encoded dataset");
  EncodedDataset ds;
  ds.rows = binio::read_u64(in);
  ds.cols = binio::read_u64(in);
  const auto count = binio::read_u64(in);
  ds.fingerprint = binio::read_string(in);
  ds.ids.reserve(count);
  ds.images.reserve(count);
  ds.labels.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    ds.ids.push_back(binio::read_string(in));
    const int label = in.get();
    if (label != 0 && label != 1) throw Error(ErrorCode::kFormatError, "bad label byte in " + path.string());
    ds.labels.push_back(label == 1 ? Label::kSatire : Label::kReal);
    DocImage img(ds.rows, ds.cols);
    binio::read_f64_array(in, img.data);
    ds.images.push_back(std::move(img));
  }
  return ds;
}

}  // namespace satdetect
