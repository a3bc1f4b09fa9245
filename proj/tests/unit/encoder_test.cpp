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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "satdetect/error.hpp"

namespace satdetect {
namespace {

using testing::TempDir;

struct Fixture {
  Vocabulary vocab;
  EmbeddingTable table;
};

/// Vocabulary of `v` terms "w0".."w{v-1}" with random embeddings of width `d`.
Fixture random_fixture(Rng& rng, std::size_t v, std::size_t d, const std::string& fp = "fp") {
  std::vector<std::string> terms;
  std::vector<std::size_t> df;
  std::vector<double> vecs;
  for (std::size_t i = 0; i < v; ++i) {
    terms.push_back("w" + std::to_string(i));
    df.push_back(1 + rng.below(9));
    for (std::size_t j = 0; j < d; ++j) vecs.push_back(rng.uniform(-1, 1));
  }
  return {Vocabulary(terms, df, 10, {}, fp), EmbeddingTable(terms, vecs, d, fp)};
}

TEST(SignSplit, Example) {
  const std::vector<double> m{1.5, -2.0};
  const auto img = sign_split(m, 1, 2);
  EXPECT_EQ(img.at(0, 0, 0), 1.5);
  EXPECT_EQ(img.at(0, 1, 0), 0.0);
  EXPECT_EQ(img.at(0, 0, 1), 0.0);
  EXPECT_EQ(img.at(0, 1, 1), 2.0);
}

TEST(SignSplit, ZerosStayZero) {
  const std::vector<double> m(6, 0.0);
  const auto img = sign_split(m, 2, 3);
  for (double x : img.data) EXPECT_EQ(x, 0.0);
}

TEST(SignSplitProperty, ReconstructsExactly) {
  Rng rng(43);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t r = 1 + rng.below(8), c = 1 + rng.below(8);
    std::vector<double> m(r * c);
    for (auto& x : m) x = rng.below(5) == 0 ? 0.0 : rng.uniform(-10, 10);
    const auto img = sign_split(m, r, c);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        const double p = img.at(i, j, 0), n = img.at(i, j, 1);
        ASSERT_GE(p, 0.0);
        ASSERT_GE(n, 0.0);
        ASSERT_EQ(p * n, 0.0);
        ASSERT_EQ(p - n, m[i * c + j]);
      }
    }
  }
}

TEST(Encode, EmptyDocumentIsZero) {
  Rng rng(1);
  const auto f = random_fixture(rng, 5, 3);
  const auto img = encode({}, f.vocab, f.table);
  EXPECT_EQ(img.rows, 5u);
  EXPECT_EQ(img.cols, 3u);
  for (double x : img.data) EXPECT_EQ(x, 0.0);
}

TEST(Encode, FullVocabularyShape) {
  Rng rng(2);
  const auto f = random_fixture(rng, 1000, 10);
  const auto img = encode({"w0", "w999"}, f.vocab, f.table);
  EXPECT_EQ(img.rows, 1000u);
  EXPECT_EQ(img.cols, 10u);
  EXPECT_EQ(img.data.size(), 1000u * 10u * 2u);
}

TEST(Encode, SingleTermRowMatchesScalarArithmetic) {
  const Vocabulary vocab({"t"}, {2}, 8, {}, "fp");
  const EmbeddingTable table({"t"}, {0.5, -1.25, 0.0}, 3, "fp");
  const auto img = encode({"t", "t", "x"}, vocab, table);
  const double w = 2.0 * std::log(8.0 / 2.0);
  const std::vector<double> v{0.5, -1.25, 0.0};
  for (std::size_t j = 0; j < 3; ++j) {
    const double s = w * v[j];
    EXPECT_EQ(img.at(0, j, 0), s > 0 ? s : 0.0);
    EXPECT_EQ(img.at(0, j, 1), s < 0 ? -s : 0.0);
  }
}

TEST(Encode, HybridMatrixIsTfidfTimesEmbedding) {
  Rng rng(4);
  const auto f = random_fixture(rng, 12, 4);
  const TokenList doc{"w1", "w3", "w3", "w11", "zz"};
  const auto tfidf = tfidf_vector(doc, f.vocab);
  const Encoder enc(f.vocab, f.table);
  const auto m = enc.hybrid_matrix(doc);
  for (std::size_t i = 0; i < 12; ++i) {
    const auto v = f.table.vector(f.vocab.terms()[i]);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(m[i * 4 + j], tfidf[i] * v[j]);
  }
  EXPECT_EQ(enc.encode(doc), sign_split(m, 12, 4));
}

TEST(Encode, MissingEmbeddingRowsAreZero) {
  const Vocabulary vocab({"a", "b"}, {1, 1}, 4, {}, "fp");
  const EmbeddingTable table({"a"}, {1.0, 2.0}, 2, "fp");
  const Encoder enc(vocab, table);
  EXPECT_EQ(enc.missing_terms(), 1u);
  const auto img = enc.encode({"a", "b"});
  EXPECT_GT(img.at(0, 1, 0), 0.0);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_EQ(img.at(1, j, 0), 0.0);
    EXPECT_EQ(img.at(1, j, 1), 0.0);
  }
}

TEST(Encode, FingerprintMismatch) {
  Rng rng(5);
  const auto a = random_fixture(rng, 3, 2, "one");
  const auto b = random_fixture(rng, 3, 2, "two");
  try {
    Encoder enc(a.vocab, b.table);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFingerprintMismatch);
  }
}

TEST(EncodeBatch, Equivalences) {
  Rng rng(6);
  const auto f = random_fixture(rng, 20, 5);
  EXPECT_TRUE(encode_batch(std::vector<TokenList>{}, f.vocab, f.table).empty());

  std::vector<TokenList> docs;
  for (int d = 0; d < 8; ++d) {
    TokenList doc;
    for (std::size_t k = 0, n = rng.below(10); k < n; ++k) doc.push_back("w" + std::to_string(rng.below(25)));
    docs.push_back(doc);
  }
  const auto one = encode_batch(std::span<const TokenList>(docs.data(), 1), f.vocab, f.table);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0], encode(docs[0], f.vocab, f.table));
  const auto batch = encode_batch(docs, f.vocab, f.table);
  ASSERT_EQ(batch.size(), 8u);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(batch[i], encode(docs[i], f.vocab, f.table));
}

TEST(EncodeProperty, TokenOrderDoesNotMatter) {
  Rng rng(7);
  const auto f = random_fixture(rng, 15, 4);
  const Encoder enc(f.vocab, f.table);
  for (int trial = 0; trial < 100; ++trial) {
    TokenList doc;
    for (std::size_t k = 0, n = rng.below(20); k < n; ++k) doc.push_back("w" + std::to_string(rng.below(18)));
    const auto img = enc.encode(doc);
    for (double x : img.data) ASSERT_GE(x, 0.0);
    auto shuffled = doc;
    rng.shuffle(std::span<std::string>(shuffled));
    EXPECT_EQ(enc.encode(shuffled), img);
  }
}

TEST(EncodedCache, RoundTrip) {
  TempDir dir;
  Rng rng(8);
  const auto f = random_fixture(rng, 6, 3);
  EncodedDataset ds;
  ds.rows = 6;
  ds.cols = 3;
  ds.fingerprint = "fp";
  ds.ids = {"x", "আ"};
  ds.images = {encode({"w1", "w2"}, f.vocab, f.table), encode({"w5"}, f.vocab, f.table)};
  ds.labels = {Label::kSatire, Label::kReal};
  save_encoded(ds, dir / "c.bin");
  const auto back = load_encoded(dir / "c.bin");
  EXPECT_EQ(back.rows, 6u);
  EXPECT_EQ(back.cols, 3u);
  EXPECT_EQ(back.fingerprint, "fp");
  EXPECT_EQ(back.ids, ds.ids);
  EXPECT_EQ(back.images, ds.images);
  EXPECT_EQ(back.labels, ds.labels);
}

}  // namespace
}  // namespace satdetect
