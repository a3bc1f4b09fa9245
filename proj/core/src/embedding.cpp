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

#include "satdetect/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "satdetect/binary_io.hpp"
#include "satdetect/error.hpp"
#include "satdetect/rng.hpp"

namespace satdetect {
namespace {

constexpr std::string_view kBinaryMagic{"SDEMB\0\0\1", 8};

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// -log(sigmoid(x)) without overflow.
double neg_log_sigmoid(double x) { return x >= 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x)); }

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

// EmbeddingTable

EmbeddingTable::EmbeddingTable(std::vector<std::string> terms, std::vector<double> vectors, std::size_t dim,
                               std::string fingerprint)
    : terms_(std::move(terms)), vectors_(std::move(vectors)), dim_(dim), fingerprint_(std::move(fingerprint)) {
  if (dim_ == 0) throw Error(ErrorCode::kInvalidArgument, "embedding dimension must be positive");
  if (vectors_.size() != terms_.size() * dim_) {
    throw Error(ErrorCode::kDimensionMismatch, "embedding buffer does not match count x dim");
  }
  for (double v : vectors_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kFormatError, "non-finite embedding component");
  }
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!index_.emplace(terms_[i], i).second) {
      throw Error(ErrorCode::kFormatError, "duplicate embedding term '" + terms_[i] + "'");
    }
  }
}

std::optional<std::size_t> EmbeddingTable::index_of(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const double> EmbeddingTable::vector(std::string_view term) const {
  const auto i = index_of(term);
  if (!i) throw Error(ErrorCode::kUnknownTerm, "term not in embedding table: '" + std::string(term) + "'");
  return vector(*i);
}

void EmbeddingTable::save_text(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << terms_.size() << ' ' << dim_;
  if (!fingerprint_.empty()) out << ' ' << fingerprint_;
  out << '\n';
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    out << terms_[i];
    for (double v : vector(i)) out << ' ' << format_double(v);
    out << '\n';
  }
}

EmbeddingTable EmbeddingTable::load_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "embedding file not found: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kFormatError, path.string() + ": empty embedding file");
  std::istringstream header(line);
  std::size_t count = 0;
  std::size_t dim = 0;
  std::string fingerprint;
  if (!(header >> count >> dim)) throw Error(ErrorCode::kFormatError, path.string() + ": bad header");
  header >> fingerprint;

  std::vector<std::string> terms;
  std::vector<double> vectors;
  terms.reserve(count);
  vectors.reserve(count * dim);
  for (std::size_t row = 0; row < count; ++row) {
    if (!std::getline(in, line)) throw Error(ErrorCode::kFormatError, path.string() + ": truncated");
    std::string_view rest(line);
    auto space = rest.find(' ');
    if (space == std::string_view::npos) throw Error(ErrorCode::kFormatError, path.string() + ": bad row");
    terms.emplace_back(rest.substr(0, space));
    rest.remove_prefix(space + 1);
    for (std::size_t k = 0; k < dim; ++k) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), v);
      if (ec != std::errc()) {
        throw Error(ErrorCode::kFormatError, path.string() + ": bad number on row " + std::to_string(row + 2));
      }
      vectors.push_back(v);
      rest.remove_prefix(static_cast<std::size_t>(ptr - rest.data()));
      if (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
    }
  }
  return EmbeddingTable(std::move(terms), std::move(vectors), dim, std::move(fingerprint));
}

void EmbeddingTable::save_binary(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  binio::write_magic(out, kBinaryMagic);
  binio::write_u64(out, terms_.size());
  binio::write_u64(out, dim_);
  binio::write_string(out, fingerprint_);
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    binio::write_string(out, terms_[i]);
    binio::write_f64_array(out, vector(i));
  }
}

EmbeddingTable EmbeddingTable::load_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "embedding file not found: " + path.string());
  binio::expect_magic(in, kBinaryMagic, "binary embedding");
  const auto count = binio::read_u64(in);
  const auto dim = binio::read_u64(in);
  auto fingerprint = binio::read_string(in);
  std::vector<std::string> terms(count);
  std::vector<double> vectors(count * dim);
  for (std::size_t i = 0; i < count; ++i) {
    terms[i] = binio::read_string(in);
    binio::read_f64_array(in, std::span<double>(vectors.data() + i * dim, dim));
  }
  return EmbeddingTable(std::move(terms), std::move(vectors), dim, std::move(fingerprint));
}

// Training

EmbeddingTable train_embeddings(std::span<const TokenList> docs, const EmbeddingParams& params, std::string fingerprint,
                                EmbeddingTrainReport* report) {
  if (docs.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot train embeddings on an empty corpus");
  if (params.dim == 0 || params.epochs == 0 || params.window == 0) {
    throw Error(ErrorCode::kInvalidArgument, "dim, epochs and window must be positive");
  }
  if (!(params.learning_rate > 0.0)) throw Error(ErrorCode::kInvalidArgument, "learning rate must be positive");

  std::unordered_map<std::string_view, std::size_t> counts;
  for (const auto& doc : docs) {
    for (const auto& t : doc) ++counts[t];
  }
  std::vector<std::pair<std::string_view, std::size_t>> kept;
  for (const auto& [term, n] : counts) {
    if (n >= params.min_count) kept.emplace_back(term, n);
  }
  if (kept.empty()) {
    throw Error(ErrorCode::kEmptyTrainingVocabulary, "no term reaches min_count=" + std::to_string(params.min_count));
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  const std::size_t vocab_size = kept.size();
  const std::size_t dim = params.dim;
  std::unordered_map<std::string_view, std::uint32_t> ids;
  std::vector<std::string> terms;
  terms.reserve(vocab_size);
  for (std::size_t i = 0; i < vocab_size; ++i) {
    ids.emplace(kept[i].first, static_cast<std::uint32_t>(i));
    terms.emplace_back(kept[i].first);
  }

  // Unigram^(3/4) cumulative distribution for negative sampling.
  std::vector<double> cumulative(vocab_size);
  double acc = 0.0;
  for (std::size_t i = 0; i < vocab_size; ++i) {
    acc += std::pow(static_cast<double>(kept[i].second), 0.75);
    cumulative[i] = acc;
  }

  std::vector<std::vector<std::uint32_t>> encoded;
  encoded.reserve(docs.size());
  std::size_t total_tokens = 0;
  for (const auto& doc : docs) {
    auto& ids_doc = encoded.emplace_back();
    for (const auto& t : doc) {
      if (auto it = ids.find(t); it != ids.end()) ids_doc.push_back(it->second);
    }
    total_tokens += ids_doc.size();
  }

  Rng rng(params.seed);
  std::vector<double> input(vocab_size * dim);
  std::vector<double> output(vocab_size * dim, 0.0);
  const double bound = 0.5 / static_cast<double>(dim);
  for (auto& v : input) v = rng.uniform(-bound, bound);

  auto sample_negative = [&]() {
    const double r = rng.uniform() * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
    return static_cast<std::uint32_t>(std::min<std::size_t>(it - cumulative.begin(), vocab_size - 1));
  };

  const double total_steps = static_cast<double>(params.epochs) * static_cast<double>(total_tokens) + 1.0;
  std::size_t processed = 0;
  std::vector<double> grad_in(dim);
  std::vector<double> epoch_loss;

  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t pairs = 0;
    for (const auto& doc : encoded) {
      const std::size_t n = doc.size();
      for (std::size_t pos = 0; pos < n; ++pos, ++processed) {
        const double lr = params.learning_rate * std::max(1e-4, 1.0 - static_cast<double>(processed) / total_steps);
        const std::size_t reach = params.window - static_cast<std::size_t>(rng.below(params.window));
        const std::size_t lo = pos >= reach ? pos - reach : 0;
        const std::size_t hi = std::min(n - 1, pos + reach);
        double* in_vec = input.data() + static_cast<std::size_t>(doc[pos]) * dim;
        for (std::size_t ctx = lo; ctx <= hi; ++ctx) {
          if (ctx == pos) continue;
          std::fill(grad_in.begin(), grad_in.end(), 0.0);
          for (std::size_t s = 0; s <= params.negatives; ++s) {
            std::uint32_t target = 0;
            double label = 0.0;
            if (s == 0) {
              target = doc[ctx];
              label = 1.0;
            } else {
              target = sample_negative();
              if (target == doc[ctx]) continue;
            }
            double* out_vec = output.data() + static_cast<std::size_t>(target) * dim;
            const double score = dot(in_vec, out_vec, dim);
            loss_sum += label > 0.0 ? neg_log_sigmoid(score) : neg_log_sigmoid(-score);
            const double g = (label - sigmoid(score)) * lr;
            for (std::size_t k = 0; k < dim; ++k) grad_in[k] += g * out_vec[k];
            for (std::size_t k = 0; k < dim; ++k) out_vec[k] += g * in_vec[k];
          }
          for (std::size_t k = 0; k < dim; ++k) in_vec[k] += grad_in[k];
          ++pairs;
        }
      }
    }
    const double mean = pairs ? loss_sum / static_cast<double>(pairs) : 0.0;
    if (!std::isfinite(mean)) {
      throw Error(ErrorCode::kNonFiniteLoss, "embedding loss diverged in epoch " + std::to_string(epoch + 1));
    }
    epoch_loss.push_back(mean);
  }

  if (report) {
    report->epoch_loss = epoch_loss;
    report->vocabulary_size = vocab_size;
    report->training_tokens = total_tokens;
  }
  return EmbeddingTable(std::move(terms), std::move(input), dim, std::move(fingerprint));
}

// Queries

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "cosine of vectors with sizes " + std::to_string(u.size()) + " and " + std::to_string(v.size()));
  }
  const double uv = dot(u.data(), v.data(), u.size());
  const double uu = dot(u.data(), u.data(), u.size());
  const double vv = dot(v.data(), v.data(), v.size());
  if (uu == 0.0 || vv == 0.0) throw Error(ErrorCode::kZeroVector, "cosine of a zero vector");
  return std::clamp(uv / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

SimilarityResult rank_by_cosine(std::span<const double> query, const EmbeddingTable& table,
                                std::span<const std::size_t> excluded, std::size_t k) {
  if (query.size() != table.dim()) throw Error(ErrorCode::kDimensionMismatch, "query dimension differs from table");
  if (dot(query.data(), query.data(), query.size()) == 0.0) throw Error(ErrorCode::kZeroVector, "zero query vector");
  std::vector<std::pair<std::size_t, double>> scored;
  scored.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (std::find(excluded.begin(), excluded.end(), i) != excluded.end()) continue;
    const auto v = table.vector(i);
    if (dot(v.data(), v.data(), v.size()) == 0.0) continue;
    scored.emplace_back(i, cosine(query, v));
  }
  const auto& terms = table.terms();
  auto better = [&](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : terms[a.first] < terms[b.first];
  };
  const std::size_t take = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(), better);
  SimilarityResult result;
  result.neighbors.reserve(take);
  for (std::size_t i = 0; i < take; ++i) result.neighbors.emplace_back(terms[scored[i].first], scored[i].second);
  return result;
}

SimilarityResult most_similar(std::string_view term, std::size_t k, const EmbeddingTable& table) {
  const auto i = table.index_of(term);
  if (!i) throw Error(ErrorCode::kUnknownTerm, "term not in embedding table: '" + std::string(term) + "'");
  const std::size_t excluded[] = {*i};
  return rank_by_cosine(table.vector(*i), table, excluded, k);
}

SimilarityResult analogy(std::string_view a, std::string_view b, std::string_view c, const EmbeddingTable& table,
                         std::size_t k) {
  std::size_t idx[3];
  const std::string_view names[3] = {a, b, c};
  for (int n = 0; n < 3; ++n) {
    const auto i = table.index_of(names[n]);
    if (!i) throw Error(ErrorCode::kUnknownTerm, "term not in embedding table: '" + std::string(names[n]) + "'");
    idx[n] = *i;
  }
  const auto va = table.vector(idx[0]);
  const auto vb = table.vector(idx[1]);
  const auto vc = table.vector(idx[2]);
  std::vector<double> query(table.dim());
  for (std::size_t k2 = 0; k2 < query.size(); ++k2) query[k2] = vb[k2] - va[k2] + vc[k2];
  return rank_by_cosine(query, table, idx, k);
}

}  // namespace satdetect
