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

#include "satdetect/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "satdetect/error.hpp"

namespace satdetect {

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> df, std::size_t n_docs,
                       VocabularyParams params, std::string fingerprint)
    : terms_(std::move(terms)),
      df_(std::move(df)),
      n_docs_(n_docs),
      params_(params),
      fingerprint_(std::move(fingerprint)) {
  if (terms_.size() != df_.size()) throw Error(ErrorCode::kFormatError, "terms/df length mismatch");
  idf_.reserve(df_.size());
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (df_[i] == 0 || df_[i] > n_docs_) {
      throw Error(ErrorCode::kFormatError, "document frequency out of range for '" + terms_[i] + "'");
    }
    idf_.push_back(std::log(static_cast<double>(n_docs_) / static_cast<double>(df_[i])));
    if (!index_.emplace(terms_[i], i).second) {
      throw Error(ErrorCode::kFormatError, "duplicate vocabulary term '" + terms_[i] + "'");
    }
  }
}

std::optional<std::size_t> Vocabulary::index_of(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

nlohmann::json Vocabulary::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "satdetect-vocabulary";
  j["version"] = 1;
  j["terms"] = terms_;
  j["df"] = df_;
  j["N"] = n_docs_;
  j["params"] = {
      {"min_df_frac", params_.min_df_frac}, {"max_df_frac", params_.max_df_frac}, {"max_terms", params_.max_terms}};
  j["fingerprint"] = fingerprint_;
  return j;
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
  try {
    VocabularyParams params;
    const auto& p = j.at("params");
    params.min_df_frac = p.at("min_df_frac").get<double>();
    params.max_df_frac = p.at("max_df_frac").get<double>();
    params.max_terms = p.at("max_terms").get<std::size_t>();
    return Vocabulary(j.at("terms").get<std::vector<std::string>>(), j.at("df").get<std::vector<std::size_t>>(),
                      j.at("N").get<std::size_t>(), params, j.value("fingerprint", std::string{}));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("vocabulary JSON: ") + e.what());
  }
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << to_json().dump(1) << '\n';
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "vocabulary not found: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, path.string() + ": " + e.what());
  }
  return from_json(j);
}

std::pair<std::size_t, std::size_t> df_band(const VocabularyParams& params, std::size_t n_docs) {
  constexpr double kSnap = 1e-9;
  const double n = static_cast<double>(n_docs);
  const double lo = std::ceil(params.min_df_frac * n - kSnap);
  const double hi = std::floor(params.max_df_frac * n + kSnap);
  return {static_cast<std::size_t>(std::max(0.0, lo)), static_cast<std::size_t>(std::max(0.0, hi))};
}

Vocabulary build_vocabulary(std::span<const TokenList> docs, const VocabularyParams& params, std::string fingerprint) {
  if (!(params.min_df_frac >= 0.0 && params.min_df_frac < params.max_df_frac && params.max_df_frac <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "need 0 <= min_df_frac < max_df_frac <= 1");
  }
  if (params.max_terms == 0) throw Error(ErrorCode::kInvalidArgument, "max_terms must be positive");
  if (docs.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot build a vocabulary from an empty corpus");

  struct Stats {
    std::size_t df = 0;
    std::size_t total = 0;
    std::size_t last_doc = static_cast<std::size_t>(-1);
  };
  std::unordered_map<std::string_view, Stats> stats;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& token : docs[d]) {
      auto& s = stats[token];
      ++s.total;
      if (s.last_doc != d) {
        s.last_doc = d;
        ++s.df;
      }
    }
  }

  const auto [lo, hi] = df_band(params, docs.size());
  struct Candidate {
    std::string_view term;
    std::size_t df;
    std::size_t total;
  };
  std::vector<Candidate> kept;
  for (const auto& [term, s] : stats) {
    if (s.df >= lo && s.df <= hi) kept.push_back({term, s.df, s.total});
  }
  if (kept.empty()) {
    throw Error(ErrorCode::kEmptyVocabulary, "no term has document frequency in [" + std::to_string(lo) + ", " +
                                                 std::to_string(hi) + "] over " + std::to_string(docs.size()) +
                                                 " documents");
  }
  std::sort(kept.begin(), kept.end(), [](const Candidate& a, const Candidate& b) {
    return a.total != b.total ? a.total > b.total : a.term < b.term;
  });
  if (kept.size() > params.max_terms) kept.resize(params.max_terms);

  std::vector<std::string> terms;
  std::vector<std::size_t> df;
  terms.reserve(kept.size());
  df.reserve(kept.size());
  for (const auto& c : kept) {
    terms.emplace_back(c.term);
    df.push_back(c.df);
  }
  return Vocabulary(std::move(terms), std::move(df), docs.size(), params, std::move(fingerprint));
}

std::size_t term_frequency(std::string_view term, const TokenList& doc) {
  return static_cast<std::size_t>(std::count(doc.begin(), doc.end(), term));
}

double idf(std::string_view term, const Vocabulary& vocab) {
  const auto i = vocab.index_of(term);
  if (!i) throw Error(ErrorCode::kUnknownTerm, "term not in vocabulary: '" + std::string(term) + "'");
  return vocab.idf()[*i];
}

std::vector<double> tfidf_vector(const TokenList& doc, const Vocabulary& vocab) {
  std::vector<std::size_t> counts(vocab.size(), 0);
  for (const auto& token : doc) {
    if (auto i = vocab.index_of(token)) ++counts[*i];
  }
  std::vector<double> values(vocab.size(), 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = static_cast<double>(counts[i]) * vocab.idf()[i];
  }
  return values;
}

}  // namespace satdetect
