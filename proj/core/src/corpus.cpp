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

#include "satdetect/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "satdetect/error.hpp"
#include "satdetect/fingerprint.hpp"
#include "satdetect/rng.hpp"
#include "satdetect/text.hpp"

namespace satdetect {

std::string_view label_name(Label label) noexcept { return label == Label::kSatire ? "satire" : "real"; }

std::optional<Label> parse_label(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "satire") return Label::kSatire;
  if (lower == "real") return Label::kReal;
  return std::nullopt;
}

Corpus::Corpus(std::vector<Document> docs) : docs_(std::move(docs)) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(docs_.size());
  for (const auto& d : docs_) {
    if (!seen.insert(d.id).second) throw Error(ErrorCode::kDuplicateId, "duplicate document id '" + d.id + "'");
  }
}

std::string Corpus::id_fingerprint() const {
  Fnv1a64 h;
  h.update_u64(docs_.size());
  for (const auto& d : docs_) h.update_field(d.id);
  return h.hex();
}

Corpus parse_corpus(std::string_view contents) {
  std::vector<Document> docs;
  std::unordered_map<std::string, std::size_t> first_line;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < contents.size()) {
    auto end = contents.find('\n', start);
    if (end == std::string_view::npos) end = contents.size();
    std::string_view line = contents.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    const auto where = "line " + std::to_string(line_no);
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kMalformedRecord, where + ": " + e.what());
    }
    if (!record.is_object()) throw Error(ErrorCode::kMalformedRecord, where + ": expected a JSON object");
    for (const char* key : {"id", "text", "label"}) {
      if (!record.contains(key) || !record[key].is_string()) {
        throw Error(ErrorCode::kMalformedRecord, where + ": missing string field '" + key + "'");
      }
    }
    Document doc;
    doc.id = record["id"].get<std::string>();
    doc.text = record["text"].get<std::string>();
    const auto label_text = record["label"].get<std::string>();
    const auto label = parse_label(label_text);
    if (!label) throw Error(ErrorCode::kUnknownLabel, where + ": unknown label '" + label_text + "'");
    doc.label = *label;
    if (doc.id.empty()) throw Error(ErrorCode::kMalformedRecord, where + ": empty id");
    if (normalize(doc.text).empty()) throw Error(ErrorCode::kMalformedRecord, where + ": empty text");
    if (auto [it, inserted] = first_line.emplace(doc.id, line_no); !inserted) {
      throw Error(ErrorCode::kDuplicateId, where + ": duplicate document id '" + doc.id + "' (first seen on line " +
                                               std::to_string(it->second) + ")");
    }
    docs.push_back(std::move(doc));
  }
  return Corpus(std::move(docs));
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "corpus not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str());
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  for (const auto& d : corpus.docs()) {
    nlohmann::ordered_json record;
    record["id"] = d.id;
    record["text"] = d.text;
    record["label"] = label_name(d.label);
    out << record.dump() << '\n';
  }
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(const Corpus& corpus,
                                                                            const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "train_fraction must lie strictly between 0 and 1");
  }
  const std::size_t n = corpus.size();
  if (n < 2) throw Error(ErrorCode::kDegenerateSplit, "need at least 2 documents, got " + std::to_string(n));

  auto target = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(n)));
  target = std::clamp<std::size_t>(target, 1, n - 1);

  std::vector<std::vector<std::size_t>> groups;
  if (spec.stratified) {
    groups.resize(2);
    for (std::size_t i = 0; i < n; ++i) groups[label_value(corpus[i].label)].push_back(i);
  } else {
    groups.emplace_back(n);
    for (std::size_t i = 0; i < n; ++i) groups[0][i] = i;
  }

  // Largest-remainder apportionment of the train quota across groups.
  std::vector<std::size_t> quota(groups.size());
  std::vector<double> remainder(groups.size());
  std::size_t assigned = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double ideal = spec.train_fraction * static_cast<double>(groups[g].size());
    quota[g] = std::min(groups[g].size(), static_cast<std::size_t>(std::floor(ideal)));
    remainder[g] = ideal - static_cast<double>(quota[g]);
    assigned += quota[g];
  }
  while (assigned < target) {
    std::size_t best = groups.size();
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (quota[g] >= groups[g].size()) continue;
      if (best == groups.size() || remainder[g] > remainder[best]) best = g;
    }
    ++quota[best];
    remainder[best] = -1.0;
    ++assigned;
  }
  while (assigned > target) {
    std::size_t best = groups.size();
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (quota[g] == 0) continue;
      if (best == groups.size() || remainder[g] < remainder[best]) best = g;
    }
    --quota[best];
    remainder[best] = 2.0;
    --assigned;
  }

  Rng rng(spec.seed);
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    rng.shuffle(std::span<std::size_t>(groups[g]));
    train.insert(train.end(), groups[g].begin(), groups[g].begin() + static_cast<std::ptrdiff_t>(quota[g]));
    test.insert(test.end(), groups[g].begin() + static_cast<std::ptrdiff_t>(quota[g]), groups[g].end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

SplitResult split(const Corpus& corpus, const SplitSpec& spec) {
  auto [train_idx, test_idx] = split_indices(corpus, spec);
  auto gather = [&](const std::vector<std::size_t>& idx) {
    std::vector<Document> docs;
    docs.reserve(idx.size());
    for (auto i : idx) docs.push_back(corpus[i]);
    return Corpus(std::move(docs));
  };
  return {gather(train_idx), gather(test_idx)};
}

ClassBalance class_balance(const Corpus& corpus) {
  ClassBalance b;
  for (const auto& d : corpus.docs()) {
    if (d.label == Label::kSatire) {
      ++b.satire;
    } else {
      ++b.real;
    }
  }
  return b;
}

}  // namespace satdetect
