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

#include "satdetect/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "satdetect/error.hpp"

namespace satdetect {

ZipfSampler::ZipfSampler(std::size_t n, double exponent) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "Zipf sampler needs at least one rank");
  cumulative_.resize(n);
  double acc = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    acc += 1.0 / std::pow(static_cast<double>(r + 1), exponent);
    cumulative_[r] = acc;
  }
}

std::size_t ZipfSampler::operator()(Rng& rng) const {
  const double u = rng.uniform() * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
}

namespace {
std::string numbered(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%04zu", prefix, i);
  return buf;
}
}  // namespace

Corpus make_synthetic_corpus(const SyntheticCorpusParams& params) {
  if (params.documents < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two documents");
  if (params.min_length == 0 || params.max_length < params.min_length) {
    throw Error(ErrorCode::kInvalidArgument, "need 0 < min_length <= max_length");
  }
  if (!(params.marker_fraction >= 0.0 && params.marker_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "marker_fraction must lie in [0, 1]");
  }
  Rng rng(params.seed);
  const ZipfSampler shared(params.shared_vocabulary, params.zipf_exponent);
  const ZipfSampler markers(params.marker_vocabulary, params.zipf_exponent);

  std::vector<Document> docs;
  docs.reserve(params.documents);
  std::vector<std::string> words;
  for (std::size_t d = 0; d < params.documents; ++d) {
    const Label label = d % 2 == 0 ? Label::kSatire : Label::kReal;
    const char* marker_prefix = label == Label::kSatire ? "sat" : "rea";
    const std::size_t length =
        params.min_length + static_cast<std::size_t>(rng.below(params.max_length - params.min_length + 1));
    const auto n_markers = static_cast<std::size_t>(std::llround(params.marker_fraction * static_cast<double>(length)));
    words.clear();
    for (std::size_t k = 0; k < length; ++k) {
      words.push_back(k < n_markers ? numbered(marker_prefix, markers(rng)) : numbered("com", shared(rng)));
    }
    rng.shuffle(std::span<std::string>(words));
    std::string text;
    for (const auto& w : words) {
      if (!text.empty()) text.push_back(' ');
      text += w;
    }
    docs.push_back({numbered("doc", d), std::move(text), label});
  }
  return Corpus(std::move(docs));
}

}  // namespace satdetect
