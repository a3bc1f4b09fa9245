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
#include <vector>

#include "satdetect/corpus.hpp"
#include "satdetect/rng.hpp"

namespace satdetect {

/// Two-class corpus where each document mixes class-exclusive marker terms
/// with terms from a shared vocabulary, both drawn from Zipf distributions.
struct SyntheticCorpusParams {
  std::size_t documents = 1000;  ///< split evenly between the two classes
  std::size_t shared_vocabulary = 400;
  std::size_t marker_vocabulary = 40;  ///< per class
  double marker_fraction = 0.3;
  std::size_t min_length = 60;
  std::size_t max_length = 120;
  double zipf_exponent = 1.0;
  std::uint64_t seed = 7;
};

Corpus make_synthetic_corpus(const SyntheticCorpusParams& params);

/// Samples ranks 0..n-1 with P(r) proportional to 1 / (r + 1)^s.
class ZipfSampler {
 public:
  ZipfSampler(std::size_t n, double exponent);
  std::size_t operator()(Rng& rng) const;

 private:
  std::vector<double> cumulative_;
};

}  // namespace satdetect
