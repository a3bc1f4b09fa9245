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
#include <nlohmann/json_fwd.hpp>
#include <span>
#include <string>

#include "satdetect/corpus.hpp"

namespace satdetect {

/// Binary confusion matrix with SATIRE as the positive class, laid out as
/// [[TN, FP], [FN, TP]] (rows = true class REAL, SATIRE).
struct ConfusionMatrix {
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tp = 0;

  std::size_t total() const noexcept { return tn + fp + fn + tp; }
  std::array<std::array<std::size_t, 2>, 2> rows() const noexcept { return {{{tn, fp}, {fn, tp}}}; }
  void add(Label truth, Label predicted) noexcept;
};

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;  ///< positive-class F1; 0 when precision + recall = 0
  ConfusionMatrix confusion;

  void to_json(nlohmann::json& j) const;
};

Metrics metrics_from_confusion(const ConfusionMatrix& cm);

/// Throws EmptyTestSet when there is nothing to score.
Metrics compute_metrics(std::span<const Label> truth, std::span<const Label> predicted);

/// Aligned text tables of the confusion matrix: raw counts, and each row as
/// a percentage of its true-class total.
std::string render_confusion_counts(const ConfusionMatrix& cm);
std::string render_confusion_percent(const ConfusionMatrix& cm);

}  // namespace satdetect
