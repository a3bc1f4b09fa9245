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

#include "satdetect/metrics.hpp"

#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>

#include "satdetect/error.hpp"

namespace satdetect {

void ConfusionMatrix::add(Label truth, Label predicted) noexcept {
  const bool t = truth == Label::kSatire;
  const bool p = predicted == Label::kSatire;
  if (t && p) {
    ++tp;
  } else if (t) {
    ++fn;
  } else if (p) {
    ++fp;
  } else {
    ++tn;
  }
}

void Metrics::to_json(nlohmann::json& j) const {
  j = {{"accuracy", accuracy},
       {"precision", precision},
       {"recall", recall},
       {"f1", f1},
       {"f1_definition", "positive-class (satire) F1"},
       {"positive_class", "satire"},
       {"confusion", {{confusion.tn, confusion.fp}, {confusion.fn, confusion.tp}}},
       {"confusion_layout", "[[TN, FP], [FN, TP]]"}};
}

Metrics metrics_from_confusion(const ConfusionMatrix& cm) {
  Metrics m;
  m.confusion = cm;
  const auto ratio = [](std::size_t num, std::size_t den) {
    return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
  };
  m.accuracy = ratio(cm.tp + cm.tn, cm.total());
  m.precision = ratio(cm.tp, cm.tp + cm.fp);
  m.recall = ratio(cm.tp, cm.tp + cm.fn);
  m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

Metrics compute_metrics(std::span<const Label> truth, std::span<const Label> predicted) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorCode::kInvalidArgument, "truth and prediction lists differ in length");
  }
  if (truth.empty()) throw Error(ErrorCode::kEmptyTestSet, "no documents to evaluate");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  return metrics_from_confusion(cm);
}

namespace {

template <typename Cell>
std::string render_table(const ConfusionMatrix& cm, Cell cell) {
  std::ostringstream os;
  constexpr int kLabel = 13;
  constexpr int kCol = 13;
  os << std::left << std::setw(kLabel) << "" << std::right << std::setw(kCol) << "pred REAL" << std::setw(kCol)
     << "pred SATIRE" << '\n';
  const char* names[2] = {"true REAL", "true SATIRE"};
  const auto rows = cm.rows();
  for (std::size_t r = 0; r < 2; ++r) {
    os << std::left << std::setw(kLabel) << names[r] << std::right;
    for (std::size_t c = 0; c < 2; ++c) os << std::setw(kCol) << cell(rows[r], c);
    os << '\n';
  }
  return os.str();
}

}  // namespace

std::string render_confusion_counts(const ConfusionMatrix& cm) {
  return render_table(cm, [](const std::array<std::size_t, 2>& row, std::size_t c) { return std::to_string(row[c]); });
}

std::string render_confusion_percent(const ConfusionMatrix& cm) {
  return render_table(cm, [](const std::array<std::size_t, 2>& row, std::size_t c) {
    const std::size_t total = row[0] + row[1];
    std::ostringstream cell;
    cell << std::fixed << std::setprecision(2)
         << (total ? 100.0 * static_cast<double>(row[c]) / static_cast<double>(total) : 0.0) << '%';
    return cell.str();
  });
}

}  // namespace satdetect
