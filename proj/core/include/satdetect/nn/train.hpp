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
#include <functional>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "satdetect/corpus.hpp"
#include "satdetect/nn/model.hpp"
#include "satdetect/nn/optimizer.hpp"

namespace satdetect::nn {

struct TrainConfig {
  OptimizerConfig optimizer;
  std::size_t batch_size = 32;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  /// Stop after this many epochs without a lower training loss.
  std::optional<std::size_t> patience;

  void to_json(nlohmann::json& j) const;
  static TrainConfig from_json(const nlohmann::json& j);
};

struct EpochStats {
  std::size_t epoch = 0;
  double loss = 0.0;      ///< mean BCE over the epoch's training passes
  double accuracy = 0.0;  ///< fraction classified correctly during those passes
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  bool stopped_early = false;
};

/// One labeled example; `image` holds shape_size(model.input_shape()) values.
struct Example {
  std::span<const double> image;
  Label label;
};

/// Mini-batch training with per-epoch shuffling, single-threaded. Gradients
/// are averaged over each batch. Same seed and data give the same parameter
/// trajectory bit for bit. Throws NonFiniteLoss or NonFiniteGradient.
template <typename T>
TrainReport train(Model<T>& model, std::span<const Example> data, const TrainConfig& config,
                  const std::function<void(const EpochStats&)>& on_epoch = {});

extern template TrainReport train<float>(Model<float>&, std::span<const Example>, const TrainConfig&,
                                         const std::function<void(const EpochStats&)>&);
extern template TrainReport train<double>(Model<double>&, std::span<const Example>, const TrainConfig&,
                                          const std::function<void(const EpochStats&)>&);

enum class DropoutPolicy {
  kRequireNone,  ///< invalid if the model has active dropout
  kFrozenMask,   ///< draw masks once and reuse them for every perturbation
  kResample,     ///< fresh masks per pass; never a valid check
};

struct GradientCheckResult {
  bool valid = false;
  std::string message;
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
};

/// Compares analytic gradients against central differences,
/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-12), maximized over
/// every parameter (or an evenly strided subset when max_per_parameter > 0).
GradientCheckResult gradient_check(Model<double>& model, const Tensor<double>& x, int label, double epsilon = 1e-5,
                                   DropoutPolicy policy = DropoutPolicy::kRequireNone,
                                   std::size_t max_per_parameter = 0, std::uint64_t mask_seed = 0);

}  // namespace satdetect::nn
