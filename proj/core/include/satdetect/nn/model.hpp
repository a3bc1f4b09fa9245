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
#include <memory>
#include <span>
#include <vector>

#include "satdetect/corpus.hpp"
#include "satdetect/nn/layers.hpp"
#include "satdetect/nn/tensor.hpp"
#include "satdetect/rng.hpp"

namespace satdetect::nn {

/// Forward/backward scratch space. One per thread; holds every layer's
/// output and cache so backward can replay the last forward pass.
template <typename T>
struct Workspace {
  const Tensor<T>* input = nullptr;
  std::vector<Tensor<T>> outputs;
  std::vector<LayerCache<T>> caches;
  Tensor<T> grad_a;
  Tensor<T> grad_b;

  /// Reuse the current dropout masks on subsequent training passes.
  void freeze_dropout_masks(bool frozen = true) {
    for (auto& c : caches) c.mask_frozen = frozen;
  }
};

/// Sequential binary classifier ending in a single sigmoid unit.
template <typename T>
class Model {
 public:
  /// Validates the whole shape chain and initializes weights from `seed`.
  /// Throws ShapeUnderflow, ShapeMismatch or InvalidArgument.
  Model(Shape input_shape, std::vector<LayerSpec> specs, std::uint64_t seed);

  Model(const Model& other);
  Model& operator=(const Model& other);
  Model(Model&&) noexcept = default;
  Model& operator=(Model&&) noexcept = default;

  const Shape& input_shape() const noexcept { return input_shape_; }
  const std::vector<LayerSpec>& specs() const noexcept { return specs_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t layer_count() const noexcept { return layers_.size(); }
  Layer<T>& layer(std::size_t i) { return *layers_[i]; }
  const Layer<T>& layer(std::size_t i) const { return *layers_[i]; }

  /// Flat view of every learnable array in layer order.
  std::vector<Parameter<T>*> parameters();
  std::vector<const Parameter<T>*> parameters() const;
  std::size_t parameter_count() const;
  void zero_grad();
  bool has_active_dropout() const;

  /// Returns p in (0, 1). Dropout is active only when `training`; `rng`
  /// supplies dropout masks and may be null for inference. Throws
  /// ShapeMismatch or NonFiniteActivation.
  T forward(const Tensor<T>& x, Workspace<T>& ws, bool training, Rng* rng) const;
  /// Deterministic inference.
  T predict_proba(const Tensor<T>& x) const;

  /// Accumulates d bce_loss / d theta for the pass stored in `ws` into every
  /// parameter's grad. The output layer receives p - y directly.
  void backward(Workspace<T>& ws, int label);

 private:
  Shape input_shape_;
  std::vector<LayerSpec> specs_;
  std::vector<std::unique_ptr<Layer<T>>> layers_;
  std::uint64_t seed_ = 0;
};

extern template class Model<float>;
extern template class Model<double>;

struct PaperModelOptions {
  std::size_t conv1_filters = 256;
  std::size_t conv2_filters = 128;
  std::size_t kernel = 3;
  Activation conv1_activation = Activation::kNone;
  std::size_t pool = 2;
  double dropout1 = 0.25;
  std::size_t dense_units = 512;
  double dropout2 = 0.5;
};

/// Conv2D(256) -> Conv2D(128, ReLU) -> MaxPool2D(2x2) -> Dropout(0.25) ->
/// Flatten -> Dense(512, ReLU) -> Dropout(0.5) -> Dense(1, Sigmoid).
std::vector<LayerSpec> paper_architecture(const PaperModelOptions& options = {});

template <typename T>
Model<T> build_paper_model(const Shape& input_shape, std::uint64_t seed = 0, const PaperModelOptions& options = {});

/// Binary cross-entropy with p clamped to [1e-7, 1 - 1e-7].
double bce_loss(double p, int label);

struct Prediction {
  Label label = Label::kReal;
  double probability = 0.0;
};

/// SATIRE iff p >= threshold.
Prediction classify(double probability, double threshold = 0.5);

template <typename T>
Tensor<T> to_tensor(std::span<const double> image, const Shape& shape);

template <typename T>
Prediction predict(const Model<T>& model, const Tensor<T>& x, double threshold = 0.5) {
  return classify(static_cast<double>(model.predict_proba(x)), threshold);
}

}  // namespace satdetect::nn
