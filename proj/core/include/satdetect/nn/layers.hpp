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
#include <nlohmann/json_fwd.hpp>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "satdetect/nn/tensor.hpp"
#include "satdetect/rng.hpp"

namespace satdetect::nn {

enum class Activation { kNone, kRelu, kSigmoid };

std::string_view activation_name(Activation a) noexcept;
Activation parse_activation(std::string_view name);

enum class LayerKind { kConv2D, kMaxPool2D, kDropout, kFlatten, kDense };

/// Architecture description of one layer; enough to rebuild it.
struct LayerSpec {
  LayerKind kind = LayerKind::kFlatten;
  std::size_t units = 0;  ///< conv filters or dense units
  std::size_t kernel_h = 0;
  std::size_t kernel_w = 0;
  std::size_t pool_h = 0;
  std::size_t pool_w = 0;
  double rate = 0.0;
  Activation activation = Activation::kNone;

  static LayerSpec conv2d(std::size_t filters, std::size_t kh, std::size_t kw, Activation act);
  static LayerSpec max_pool2d(std::size_t ph, std::size_t pw);
  static LayerSpec dropout(double rate);
  static LayerSpec flatten();
  static LayerSpec dense(std::size_t units, Activation act);

  void to_json(nlohmann::json& j) const;
  static LayerSpec from_json(const nlohmann::json& j);
  std::string describe() const;

  bool operator==(const LayerSpec&) const = default;
};

/// Learnable array. `shape` is the canonical shape used for initialization
/// fan computation and serialization; `value` may be stored in a layer's
/// internal order (see Layer::export_parameter).
template <typename T>
struct Parameter {
  std::string name;
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;  ///< allocated on first backward

  void ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), T{0});
  }
};

/// Per-layer forward state needed by backward.
template <typename T>
struct LayerCache {
  std::vector<std::uint32_t> argmax;
  std::vector<T> mask;
  bool mask_frozen = false;
};

template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;

  virtual const LayerSpec& spec() const noexcept = 0;
  const Shape& input_shape() const noexcept { return input_shape_; }
  const Shape& output_shape() const noexcept { return output_shape_; }

  virtual void forward(const Tensor<T>& in, Tensor<T>& out, LayerCache<T>& cache, bool training, Rng& rng) const = 0;

  /// Accumulates parameter gradients and, when grad_in is non-null, writes
  /// the gradient with respect to the input. With `preactivation` set,
  /// grad_out already holds the gradient with respect to the pre-activation.
  virtual void backward(const Tensor<T>& in, const Tensor<T>& out, const Tensor<T>& grad_out, Tensor<T>* grad_in,
                        const LayerCache<T>& cache, bool preactivation = false) = 0;

  virtual std::span<Parameter<T>> parameters() noexcept { return {}; }
  virtual std::span<const Parameter<T>> parameters() const noexcept { return {}; }

  /// Weight initialization from a seeded stream, in canonical order.
  virtual void initialize(Rng& /*rng*/) {}

  /// Canonical-order copy of parameter `which`.
  virtual std::vector<T> export_parameter(std::size_t which) const;
  virtual void import_parameter(std::size_t which, std::span<const T> values);

 protected:
  Shape input_shape_;
  Shape output_shape_;
};

/// Builds a layer for the given input shape. Throws ShapeUnderflow when the
/// output would be empty and ShapeMismatch for an incompatible input rank.
template <typename T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& spec, const Shape& input_shape);

/// Static output shape of `spec` applied to `input`.
Shape infer_output_shape(const LayerSpec& spec, const Shape& input);

}  // namespace satdetect::nn
