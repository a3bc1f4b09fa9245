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

#include "satdetect/nn/model.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "satdetect/error.hpp"

namespace satdetect::nn {
namespace {
constexpr double kProbabilityEpsilon = 1e-7;
}

template <typename T>
Model<T>::Model(Shape input_shape, std::vector<LayerSpec> specs, std::uint64_t seed)
    : input_shape_(std::move(input_shape)), specs_(std::move(specs)), seed_(seed) {
  if (specs_.empty()) throw Error(ErrorCode::kInvalidArgument, "model needs at least one layer");
  const auto& last = specs_.back();
  if (last.kind != LayerKind::kDense || last.units != 1 || last.activation != Activation::kSigmoid) {
    throw Error(ErrorCode::kInvalidArgument, "the final layer must be Dense(1, sigmoid)");
  }
  Shape shape = input_shape_;
  for (const auto& s : specs_) {
    layers_.push_back(make_layer<T>(s, shape));
    shape = layers_.back()->output_shape();
  }
  Rng rng(seed_);
  for (auto& l : layers_) l->initialize(rng);
}

template <typename T>
Model<T>::Model(const Model& other) : input_shape_(other.input_shape_), specs_(other.specs_), seed_(other.seed_) {
  Shape shape = input_shape_;
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    layers_.push_back(make_layer<T>(specs_[i], shape));
    shape = layers_.back()->output_shape();
    auto dst = layers_.back()->parameters();
    auto src = other.layers_[i]->parameters();
    for (std::size_t p = 0; p < dst.size(); ++p) dst[p].value = src[p].value;
  }
}

template <typename T>
Model<T>& Model<T>::operator=(const Model& other) {
  if (this != &other) *this = Model(other);
  return *this;
}

template <typename T>
std::vector<Parameter<T>*> Model<T>::parameters() {
  std::vector<Parameter<T>*> out;
  for (auto& l : layers_) {
    for (auto& p : l->parameters()) out.push_back(&p);
  }
  return out;
}

template <typename T>
std::vector<const Parameter<T>*> Model<T>::parameters() const {
  std::vector<const Parameter<T>*> out;
  for (const auto& l : layers_) {
    for (const auto& p : std::as_const(*l).parameters()) out.push_back(&p);
  }
  return out;
}

template <typename T>
std::size_t Model<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto* p : parameters()) n += p->value.size();
  return n;
}

template <typename T>
void Model<T>::zero_grad() {
  for (auto* p : parameters()) {
    p->ensure_grad();
    std::fill(p->grad.begin(), p->grad.end(), T{0});
  }
}

template <typename T>
bool Model<T>::has_active_dropout() const {
  return std::any_of(specs_.begin(), specs_.end(),
                     [](const LayerSpec& s) { return s.kind == LayerKind::kDropout && s.rate > 0.0; });
}

template <typename T>
T Model<T>::forward(const Tensor<T>& x, Workspace<T>& ws, bool training, Rng* rng) const {
  if (x.shape() != input_shape_) {
    throw Error(ErrorCode::kShapeMismatch,
                "input shape " + shape_string(x.shape()) + " does not match model input " + shape_string(input_shape_));
  }
  if (training && has_active_dropout() && rng == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "training forward with dropout needs a random source");
  }
  ws.input = &x;
  ws.outputs.resize(layers_.size());
  ws.caches.resize(layers_.size());
  Rng unused(0);
  Rng& source = rng ? *rng : unused;
  const Tensor<T>* current = &x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    layers_[i]->forward(*current, ws.outputs[i], ws.caches[i], training, source);
    if (!ws.outputs[i].all_finite()) {
      throw Error(ErrorCode::kNonFiniteActivation,
                  "layer " + std::to_string(i) + " (" + specs_[i].describe() + ") produced a non-finite value");
    }
    current = &ws.outputs[i];
  }
  const double p = std::clamp(static_cast<double>((*current)[0]), kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
  return static_cast<T>(p);
}

template <typename T>
T Model<T>::predict_proba(const Tensor<T>& x) const {
  Workspace<T> ws;
  return forward(x, ws, false, nullptr);
}

template <typename T>
void Model<T>::backward(Workspace<T>& ws, int label) {
  if (ws.outputs.size() != layers_.size() || ws.input == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "backward called without a matching forward pass");
  }
  const T p = ws.outputs.back()[0];
  Tensor<T>* grad = &ws.grad_a;
  Tensor<T>* next = &ws.grad_b;
  grad->reshape({1});
  (*grad)[0] = p - static_cast<T>(label);
  for (std::size_t i = layers_.size(); i-- > 0;) {
    const Tensor<T>& in = i == 0 ? *ws.input : ws.outputs[i - 1];
    layers_[i]->backward(in, ws.outputs[i], *grad, i == 0 ? nullptr : next, ws.caches[i], i + 1 == layers_.size());
    std::swap(grad, next);
  }
}

template class Model<float>;
template class Model<double>;

std::vector<LayerSpec> paper_architecture(const PaperModelOptions& o) {
  return {
      LayerSpec::conv2d(o.conv1_filters, o.kernel, o.kernel, o.conv1_activation),
      LayerSpec::conv2d(o.conv2_filters, o.kernel, o.kernel, Activation::kRelu),
      LayerSpec::max_pool2d(o.pool, o.pool),
      LayerSpec::dropout(o.dropout1),
      LayerSpec::flatten(),
      LayerSpec::dense(o.dense_units, Activation::kRelu),
      LayerSpec::dropout(o.dropout2),
      LayerSpec::dense(1, Activation::kSigmoid),
  };
}

template <typename T>
Model<T> build_paper_model(const Shape& input_shape, std::uint64_t seed, const PaperModelOptions& options) {
  return Model<T>(input_shape, paper_architecture(options), seed);
}

template Model<float> build_paper_model<float>(const Shape&, std::uint64_t, const PaperModelOptions&);
template Model<double> build_paper_model<double>(const Shape&, std::uint64_t, const PaperModelOptions&);

double bce_loss(double p, int label) {
  const double q = std::clamp(p, kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
  return label ? -std::log(q) : -std::log(1.0 - q);
}

Prediction classify(double probability, double threshold) {
  return {probability >= threshold ? Label::kSatire : Label::kReal, probability};
}

template <typename T>
Tensor<T> to_tensor(std::span<const double> image, const Shape& shape) {
  if (image.size() != shape_size(shape)) {
    throw Error(ErrorCode::kShapeMismatch, "image has " + std::to_string(image.size()) + " values, shape " +
                                               shape_string(shape) + " needs " + std::to_string(shape_size(shape)));
  }
  std::vector<T> data(image.size());
  std::transform(image.begin(), image.end(), data.begin(), [](double v) { return static_cast<T>(v); });
  return Tensor<T>(shape, std::move(data));
}

template Tensor<float> to_tensor<float>(std::span<const double>, const Shape&);
template Tensor<double> to_tensor<double>(std::span<const double>, const Shape&);

}  // namespace satdetect::nn
