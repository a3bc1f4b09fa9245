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

#include "satdetect/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "satdetect/error.hpp"

namespace satdetect::nn {

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? ", " : "") << shape[i];
  os << ')';
  return os.str();
}

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != shape_size(shape_)) {
    throw Error(ErrorCode::kShapeMismatch, "tensor data does not match shape " + shape_string(shape_));
  }
}

template <typename T>
void Tensor<T>::reshape(const Shape& shape) {
  shape_ = shape;
  data_.resize(shape_size(shape));
}

template <typename T>
bool Tensor<T>::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](T v) { return std::isfinite(v); });
}

template class Tensor<float>;
template class Tensor<double>;

std::string_view activation_name(Activation a) noexcept {
  switch (a) {
    case Activation::kRelu:
      return "relu";
    case Activation::kSigmoid:
      return "sigmoid";
    case Activation::kNone:
      break;
  }
  return "none";
}

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "none" || name == "linear") return Activation::kNone;
  throw Error(ErrorCode::kInvalidArgument, "unknown activation '" + std::string(name) + "'");
}

// LayerSpec

LayerSpec LayerSpec::conv2d(std::size_t filters, std::size_t kh, std::size_t kw, Activation act) {
  LayerSpec s;
  s.kind = LayerKind::kConv2D;
  s.units = filters;
  s.kernel_h = kh;
  s.kernel_w = kw;
  s.activation = act;
  return s;
}

LayerSpec LayerSpec::max_pool2d(std::size_t ph, std::size_t pw) {
  LayerSpec s;
  s.kind = LayerKind::kMaxPool2D;
  s.pool_h = ph;
  s.pool_w = pw;
  return s;
}

LayerSpec LayerSpec::dropout(double rate) {
  LayerSpec s;
  s.kind = LayerKind::kDropout;
  s.rate = rate;
  return s;
}

LayerSpec LayerSpec::flatten() { return LayerSpec{}; }

LayerSpec LayerSpec::dense(std::size_t units, Activation act) {
  LayerSpec s;
  s.kind = LayerKind::kDense;
  s.units = units;
  s.activation = act;
  return s;
}

void LayerSpec::to_json(nlohmann::json& j) const {
  switch (kind) {
    case LayerKind::kConv2D:
      j = {{"type", "conv2d"},
           {"filters", units},
           {"kernel", {kernel_h, kernel_w}},
           {"activation", activation_name(activation)}};
      break;
    case LayerKind::kMaxPool2D:
      j = {{"type", "maxpool2d"}, {"pool", {pool_h, pool_w}}};
      break;
    case LayerKind::kDropout:
      j = {{"type", "dropout"}, {"rate", rate}};
      break;
    case LayerKind::kFlatten:
      j = {{"type", "flatten"}};
      break;
    case LayerKind::kDense:
      j = {{"type", "dense"}, {"units", units}, {"activation", activation_name(activation)}};
      break;
  }
}

LayerSpec LayerSpec::from_json(const nlohmann::json& j) {
  try {
    const auto type = j.at("type").get<std::string>();
    if (type == "conv2d") {
      const auto& k = j.at("kernel");
      return conv2d(j.at("filters").get<std::size_t>(), k.at(0).get<std::size_t>(), k.at(1).get<std::size_t>(),
                    parse_activation(j.at("activation").get<std::string>()));
    }
    if (type == "maxpool2d") {
      const auto& p = j.at("pool");
      return max_pool2d(p.at(0).get<std::size_t>(), p.at(1).get<std::size_t>());
    }
    if (type == "dropout") return dropout(j.at("rate").get<double>());
    if (type == "flatten") return flatten();
    if (type == "dense") {
      return dense(j.at("units").get<std::size_t>(), parse_activation(j.at("activation").get<std::string>()));
    }
    throw Error(ErrorCode::kFormatError, "unknown layer type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("layer spec: ") + e.what());
  }
}

std::string LayerSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case LayerKind::kConv2D:
      os << "Conv2D(" << units << ", " << kernel_h << "x" << kernel_w << ", " << activation_name(activation) << ")";
      break;
    case LayerKind::kMaxPool2D:
      os << "MaxPool2D(" << pool_h << "x" << pool_w << ")";
      break;
    case LayerKind::kDropout:
      os << "Dropout(" << rate << ")";
      break;
    case LayerKind::kFlatten:
      os << "Flatten";
      break;
    case LayerKind::kDense:
      os << "Dense(" << units << ", " << activation_name(activation) << ")";
      break;
  }
  return os.str();
}

Shape infer_output_shape(const LayerSpec& spec, const Shape& in) {
  auto underflow = [&](const std::string& why) {
    return Error(ErrorCode::kShapeUnderflow, spec.describe() + " on input " + shape_string(in) + ": " + why);
  };
  switch (spec.kind) {
    case LayerKind::kConv2D: {
      if (in.size() != 3) throw Error(ErrorCode::kShapeMismatch, "Conv2D expects (H, W, C), got " + shape_string(in));
      if (spec.units == 0 || spec.kernel_h == 0 || spec.kernel_w == 0) {
        throw Error(ErrorCode::kInvalidArgument, "Conv2D needs positive filters and kernel size");
      }
      if (in[0] < spec.kernel_h || in[1] < spec.kernel_w) throw underflow("input smaller than kernel");
      return {in[0] - spec.kernel_h + 1, in[1] - spec.kernel_w + 1, spec.units};
    }
    case LayerKind::kMaxPool2D: {
      if (in.size() != 3) {
        throw Error(ErrorCode::kShapeMismatch, "MaxPool2D expects (H, W, C), got " + shape_string(in));
      }
      if (spec.pool_h == 0 || spec.pool_w == 0) throw Error(ErrorCode::kInvalidArgument, "pool size must be positive");
      if (in[0] < spec.pool_h || in[1] < spec.pool_w) throw underflow("input smaller than pool window");
      return {in[0] / spec.pool_h, in[1] / spec.pool_w, in[2]};
    }
    case LayerKind::kDropout:
      if (!(spec.rate >= 0.0 && spec.rate < 1.0)) {
        throw Error(ErrorCode::kInvalidArgument, "dropout rate must lie in [0, 1)");
      }
      return in;
    case LayerKind::kFlatten:
      return {shape_size(in)};
    case LayerKind::kDense:
      if (in.size() != 1) throw Error(ErrorCode::kShapeMismatch, "Dense expects a flat input, got " + shape_string(in));
      if (spec.units == 0) throw Error(ErrorCode::kInvalidArgument, "Dense needs at least one unit");
      return {spec.units};
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown layer kind");
}

template <typename T>
std::vector<T> Layer<T>::export_parameter(std::size_t which) const {
  return parameters()[which].value;
}

template <typename T>
void Layer<T>::import_parameter(std::size_t which, std::span<const T> values) {
  auto& p = parameters()[which];
  if (values.size() != p.value.size()) {
    throw Error(ErrorCode::kShapeMismatch, "parameter '" + p.name + "' expects " + std::to_string(p.value.size()) +
                                               " values, got " + std::to_string(values.size()));
  }
  std::copy(values.begin(), values.end(), p.value.begin());
}

namespace {

template <typename T>
T activate(Activation a, T x) {
  switch (a) {
    case Activation::kRelu:
      return x > T{0} ? x : T{0};
    case Activation::kSigmoid:
      return T{1} / (T{1} + std::exp(-x));
    case Activation::kNone:
      break;
  }
  return x;
}

// Derivative expressed through the activation output y.
template <typename T>
T activation_grad(Activation a, T y) {
  switch (a) {
    case Activation::kRelu:
      return y > T{0} ? T{1} : T{0};
    case Activation::kSigmoid:
      return y * (T{1} - y);
    case Activation::kNone:
      break;
  }
  return T{1};
}

template <typename T>
void fill_uniform(std::vector<T>& values, Rng& rng, double limit) {
  for (auto& v : values) v = static_cast<T>(rng.uniform(-limit, limit));
}

// He-uniform for ReLU, Glorot-uniform otherwise.
double init_limit(Activation a, double fan_in, double fan_out) {
  return a == Activation::kRelu ? std::sqrt(6.0 / fan_in) : std::sqrt(6.0 / (fan_in + fan_out));
}

template <typename T>
void to_preactivation_grad(Activation act, const Tensor<T>& out, const Tensor<T>& grad_out, bool preactivation,
                           std::vector<T>& grad_pre) {
  grad_pre.resize(out.size());
  if (preactivation || act == Activation::kNone) {
    std::copy(grad_out.data(), grad_out.data() + grad_out.size(), grad_pre.begin());
    return;
  }
  for (std::size_t i = 0; i < out.size(); ++i) grad_pre[i] = grad_out[i] * activation_grad(act, out[i]);
}

// Valid 2D convolution, stride 1, on channels-last tensors. Weights are kept
// as [kh][kw][c][f] so the innermost loops run contiguously over filters;
// the canonical (f, c, kh, kw) order is used for init and serialization.
// Blocked product used by the convolution passes:
//   c[i * ldc + j] += sum_r a[row[i] + col[r]] * b[r * ldb + j]
// The gather offsets let one kernel serve the forward pass, the weight
// gradient and the input gradient without materializing patch matrices.
// Full tiles use fixed sizes so the accumulators stay in registers.
template <typename T>
struct GemmTile {
  static constexpr std::size_t kRows = 8;
  static constexpr std::size_t kCols = 128 / sizeof(T);
};

template <typename T, std::size_t NI, std::size_t NJ>
void gemm_tile_fixed(const T* a, const std::size_t* row, const std::size_t* col, std::size_t depth, const T* b,
                     std::size_t ldb, T* c, std::size_t ldc) {
  T acc[NI][NJ] = {};
  for (std::size_t r = 0; r < depth; ++r) {
    const T* br = b + r * ldb;
    const T* ar = a + col[r];
    for (std::size_t i = 0; i < NI; ++i) {
      const T v = ar[row[i]];
#pragma omp simd
      for (std::size_t j = 0; j < NJ; ++j) acc[i][j] += v * br[j];
    }
  }
  for (std::size_t i = 0; i < NI; ++i) {
    T* ci = c + i * ldc;
#pragma omp simd
    for (std::size_t j = 0; j < NJ; ++j) ci[j] += acc[i][j];
  }
}

template <typename T>
void gemm_tile_any(std::size_t ni, std::size_t nj, const T* a, const std::size_t* row, const std::size_t* col,
                   std::size_t depth, const T* b, std::size_t ldb, T* c, std::size_t ldc) {
  for (std::size_t i = 0; i < ni; ++i) {
    T* ci = c + i * ldc;
    for (std::size_t r = 0; r < depth; ++r) {
      const T v = a[row[i] + col[r]];
      const T* br = b + r * ldb;
      for (std::size_t j = 0; j < nj; ++j) ci[j] += v * br[j];
    }
  }
}

template <typename T>
void gather_gemm(std::size_t rows, std::size_t cols, std::size_t depth, const T* a, const std::size_t* row,
                 const std::size_t* col, const T* b, std::size_t ldb, T* c, std::size_t ldc) {
  constexpr std::size_t NI = GemmTile<T>::kRows;
  constexpr std::size_t NJ = GemmTile<T>::kCols;
  for (std::size_t i0 = 0; i0 < rows; i0 += NI) {
    const std::size_t ni = std::min(NI, rows - i0);
    for (std::size_t j0 = 0; j0 < cols; j0 += NJ) {
      const std::size_t nj = std::min(NJ, cols - j0);
      if (ni == NI && nj == NJ) {
        gemm_tile_fixed<T, NI, NJ>(a, row + i0, col, depth, b + j0, ldb, c + i0 * ldc + j0, ldc);
      } else {
        gemm_tile_any(ni, nj, a, row + i0, col, depth, b + j0, ldb, c + i0 * ldc + j0, ldc);
      }
    }
  }
}

template <typename T>
class Conv2D final : public Layer<T> {
 public:
  Conv2D(const LayerSpec& spec, const Shape& in) : spec_(spec) {
    this->input_shape_ = in;
    this->output_shape_ = infer_output_shape(spec, in);
    const std::size_t c = in[2];
    params_[0].name = "weight";
    params_[0].shape = {spec.units, c, spec.kernel_h, spec.kernel_w};
    params_[0].value.assign(spec.units * c * spec.kernel_h * spec.kernel_w, T{0});
    params_[1].name = "bias";
    params_[1].shape = {spec.units};
    params_[1].value.assign(spec.units, T{0});
    build_offsets();
  }

  const LayerSpec& spec() const noexcept override { return spec_; }
  std::span<Parameter<T>> parameters() noexcept override { return params_; }
  std::span<const Parameter<T>> parameters() const noexcept override { return params_; }

  void initialize(Rng& rng) override {
    const double receptive = static_cast<double>(spec_.kernel_h * spec_.kernel_w);
    const double limit = init_limit(spec_.activation, receptive * static_cast<double>(this->input_shape_[2]),
                                    receptive * static_cast<double>(spec_.units));
    std::vector<T> canonical(params_[0].value.size());
    fill_uniform(canonical, rng, limit);
    import_parameter(0, canonical);
    std::fill(params_[1].value.begin(), params_[1].value.end(), T{0});
  }

  std::size_t internal_index(std::size_t f, std::size_t c, std::size_t kh, std::size_t kw) const {
    const std::size_t channels = this->input_shape_[2];
    return ((kh * spec_.kernel_w + kw) * channels + c) * spec_.units + f;
  }

  std::vector<T> export_parameter(std::size_t which) const override {
    if (which != 0) return Layer<T>::export_parameter(which);
    const std::size_t channels = this->input_shape_[2];
    std::vector<T> out(params_[0].value.size());
    std::size_t k = 0;
    for (std::size_t f = 0; f < spec_.units; ++f)
      for (std::size_t c = 0; c < channels; ++c)
        for (std::size_t kh = 0; kh < spec_.kernel_h; ++kh)
          for (std::size_t kw = 0; kw < spec_.kernel_w; ++kw) out[k++] = params_[0].value[internal_index(f, c, kh, kw)];
    return out;
  }

  void import_parameter(std::size_t which, std::span<const T> values) override {
    if (which != 0) return Layer<T>::import_parameter(which, values);
    if (values.size() != params_[0].value.size()) {
      throw Error(ErrorCode::kShapeMismatch, "conv weight expects " + std::to_string(params_[0].value.size()) +
                                                 " values, got " + std::to_string(values.size()));
    }
    const std::size_t channels = this->input_shape_[2];
    std::size_t k = 0;
    for (std::size_t f = 0; f < spec_.units; ++f)
      for (std::size_t c = 0; c < channels; ++c)
        for (std::size_t kh = 0; kh < spec_.kernel_h; ++kh)
          for (std::size_t kw = 0; kw < spec_.kernel_w; ++kw)
            params_[0].value[internal_index(f, c, kh, kw)] = values[k++];
  }

  void forward(const Tensor<T>& in, Tensor<T>& out, LayerCache<T>&, bool, Rng&) const override {
    const std::size_t filters = spec_.units;
    const std::size_t pixels = this->output_shape_[0] * this->output_shape_[1];
    out.reshape(this->output_shape_);
    const T* bias = params_[1].value.data();
    for (std::size_t p = 0; p < pixels; ++p) std::copy(bias, bias + filters, out.data() + p * filters);
    gather_gemm(pixels, filters, taps_.size(), in.data(), pixel_base_.data(), taps_.data(), params_[0].value.data(),
                filters, out.data(), filters);
    if (spec_.activation != Activation::kNone) {
      for (auto& v : out.span()) v = activate(spec_.activation, v);
    }
  }

  void backward(const Tensor<T>& in, const Tensor<T>& out, const Tensor<T>& grad_out, Tensor<T>* grad_in,
                const LayerCache<T>&, bool preactivation) override {
    const std::size_t channels = this->input_shape_[2];
    const std::size_t filters = spec_.units;
    const std::size_t pixels = this->output_shape_[0] * this->output_shape_[1];
    const std::size_t depth = taps_.size();
    to_preactivation_grad(spec_.activation, out, grad_out, preactivation, grad_pre_);
    params_[0].ensure_grad();
    params_[1].ensure_grad();
    T* gb = params_[1].grad.data();
    for (std::size_t p = 0; p < pixels; ++p) {
      const T* gp = grad_pre_.data() + p * filters;
      for (std::size_t f = 0; f < filters; ++f) gb[f] += gp[f];
    }
    // dW[k, f] += sum_p x[base(p) + tap(k)] * g[p, f]
    gather_gemm(depth, filters, pixels, in.data(), taps_.data(), pixel_base_.data(), grad_pre_.data(), filters,
                params_[0].grad.data(), filters);
    if (!grad_in) return;

    // dPatch[p, k] = sum_f g[p, f] * W[k, f], then scatter-add into the input.
    const T* weight = params_[0].value.data();
    weight_t_.resize(filters * depth);
    for (std::size_t k = 0; k < depth; ++k) {
      for (std::size_t f = 0; f < filters; ++f) weight_t_[f * depth + k] = weight[k * filters + f];
    }
    patch_grad_.assign(pixels * depth, T{0});
    gather_gemm(pixels, depth, filters, grad_pre_.data(), grad_row_.data(), filter_index_.data(), weight_t_.data(),
                depth, patch_grad_.data(), depth);
    grad_in->reshape(this->input_shape_);
    grad_in->fill(T{0});
    T* gi = grad_in->data();
    for (std::size_t p = 0; p < pixels; ++p) {
      const T* row = patch_grad_.data() + p * depth;
      for (std::size_t t = 0; t < depth / channels; ++t) {
        T* dst = gi + pixel_base_[p] + taps_[t * channels];
        const T* src = row + t * channels;
        for (std::size_t c = 0; c < channels; ++c) dst[c] += src[c];
      }
    }
  }

 private:
  void build_offsets() {
    const std::size_t in_w = this->input_shape_[1];
    const std::size_t channels = this->input_shape_[2];
    const std::size_t out_h = this->output_shape_[0];
    const std::size_t out_w = this->output_shape_[1];
    for (std::size_t y = 0; y < out_h; ++y) {
      for (std::size_t x = 0; x < out_w; ++x) pixel_base_.push_back((y * in_w + x) * channels);
    }
    for (std::size_t kh = 0; kh < spec_.kernel_h; ++kh) {
      for (std::size_t kw = 0; kw < spec_.kernel_w; ++kw) {
        for (std::size_t c = 0; c < channels; ++c) taps_.push_back((kh * in_w + kw) * channels + c);
      }
    }
    for (std::size_t p = 0; p < pixel_base_.size(); ++p) grad_row_.push_back(p * spec_.units);
    for (std::size_t f = 0; f < spec_.units; ++f) filter_index_.push_back(f);
  }

  LayerSpec spec_;
  Parameter<T> params_[2];
  std::vector<std::size_t> pixel_base_;    // input offset of each output pixel's window
  std::vector<std::size_t> taps_;          // offset of each (kh, kw, c) within a window
  std::vector<std::size_t> grad_row_;      // p * filters
  std::vector<std::size_t> filter_index_;  // 0 .. filters - 1
  std::vector<T> grad_pre_;
  std::vector<T> weight_t_;
  std::vector<T> patch_grad_;
};

template <typename T>
class MaxPool2D final : public Layer<T> {
 public:
  MaxPool2D(const LayerSpec& spec, const Shape& in) : spec_(spec) {
    this->input_shape_ = in;
    this->output_shape_ = infer_output_shape(spec, in);
  }

  const LayerSpec& spec() const noexcept override { return spec_; }

  void forward(const Tensor<T>& in, Tensor<T>& out, LayerCache<T>& cache, bool, Rng&) const override {
    const std::size_t in_w = this->input_shape_[1];
    const std::size_t channels = this->input_shape_[2];
    const std::size_t out_h = this->output_shape_[0];
    const std::size_t out_w = this->output_shape_[1];
    out.reshape(this->output_shape_);
    cache.argmax.resize(out.size());
    for (std::size_t y = 0; y < out_h; ++y) {
      for (std::size_t x = 0; x < out_w; ++x) {
        for (std::size_t c = 0; c < channels; ++c) {
          std::size_t best = (y * spec_.pool_h * in_w + x * spec_.pool_w) * channels + c;
          for (std::size_t dy = 0; dy < spec_.pool_h; ++dy) {
            for (std::size_t dx = 0; dx < spec_.pool_w; ++dx) {
              const std::size_t idx = ((y * spec_.pool_h + dy) * in_w + x * spec_.pool_w + dx) * channels + c;
              if (in[idx] > in[best]) best = idx;
            }
          }
          const std::size_t o = (y * out_w + x) * channels + c;
          out[o] = in[best];
          cache.argmax[o] = static_cast<std::uint32_t>(best);
        }
      }
    }
  }

  void backward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>& grad_out, Tensor<T>* grad_in,
                const LayerCache<T>& cache, bool) override {
    if (!grad_in) return;
    grad_in->reshape(this->input_shape_);
    grad_in->fill(T{0});
    for (std::size_t o = 0; o < grad_out.size(); ++o) (*grad_in)[cache.argmax[o]] += grad_out[o];
  }

 private:
  LayerSpec spec_;
};

// Inverted dropout: kept units are scaled by 1 / (1 - rate) during training.
template <typename T>
class Dropout final : public Layer<T> {
 public:
  Dropout(const LayerSpec& spec, const Shape& in) : spec_(spec) {
    this->input_shape_ = in;
    this->output_shape_ = infer_output_shape(spec, in);
  }

  const LayerSpec& spec() const noexcept override { return spec_; }

  void forward(const Tensor<T>& in, Tensor<T>& out, LayerCache<T>& cache, bool training, Rng& rng) const override {
    out.reshape(this->output_shape_);
    if (!training || spec_.rate == 0.0) {
      std::copy(in.data(), in.data() + in.size(), out.data());
      return;
    }
    if (!cache.mask_frozen || cache.mask.size() != in.size()) {
      const T keep_scale = static_cast<T>(1.0 / (1.0 - spec_.rate));
      cache.mask.resize(in.size());
      for (auto& m : cache.mask) m = rng.uniform() < spec_.rate ? T{0} : keep_scale;
    }
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] * cache.mask[i];
  }

  void backward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>& grad_out, Tensor<T>* grad_in,
                const LayerCache<T>& cache, bool) override {
    if (!grad_in) return;
    grad_in->reshape(this->input_shape_);
    if (cache.mask.size() != grad_out.size()) {
      std::copy(grad_out.data(), grad_out.data() + grad_out.size(), grad_in->data());
      return;
    }
    for (std::size_t i = 0; i < grad_out.size(); ++i) (*grad_in)[i] = grad_out[i] * cache.mask[i];
  }

 private:
  LayerSpec spec_;
};

template <typename T>
class Flatten final : public Layer<T> {
 public:
  Flatten(const LayerSpec& spec, const Shape& in) : spec_(spec) {
    this->input_shape_ = in;
    this->output_shape_ = infer_output_shape(spec, in);
  }

  const LayerSpec& spec() const noexcept override { return spec_; }

  void forward(const Tensor<T>& in, Tensor<T>& out, LayerCache<T>&, bool, Rng&) const override {
    out.reshape(this->output_shape_);
    std::copy(in.data(), in.data() + in.size(), out.data());
  }

  void backward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>& grad_out, Tensor<T>* grad_in, const LayerCache<T>&,
                bool) override {
    if (!grad_in) return;
    grad_in->reshape(this->input_shape_);
    std::copy(grad_out.data(), grad_out.data() + grad_out.size(), grad_in->data());
  }

 private:
  LayerSpec spec_;
};

// Fully connected layer, weight stored (units, inputs) row-major.
template <typename T>
class Dense final : public Layer<T> {
 public:
  Dense(const LayerSpec& spec, const Shape& in) : spec_(spec) {
    this->input_shape_ = in;
    this->output_shape_ = infer_output_shape(spec, in);
    params_[0].name = "weight";
    params_[0].shape = {spec.units, in[0]};
    params_[0].value.assign(spec.units * in[0], T{0});
    params_[1].name = "bias";
    params_[1].shape = {spec.units};
    params_[1].value.assign(spec.units, T{0});
  }

  const LayerSpec& spec() const noexcept override { return spec_; }
  std::span<Parameter<T>> parameters() noexcept override { return params_; }
  std::span<const Parameter<T>> parameters() const noexcept override { return params_; }

  void initialize(Rng& rng) override {
    const double limit =
        init_limit(spec_.activation, static_cast<double>(this->input_shape_[0]), static_cast<double>(spec_.units));
    fill_uniform(params_[0].value, rng, limit);
    std::fill(params_[1].value.begin(), params_[1].value.end(), T{0});
  }

  void forward(const Tensor<T>& in, Tensor<T>& out, LayerCache<T>&, bool, Rng&) const override {
    const std::size_t n_in = this->input_shape_[0];
    out.reshape(this->output_shape_);
    const T* x = in.data();
    for (std::size_t u = 0; u < spec_.units; ++u) {
      const T* w = params_[0].value.data() + u * n_in;
      T acc{0};
#pragma omp simd reduction(+ : acc)
      for (std::size_t i = 0; i < n_in; ++i) acc += w[i] * x[i];
      out[u] = activate(spec_.activation, acc + params_[1].value[u]);
    }
  }

  void backward(const Tensor<T>& in, const Tensor<T>& out, const Tensor<T>& grad_out, Tensor<T>* grad_in,
                const LayerCache<T>&, bool preactivation) override {
    const std::size_t n_in = this->input_shape_[0];
    to_preactivation_grad(spec_.activation, out, grad_out, preactivation, grad_pre_);
    params_[0].ensure_grad();
    params_[1].ensure_grad();
    if (grad_in) {
      grad_in->reshape(this->input_shape_);
      grad_in->fill(T{0});
    }
    const T* x = in.data();
    for (std::size_t u = 0; u < spec_.units; ++u) {
      const T g = grad_pre_[u];
      if (g == T{0}) continue;
      params_[1].grad[u] += g;
      T* gw = params_[0].grad.data() + u * n_in;
#pragma omp simd
      for (std::size_t i = 0; i < n_in; ++i) gw[i] += g * x[i];
      if (grad_in) {
        const T* w = params_[0].value.data() + u * n_in;
        T* gi = grad_in->data();
#pragma omp simd
        for (std::size_t i = 0; i < n_in; ++i) gi[i] += g * w[i];
      }
    }
  }

 private:
  LayerSpec spec_;
  Parameter<T> params_[2];
  std::vector<T> grad_pre_;
};

}  // namespace

template <typename T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& spec, const Shape& input_shape) {
  switch (spec.kind) {
    case LayerKind::kConv2D:
      return std::make_unique<Conv2D<T>>(spec, input_shape);
    case LayerKind::kMaxPool2D:
      return std::make_unique<MaxPool2D<T>>(spec, input_shape);
    case LayerKind::kDropout:
      return std::make_unique<Dropout<T>>(spec, input_shape);
    case LayerKind::kFlatten:
      return std::make_unique<Flatten<T>>(spec, input_shape);
    case LayerKind::kDense:
      return std::make_unique<Dense<T>>(spec, input_shape);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown layer kind");
}

template class Layer<float>;
template class Layer<double>;
template std::unique_ptr<Layer<float>> make_layer<float>(const LayerSpec&, const Shape&);
template std::unique_ptr<Layer<double>> make_layer<double>(const LayerSpec&, const Shape&);

}  // namespace satdetect::nn
