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

#include "satdetect/nn/optimizer.hpp"

#include <cmath>
#include <string>

#include "satdetect/error.hpp"

namespace satdetect::nn {

std::string_view optimizer_name(OptimizerKind kind) noexcept {
  switch (kind) {
    case OptimizerKind::kSgd:
      return "sgd";
    case OptimizerKind::kMomentum:
      return "momentum";
    case OptimizerKind::kAdam:
      break;
  }
  return "adam";
}

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "momentum") return OptimizerKind::kMomentum;
  if (name == "adam") return OptimizerKind::kAdam;
  throw Error(ErrorCode::kInvalidArgument, "unknown optimizer '" + std::string(name) + "'");
}

namespace {

template <typename T>
class Sgd final : public Optimizer<T> {
 public:
  explicit Sgd(const OptimizerConfig& c) : lr_(c.learning_rate) {}

  void step(const std::vector<Parameter<T>*>& params, double grad_scale) override {
    const T scale = static_cast<T>(lr_ * grad_scale);
    for (auto* p : params) {
      p->ensure_grad();
      for (std::size_t i = 0; i < p->value.size(); ++i) p->value[i] -= scale * p->grad[i];
    }
  }

 private:
  double lr_;
};

template <typename T>
class Momentum final : public Optimizer<T> {
 public:
  explicit Momentum(const OptimizerConfig& c) : lr_(c.learning_rate), mu_(c.momentum) {}

  void step(const std::vector<Parameter<T>*>& params, double grad_scale) override {
    velocity_.resize(params.size());
    const T mu = static_cast<T>(mu_);
    const T lr = static_cast<T>(lr_);
    const T gs = static_cast<T>(grad_scale);
    for (std::size_t k = 0; k < params.size(); ++k) {
      auto* p = params[k];
      p->ensure_grad();
      auto& v = velocity_[k];
      v.resize(p->value.size(), T{0});
      for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = mu * v[i] - lr * gs * p->grad[i];
        p->value[i] += v[i];
      }
    }
  }

 private:
  double lr_;
  double mu_;
  std::vector<std::vector<T>> velocity_;
};

template <typename T>
class Adam final : public Optimizer<T> {
 public:
  explicit Adam(const OptimizerConfig& c) : config_(c) {}

  void step(const std::vector<Parameter<T>*>& params, double grad_scale) override {
    ++t_;
    m_.resize(params.size());
    v_.resize(params.size());
    const double corr1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double corr2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    const T step = static_cast<T>(config_.learning_rate * std::sqrt(corr2) / corr1);
    const T b1 = static_cast<T>(config_.beta1);
    const T b2 = static_cast<T>(config_.beta2);
    const T eps = static_cast<T>(config_.epsilon * std::sqrt(corr2));
    const T gs = static_cast<T>(grad_scale);
    for (std::size_t k = 0; k < params.size(); ++k) {
      auto* p = params[k];
      p->ensure_grad();
      auto& m = m_[k];
      auto& v = v_[k];
      m.resize(p->value.size(), T{0});
      v.resize(p->value.size(), T{0});
      T* value = p->value.data();
      const T* grad = p->grad.data();
      const std::size_t n = p->value.size();
#pragma omp simd
      for (std::size_t i = 0; i < n; ++i) {
        const T g = grad[i] * gs;
        m[i] = b1 * m[i] + (T{1} - b1) * g;
        v[i] = b2 * v[i] + (T{1} - b2) * g * g;
        value[i] -= step * m[i] / (std::sqrt(v[i]) + eps);
      }
    }
  }

 private:
  OptimizerConfig config_;
  std::size_t t_ = 0;
  std::vector<std::vector<T>> m_;
  std::vector<std::vector<T>> v_;
};

}  // namespace

template <typename T>
std::unique_ptr<Optimizer<T>> make_optimizer(const OptimizerConfig& config) {
  if (!(config.learning_rate >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "learning rate must be >= 0");
  switch (config.kind) {
    case OptimizerKind::kSgd:
      return std::make_unique<Sgd<T>>(config);
    case OptimizerKind::kMomentum:
      return std::make_unique<Momentum<T>>(config);
    case OptimizerKind::kAdam:
      break;
  }
  return std::make_unique<Adam<T>>(config);
}

template std::unique_ptr<Optimizer<float>> make_optimizer<float>(const OptimizerConfig&);
template std::unique_ptr<Optimizer<double>> make_optimizer<double>(const OptimizerConfig&);

}  // namespace satdetect::nn
