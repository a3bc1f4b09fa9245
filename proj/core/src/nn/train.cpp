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

#include "satdetect/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>

#include "satdetect/error.hpp"

namespace satdetect::nn {

void TrainConfig::to_json(nlohmann::json& j) const {
  j = {{"optimizer", optimizer_name(optimizer.kind)},
       {"learning_rate", optimizer.learning_rate},
       {"momentum", optimizer.momentum},
       {"beta1", optimizer.beta1},
       {"beta2", optimizer.beta2},
       {"epsilon", optimizer.epsilon},
       {"batch_size", batch_size},
       {"epochs", epochs},
       {"seed", seed}};
  j["patience"] = patience ? nlohmann::json(*patience) : nlohmann::json(nullptr);
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig c;
  try {
    c.optimizer.kind = parse_optimizer(j.at("optimizer").get<std::string>());
    c.optimizer.learning_rate = j.at("learning_rate").get<double>();
    c.optimizer.momentum = j.value("momentum", c.optimizer.momentum);
    c.optimizer.beta1 = j.value("beta1", c.optimizer.beta1);
    c.optimizer.beta2 = j.value("beta2", c.optimizer.beta2);
    c.optimizer.epsilon = j.value("epsilon", c.optimizer.epsilon);
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.epochs = j.at("epochs").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("patience") && !j["patience"].is_null()) c.patience = j["patience"].get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("train config: ") + e.what());
  }
  return c;
}

template <typename T>
TrainReport train(Model<T>& model, std::span<const Example> data, const TrainConfig& config,
                  const std::function<void(const EpochStats&)>& on_epoch) {
  if (data.empty()) throw Error(ErrorCode::kInvalidArgument, "training set is empty");
  if (config.batch_size == 0) throw Error(ErrorCode::kInvalidArgument, "batch_size must be at least 1");
  if (config.epochs == 0) throw Error(ErrorCode::kInvalidArgument, "epochs must be at least 1");
  const std::size_t input_size = shape_size(model.input_shape());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].image.size() != input_size) {
      throw Error(ErrorCode::kShapeMismatch, "example " + std::to_string(i) + " does not match the model input " +
                                                 shape_string(model.input_shape()));
    }
  }

  auto optimizer = make_optimizer<T>(config.optimizer);
  auto params = model.parameters();
  Rng rng(config.seed);
  Workspace<T> ws;
  Tensor<T> x(model.input_shape());
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainReport report;
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      model.zero_grad();
      for (std::size_t k = start; k < end; ++k) {
        const Example& ex = data[order[k]];
        std::transform(ex.image.begin(), ex.image.end(), x.data(), [](double v) { return static_cast<T>(v); });
        const int y = label_value(ex.label);
        const double p = static_cast<double>(model.forward(x, ws, true, &rng));
        const double loss = bce_loss(p, y);
        if (!std::isfinite(loss)) {
          throw Error(ErrorCode::kNonFiniteLoss, "epoch " + std::to_string(epoch) + ", example " +
                                                     std::to_string(order[k]) + ": loss is not finite");
        }
        loss_sum += loss;
        if ((p >= 0.5) == (y == 1)) ++correct;
        model.backward(ws, y);
      }
      for (const auto* p : params) {
        if (!std::all_of(p->grad.begin(), p->grad.end(), [](T g) { return std::isfinite(g); })) {
          throw Error(ErrorCode::kNonFiniteGradient,
                      "epoch " + std::to_string(epoch) + ": non-finite gradient in parameter '" + p->name + "'");
        }
      }
      optimizer->step(params, 1.0 / static_cast<double>(end - start));
    }
    EpochStats stats{epoch, loss_sum / static_cast<double>(data.size()),
                     static_cast<double>(correct) / static_cast<double>(data.size())};
    report.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats);

    if (stats.loss < best_loss) {
      best_loss = stats.loss;
      since_best = 0;
    } else if (config.patience && ++since_best >= *config.patience) {
      report.stopped_early = epoch < config.epochs;
      break;
    }
  }
  return report;
}

template TrainReport train<float>(Model<float>&, std::span<const Example>, const TrainConfig&,
                                  const std::function<void(const EpochStats&)>&);
template TrainReport train<double>(Model<double>&, std::span<const Example>, const TrainConfig&,
                                   const std::function<void(const EpochStats&)>&);

GradientCheckResult gradient_check(Model<double>& model, const Tensor<double>& x, int label, double epsilon,
                                   DropoutPolicy policy, std::size_t max_per_parameter, std::uint64_t mask_seed) {
  GradientCheckResult result;
  if (model.has_active_dropout()) {
    if (policy == DropoutPolicy::kRequireNone) {
      result.message = "model has active dropout; freeze the masks or disable dropout";
      return result;
    }
    if (policy == DropoutPolicy::kResample) {
      result.message = "dropout masks are resampled on every pass, so finite differences are meaningless";
      return result;
    }
  }
  if (!(epsilon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive");

  Workspace<double> ws;
  Rng rng(mask_seed);
  model.forward(x, ws, true, &rng);
  ws.freeze_dropout_masks();
  model.zero_grad();
  model.backward(ws, label);

  auto loss_at = [&]() { return bce_loss(model.forward(x, ws, true, &rng), label); };

  for (std::size_t layer = 0; layer < model.layer_count(); ++layer) {
    for (auto& param : model.layer(layer).parameters()) {
      auto* p = &param;
      if (!std::all_of(p->grad.begin(), p->grad.end(), [](double g) { return std::isfinite(g); })) {
        throw Error(ErrorCode::kNonFiniteGradient, "non-finite analytic gradient in '" + p->name + "'");
      }
      const std::size_t n = p->value.size();
      const std::size_t stride = (max_per_parameter == 0 || n <= max_per_parameter) ? 1 : n / max_per_parameter;
      for (std::size_t i = 0; i < n; i += stride) {
        const double saved = p->value[i];
        p->value[i] = saved + epsilon;
        const double up = loss_at();
        p->value[i] = saved - epsilon;
        const double down = loss_at();
        p->value[i] = saved;
        const double numeric = (up - down) / (2.0 * epsilon);
        const double analytic = p->grad[i];
        const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-12});
        const double rel = std::abs(analytic - numeric) / denom;
        ++result.checked;
        if (rel > result.max_relative_error) {
          result.max_relative_error = rel;
          result.worst_parameter = "layer" + std::to_string(layer) + "." + p->name;
          result.worst_index = i;
        }
      }
    }
  }
  result.valid = true;
  return result;
}

}  // namespace satdetect::nn
