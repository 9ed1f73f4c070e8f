#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mockcheck/nn.hpp"
#include "mockcheck/tensor.hpp"

namespace mockcheck {

enum class LossKind { mse, binary_crossentropy, categorical_crossentropy };
enum class OptimizerKind { sgd, adam };
enum class MetricKind { mae, accuracy };

std::string to_string(LossKind k);
std::string to_string(OptimizerKind k);
std::string to_string(MetricKind k);

// Crossentropy probabilities are clamped to [kProbEps, 1 - kProbEps] inside
// the loss only; NaN/Inf coming out of the network still propagate.
inline constexpr double kProbEps = 1e-7;

double compute_loss(LossKind kind, const Tensor& predictions, const Tensor& targets);
double compute_metric(MetricKind kind, const Tensor& predictions, const Tensor& targets);

// dLoss/dPredictions, matching compute_loss exactly (including the clamp,
// whose saturated entries get zero gradient).
Tensor loss_gradient(LossKind kind, const Tensor& predictions, const Tensor& targets);

// Backpropagation.  Returns gradients aligned with Model::parameters().
std::vector<Tensor> gradients(const Model& model, const Tensor& inputs,
                              const Tensor& targets, LossKind loss);

// Central finite differences ((L(p+eps) - L(p-eps)) / 2 eps) over every
// parameter scalar; the independent oracle for gradients().
std::vector<Tensor> finite_diff_gradients(const Model& model, const Tensor& inputs,
                                          const Tensor& targets, LossKind loss,
                                          double eps = 1e-5);

struct TrainConfig {
  LossKind loss = LossKind::mse;
  OptimizerKind optimizer = OptimizerKind::adam;
  double learning_rate = 0.001;
  int epochs = 1;
  int batch_size = 32;
  MetricKind metric = MetricKind::mae;
  std::uint64_t seed = 42;
};

struct TrainTrace {
  std::vector<double> epoch_loss;    // batch-size-weighted mean over the epoch
  std::vector<double> epoch_metric;  // full-dataset metric after each epoch
  double initial_loss = 0.0;         // full-dataset loss before any update
  double final_loss = 0.0;           // full-dataset loss after the last epoch
  LossKind loss = LossKind::mse;
  MetricKind metric = MetricKind::mae;
};

// Mini-batch training; mutates the model in place.  Shuffles row indices each
// epoch with an Rng seeded from config.seed, so runs are fully deterministic.
// Non-finite losses do not stop training; they show up in the trace.
TrainTrace train(Model& model, const Tensor& inputs, const Tensor& targets,
                 const TrainConfig& config);

double evaluate(const Model& model, const Tensor& inputs, const Tensor& targets,
                MetricKind metric);

}  // namespace mockcheck
