#pragma once

#include <cstdint>

#include "mockcheck/dataset.hpp"
#include "mockcheck/interfaces.hpp"
#include "mockcheck/nn.hpp"
#include "mockcheck/train.hpp"

namespace mockcheck {

// One action column of the decision table: everything needed to synthesize
// the three-layer mock model for a (task, architecture, classes) condition.
struct MockModelRecipe {
  int hidden_units = 0;  // == num_features
  int output_units = 0;
  ActivationKind output_activation = ActivationKind::linear;
  LossKind loss_kind = LossKind::mse;
  MetricKind metric_kind = MetricKind::mae;
  ArchitectureType architecture_type = ArchitectureType::FCNN;

  bool operator==(const MockModelRecipe&) const = default;
};

struct MockDataConfig {
  std::uint64_t seed = 42;
  double class_sep = 2.0;
  double noise_fraction = 0.1;
};

MockModelRecipe mock_model_recipe(const ModelInterface& mi, int num_features,
                                  int num_classes);

// FCNN: dense(hidden, relu) -> dense(output, output_activation).
// CNN: conv1d(8 filters, kernel 3, relu) -> flatten -> dense(output, act).
Model build_mock_model(const MockModelRecipe& recipe, int num_features,
                       std::uint64_t seed);

// The same mock model as a declarative spec (adam, lr 0.001).
ModelSpec mock_model_spec(const MockModelRecipe& recipe, int num_features);

// Regression: 10*f rows, X ~ N(0,1), y = Xw + noise, then standardized.
// Classification: 100 rows per class, Gaussian clusters with unit covariance
// around centroids spaced proportionally to class_sep, then standardized.
Dataset generate_mock_data(const DataInterface& di, const MockDataConfig& config = {});

// Per-column (x - mean) / std over feature columns (population std,
// zero-variance columns become zeros); labels untouched.
Dataset standardize(const Dataset& input);

// Targets in model-ready form.  Class ids must be integral; num_classes >= 2
// yields one-hot rows, and a NaN id yields a NaN row (propagated, not masked).
Tensor one_hot(const std::vector<double>& class_ids, int num_classes);

}  // namespace mockcheck
