#include "mockcheck/mock.hpp"

#include <cmath>
#include <numbers>

#include "mockcheck/errors.hpp"

namespace mockcheck {

namespace {

// Minimum pairwise centroid distance in units of class_sep.  Standardization
// rescales the in-plane coordinates (which carry centroid spread on top of
// unit noise) more than the off-plane ones, distorting the circle and eating
// into the raw Gaussian margin; 3.2 keeps worst-case nearest-centroid
// accuracy >= 0.96 over C<=5, f<=20 across seeds, comfortably above the 0.95
// separability bar.
constexpr double kSepMultiple = 3.2;

void validate_config(const MockDataConfig& cfg) {
  if (!(cfg.class_sep > 0.0)) throw ContractError("MockDataConfig: class_sep must be positive");
  if (!(cfg.noise_fraction > 0.0)) {
    throw ContractError("MockDataConfig: noise_fraction must be positive");
  }
}

}  // namespace

MockModelRecipe mock_model_recipe(const ModelInterface& mi, int num_features,
                                  int num_classes) {
  if (num_features < 1) throw ContractError("mock_model_recipe: num_features must be positive");
  switch (mi.task_type) {
    case TaskType::regression:
      if (num_classes != 1) {
        throw ContractError("mock_model_recipe: regression requires num_classes == 1");
      }
      break;
    case TaskType::binary_classification:
      if (num_classes != 2) {
        throw ContractError("mock_model_recipe: binary_classification requires num_classes == 2");
      }
      break;
    case TaskType::multiclass_classification:
      if (num_classes <= 2) {
        throw ContractError(
            "mock_model_recipe: multiclass_classification requires num_classes > 2");
      }
      break;
  }

  MockModelRecipe r;
  r.hidden_units = num_features;
  r.architecture_type = mi.architecture_type;
  switch (mi.task_type) {
    case TaskType::regression:
      r.output_units = 1;
      r.output_activation = ActivationKind::linear;
      r.loss_kind = LossKind::mse;
      r.metric_kind = MetricKind::mae;
      break;
    case TaskType::binary_classification:
      r.output_units = 2;
      r.output_activation = ActivationKind::sigmoid;
      r.loss_kind = LossKind::binary_crossentropy;
      r.metric_kind = MetricKind::accuracy;
      break;
    case TaskType::multiclass_classification:
      r.output_units = num_classes;
      r.output_activation = ActivationKind::softmax;
      r.loss_kind = LossKind::categorical_crossentropy;
      r.metric_kind = MetricKind::accuracy;
      break;
  }
  return r;
}

Model build_mock_model(const MockModelRecipe& recipe, int num_features,
                       std::uint64_t seed) {
  if (num_features < 1) throw ContractError("build_mock_model: num_features must be positive");
  std::vector<LayerDef> layers;
  if (recipe.architecture_type == ArchitectureType::FCNN) {
    layers.push_back(LayerDef::dense(recipe.hidden_units, ActivationKind::relu));
    layers.push_back(LayerDef::dense(recipe.output_units, recipe.output_activation));
  } else {
    if (num_features < 3) {
      throw ContractError(
          "build_mock_model: CNN mock needs at least 3 features (kernel width 3); "
          "use the FCNN architecture for narrower data");
    }
    layers.push_back(LayerDef::conv1d(8, 3, ActivationKind::relu));
    layers.push_back(LayerDef::flatten());
    layers.push_back(LayerDef::dense(recipe.output_units, recipe.output_activation));
  }
  return build_model(static_cast<std::size_t>(num_features), layers, seed);
}

ModelSpec mock_model_spec(const MockModelRecipe& recipe, int num_features) {
  ModelSpec spec;
  spec.input_dim = num_features;
  if (recipe.architecture_type == ArchitectureType::FCNN) {
    spec.layers.push_back(LayerDef::dense(recipe.hidden_units, ActivationKind::relu));
  } else {
    spec.layers.push_back(LayerDef::conv1d(8, 3, ActivationKind::relu));
    spec.layers.push_back(LayerDef::flatten());
  }
  spec.layers.push_back(LayerDef::dense(recipe.output_units, recipe.output_activation));
  spec.loss_kind = recipe.loss_kind;
  spec.optimizer = OptimizerKind::adam;
  spec.learning_rate = 0.001;
  spec.metrics = {recipe.metric_kind};
  return spec;
}

namespace {

std::vector<std::string> feature_names(int f) {
  std::vector<std::string> names;
  for (int i = 0; i < f; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

Dataset mock_regression(const DataInterface& di, const MockDataConfig& cfg) {
  const std::size_t f = static_cast<std::size_t>(di.num_features);
  const std::size_t n = 10 * f;
  Rng rng(cfg.seed);
  std::vector<double> x(n * f);
  for (double& v : x) v = rng.normal();
  std::vector<double> w(f);
  for (double& v : w) v = rng.normal();
  std::vector<double> y(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < f; ++c) y[r] += x[r * f + c] * w[c];
  }
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(n));
  const double noise_sd = cfg.noise_fraction * sd;
  for (double& v : y) v += rng.normal() * noise_sd;

  Dataset d = Dataset::from_numeric(feature_names(static_cast<int>(f)), std::move(x), n,
                                    "target", std::move(y));
  d = standardize(d);
  // Labels are standardized too (population stats), mirroring the feature
  // treatment so the mock target is in mock-model-friendly range.
  double lm = 0.0;
  for (double v : d.labels) lm += v;
  lm /= static_cast<double>(n);
  double lv = 0.0;
  for (double v : d.labels) lv += (v - lm) * (v - lm);
  const double lsd = std::sqrt(lv / static_cast<double>(n));
  std::vector<double> labels = d.labels;
  for (double& v : labels) v = lsd == 0.0 ? 0.0 : (v - lm) / lsd;
  return Dataset::from_numeric(std::move(d.feature_names), std::move(d.features), n,
                               std::move(d.label_name), std::move(labels));
}

Dataset mock_classification(const DataInterface& di, const MockDataConfig& cfg) {
  const std::size_t f = static_cast<std::size_t>(di.num_features);
  const std::size_t C = static_cast<std::size_t>(di.num_classes);
  const std::size_t per_class = 100;
  const std::size_t n = per_class * C;
  Rng rng(cfg.seed);

  // Centroids with minimum pairwise distance kSepMultiple * class_sep.
  // f == 1: evenly spaced on the line.  f >= 2: evenly spaced on a circle in
  // a random 2-D subspace (random phase), radius chosen from the chord rule.
  const double min_dist = kSepMultiple * cfg.class_sep;
  std::vector<std::vector<double>> centers(C, std::vector<double>(f, 0.0));
  if (f == 1) {
    for (std::size_t c = 0; c < C; ++c) {
      centers[c][0] = min_dist * (static_cast<double>(c) -
                                  static_cast<double>(C - 1) / 2.0);
    }
  } else {
    std::vector<double> b1(f), b2(f);
    double n1 = 0.0;
    do {
      n1 = 0.0;
      for (double& v : b1) v = rng.normal();
      for (double v : b1) n1 += v * v;
    } while (n1 < 1e-12);
    n1 = std::sqrt(n1);
    for (double& v : b1) v /= n1;
    double dot = 0.0, n2 = 0.0;
    do {
      for (double& v : b2) v = rng.normal();
      dot = 0.0;
      for (std::size_t j = 0; j < f; ++j) dot += b1[j] * b2[j];
      n2 = 0.0;
      for (std::size_t j = 0; j < f; ++j) {
        b2[j] -= dot * b1[j];
        n2 += b2[j] * b2[j];
      }
    } while (n2 < 1e-12);
    n2 = std::sqrt(n2);
    for (double& v : b2) v /= n2;
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double radius =
        C == 2 ? min_dist / 2.0
               : min_dist / (2.0 * std::sin(std::numbers::pi / static_cast<double>(C)));
    for (std::size_t c = 0; c < C; ++c) {
      const double ang =
          phase + 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(C);
      for (std::size_t j = 0; j < f; ++j) {
        centers[c][j] = radius * (std::cos(ang) * b1[j] + std::sin(ang) * b2[j]);
      }
    }
  }

  std::vector<double> x(n * f);
  std::vector<double> y(n);
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      const std::size_t r = c * per_class + i;
      for (std::size_t j = 0; j < f; ++j) {
        x[r * f + j] = centers[c][j] + rng.normal();
      }
      y[r] = static_cast<double>(c);
    }
  }
  Dataset d = Dataset::from_numeric(feature_names(static_cast<int>(f)), std::move(x), n,
                                    "label", std::move(y));
  return standardize(d);
}

}  // namespace

Dataset generate_mock_data(const DataInterface& di, const MockDataConfig& config) {
  validate(di);
  validate_config(config);
  if (di.task_type == TaskType::regression) return mock_regression(di, config);
  return mock_classification(di, config);
}

Dataset standardize(const Dataset& input) {
  Dataset d = input;
  for (std::size_t c = 0; c < d.num_features; ++c) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t r = 0; r < d.num_rows; ++r) {
      const double v = d.feature_at(r, c);
      if (std::isfinite(v)) {
        sum += v;
        ++count;
      }
    }
    if (count == 0) continue;  // all-missing column: nothing to scale
    const double mean = sum / static_cast<double>(count);
    double ss = 0.0;
    for (std::size_t r = 0; r < d.num_rows; ++r) {
      const double v = d.feature_at(r, c);
      if (std::isfinite(v)) ss += (v - mean) * (v - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(count));
    for (std::size_t r = 0; r < d.num_rows; ++r) {
      double& v = d.features[r * d.num_features + c];
      if (!std::isfinite(v)) continue;
      v = sd == 0.0 ? 0.0 : (v - mean) / sd;
    }
  }
  d.recompute_profiles();
  return d;
}

Tensor one_hot(const std::vector<double>& class_ids, int num_classes) {
  if (num_classes < 2) throw ContractError("one_hot: num_classes must be >= 2");
  Tensor t({class_ids.size(), static_cast<std::size_t>(num_classes)});
  const double nan = std::nan("");
  for (std::size_t r = 0; r < class_ids.size(); ++r) {
    const double id = class_ids[r];
    if (!std::isfinite(id) || id != std::floor(id) || id < 0.0 ||
        id >= static_cast<double>(num_classes)) {
      for (int c = 0; c < num_classes; ++c) t.at(r, static_cast<std::size_t>(c)) = nan;
      continue;
    }
    t.at(r, static_cast<std::size_t>(id)) = 1.0;
  }
  return t;
}

}  // namespace mockcheck
