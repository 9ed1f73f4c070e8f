#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "mockcheck/data_checks.hpp"
#include "mockcheck/errors.hpp"
#include "mockcheck/interfaces.hpp"
#include "mockcheck/mock.hpp"
#include "mockcheck/model_checks.hpp"
#include "mockcheck/nn.hpp"

using namespace mockcheck;

namespace {

// Brute-force nearest-centroid classifier, the separability oracle: compute
// per-class centroids from the data and score each row against every one.
double nearest_centroid_accuracy(const Dataset& d, int num_classes) {
  const std::size_t f = d.num_features;
  std::vector<std::vector<double>> centroid(num_classes, std::vector<double>(f, 0.0));
  std::vector<std::size_t> count(num_classes, 0);
  for (std::size_t r = 0; r < d.num_rows; ++r) {
    const int c = static_cast<int>(d.labels[r]);
    REQUIRE(c >= 0);
    REQUIRE(c < num_classes);
    for (std::size_t j = 0; j < f; ++j) centroid[c][j] += d.feature_at(r, j);
    ++count[c];
  }
  for (int c = 0; c < num_classes; ++c) {
    REQUIRE(count[c] > 0);
    for (std::size_t j = 0; j < f; ++j) centroid[c][j] /= static_cast<double>(count[c]);
  }
  std::size_t hits = 0;
  for (std::size_t r = 0; r < d.num_rows; ++r) {
    int best = 0;
    double best_d = 0.0;
    for (int c = 0; c < num_classes; ++c) {
      double dist = 0.0;
      for (std::size_t j = 0; j < f; ++j) {
        const double diff = d.feature_at(r, j) - centroid[c][j];
        dist += diff * diff;
      }
      if (c == 0 || dist < best_d) {
        best_d = dist;
        best = c;
      }
    }
    if (best == static_cast<int>(d.labels[r])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(d.num_rows);
}

DataInterface make_di(TaskType t, int f, int classes) {
  DataInterface di;
  di.num_features = f;
  di.data_kind = DataKind::numeric;
  di.task_type = t;
  di.num_classes = classes;
  return di;
}

void column_moments(const Dataset& d, std::size_t c, double& mean, double& sd) {
  mean = 0.0;
  for (std::size_t r = 0; r < d.num_rows; ++r) mean += d.feature_at(r, c);
  mean /= static_cast<double>(d.num_rows);
  double var = 0.0;
  for (std::size_t r = 0; r < d.num_rows; ++r) {
    const double diff = d.feature_at(r, c) - mean;
    var += diff * diff;
  }
  sd = std::sqrt(var / static_cast<double>(d.num_rows));
}

}  // namespace

TEST_CASE("decision table: all six recipe columns") {
  struct Row {
    ArchitectureType arch;
    TaskType task;
    int f, classes;
    MockModelRecipe expect;
  };
  const std::vector<Row> rows = {
      {ArchitectureType::FCNN, TaskType::regression, 7, 1,
       {7, 1, ActivationKind::linear, LossKind::mse, MetricKind::mae,
        ArchitectureType::FCNN}},
      {ArchitectureType::CNN, TaskType::regression, 7, 1,
       {7, 1, ActivationKind::linear, LossKind::mse, MetricKind::mae,
        ArchitectureType::CNN}},
      {ArchitectureType::FCNN, TaskType::binary_classification, 10, 2,
       {10, 2, ActivationKind::sigmoid, LossKind::binary_crossentropy,
        MetricKind::accuracy, ArchitectureType::FCNN}},
      {ArchitectureType::CNN, TaskType::binary_classification, 10, 2,
       {10, 2, ActivationKind::sigmoid, LossKind::binary_crossentropy,
        MetricKind::accuracy, ArchitectureType::CNN}},
      {ArchitectureType::FCNN, TaskType::multiclass_classification, 4, 3,
       {4, 3, ActivationKind::softmax, LossKind::categorical_crossentropy,
        MetricKind::accuracy, ArchitectureType::FCNN}},
      {ArchitectureType::CNN, TaskType::multiclass_classification, 4, 3,
       {4, 3, ActivationKind::softmax, LossKind::categorical_crossentropy,
        MetricKind::accuracy, ArchitectureType::CNN}},
  };
  for (const auto& row : rows) {
    CAPTURE(to_string(row.arch));
    CAPTURE(to_string(row.task));
    const MockModelRecipe got =
        mock_model_recipe(ModelInterface{row.arch, row.task}, row.f, row.classes);
    CHECK(got == row.expect);
  }
}

TEST_CASE("recipe rejects inconsistent task/class combinations") {
  const ModelInterface bin{ArchitectureType::FCNN, TaskType::binary_classification};
  CHECK_THROWS_AS(mock_model_recipe(bin, 4, 3), ContractError);
  const ModelInterface mc{ArchitectureType::FCNN, TaskType::multiclass_classification};
  CHECK_THROWS_AS(mock_model_recipe(mc, 4, 2), ContractError);
  const ModelInterface reg{ArchitectureType::FCNN, TaskType::regression};
  CHECK_THROWS_AS(mock_model_recipe(reg, 4, 2), ContractError);
  CHECK_THROWS_AS(mock_model_recipe(reg, 0, 1), ContractError);
}

TEST_CASE("mock FCNN regression model: geometry and parameter count") {
  const ModelInterface mi{ArchitectureType::FCNN, TaskType::regression};
  const MockModelRecipe r = mock_model_recipe(mi, 7, 1);
  const Model m = build_mock_model(r, 7, 42);
  REQUIRE(m.layers.size() == 2);
  CHECK(m.input_dim == 7);
  CHECK(m.output_dim() == 1);
  // dense(7): 7*7 weights + 7 biases; dense(1): 7 weights + 1 bias.
  CHECK(m.parameter_count() == 64);
}

TEST_CASE("mock model builds are bit-identical for equal seeds") {
  const ModelInterface mi{ArchitectureType::CNN, TaskType::multiclass_classification};
  const MockModelRecipe r = mock_model_recipe(mi, 9, 4);
  const Model a = build_mock_model(r, 9, 7);
  const Model b = build_mock_model(r, 9, 7);
  const Model c = build_mock_model(r, 9, 8);
  REQUIRE(a.layers.size() == b.layers.size());
  bool all_equal = true, any_diff_c = false;
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    if (a.layers[i].weights.values != b.layers[i].weights.values) all_equal = false;
    if (a.layers[i].bias.values != b.layers[i].bias.values) all_equal = false;
    if (a.layers[i].weights.values != c.layers[i].weights.values) any_diff_c = true;
  }
  CHECK(all_equal);
  CHECK(any_diff_c);
}

TEST_CASE("mock multiclass model emits probability rows") {
  const DataInterface di = make_di(TaskType::multiclass_classification, 4, 3);
  const ModelInterface mi{ArchitectureType::FCNN, TaskType::multiclass_classification};
  const Dataset d = generate_mock_data(di);
  const Model m = build_mock_model(mock_model_recipe(mi, 4, 3), 4, 42);
  Model mutable_m = m;
  const Tensor out = forward(mutable_m, d.feature_tensor());
  REQUIRE(out.cols() == 3);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK(out.at(r, c) > 0.0);
      CHECK(out.at(r, c) < 1.0);
      sum += out.at(r, c);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("mock data sizing: regression rows scale with features") {
  for (int f : {2, 7, 20}) {
    CAPTURE(f);
    const Dataset d = generate_mock_data(make_di(TaskType::regression, f, 1));
    CHECK(d.num_rows == static_cast<std::size_t>(10 * f));
    CHECK(d.num_features == static_cast<std::size_t>(f));
  }
}

TEST_CASE("mock data sizing: classification rows balanced per class") {
  for (int C : {2, 3, 5}) {
    CAPTURE(C);
    const TaskType t = C == 2 ? TaskType::binary_classification
                              : TaskType::multiclass_classification;
    const Dataset d = generate_mock_data(make_di(t, 6, C));
    CHECK(d.num_rows == static_cast<std::size_t>(100 * C));
    std::map<int, std::size_t> counts;
    for (double v : d.labels) {
      REQUIRE(std::isfinite(v));
      REQUIRE(v == std::floor(v));
      counts[static_cast<int>(v)]++;
    }
    REQUIRE(counts.size() == static_cast<std::size_t>(C));
    for (const auto& [cls, n] : counts) {
      CAPTURE(cls);
      CHECK(n == 100);
    }
  }
}

TEST_CASE("mock feature columns are standardized to machine precision") {
  const std::vector<DataInterface> interfaces = {
      make_di(TaskType::regression, 7, 1),
      make_di(TaskType::binary_classification, 5, 2),
      make_di(TaskType::multiclass_classification, 4, 3),
  };
  for (const auto& di : interfaces) {
    CAPTURE(di.num_features);
    const Dataset d = generate_mock_data(di);
    for (std::size_t c = 0; c < d.num_features; ++c) {
      double mean = 0.0, sd = 0.0;
      column_moments(d, c, mean, sd);
      CHECK(std::abs(mean) < 1e-9);
      CHECK(std::abs(sd - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("mock regression labels share the standardized scale") {
  const Dataset d = generate_mock_data(make_di(TaskType::regression, 7, 1));
  double mean = 0.0;
  for (double v : d.labels) mean += v;
  mean /= static_cast<double>(d.num_rows);
  double var = 0.0;
  for (double v : d.labels) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(d.num_rows));
  CHECK(std::abs(mean) < 1e-9);
  CHECK(std::abs(sd - 1.0) < 1e-9);
}

TEST_CASE("mock data generation is deterministic per seed") {
  const DataInterface di = make_di(TaskType::multiclass_classification, 4, 3);
  MockDataConfig cfg;
  cfg.seed = 42;
  const Dataset a = generate_mock_data(di, cfg);
  const Dataset b = generate_mock_data(di, cfg);
  CHECK(a.features == b.features);
  CHECK(a.labels == b.labels);
  cfg.seed = 43;
  const Dataset c = generate_mock_data(di, cfg);
  CHECK(a.features != c.features);
}

TEST_CASE("mock classification data is nearest-centroid separable") {
  for (int C : {2, 3, 5}) {
    for (int f : {2, 4, 20}) {
      const TaskType t = C == 2 ? TaskType::binary_classification
                                : TaskType::multiclass_classification;
      const DataInterface di = make_di(t, f, C);
      for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        MockDataConfig cfg;
        cfg.seed = seed;
        const Dataset d = generate_mock_data(di, cfg);
        const double acc = nearest_centroid_accuracy(d, C);
        CAPTURE(C);
        CAPTURE(f);
        CAPTURE(seed);
        CHECK(acc >= 0.95);
      }
    }
  }
}

TEST_CASE("standardize: affine map to zero mean unit variance") {
  Dataset d = Dataset::from_numeric({"a"}, {0.0, 10.0}, 2, "y", {0.0, 1.0});
  const Dataset s = standardize(d);
  CHECK(s.feature_at(0, 0) == doctest::Approx(-1.0));
  CHECK(s.feature_at(1, 0) == doctest::Approx(1.0));
  // labels untouched by the helper
  CHECK(s.labels == d.labels);
}

TEST_CASE("standardize: idempotent to machine precision") {
  const Dataset d = generate_mock_data(make_di(TaskType::regression, 3, 1));
  const Dataset once = standardize(d);
  const Dataset twice = standardize(once);
  REQUIRE(once.features.size() == twice.features.size());
  for (std::size_t i = 0; i < once.features.size(); ++i) {
    CHECK(std::abs(once.features[i] - twice.features[i]) < 1e-12);
  }
}

TEST_CASE("standardize: constant column becomes zeros and keeps its flag") {
  Dataset d = Dataset::from_numeric({"c", "v"}, {5.0, 1.0, 5.0, 2.0, 5.0, 3.0}, 3, "y",
                                    {0.0, 1.0, 0.0});
  const Dataset s = standardize(d);
  for (std::size_t r = 0; r < 3; ++r) CHECK(s.feature_at(r, 0) == 0.0);
  CHECK(s.profiles[0].zero_variance);
  CHECK(!s.profiles[1].zero_variance);
}

TEST_CASE("one-hot encoding") {
  const Tensor t = one_hot({0.0, 2.0, 1.0}, 3);
  REQUIRE(t.rows() == 3);
  REQUIRE(t.cols() == 3);
  CHECK(t.at(0, 0) == 1.0);
  CHECK(t.at(0, 1) == 0.0);
  CHECK(t.at(1, 2) == 1.0);
  CHECK(t.at(2, 1) == 1.0);
  CHECK_THROWS_AS(one_hot({0.0}, 1), ContractError);

  // NaN ids propagate as NaN rows rather than being silently mapped.
  const Tensor n = one_hot({std::nan("")}, 2);
  CHECK(std::isnan(n.at(0, 0)));
  CHECK(std::isnan(n.at(0, 1)));
}

TEST_CASE("CNN mock model needs at least kernel-width features") {
  const ModelInterface mi{ArchitectureType::CNN, TaskType::regression};
  const MockModelRecipe r = mock_model_recipe(mi, 2, 1);
  CHECK_THROWS_WITH_AS(build_mock_model(r, 2, 42), doctest::Contains("FCNN"),
                       ContractError);
}

TEST_CASE("mock artifacts are self-consistent with the checking stages") {
  // The generated data passes its own data stage; the generated model spec
  // passes every structural model check.
  const DataInterface di = make_di(TaskType::multiclass_classification, 4, 3);
  const ModelInterface mi{ArchitectureType::FCNN, TaskType::multiclass_classification};

  const Dataset d = generate_mock_data(di);
  DataStageConfig dcfg;
  const Report data_report = run_data_stage(d, di, mi, dcfg);
  CHECK(data_report.findings.empty());
  CHECK(data_report.pass());

  const ModelSpec spec = mock_model_spec(mock_model_recipe(mi, 4, 3), 4);
  ModelStageConfig mcfg;
  CHECK(check_input_shape(spec, di).empty());
  CHECK(check_output_shape(spec, di).empty());
  CHECK(check_hidden_activations(spec).empty());
  CHECK(check_output_activation(spec, di, mcfg).empty());
  CHECK(check_learning_rate(spec, mcfg).empty());
  CHECK(check_loss_function(spec, di).empty());
  CHECK(check_metrics(spec, di).empty());
}
