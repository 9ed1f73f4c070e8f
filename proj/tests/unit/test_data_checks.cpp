#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "mockcheck/data_checks.hpp"
#include "mockcheck/errors.hpp"
#include "mockcheck/mock.hpp"

using namespace mockcheck;
using nlohmann::json;

namespace {

// Brute-force nearest-centroid accuracy: the independent oracle for whether a
// labeled dataset carries linearly recoverable class structure.
double nearest_centroid_accuracy(const Dataset& d, int num_classes) {
  const std::size_t f = d.num_features;
  std::vector<std::vector<double>> centroid(num_classes, std::vector<double>(f, 0.0));
  std::vector<std::size_t> count(num_classes, 0);
  for (std::size_t r = 0; r < d.num_rows; ++r) {
    const int c = static_cast<int>(d.labels[r]);
    for (std::size_t j = 0; j < f; ++j) centroid[c][j] += d.feature_at(r, j);
    ++count[c];
  }
  for (int c = 0; c < num_classes; ++c) {
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
  di.task_type = t;
  di.num_classes = classes;
  return di;
}

// Standardized two-cluster binary set with the requested per-class counts.
Dataset binary_clusters(std::size_t n0, std::size_t n1) {
  std::vector<double> feats;
  std::vector<double> labels;
  Rng rng(7);
  for (std::size_t i = 0; i < n0 + n1; ++i) {
    const double cls = i < n0 ? 0.0 : 1.0;
    feats.push_back((cls == 0.0 ? -2.0 : 2.0) + 0.3 * rng.normal());
    feats.push_back((cls == 0.0 ? -2.0 : 2.0) + 0.3 * rng.normal());
    labels.push_back(cls);
  }
  Dataset d = Dataset::from_numeric({"a", "b"}, std::move(feats), n0 + n1, "y",
                                    std::move(labels));
  return standardize(d);
}

// Order-insensitive projection of a finding list (evidence may cite row
// indices, which legitimately depend on row order).
std::vector<std::tuple<std::string, std::string, std::string, std::string>> shape_of(
    const std::vector<Finding>& fs) {
  std::vector<std::tuple<std::string, std::string, std::string, std::string>> out;
  for (const auto& f : fs) {
    out.emplace_back(f.check_id, to_string(f.severity), f.locus, f.message);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string exec_status(const Report& r, const std::string& check_id) {
  for (const auto& e : r.executed) {
    if (e.check_id == check_id) return e.status;
  }
  return "<absent>";
}

}  // namespace

TEST_CASE("missing values: clean data yields nothing") {
  const Dataset d = load_dataset_text("a,b,y\n1,2,0\n3,4,1\n", "y");
  CHECK(check_missing_values(d).empty());
}

TEST_CASE("missing values: one NaN cell is one error with its column locus") {
  const Dataset d = load_dataset_text("a,b,y\n1,NaN,0\n3,4,1\n5,6,0\n", "y");
  const auto fs = check_missing_values(d);
  REQUIRE(fs.size() == 1);
  CHECK(fs[0].check_id == checks::kMissingValues);
  CHECK(fs[0].severity == Severity::error);
  CHECK(fs[0].locus == "b");
  CHECK(fs[0].evidence.at("missing_count") == 1);
  CHECK(fs[0].message.find("'b'") != std::string::npos);
  CHECK(!fs[0].fix.empty());
}

TEST_CASE("missing values: one finding per affected column") {
  const Dataset d = load_dataset_text("a,b,y\n,NaN,0\n3,4,1\n", "y");
  const auto fs = check_missing_values(d);
  REQUIRE(fs.size() == 2);
  CHECK(fs[0].locus == "a");
  CHECK(fs[1].locus == "b");
}

TEST_CASE("missing labels") {
  const Dataset clean = load_dataset_text("a,y\n1,0\n2,1\n", "y");
  CHECK(check_missing_labels(clean).empty());

  const Dataset one = load_dataset_text("a,y\n1,0\n2,\n3,1\n", "y");
  const auto fs = check_missing_labels(one);
  REQUIRE(fs.size() == 1);
  CHECK(fs[0].check_id == checks::kMissingLabels);
  CHECK(fs[0].severity == Severity::error);
  CHECK(fs[0].evidence.at("missing_count") == 1);
  CHECK(fs[0].evidence.at("rows")[0] == 1);  // 0-based data row

  const Dataset all = load_dataset_text("a,y\n1,\n2,NA\n3,?\n", "y");
  const auto all_fs = check_missing_labels(all);
  REQUIRE(all_fs.size() == 1);
  CHECK(all_fs[0].evidence.at("missing_count") == all.num_rows);
}

TEST_CASE("class imbalance: balanced counts are silent") {
  const Dataset d = binary_clusters(100, 100);
  const DataInterface di = make_di(TaskType::binary_classification, 2, 2);
  DataStageConfig cfg;
  CHECK(check_class_imbalance(d, di, cfg).empty());
}

TEST_CASE("class imbalance: ratio above threshold warns with evidence") {
  const Dataset d = binary_clusters(160, 100);
  const DataInterface di = make_di(TaskType::binary_classification, 2, 2);
  DataStageConfig cfg;
  const auto fs = check_class_imbalance(d, di, cfg);
  REQUIRE(fs.size() == 1);
  CHECK(fs[0].check_id == checks::kClassImbalance);
  CHECK(fs[0].severity == Severity::warning);
  CHECK(fs[0].evidence.at("ratio").get<double>() == doctest::Approx(1.6));
  CHECK(fs[0].evidence.at("class_counts").size() == 2);
}

TEST_CASE("class imbalance: below threshold, and regression is exempt") {
  DataStageConfig cfg;
  const Dataset near = binary_clusters(140, 100);  // ratio 1.4 < 1.5
  CHECK(check_class_imbalance(near, make_di(TaskType::binary_classification, 2, 2), cfg)
            .empty());
  const Dataset skew = binary_clusters(300, 100);
  CHECK(check_class_imbalance(skew, make_di(TaskType::regression, 2, 1), cfg).empty());
}

TEST_CASE("categorical encoding") {
  const Dataset numeric = load_dataset_text("a,b,y\n1,2,0\n3,4,1\n", "y");
  CHECK(check_categorical_encoding(numeric).empty());

  const Dataset cat = load_dataset_text("color,n,y\nred,1,0\nblue,2,1\n", "y");
  const auto fs = check_categorical_encoding(cat);
  REQUIRE(fs.size() == 1);
  CHECK(fs[0].check_id == checks::kMissingEncoding);
  CHECK(fs[0].severity == Severity::error);
  CHECK(fs[0].locus == "color");

  const Dataset mixed = load_dataset_text("c,y\n1,0\nx,1\n2,0\n", "y");
  const auto mfs = check_categorical_encoding(mixed);
  REQUIRE(mfs.size() == 1);
  CHECK(mfs[0].evidence.at("kind") == "mixed");
}

TEST_CASE("scaling: standardized and min-max data are silent") {
  DataStageConfig cfg;
  const Dataset std_d = binary_clusters(50, 50);
  CHECK(check_scaling(std_d, cfg).empty());

  const Dataset unit = load_dataset_text("a,y\n0,0\n0.5,1\n1,0\n", "y");
  CHECK(check_scaling(unit, cfg).empty());
}

TEST_CASE("scaling: wide range warns") {
  const Dataset d = load_dataset_text("sqft,y\n0,0\n50000,1\n25000,0\n", "y");
  DataStageConfig cfg;
  const auto fs = check_scaling(d, cfg);
  REQUIRE(fs.size() == 1);
  CHECK(fs[0].check_id == checks::kMissingScaling);
  CHECK(fs[0].severity == Severity::warning);
  CHECK(fs[0].locus == "sqft");
  CHECK(fs[0].message.find("range") != std::string::npos);
}

TEST_CASE("scaling: large mean with small range still warns") {
  const Dataset d = load_dataset_text("t,y\n99,0\n100,1\n101,0\n", "y");
  DataStageConfig cfg;
  const auto fs = check_scaling(d, cfg);
  REQUIRE(fs.size() == 1);
  CHECK(fs[0].message.find("mean") != std::string::npos);
}

TEST_CASE("label/problem match: binary") {
  DataStageConfig cfg;
  const DataInterface di = make_di(TaskType::binary_classification, 1, 2);
  const Dataset ok = load_dataset_text("a,y\n1,0\n2,1\n3,0\n", "y");
  CHECK(check_label_problem_match(ok, di).empty());

  const Dataset three = load_dataset_text("a,y\n1,0\n2,1\n3,2\n", "y");
  const auto fs = check_label_problem_match(three, di);
  REQUIRE(fs.size() == 1);
  CHECK(fs[0].check_id == checks::kLabelProblemMismatch);
  CHECK(fs[0].severity == Severity::error);
  CHECK(fs[0].evidence.at("distinct_count") == 3);
  CHECK(fs[0].evidence.at("declared_classes") == 2);
}

TEST_CASE("label/problem match: multiclass and fractional ids") {
  const DataInterface mc = make_di(TaskType::multiclass_classification, 1, 3);
  const Dataset ok = load_dataset_text("a,y\n1,0\n2,1\n3,2\n", "y");
  CHECK(check_label_problem_match(ok, mc).empty());

  const Dataset frac = load_dataset_text("a,y\n1,0\n2,1.5\n3,2\n", "y");
  const auto fs = check_label_problem_match(frac, mc);
  REQUIRE(fs.size() == 1);
  CHECK(fs[0].evidence.at("non_integer_count") == 1);
}

TEST_CASE("label/problem match: regression accepts reals, rejects text") {
  const DataInterface reg = make_di(TaskType::regression, 1, 1);
  const Dataset ok = load_dataset_text("a,y\n1,0.25\n2,-3.5\n", "y");
  CHECK(check_label_problem_match(ok, reg).empty());

  const Dataset text = load_dataset_text("a,y\n1,cheap\n2,dear\n", "y");
  const auto fs = check_label_problem_match(text, reg);
  REQUIRE(fs.size() == 1);
  CHECK(fs[0].evidence.at("non_numeric_count") == 2);
}

TEST_CASE("structural checks are invariant under row permutation") {
  const std::string rows_a = "1,red,0,0\nNaN,blue,50000,1\n3,red,100,2\n";
  const std::string rows_b = "3,red,100,2\n1,red,0,0\nNaN,blue,50000,1\n";
  const Dataset a = load_dataset_text("n,c,big,y\n" + rows_a, "y");
  const Dataset b = load_dataset_text("n,c,big,y\n" + rows_b, "y");
  const DataInterface di = make_di(TaskType::multiclass_classification, 3, 3);
  DataStageConfig cfg;

  CHECK(shape_of(check_missing_values(a)) == shape_of(check_missing_values(b)));
  CHECK(shape_of(check_missing_labels(a)) == shape_of(check_missing_labels(b)));
  CHECK(shape_of(check_class_imbalance(a, di, cfg)) ==
        shape_of(check_class_imbalance(b, di, cfg)));
  CHECK(shape_of(check_categorical_encoding(a)) == shape_of(check_categorical_encoding(b)));
  CHECK(shape_of(check_scaling(a, cfg)) == shape_of(check_scaling(b, cfg)));
  CHECK(shape_of(check_label_problem_match(a, di)) ==
        shape_of(check_label_problem_match(b, di)));
}

TEST_CASE("corrupting a passing dataset can only add findings") {
  const Dataset clean = binary_clusters(50, 50);
  const DataInterface di = make_di(TaskType::binary_classification, 2, 2);
  DataStageConfig cfg;
  auto count_all = [&](const Dataset& d) {
    return check_missing_values(d).size() + check_missing_labels(d).size() +
           check_class_imbalance(d, di, cfg).size() +
           check_categorical_encoding(d).size() + check_scaling(d, cfg).size() +
           check_label_problem_match(d, di).size();
  };
  REQUIRE(count_all(clean) == 0);

  Dataset hurt = clean;
  hurt.features[3] = std::nan("");
  hurt.recompute_profiles();
  CHECK(count_all(hurt) >= 1);
  CHECK(!check_missing_values(hurt).empty());
}

TEST_CASE("learnability: clean mock data is learnable") {
  const DataInterface di = make_di(TaskType::binary_classification, 4, 2);
  const ModelInterface mi{ArchitectureType::FCNN, TaskType::binary_classification};
  const Dataset d = generate_mock_data(di);
  REQUIRE(nearest_centroid_accuracy(d, 2) >= 0.95);  // oracle: signal exists

  DataStageConfig cfg;
  CHECK(check_data_learnability(d, mi, cfg).empty());
}

TEST_CASE("learnability: shuffled labels destroy the signal and are flagged") {
  const DataInterface di = make_di(TaskType::multiclass_classification, 4, 3);
  const ModelInterface mi{ArchitectureType::FCNN, TaskType::multiclass_classification};
  Dataset d = generate_mock_data(di);

  std::vector<double> labels = d.labels;
  Rng rng(42 * 7919 + 1);
  rng.shuffle(labels);
  Dataset shuffled = Dataset::from_numeric(std::move(d.feature_names),
                                           std::move(d.features), d.num_rows,
                                           std::move(d.label_name), std::move(labels));

  // Oracle first: after shuffling, nearest-centroid is near chance, so no
  // model could legitimately learn this mapping.
  const double oracle = nearest_centroid_accuracy(shuffled, 3);
  REQUIRE(oracle < 1.0 / 3.0 + 0.1);

  DataStageConfig cfg;
  const auto fs = check_data_learnability(shuffled, mi, cfg);
  REQUIRE(fs.size() == 1);
  CHECK(fs[0].check_id == checks::kModelNotLearning);
  CHECK(fs[0].severity == Severity::error);
  CHECK(!fs[0].evidence.at("symptoms").empty());
}

TEST_CASE("learnability: non-finite features surface as non-finite loss") {
  const DataInterface di = make_di(TaskType::regression, 3, 1);
  const ModelInterface mi{ArchitectureType::FCNN, TaskType::regression};
  Dataset d = generate_mock_data(di);
  d.features[0] = std::nan("");
  d.recompute_profiles();

  DataStageConfig cfg;
  const auto fs = check_data_learnability_run(d, mi, cfg, 42);
  REQUIRE(fs.size() == 1);
  bool saw_nonfinite = false;
  for (const auto& s : fs[0].evidence.at("symptoms")) {
    if (s.at("symptom") == "nonfinite_loss") saw_nonfinite = true;
  }
  CHECK(saw_nonfinite);
}

TEST_CASE("data stage: learnability is gated behind structural errors") {
  const Dataset dirty = load_dataset_text("a,b,y\n1,NaN,0\n-1,0.5,1\n0,-0.5,0\n1,0.5,1\n", "y");
  const DataInterface di = make_di(TaskType::binary_classification, 2, 2);
  const ModelInterface mi{ArchitectureType::FCNN, TaskType::binary_classification};

  DataStageConfig cfg;
  const Report gated = run_data_stage(dirty, di, mi, cfg);
  CHECK(exec_status(gated, checks::kModelNotLearning) == "gated");
  CHECK(gated.per_run_findings.empty());
  CHECK(!gated.pass());

  cfg.force_learnability = true;
  const Report forced = run_data_stage(dirty, di, mi, cfg);
  CHECK(exec_status(forced, checks::kModelNotLearning) == "run");
  CHECK(forced.per_run_findings.size() == 3);
}

TEST_CASE("data stage: clean report shape") {
  const DataInterface di = make_di(TaskType::multiclass_classification, 4, 3);
  const ModelInterface mi{ArchitectureType::FCNN, TaskType::multiclass_classification};
  const Dataset d = generate_mock_data(di);
  DataStageConfig cfg;
  const Report r = run_data_stage(d, di, mi, cfg);
  CHECK(r.findings.empty());
  CHECK(r.pass());
  CHECK(r.stage == Stage::data);
  CHECK(r.seed == 42);
  CHECK(r.runs == 3);
  CHECK(exec_status(r, checks::kMissingValues) == "run");
  CHECK(exec_status(r, checks::kModelNotLearning) == "run");
  CHECK(r.interfaces.at("data_interface").at("num_features") == 4);
  CHECK(r.config.at("runs") == 3);
}

TEST_CASE("data stage: imbalance alone is a warning, verdict still passes") {
  const Dataset d = binary_clusters(160, 100);
  const DataInterface di = make_di(TaskType::binary_classification, 2, 2);
  const ModelInterface mi{ArchitectureType::FCNN, TaskType::binary_classification};
  DataStageConfig cfg;
  const Report r = run_data_stage(d, di, mi, cfg);
  REQUIRE(r.findings.size() == 1);
  CHECK(r.findings[0].check_id == checks::kClassImbalance);
  CHECK(r.findings[0].severity == Severity::warning);
  CHECK(r.pass());
}

TEST_CASE("data stage: imbalance check skipped for regression") {
  const DataInterface di = make_di(TaskType::regression, 3, 1);
  const ModelInterface mi{ArchitectureType::FCNN, TaskType::regression};
  const Dataset d = generate_mock_data(di);
  DataStageConfig cfg;
  const Report r = run_data_stage(d, di, mi, cfg);
  CHECK(exec_status(r, checks::kClassImbalance) == "skipped");
}

TEST_CASE("data stage: run-count and interface-task contracts") {
  const DataInterface di = make_di(TaskType::regression, 3, 1);
  const ModelInterface mi{ArchitectureType::FCNN, TaskType::regression};
  const Dataset d = generate_mock_data(di);
  DataStageConfig cfg;
  cfg.runs = 2;
  CHECK_THROWS_AS(run_data_stage(d, di, mi, cfg), ContractError);

  DataStageConfig ok;
  const ModelInterface wrong{ArchitectureType::FCNN, TaskType::binary_classification};
  CHECK_THROWS_AS(run_data_stage(d, di, wrong, ok), ContractError);
}

TEST_CASE("data stage config: strict parse with overrides") {
  DataStageConfig def;
  const DataStageConfig parsed = parse_data_stage_config(
      json{{"imbalance_ratio_threshold", 2.0}, {"learnability", json{{"epochs", 5}}}});
  CHECK(parsed.imbalance_ratio_threshold == doctest::Approx(2.0));
  CHECK(parsed.learnability.epochs == 5);
  CHECK(parsed.scaling_range_threshold == doctest::Approx(def.scaling_range_threshold));

  CHECK_THROWS_AS(parse_data_stage_config(json{{"imbalance_threshold", 2.0}}), ParseError);

  // The echoed config also carries runs/seed for report transparency, but those
  // belong to CLI flags and the strict parser refuses them.
  json echoed = data_stage_config_json(def);
  CHECK_THROWS_AS(parse_data_stage_config(echoed), ParseError);
  echoed.erase("runs");
  echoed.erase("seed");
  const DataStageConfig back = parse_data_stage_config(echoed);
  CHECK(back.imbalance_ratio_threshold == doctest::Approx(def.imbalance_ratio_threshold));
  CHECK(back.learnability.learning_rate == doctest::Approx(def.learnability.learning_rate));
  CHECK(back.force_learnability == def.force_learnability);
}

TEST_CASE("every produced finding carries a catalog fix") {
  for (const auto& [id, fix] : fix_catalog()) {
    CAPTURE(id);
    CHECK(!fix.empty());
    CHECK(fix_for(id) == fix);
  }
  CHECK_THROWS_AS(fix_for("no_such_check"), ContractError);
}
