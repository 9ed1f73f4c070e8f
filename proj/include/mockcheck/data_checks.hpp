#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "mockcheck/dataset.hpp"
#include "mockcheck/findings.hpp"
#include "mockcheck/interfaces.hpp"
#include "mockcheck/report.hpp"
#include "mockcheck/train.hpp"

namespace mockcheck {

// 20 adam epochs at lr 0.01: fast enough that the mock model saturates its
// sigmoid/softmax head on clean separable data (lr 0.001 leaves the binary
// head's confidence near 0.5 after 20 epochs, flagging clean data).
struct LearnabilityBudget {
  int epochs = 20;
  int batch_size = 32;
  OptimizerKind optimizer = OptimizerKind::adam;
  double learning_rate = 0.01;
};

struct DataStageConfig {
  double imbalance_ratio_threshold = 1.5;
  double scaling_range_threshold = 20.0;
  double scaling_mean_threshold = 5.0;
  LearnabilityBudget learnability;
  int runs = 3;
  std::uint64_t seed = 42;
  // Learnability is gated behind clean structural checks unless forced.
  bool force_learnability = false;
};

// Strict parse of threshold overrides; starts from defaults.
DataStageConfig parse_data_stage_config(const nlohmann::json& overrides);
nlohmann::json data_stage_config_json(const DataStageConfig& cfg);

// Checks 1-6: pure functions of the dataset.
std::vector<Finding> check_missing_values(const Dataset& ds);
std::vector<Finding> check_missing_labels(const Dataset& ds);
std::vector<Finding> check_class_imbalance(const Dataset& ds, const DataInterface& di,
                                           const DataStageConfig& cfg);
std::vector<Finding> check_categorical_encoding(const Dataset& ds);
std::vector<Finding> check_scaling(const Dataset& ds, const DataStageConfig& cfg);
std::vector<Finding> check_label_problem_match(const Dataset& ds, const DataInterface& di);

// Check 7: train the mock model on the user's data.  Stochastic; the plain
// entry point runs cfg.runs times with seeds seed+0..runs-1 and majority-votes.
std::vector<Finding> check_data_learnability_run(const Dataset& ds, const ModelInterface& mi,
                                                 const DataStageConfig& cfg,
                                                 std::uint64_t seed);
std::vector<Finding> check_data_learnability(const Dataset& ds, const ModelInterface& mi,
                                             const DataStageConfig& cfg);

Report run_data_stage(const Dataset& ds, const DataInterface& di, const ModelInterface& mi,
                      const DataStageConfig& cfg);

}  // namespace mockcheck
