#pragma once

#include <map>
#include <string>

#include <json.hpp>

namespace mockcheck {

enum class Severity { warning, error };
enum class Stage { data, model };

std::string to_string(Severity s);
std::string to_string(Stage s);

// Closed catalog of check ids.
namespace checks {
// Data stage (issues 1-7).
inline constexpr const char* kMissingValues = "missing_values";
inline constexpr const char* kMissingLabels = "missing_labels";
inline constexpr const char* kClassImbalance = "class_imbalance";
inline constexpr const char* kMissingEncoding = "missing_encoding";
inline constexpr const char* kMissingScaling = "missing_scaling";
inline constexpr const char* kLabelProblemMismatch = "label_problem_mismatch";
inline constexpr const char* kModelNotLearning = "model_not_learning";
// Model stage (issues A-H).
inline constexpr const char* kInputShape = "input_shape_mismatch";
inline constexpr const char* kOutputShape = "output_shape_mismatch";
inline constexpr const char* kMissingHiddenActivation = "missing_hidden_activation";
inline constexpr const char* kWrongOutputActivation = "wrong_output_activation";
inline constexpr const char* kLearningRate = "learning_rate_out_of_range";
inline constexpr const char* kWrongLoss = "wrong_loss_function";
inline constexpr const char* kWrongMetrics = "wrong_metrics";
inline constexpr const char* kNonfiniteLoss = "nonfinite_loss";
inline constexpr const char* kOscillatingLoss = "oscillating_loss";
inline constexpr const char* kSlowConvergence = "slow_convergence";
inline constexpr const char* kMetricFlat = "metric_flat";
}  // namespace checks

struct Finding {
  std::string check_id;
  Stage stage = Stage::data;
  Severity severity = Severity::error;
  std::string message;
  std::string fix;
  // Voting/sorting key fragment: the column, layer, or run-independent
  // location the finding is anchored to ("" when the whole stage).
  std::string locus;
  nlohmann::json evidence = nlohmann::json::object();

  bool operator==(const Finding& other) const {
    return check_id == other.check_id && stage == other.stage &&
           severity == other.severity && message == other.message &&
           fix == other.fix && locus == other.locus && evidence == other.evidence;
  }
};

// check_id -> fix text; total over the catalog above.
const std::map<std::string, std::string>& fix_catalog();

// Throws ContractError for ids outside the catalog.
std::string fix_for(const std::string& check_id);

Finding make_finding(const std::string& check_id, Stage stage, Severity severity,
                     const std::string& message, const std::string& locus,
                     nlohmann::json evidence = nlohmann::json::object());

}  // namespace mockcheck
