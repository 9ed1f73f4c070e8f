#include "mockcheck/findings.hpp"

#include "mockcheck/errors.hpp"

namespace mockcheck {

std::string to_string(Severity s) { return s == Severity::error ? "error" : "warning"; }
std::string to_string(Stage s) { return s == Stage::data ? "data" : "model"; }

const std::map<std::string, std::string>& fix_catalog() {
  static const std::map<std::string, std::string> catalog = {
      {checks::kMissingValues,
       "remove or replace (impute) missing values before training"},
      {checks::kMissingLabels,
       "drop rows without labels or restore the missing labels before training"},
      {checks::kClassImbalance,
       "rebalance the classes (oversample the minority or undersample the majority) "
       "before training"},
      {checks::kMissingEncoding,
       "encode categorical column (one-hot or ordinal) before training"},
      {checks::kMissingScaling,
       "scale the features before training: standardize to zero mean and unit variance, "
       "or min-max normalize"},
      {checks::kLabelProblemMismatch,
       "make the labels match the declared task: check num_classes, label values, and "
       "task_type"},
      {checks::kModelNotLearning,
       "refine the training data: verify preprocessing, remove noise, and check that the "
       "features carry signal for the target"},
      {checks::kInputShape,
       "set the input layer dimension to the number of features in the data interface"},
      {checks::kOutputShape,
       "match the output layer units to the task: 1 for regression, 1 or 2 for binary, "
       "num_classes for multiclass"},
      {checks::kMissingHiddenActivation,
       "add a non-linear activation (e.g. relu) to every hidden layer"},
      {checks::kWrongOutputActivation,
       "use the output activation matching the task: linear output for regression, "
       "sigmoid for binary, softmax for multiclass"},
      {checks::kLearningRate,
       "set the learning rate to a common value such as 0.001 (inside [1e-06, 1.0))"},
      {checks::kWrongLoss,
       "use the loss matching the task: mse for regression, binary_crossentropy for "
       "binary, categorical_crossentropy for multiclass"},
      {checks::kWrongMetrics,
       "track the metric matching the task: mae for regression, accuracy for "
       "classification"},
      {checks::kNonfiniteLoss,
       "reduce the learning rate and check for invalid values reaching the loss"},
      {checks::kOscillatingLoss, "reduce the learning rate or decrease batch size"},
      {checks::kSlowConvergence,
       "increase the learning rate, train longer, or simplify the architecture"},
      {checks::kMetricFlat,
       "check that the model can learn: verify activations, learning rate, and loss "
       "choice"},
  };
  return catalog;
}

std::string fix_for(const std::string& check_id) {
  const auto& catalog = fix_catalog();
  auto it = catalog.find(check_id);
  if (it == catalog.end()) {
    throw ContractError("fix_for: unknown check id '" + check_id + "'");
  }
  return it->second;
}

Finding make_finding(const std::string& check_id, Stage stage, Severity severity,
                     const std::string& message, const std::string& locus,
                     nlohmann::json evidence) {
  Finding f;
  f.check_id = check_id;
  f.stage = stage;
  f.severity = severity;
  f.message = message;
  f.fix = fix_for(check_id);
  f.locus = locus;
  f.evidence = std::move(evidence);
  return f;
}

}  // namespace mockcheck
