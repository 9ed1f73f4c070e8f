#pragma once

#include <string>
#include <vector>

#include "mockcheck/nn.hpp"
#include "mockcheck/train.hpp"

namespace mockcheck {

enum class DataKind { numeric, categorical, mixed_kind };
enum class TaskType { regression, binary_classification, multiclass_classification };
enum class ArchitectureType { FCNN, CNN };

std::string to_string(DataKind k);
std::string to_string(TaskType t);
std::string to_string(ArchitectureType a);

bool is_classification(TaskType t);

// The data-preparation stage contract.
struct DataInterface {
  int num_features = 0;
  DataKind data_kind = DataKind::numeric;
  TaskType task_type = TaskType::regression;
  int num_classes = 1;  // 1 for regression

  bool operator==(const DataInterface&) const = default;
};

// The model-design stage contract.
struct ModelInterface {
  ArchitectureType architecture_type = ArchitectureType::FCNN;
  TaskType task_type = TaskType::regression;

  bool operator==(const ModelInterface&) const = default;
};

// Declarative description of the user's model.
struct ModelSpec {
  int input_dim = 0;
  std::vector<LayerDef> layers;
  LossKind loss_kind = LossKind::mse;
  OptimizerKind optimizer = OptimizerKind::adam;
  double learning_rate = 0.001;
  std::vector<MetricKind> metrics;

  bool operator==(const ModelSpec&) const = default;
};

bool operator==(const LayerDef& a, const LayerDef& b);

// JSON round-trip.  Parsers are strict: unknown fields, unknown enum tokens,
// and cross-field invariant violations all raise ParseError/ContractError.
DataInterface parse_data_interface(const std::string& text);
ModelInterface parse_model_interface(const std::string& text);
ModelSpec parse_model_spec(const std::string& text);

std::string serialize(const DataInterface& di);
std::string serialize(const ModelInterface& mi);
std::string serialize(const ModelSpec& spec);

void validate(const DataInterface& di);

}  // namespace mockcheck
