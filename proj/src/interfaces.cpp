#include "mockcheck/interfaces.hpp"

#include <cmath>
#include <map>

#include <json.hpp>

#include "mockcheck/errors.hpp"

namespace mockcheck {

using nlohmann::json;

std::string to_string(DataKind k) {
  switch (k) {
    case DataKind::numeric: return "numeric";
    case DataKind::categorical: return "categorical";
    case DataKind::mixed_kind: return "mixed";
  }
  return "?";
}

std::string to_string(TaskType t) {
  switch (t) {
    case TaskType::regression: return "regression";
    case TaskType::binary_classification: return "binary_classification";
    case TaskType::multiclass_classification: return "multiclass_classification";
  }
  return "?";
}

std::string to_string(ArchitectureType a) {
  return a == ArchitectureType::FCNN ? "FCNN" : "CNN";
}

bool is_classification(TaskType t) { return t != TaskType::regression; }

bool operator==(const LayerDef& a, const LayerDef& b) {
  return a.kind == b.kind && a.units == b.units && a.filters == b.filters &&
         a.kernel_size == b.kernel_size && a.activation == b.activation;
}

namespace {

template <typename T>
T parse_enum(const json& j, const char* field, const std::map<std::string, T>& table) {
  if (!j.is_string()) throw ParseError(std::string(field) + " must be a string");
  const std::string v = j.get<std::string>();
  auto it = table.find(v);
  if (it == table.end()) {
    std::string valid;
    for (const auto& [k, _] : table) valid += (valid.empty() ? "" : ", ") + k;
    throw ParseError("unknown " + std::string(field) + " '" + v + "'; valid: " + valid);
  }
  return it->second;
}

const std::map<std::string, DataKind> kDataKinds = {
    {"numeric", DataKind::numeric},
    {"categorical", DataKind::categorical},
    {"mixed", DataKind::mixed_kind}};

const std::map<std::string, TaskType> kTaskTypes = {
    {"regression", TaskType::regression},
    {"binary_classification", TaskType::binary_classification},
    {"multiclass_classification", TaskType::multiclass_classification}};

const std::map<std::string, ArchitectureType> kArchTypes = {
    {"FCNN", ArchitectureType::FCNN}, {"CNN", ArchitectureType::CNN}};

const std::map<std::string, LossKind> kLossKinds = {
    {"mse", LossKind::mse},
    {"binary_crossentropy", LossKind::binary_crossentropy},
    {"categorical_crossentropy", LossKind::categorical_crossentropy}};

const std::map<std::string, OptimizerKind> kOptimizers = {
    {"sgd", OptimizerKind::sgd}, {"adam", OptimizerKind::adam}};

const std::map<std::string, MetricKind> kMetrics = {{"mae", MetricKind::mae},
                                                    {"accuracy", MetricKind::accuracy}};

const std::map<std::string, ActivationKind> kActivations = {
    {"linear", ActivationKind::linear},   {"relu", ActivationKind::relu},
    {"sigmoid", ActivationKind::sigmoid}, {"tanh", ActivationKind::tanh_act},
    {"softmax", ActivationKind::softmax}, {"none", ActivationKind::none}};

const std::map<std::string, LayerKind> kLayerKinds = {
    {"dense", LayerKind::dense},
    {"conv1d", LayerKind::conv1d},
    {"flatten", LayerKind::flatten},
    {"activation", LayerKind::activation}};

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + ": invalid JSON: " + e.what());
  }
}

// Strict-mode field check: everything in `required` present, nothing outside
// required+optional allowed.
void require_fields(const json& j, const char* what,
                    const std::vector<std::string>& required,
                    const std::vector<std::string>& optional = {}) {
  if (!j.is_object()) throw ParseError(std::string(what) + " must be a JSON object");
  for (const auto& f : required) {
    if (!j.contains(f)) throw ParseError(std::string(what) + ": missing field '" + f + "'");
  }
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const auto& f : required) known = known || f == key;
    for (const auto& f : optional) known = known || f == key;
    if (!known) throw ParseError(std::string(what) + ": unknown field '" + key + "'");
  }
}

int positive_int(const json& j, const char* field) {
  if (!j.is_number_integer()) throw ParseError(std::string(field) + " must be an integer");
  const long long v = j.get<long long>();
  if (v < 1) throw ParseError(std::string(field) + " must be positive");
  return static_cast<int>(v);
}

}  // namespace

void validate(const DataInterface& di) {
  if (di.num_features < 1) throw ContractError("DataInterface: num_features must be positive");
  switch (di.task_type) {
    case TaskType::regression:
      if (di.num_classes != 1) {
        throw ContractError("DataInterface: regression requires num_classes == 1");
      }
      break;
    case TaskType::binary_classification:
      if (di.num_classes != 2) {
        throw ContractError("DataInterface: binary_classification requires num_classes == 2");
      }
      break;
    case TaskType::multiclass_classification:
      if (di.num_classes <= 2) {
        throw ContractError(
            "DataInterface: multiclass_classification requires num_classes > 2");
      }
      break;
  }
}

DataInterface parse_data_interface(const std::string& text) {
  const json j = parse_json(text, "DataInterface");
  require_fields(j, "DataInterface", {"num_features", "data_kind", "task_type", "num_classes"});
  DataInterface di;
  di.num_features = positive_int(j["num_features"], "num_features");
  di.data_kind = parse_enum(j["data_kind"], "data_kind", kDataKinds);
  di.task_type = parse_enum(j["task_type"], "task_type", kTaskTypes);
  di.num_classes = positive_int(j["num_classes"], "num_classes");
  validate(di);
  return di;
}

ModelInterface parse_model_interface(const std::string& text) {
  const json j = parse_json(text, "ModelInterface");
  require_fields(j, "ModelInterface", {"architecture_type", "task_type"});
  ModelInterface mi;
  mi.architecture_type = parse_enum(j["architecture_type"], "architecture_type", kArchTypes);
  mi.task_type = parse_enum(j["task_type"], "task_type", kTaskTypes);
  return mi;
}

namespace {

LayerDef parse_layer(const json& j, std::size_t index) {
  const std::string what = "layers[" + std::to_string(index) + "]";
  if (!j.is_object()) throw ParseError(what + " must be a JSON object");
  if (!j.contains("kind")) throw ParseError(what + ": missing field 'kind'");
  const LayerKind kind = parse_enum(j["kind"], "layer kind", kLayerKinds);
  switch (kind) {
    case LayerKind::dense: {
      require_fields(j, what.c_str(), {"kind", "units"}, {"activation"});
      LayerDef d = LayerDef::dense(positive_int(j["units"], "units"));
      if (j.contains("activation")) {
        d.activation = parse_enum(j["activation"], "activation", kActivations);
      }
      return d;
    }
    case LayerKind::conv1d: {
      require_fields(j, what.c_str(), {"kind", "filters", "kernel_size"}, {"activation"});
      LayerDef d = LayerDef::conv1d(positive_int(j["filters"], "filters"),
                                    positive_int(j["kernel_size"], "kernel_size"));
      if (j.contains("activation")) {
        d.activation = parse_enum(j["activation"], "activation", kActivations);
      }
      return d;
    }
    case LayerKind::flatten:
      require_fields(j, what.c_str(), {"kind"});
      return LayerDef::flatten();
    case LayerKind::activation: {
      require_fields(j, what.c_str(), {"kind", "activation"});
      return LayerDef::activation_only(parse_enum(j["activation"], "activation", kActivations));
    }
  }
  throw ParseError(what + ": unreachable");
}

}  // namespace

ModelSpec parse_model_spec(const std::string& text) {
  const json j = parse_json(text, "ModelSpec");
  require_fields(j, "ModelSpec",
                 {"input_dim", "layers", "loss_kind", "optimizer", "learning_rate", "metrics"});
  ModelSpec spec;
  spec.input_dim = positive_int(j["input_dim"], "input_dim");
  if (!j["layers"].is_array() || j["layers"].empty()) {
    throw ParseError("ModelSpec: layers must be a nonempty array");
  }
  for (std::size_t i = 0; i < j["layers"].size(); ++i) {
    spec.layers.push_back(parse_layer(j["layers"][i], i));
  }
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    if (spec.layers[i].activation == ActivationKind::softmax && i + 1 != spec.layers.size()) {
      throw ParseError("ModelSpec: softmax is only allowed on the final layer");
    }
  }
  spec.loss_kind = parse_enum(j["loss_kind"], "loss_kind", kLossKinds);
  spec.optimizer = parse_enum(j["optimizer"], "optimizer", kOptimizers);
  if (!j["learning_rate"].is_number()) throw ParseError("learning_rate must be a number");
  spec.learning_rate = j["learning_rate"].get<double>();
  if (!std::isfinite(spec.learning_rate)) {
    throw ParseError("learning_rate must be a finite real");
  }
  if (!j["metrics"].is_array()) throw ParseError("metrics must be an array");
  for (const auto& m : j["metrics"]) {
    spec.metrics.push_back(parse_enum(m, "metric", kMetrics));
  }
  return spec;
}

std::string serialize(const DataInterface& di) {
  json j;
  j["num_features"] = di.num_features;
  j["data_kind"] = to_string(di.data_kind);
  j["task_type"] = to_string(di.task_type);
  j["num_classes"] = di.num_classes;
  return j.dump(2) + "\n";
}

std::string serialize(const ModelInterface& mi) {
  json j;
  j["architecture_type"] = to_string(mi.architecture_type);
  j["task_type"] = to_string(mi.task_type);
  return j.dump(2) + "\n";
}

std::string serialize(const ModelSpec& spec) {
  json j;
  j["input_dim"] = spec.input_dim;
  json layers = json::array();
  for (const LayerDef& l : spec.layers) {
    json lj;
    lj["kind"] = to_string(l.kind);
    switch (l.kind) {
      case LayerKind::dense:
        lj["units"] = l.units;
        if (l.activation != ActivationKind::none) lj["activation"] = to_string(l.activation);
        break;
      case LayerKind::conv1d:
        lj["filters"] = l.filters;
        lj["kernel_size"] = l.kernel_size;
        if (l.activation != ActivationKind::none) lj["activation"] = to_string(l.activation);
        break;
      case LayerKind::flatten:
        break;
      case LayerKind::activation:
        lj["activation"] = to_string(l.activation);
        break;
    }
    layers.push_back(lj);
  }
  j["layers"] = layers;
  j["loss_kind"] = to_string(spec.loss_kind);
  j["optimizer"] = to_string(spec.optimizer);
  j["learning_rate"] = spec.learning_rate;
  json metrics = json::array();
  for (MetricKind m : spec.metrics) metrics.push_back(to_string(m));
  j["metrics"] = metrics;
  return j.dump(2) + "\n";
}

}  // namespace mockcheck
