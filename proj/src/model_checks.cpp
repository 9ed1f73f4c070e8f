#include "mockcheck/model_checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "mockcheck/errors.hpp"
#include "mockcheck/train.hpp"

namespace mockcheck {

using nlohmann::json;

namespace {

void require_known_fields(const json& j, const char* what,
                          const std::vector<std::string>& known) {
  if (!j.is_object()) throw ParseError(std::string(what) + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ParseError(std::string(what) + ": unknown field '" + key + "'");
    }
  }
}

double number_field(const json& j, const char* name) {
  if (!j.is_number()) throw ParseError(std::string(name) + " must be a number");
  return j.get<double>();
}

int int_field(const json& j, const char* name) {
  if (!j.is_number_integer()) throw ParseError(std::string(name) + " must be an integer");
  return j.get<int>();
}

std::string layer_locus(std::size_t index) {
  std::ostringstream ss;
  ss << "layer:" << (index < 10 ? "0" : "") << index;
  return ss.str();
}

bool is_nonlinear(ActivationKind a) {
  return a == ActivationKind::relu || a == ActivationKind::sigmoid ||
         a == ActivationKind::tanh_act || a == ActivationKind::softmax;
}

}  // namespace

ModelStageConfig parse_model_stage_config(const json& overrides) {
  ModelStageConfig cfg;
  require_known_fields(overrides, "model-stage config",
                       {"lr_min", "lr_max", "dynamics", "oscillation_reversals",
                        "oscillation_amplitude_fraction", "slow_convergence_fraction",
                        "binary_output_strictness", "class_sep", "noise_fraction"});
  if (overrides.contains("lr_min")) cfg.lr_min = number_field(overrides["lr_min"], "lr_min");
  if (overrides.contains("lr_max")) cfg.lr_max = number_field(overrides["lr_max"], "lr_max");
  if (overrides.contains("dynamics")) {
    const json& d = overrides["dynamics"];
    require_known_fields(d, "dynamics config", {"epochs", "batch_size", "sample_every"});
    if (d.contains("epochs")) cfg.dynamics.epochs = int_field(d["epochs"], "epochs");
    if (d.contains("batch_size")) {
      cfg.dynamics.batch_size = int_field(d["batch_size"], "batch_size");
    }
    if (d.contains("sample_every")) {
      cfg.dynamics.sample_every = int_field(d["sample_every"], "sample_every");
    }
  }
  if (overrides.contains("oscillation_reversals")) {
    cfg.oscillation_reversals =
        int_field(overrides["oscillation_reversals"], "oscillation_reversals");
  }
  if (overrides.contains("oscillation_amplitude_fraction")) {
    cfg.oscillation_amplitude_fraction = number_field(
        overrides["oscillation_amplitude_fraction"], "oscillation_amplitude_fraction");
  }
  if (overrides.contains("slow_convergence_fraction")) {
    cfg.slow_convergence_fraction =
        number_field(overrides["slow_convergence_fraction"], "slow_convergence_fraction");
  }
  if (overrides.contains("binary_output_strictness")) {
    const std::string s = overrides["binary_output_strictness"].get<std::string>();
    if (s == "lenient") cfg.binary_output_strictness = BinaryOutputStrictness::lenient;
    else if (s == "strict") cfg.binary_output_strictness = BinaryOutputStrictness::strict;
    else throw ParseError("unknown binary_output_strictness '" + s + "'; valid: lenient, strict");
  }
  if (overrides.contains("class_sep")) {
    cfg.mock_data.class_sep = number_field(overrides["class_sep"], "class_sep");
  }
  if (overrides.contains("noise_fraction")) {
    cfg.mock_data.noise_fraction = number_field(overrides["noise_fraction"], "noise_fraction");
  }
  if (!(cfg.lr_min < cfg.lr_max)) throw ContractError("model-stage config: lr_min must be < lr_max");
  if (cfg.dynamics.sample_every < 1 || cfg.dynamics.epochs < 1 || cfg.dynamics.batch_size < 1) {
    throw ContractError("model-stage config: dynamics values must be >= 1");
  }
  return cfg;
}

json model_stage_config_json(const ModelStageConfig& cfg) {
  json j;
  j["lr_min"] = cfg.lr_min;
  j["lr_max"] = cfg.lr_max;
  j["dynamics"] = {{"epochs", cfg.dynamics.epochs},
                   {"batch_size", cfg.dynamics.batch_size},
                   {"sample_every", cfg.dynamics.sample_every}};
  j["oscillation_reversals"] = cfg.oscillation_reversals;
  j["oscillation_amplitude_fraction"] = cfg.oscillation_amplitude_fraction;
  j["slow_convergence_fraction"] = cfg.slow_convergence_fraction;
  j["runs"] = cfg.runs;
  j["seed"] = cfg.seed;
  j["binary_output_strictness"] =
      cfg.binary_output_strictness == BinaryOutputStrictness::strict ? "strict" : "lenient";
  j["class_sep"] = cfg.mock_data.class_sep;
  j["noise_fraction"] = cfg.mock_data.noise_fraction;
  return j;
}

SpecAnalysis analyze_spec(const ModelSpec& spec) {
  SpecAnalysis a;
  // Geometry walk (mirrors build_model, without parameters).
  std::size_t cur_flat = static_cast<std::size_t>(spec.input_dim);
  std::size_t cur_len = cur_flat, cur_ch = 1;
  bool rank2 = false;
  for (std::size_t i = 0; i < spec.layers.size() && a.composes; ++i) {
    const LayerDef& def = spec.layers[i];
    switch (def.kind) {
      case LayerKind::dense:
        if (rank2) {
          a.composes = false;
          a.error = "dense layer " + std::to_string(i) +
                    " receives an unflattened conv1d output; add a flatten layer";
          break;
        }
        cur_flat = static_cast<std::size_t>(def.units);
        cur_len = cur_flat;
        cur_ch = 1;
        break;
      case LayerKind::conv1d: {
        const std::size_t k = static_cast<std::size_t>(def.kernel_size);
        if (cur_len < k) {
          a.composes = false;
          a.error = "conv1d layer " + std::to_string(i) + " kernel width " +
                    std::to_string(k) + " exceeds its input length " +
                    std::to_string(cur_len);
          break;
        }
        cur_len = cur_len - k + 1;
        cur_ch = static_cast<std::size_t>(def.filters);
        cur_flat = cur_len * cur_ch;
        rank2 = true;
        break;
      }
      case LayerKind::flatten:
        rank2 = false;
        cur_len = cur_flat;
        cur_ch = 1;
        break;
      case LayerKind::activation:
        break;
    }
  }
  a.output_width = cur_flat;

  // Activation story, independent of geometry: a parameterized layer is
  // "activated" if its own activation or any directly following standalone
  // activation layer is nonlinear.
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerDef& def = spec.layers[i];
    if (def.kind != LayerKind::dense && def.kind != LayerKind::conv1d) continue;
    bool nonlinear = is_nonlinear(def.activation);
    for (std::size_t j = i + 1;
         j < spec.layers.size() && spec.layers[j].kind == LayerKind::activation; ++j) {
      nonlinear = nonlinear || is_nonlinear(spec.layers[j].activation);
    }
    a.param_layers.push_back(i);
    a.param_layer_nonlinear.push_back(nonlinear);
  }

  // The activation applied last on the way out (flatten is value-transparent).
  for (std::size_t i = spec.layers.size(); i-- > 0;) {
    const LayerDef& def = spec.layers[i];
    if (def.kind == LayerKind::flatten) continue;
    if (def.kind == LayerKind::activation) {
      a.output_activation = def.activation;
      break;
    }
    a.output_activation = def.activation;
    break;
  }
  return a;
}

std::vector<Finding> check_input_shape(const ModelSpec& spec, const DataInterface& di) {
  if (spec.input_dim == di.num_features) return {};
  std::ostringstream msg;
  msg << "model input dimension " << spec.input_dim << " does not match the "
      << di.num_features << " features declared by the data interface";
  return {make_finding(checks::kInputShape, Stage::model, Severity::error, msg.str(), "",
                       json{{"input_dim", spec.input_dim},
                            {"num_features", di.num_features}})};
}

std::vector<Finding> check_output_shape(const ModelSpec& spec, const DataInterface& di) {
  const SpecAnalysis a = analyze_spec(spec);
  if (!a.composes) {
    return {make_finding(checks::kOutputShape, Stage::model, Severity::error,
                         "layer shapes do not compose: " + a.error, "",
                         json{{"composition_error", a.error}})};
  }
  const std::size_t got = a.output_width;
  bool ok = false;
  std::string expected;
  switch (di.task_type) {
    case TaskType::regression:
      ok = got == 1;
      expected = "1";
      break;
    case TaskType::binary_classification:
      ok = got == 1 || got == 2;
      expected = "1 or 2";
      break;
    case TaskType::multiclass_classification:
      ok = got == static_cast<std::size_t>(di.num_classes);
      expected = std::to_string(di.num_classes);
      break;
  }
  if (ok) return {};
  std::ostringstream msg;
  msg << "output width " << got << " does not match " << to_string(di.task_type)
      << " (expected " << expected << ")";
  return {make_finding(checks::kOutputShape, Stage::model, Severity::error, msg.str(), "",
                       json{{"output_width", got}, {"expected", expected}})};
}

std::vector<Finding> check_hidden_activations(const ModelSpec& spec) {
  const SpecAnalysis a = analyze_spec(spec);
  std::vector<Finding> out;
  if (a.param_layers.size() < 2) return out;  // output layer only: exempt
  for (std::size_t p = 0; p + 1 < a.param_layers.size(); ++p) {
    if (a.param_layer_nonlinear[p]) continue;
    const std::size_t idx = a.param_layers[p];
    std::ostringstream msg;
    msg << "hidden " << to_string(spec.layers[idx].kind) << " layer " << idx
        << " has no non-linear activation";
    out.push_back(make_finding(checks::kMissingHiddenActivation, Stage::model,
                               Severity::warning, msg.str(), layer_locus(idx),
                               json{{"layer", idx},
                                    {"kind", to_string(spec.layers[idx].kind)},
                                    {"activation", to_string(spec.layers[idx].activation)}}));
  }
  return out;
}

std::vector<Finding> check_output_activation(const ModelSpec& spec, const DataInterface& di,
                                             const ModelStageConfig& cfg) {
  const SpecAnalysis a = analyze_spec(spec);
  if (!a.composes) return {};  // output-shape check reports the real problem
  ActivationKind act = a.output_activation;
  if (act == ActivationKind::none) act = ActivationKind::linear;  // dense default

  bool ok = false;
  std::string want;
  switch (di.task_type) {
    case TaskType::regression:
      ok = act == ActivationKind::linear;
      want = "linear";
      break;
    case TaskType::binary_classification:
      if (cfg.binary_output_strictness == BinaryOutputStrictness::lenient) {
        ok = act == ActivationKind::sigmoid ||
             (act == ActivationKind::softmax && a.output_width == 2);
        want = "sigmoid (1 or 2 units) or softmax (2 units)";
      } else {
        ok = act == ActivationKind::sigmoid;
        want = "sigmoid";
      }
      break;
    case TaskType::multiclass_classification:
      ok = act == ActivationKind::softmax;
      want = "softmax";
      break;
  }
  if (ok) return {};
  std::ostringstream msg;
  msg << "output activation " << to_string(act) << " does not suit "
      << to_string(di.task_type) << "; use " << want;
  return {make_finding(checks::kWrongOutputActivation, Stage::model, Severity::error,
                       msg.str(), "",
                       json{{"output_activation", to_string(act)},
                            {"expected", want},
                            {"output_width", a.output_width}})};
}

std::vector<Finding> check_learning_rate(const ModelSpec& spec, const ModelStageConfig& cfg) {
  const double lr = spec.learning_rate;
  if (!std::isfinite(lr) || lr <= 0.0) {
    std::ostringstream msg;
    msg << "learning rate " << lr << " is not a positive finite value";
    return {make_finding(checks::kLearningRate, Stage::model, Severity::error, msg.str(), "",
                         json{{"learning_rate", lr}})};
  }
  if (lr < cfg.lr_min || lr >= cfg.lr_max) {
    std::ostringstream msg;
    msg << "learning rate " << lr << " is outside the common range [" << cfg.lr_min << ", "
        << cfg.lr_max << ")";
    return {make_finding(checks::kLearningRate, Stage::model, Severity::warning, msg.str(), "",
                         json{{"learning_rate", lr},
                              {"lr_min", cfg.lr_min},
                              {"lr_max", cfg.lr_max}})};
  }
  return {};
}

std::vector<Finding> check_loss_function(const ModelSpec& spec, const DataInterface& di) {
  LossKind expected = LossKind::mse;
  switch (di.task_type) {
    case TaskType::regression: expected = LossKind::mse; break;
    case TaskType::binary_classification: expected = LossKind::binary_crossentropy; break;
    case TaskType::multiclass_classification:
      expected = LossKind::categorical_crossentropy;
      break;
  }
  if (spec.loss_kind == expected) return {};
  std::ostringstream msg;
  msg << "loss " << to_string(spec.loss_kind) << " does not suit " << to_string(di.task_type)
      << "; use " << to_string(expected);
  return {make_finding(checks::kWrongLoss, Stage::model, Severity::error, msg.str(), "",
                       json{{"loss", to_string(spec.loss_kind)},
                            {"expected", to_string(expected)}})};
}

std::vector<Finding> check_metrics(const ModelSpec& spec, const DataInterface& di) {
  const MetricKind allowed =
      di.task_type == TaskType::regression ? MetricKind::mae : MetricKind::accuracy;
  json offending = json::array();
  for (MetricKind m : spec.metrics) {
    if (m != allowed) offending.push_back(to_string(m));
  }
  if (offending.empty()) return {};
  std::ostringstream msg;
  msg << "metrics " << offending.dump() << " do not suit " << to_string(di.task_type)
      << "; use " << to_string(allowed);
  return {make_finding(checks::kWrongMetrics, Stage::model, Severity::error, msg.str(), "",
                       json{{"offending", offending}, {"expected", to_string(allowed)}})};
}

LossTrace sample_losses(const std::vector<double>& full, int sample_every) {
  if (sample_every < 1) throw ContractError("sample_losses: sample_every must be >= 1");
  LossTrace t;
  t.full = full;
  for (std::size_t i = static_cast<std::size_t>(sample_every) - 1; i < full.size();
       i += static_cast<std::size_t>(sample_every)) {
    t.sampled.push_back(full[i]);
  }
  return t;
}

int count_direction_reversals(const std::vector<double>& sampled, double amplitude) {
  if (sampled.size() < 3) return 0;
  int reversals = 0;
  double prev_delta = 0.0;
  bool prev_qualified = false;
  for (std::size_t i = 1; i < sampled.size(); ++i) {
    const double d = sampled[i] - sampled[i - 1];
    const bool qualified = std::isfinite(d) && std::abs(d) > amplitude && d != 0.0;
    if (qualified && prev_qualified && ((d > 0) != (prev_delta > 0))) ++reversals;
    prev_delta = d;
    prev_qualified = qualified;
  }
  return reversals;
}

std::vector<Finding> check_training_dynamics_run(const ModelSpec& spec,
                                                 const DataInterface& di,
                                                 const ModelStageConfig& cfg,
                                                 std::uint64_t seed) {
  MockDataConfig mock_cfg = cfg.mock_data;
  mock_cfg.seed = seed;
  const Dataset data = generate_mock_data(di, mock_cfg);
  Model model = build_model(static_cast<std::size_t>(spec.input_dim), spec.layers, seed);

  Tensor features = data.feature_tensor();
  Tensor targets;
  if (di.task_type == TaskType::regression) {
    if (model.output_dim() != 1) {
      throw ContractError("dynamics: regression model must have 1 output unit");
    }
    targets = Tensor({data.num_rows, 1});
    for (std::size_t r = 0; r < data.num_rows; ++r) targets.values[r] = data.labels[r];
  } else {
    const std::size_t width = model.output_dim();
    const std::size_t C = static_cast<std::size_t>(di.num_classes);
    if (width == 1) {
      targets = Tensor({data.num_rows, 1});
      for (std::size_t r = 0; r < data.num_rows; ++r) targets.values[r] = data.labels[r];
    } else if (width == C) {
      targets = one_hot(data.labels, di.num_classes);
    } else {
      throw ContractError("dynamics: model output width " + std::to_string(width) +
                          " does not fit " + std::to_string(C) + " classes");
    }
  }

  TrainConfig tc;
  tc.loss = spec.loss_kind;
  tc.optimizer = spec.optimizer;          // the user's hyperparameters, verbatim
  tc.learning_rate = spec.learning_rate;
  tc.epochs = cfg.dynamics.epochs;
  tc.batch_size = cfg.dynamics.batch_size;
  tc.metric = di.task_type == TaskType::regression ? MetricKind::mae : MetricKind::accuracy;
  tc.seed = seed;
  const TrainTrace trace = train(model, features, targets, tc);
  const LossTrace lt = sample_losses(trace.epoch_loss, cfg.dynamics.sample_every);

  std::vector<Finding> out;
  for (std::size_t e = 0; e < trace.epoch_loss.size(); ++e) {
    if (!std::isfinite(trace.epoch_loss[e])) {
      std::ostringstream msg;
      msg << (std::isnan(trace.epoch_loss[e]) ? "NaN" : "infinite")
          << " training loss at epoch " << (e + 1);
      out.push_back(make_finding(checks::kNonfiniteLoss, Stage::model, Severity::error,
                                 msg.str(), "",
                                 json{{"epoch", e + 1},
                                      {"value", std::isnan(trace.epoch_loss[e])
                                                    ? "nan"
                                                    : "inf"}}));
      return out;  // downstream signals are meaningless past this point
    }
  }

  double mean = 0.0;
  for (double v : lt.sampled) mean += v;
  if (!lt.sampled.empty()) mean /= static_cast<double>(lt.sampled.size());
  const double amplitude = cfg.oscillation_amplitude_fraction * mean;
  const int reversals = count_direction_reversals(lt.sampled, amplitude);
  const bool oscillating = reversals >= cfg.oscillation_reversals;
  if (oscillating) {
    std::ostringstream msg;
    msg << "oscillating loss: " << reversals << " direction reversals across losses sampled "
        << "every " << cfg.dynamics.sample_every << " epochs; reduce learning rate";
    json sampled = json::array();
    for (double v : lt.sampled) sampled.push_back(v);
    out.push_back(make_finding(checks::kOscillatingLoss, Stage::model, Severity::error,
                               msg.str(), "",
                               json{{"reversals", reversals},
                                    {"amplitude_threshold", amplitude},
                                    {"sampled_losses", sampled}}));
  }

  const double chance = is_classification(di.task_type)
                            ? 1.0 / static_cast<double>(di.num_classes)
                            : 0.0;
  if (!oscillating && std::isfinite(trace.initial_loss) && trace.initial_loss > 0.0) {
    const double reduction =
        (trace.initial_loss - trace.final_loss) / trace.initial_loss;
    bool slow = reduction < cfg.slow_convergence_fraction;
    if (slow && is_classification(di.task_type)) {
      slow = trace.epoch_metric.back() < chance + 0.1;
    }
    if (slow) {
      std::ostringstream msg;
      msg << "slow convergence: loss fell only " << reduction * 100.0 << "% over "
          << cfg.dynamics.epochs << " epochs";
      json evidence{{"initial_loss", trace.initial_loss},
                    {"final_loss", trace.final_loss},
                    {"relative_reduction", reduction}};
      if (is_classification(di.task_type)) {
        evidence["final_accuracy"] = trace.epoch_metric.back();
      }
      out.push_back(make_finding(checks::kSlowConvergence, Stage::model, Severity::warning,
                                 msg.str(), "", evidence));
    }
  }

  // Flat metric = no learning signal, unless it is flat because the model is
  // already perfect.
  double mmin = trace.epoch_metric.front(), mmax = mmin;
  bool metric_finite = true;
  for (double v : trace.epoch_metric) {
    metric_finite = metric_finite && std::isfinite(v);
    mmin = std::min(mmin, v);
    mmax = std::max(mmax, v);
  }
  const bool flat = metric_finite && mmin == mmax;
  const bool perfect = (tc.metric == MetricKind::accuracy && mmin == 1.0) ||
                       (tc.metric == MetricKind::mae && mmin == 0.0);
  if (flat && !perfect) {
    std::ostringstream msg;
    msg << "model is not learning: " << to_string(tc.metric) << " is flat at " << mmin
        << " across all " << cfg.dynamics.epochs << " epochs";
    out.push_back(make_finding(checks::kMetricFlat, Stage::model, Severity::warning,
                               msg.str(), "",
                               json{{"metric", to_string(tc.metric)}, {"value", mmin}}));
  }
  return out;
}

std::vector<Finding> check_training_dynamics(const ModelSpec& spec, const DataInterface& di,
                                             const ModelStageConfig& cfg) {
  std::vector<std::vector<Finding>> per_run;
  for (int i = 0; i < cfg.runs; ++i) {
    per_run.push_back(check_training_dynamics_run(spec, di, cfg, cfg.seed + i));
  }
  return majority_vote(per_run, cfg.runs);
}

Report run_model_stage(const ModelSpec& spec, const DataInterface& di,
                       const ModelStageConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  validate(di);
  if (cfg.runs < 1 || cfg.runs % 2 == 0) {
    throw ContractError("model stage: runs must be odd and >= 1");
  }

  Report r;
  r.stage = Stage::model;
  r.seed = cfg.seed;
  r.runs = cfg.runs;
  r.interfaces = json{{"data_interface",
                       json{{"num_features", di.num_features},
                            {"data_kind", to_string(di.data_kind)},
                            {"task_type", to_string(di.task_type)},
                            {"num_classes", di.num_classes}}},
                      {"model_spec", json::parse(serialize(spec))}};
  r.config = model_stage_config_json(cfg);

  auto append = [&r](std::vector<Finding> fs) {
    for (Finding& f : fs) r.findings.push_back(std::move(f));
  };
  append(check_input_shape(spec, di));
  r.executed.push_back({checks::kInputShape, "run"});
  append(check_output_shape(spec, di));
  r.executed.push_back({checks::kOutputShape, "run"});
  append(check_hidden_activations(spec));
  r.executed.push_back({checks::kMissingHiddenActivation, "run"});
  append(check_output_activation(spec, di, cfg));
  r.executed.push_back({checks::kWrongOutputActivation, "run"});
  append(check_learning_rate(spec, cfg));
  r.executed.push_back({checks::kLearningRate, "run"});
  append(check_loss_function(spec, di));
  r.executed.push_back({checks::kWrongLoss, "run"});
  append(check_metrics(spec, di));
  r.executed.push_back({checks::kWrongMetrics, "run"});

  bool structural_error = false;
  for (const Finding& f : r.findings) {
    structural_error = structural_error || f.severity == Severity::error;
  }
  if (structural_error) {
    r.executed.push_back({"training_dynamics", "gated"});
  } else {
    for (int i = 0; i < cfg.runs; ++i) {
      r.per_run_findings.push_back(check_training_dynamics_run(spec, di, cfg, cfg.seed + i));
    }
    append(majority_vote(r.per_run_findings, cfg.runs));
    r.executed.push_back({"training_dynamics", "run"});
  }

  sort_findings(r.findings);
  const auto t1 = std::chrono::steady_clock::now();
  r.elapsed_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return r;
}

}  // namespace mockcheck
