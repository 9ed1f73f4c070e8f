#include "mockcheck/data_checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "mockcheck/errors.hpp"
#include "mockcheck/mock.hpp"

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

std::string trimmed(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

}  // namespace

DataStageConfig parse_data_stage_config(const json& overrides) {
  DataStageConfig cfg;
  require_known_fields(overrides, "data-stage config",
                       {"imbalance_ratio_threshold", "scaling_range_threshold",
                        "scaling_mean_threshold", "learnability", "force_learnability"});
  if (overrides.contains("imbalance_ratio_threshold")) {
    cfg.imbalance_ratio_threshold =
        number_field(overrides["imbalance_ratio_threshold"], "imbalance_ratio_threshold");
  }
  if (overrides.contains("scaling_range_threshold")) {
    cfg.scaling_range_threshold =
        number_field(overrides["scaling_range_threshold"], "scaling_range_threshold");
  }
  if (overrides.contains("scaling_mean_threshold")) {
    cfg.scaling_mean_threshold =
        number_field(overrides["scaling_mean_threshold"], "scaling_mean_threshold");
  }
  if (overrides.contains("learnability")) {
    const json& l = overrides["learnability"];
    require_known_fields(l, "learnability config",
                         {"epochs", "batch_size", "optimizer", "learning_rate"});
    if (l.contains("epochs")) cfg.learnability.epochs = int_field(l["epochs"], "epochs");
    if (l.contains("batch_size")) {
      cfg.learnability.batch_size = int_field(l["batch_size"], "batch_size");
    }
    if (l.contains("optimizer")) {
      const std::string o = l["optimizer"].get<std::string>();
      if (o == "sgd") cfg.learnability.optimizer = OptimizerKind::sgd;
      else if (o == "adam") cfg.learnability.optimizer = OptimizerKind::adam;
      else throw ParseError("unknown optimizer '" + o + "'; valid: adam, sgd");
    }
    if (l.contains("learning_rate")) {
      cfg.learnability.learning_rate = number_field(l["learning_rate"], "learning_rate");
    }
  }
  if (overrides.contains("force_learnability")) {
    if (!overrides["force_learnability"].is_boolean()) {
      throw ParseError("force_learnability must be a boolean");
    }
    cfg.force_learnability = overrides["force_learnability"].get<bool>();
  }
  if (cfg.imbalance_ratio_threshold <= 0 || cfg.scaling_range_threshold <= 0 ||
      cfg.scaling_mean_threshold <= 0) {
    throw ContractError("data-stage config: thresholds must be positive");
  }
  return cfg;
}

json data_stage_config_json(const DataStageConfig& cfg) {
  json j;
  j["imbalance_ratio_threshold"] = cfg.imbalance_ratio_threshold;
  j["scaling_range_threshold"] = cfg.scaling_range_threshold;
  j["scaling_mean_threshold"] = cfg.scaling_mean_threshold;
  j["learnability"] = {{"epochs", cfg.learnability.epochs},
                       {"batch_size", cfg.learnability.batch_size},
                       {"optimizer", to_string(cfg.learnability.optimizer)},
                       {"learning_rate", cfg.learnability.learning_rate}};
  j["runs"] = cfg.runs;
  j["seed"] = cfg.seed;
  j["force_learnability"] = cfg.force_learnability;
  return j;
}

std::vector<Finding> check_missing_values(const Dataset& ds) {
  std::vector<Finding> out;
  for (const ColumnProfile& p : ds.profiles) {
    if (p.missing_count == 0) continue;
    std::ostringstream msg;
    msg << "column '" << p.name << "' has " << p.missing_count << " missing value"
        << (p.missing_count == 1 ? "" : "s") << " out of " << ds.num_rows << " rows";
    out.push_back(make_finding(
        checks::kMissingValues, Stage::data, Severity::error, msg.str(), p.name,
        json{{"column", p.name}, {"missing_count", p.missing_count}, {"rows", ds.num_rows}}));
  }
  return out;
}

std::vector<Finding> check_missing_labels(const Dataset& ds) {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < ds.num_rows; ++r) {
    if (is_missing_token(ds.raw_labels[r])) rows.push_back(r);
  }
  if (rows.empty()) return {};
  json evidence;
  evidence["missing_count"] = rows.size();
  json first = json::array();
  for (std::size_t i = 0; i < rows.size() && i < 10; ++i) first.push_back(rows[i]);
  evidence["rows"] = first;  // 0-based data-row indices, first 10
  std::ostringstream msg;
  msg << rows.size() << " of " << ds.num_rows << " label cells are missing";
  return {make_finding(checks::kMissingLabels, Stage::data, Severity::error, msg.str(), "",
                       evidence)};
}

std::vector<Finding> check_class_imbalance(const Dataset& ds, const DataInterface& di,
                                           const DataStageConfig& cfg) {
  if (!is_classification(di.task_type)) return {};
  std::map<std::string, std::size_t> counts;
  for (const std::string& raw : ds.raw_labels) {
    if (is_missing_token(raw)) continue;
    counts[trimmed(raw)] += 1;
  }
  if (counts.size() < 2) return {};
  std::size_t mx = 0, mn = SIZE_MAX;
  for (const auto& [_, c] : counts) {
    mx = std::max(mx, c);
    mn = std::min(mn, c);
  }
  const double ratio = static_cast<double>(mx) / static_cast<double>(mn);
  if (!(ratio > cfg.imbalance_ratio_threshold)) return {};
  json evidence;
  evidence["ratio"] = ratio;
  evidence["threshold"] = cfg.imbalance_ratio_threshold;
  json cj;
  for (const auto& [label, c] : counts) cj[label] = c;
  evidence["class_counts"] = cj;
  std::ostringstream msg;
  msg << "class counts are imbalanced (max/min ratio " << ratio << " exceeds "
      << cfg.imbalance_ratio_threshold << ")";
  return {make_finding(checks::kClassImbalance, Stage::data, Severity::warning, msg.str(), "",
                       evidence)};
}

std::vector<Finding> check_categorical_encoding(const Dataset& ds) {
  std::vector<Finding> out;
  for (const ColumnProfile& p : ds.profiles) {
    if (p.kind != ColumnKind::categorical && p.kind != ColumnKind::mixed) continue;
    std::ostringstream msg;
    msg << "column '" << p.name << "' is " << to_string(p.kind) << " ("
        << p.distinct_count << " distinct values) and is not numerically encoded";
    out.push_back(make_finding(checks::kMissingEncoding, Stage::data, Severity::error,
                               msg.str(), p.name,
                               json{{"column", p.name},
                                    {"kind", to_string(p.kind)},
                                    {"distinct_count", p.distinct_count}}));
  }
  return out;
}

std::vector<Finding> check_scaling(const Dataset& ds, const DataStageConfig& cfg) {
  std::vector<Finding> out;
  for (const ColumnProfile& p : ds.profiles) {
    if (p.kind != ColumnKind::numeric || !p.has_stats) continue;
    const double range = p.max - p.min;
    const bool wide = range > cfg.scaling_range_threshold;
    const bool shifted = std::abs(p.mean) > cfg.scaling_mean_threshold;
    if (!wide && !shifted) continue;
    std::ostringstream msg;
    msg << "column '" << p.name << "' looks unscaled (";
    if (wide) msg << "range " << range << " > " << cfg.scaling_range_threshold;
    if (wide && shifted) msg << ", ";
    if (shifted) msg << "|mean| " << std::abs(p.mean) << " > " << cfg.scaling_mean_threshold;
    msg << ")";
    out.push_back(make_finding(checks::kMissingScaling, Stage::data, Severity::warning,
                               msg.str(), p.name,
                               json{{"column", p.name},
                                    {"min", p.min},
                                    {"max", p.max},
                                    {"mean", p.mean},
                                    {"range_threshold", cfg.scaling_range_threshold},
                                    {"mean_threshold", cfg.scaling_mean_threshold}}));
  }
  return out;
}

namespace {

// Distinct parsed labels plus integrality info, over non-missing cells.
struct LabelSummary {
  std::set<double> distinct_numeric;
  std::size_t non_numeric = 0;
  std::size_t non_integer = 0;
  std::vector<std::string> samples;  // offending raw values, first few
};

LabelSummary summarize_labels(const Dataset& ds) {
  LabelSummary s;
  for (const std::string& raw : ds.raw_labels) {
    if (is_missing_token(raw)) continue;
    double v;
    if (!parse_numeric(raw, v)) {
      ++s.non_numeric;
      if (s.samples.size() < 5) s.samples.push_back(trimmed(raw));
      continue;
    }
    s.distinct_numeric.insert(v);
    if (v != std::floor(v)) {
      ++s.non_integer;
      if (s.samples.size() < 5) s.samples.push_back(trimmed(raw));
    }
  }
  return s;
}

}  // namespace

std::vector<Finding> check_label_problem_match(const Dataset& ds, const DataInterface& di) {
  const LabelSummary s = summarize_labels(ds);
  json evidence;
  json samples = json::array();
  for (const auto& v : s.samples) samples.push_back(v);
  std::ostringstream msg;

  if (di.task_type == TaskType::regression) {
    if (s.non_numeric == 0) return {};
    msg << s.non_numeric << " label cells are not numeric but the task is regression";
    evidence["non_numeric_count"] = s.non_numeric;
    evidence["samples"] = samples;
    return {make_finding(checks::kLabelProblemMismatch, Stage::data, Severity::error,
                         msg.str(), "", evidence)};
  }

  // Classification: labels must be integer class ids and the distinct count
  // must match the declared number of classes.
  if (s.non_numeric > 0 || s.non_integer > 0) {
    msg << "classification labels must be integer class ids; found "
        << (s.non_numeric + s.non_integer) << " offending cells";
    evidence["non_numeric_count"] = s.non_numeric;
    evidence["non_integer_count"] = s.non_integer;
    evidence["samples"] = samples;
    return {make_finding(checks::kLabelProblemMismatch, Stage::data, Severity::error,
                         msg.str(), "", evidence)};
  }
  const std::size_t expected = static_cast<std::size_t>(di.num_classes);
  if (s.distinct_numeric.size() != expected) {
    msg << "found " << s.distinct_numeric.size() << " distinct labels but "
        << to_string(di.task_type) << " declares " << expected << " classes";
    json distinct = json::array();
    std::size_t shown = 0;
    for (double v : s.distinct_numeric) {
      if (shown++ == 10) break;
      distinct.push_back(v);
    }
    evidence["distinct_labels"] = distinct;
    evidence["distinct_count"] = s.distinct_numeric.size();
    evidence["declared_classes"] = expected;
    return {make_finding(checks::kLabelProblemMismatch, Stage::data, Severity::error,
                         msg.str(), "", evidence)};
  }
  return {};
}

std::vector<Finding> check_data_learnability_run(const Dataset& ds, const ModelInterface& mi,
                                                 const DataStageConfig& cfg,
                                                 std::uint64_t seed) {
  const int f = static_cast<int>(ds.num_features);
  Tensor features = ds.feature_tensor();
  Tensor targets;
  int num_classes = 1;
  MockModelRecipe recipe;

  if (is_classification(mi.task_type)) {
    const LabelSummary s = summarize_labels(ds);
    if (s.distinct_numeric.size() < 2) {
      throw ContractError("learnability: classification data needs >= 2 distinct labels");
    }
    num_classes = static_cast<int>(s.distinct_numeric.size());
    recipe = mock_model_recipe(mi, f, num_classes);
    // Map each label to its index within the sorted distinct values.
    std::map<double, double> index;
    double next = 0.0;
    for (double v : s.distinct_numeric) index[v] = next++;
    std::vector<double> ids(ds.num_rows);
    const double nan = std::nan("");
    for (std::size_t r = 0; r < ds.num_rows; ++r) {
      const double v = ds.labels[r];
      auto it = std::isnan(v) ? index.end() : index.find(v);
      ids[r] = it == index.end() ? nan : it->second;
    }
    targets = one_hot(ids, recipe.output_units);
  } else {
    recipe = mock_model_recipe(mi, f, 1);
    targets = Tensor({ds.num_rows, 1});
    for (std::size_t r = 0; r < ds.num_rows; ++r) targets.values[r] = ds.labels[r];
  }

  Model model = build_mock_model(recipe, f, seed);
  TrainConfig tc;
  tc.loss = recipe.loss_kind;
  tc.optimizer = cfg.learnability.optimizer;
  tc.learning_rate = cfg.learnability.learning_rate;
  tc.epochs = cfg.learnability.epochs;
  tc.batch_size = cfg.learnability.batch_size;
  tc.metric = recipe.metric_kind;
  tc.seed = seed;
  const TrainTrace trace = train(model, features, targets, tc);

  // Symptoms, in diagnostic priority order; one finding covers them all.
  json symptoms = json::array();
  std::string headline;
  for (std::size_t e = 0; e < trace.epoch_loss.size(); ++e) {
    if (!std::isfinite(trace.epoch_loss[e])) {
      std::ostringstream ss;
      ss << (std::isnan(trace.epoch_loss[e]) ? "NaN" : "infinite") << " loss at epoch "
         << (e + 1);
      symptoms.push_back(json{{"symptom", "nonfinite_loss"},
                              {"epoch", e + 1},
                              {"detail", ss.str()}});
      if (headline.empty()) headline = ss.str();
      break;
    }
  }
  const double chance = 1.0 / static_cast<double>(std::max(num_classes, 1));
  if (symptoms.empty()) {
    if (is_classification(mi.task_type)) {
      const double acc = trace.epoch_metric.back();
      if (acc < chance + 0.1) {
        std::ostringstream ss;
        ss << "final accuracy " << acc << " is near chance (" << chance << ")";
        symptoms.push_back(json{{"symptom", "low_accuracy"},
                                {"final_accuracy", acc},
                                {"chance", chance},
                                {"detail", ss.str()}});
        if (headline.empty()) headline = ss.str();
      }
      // Low confidence: mean of the per-row maximum predicted probability.
      const Tensor preds = forward(model, features);
      double mean_max = 0.0;
      for (std::size_t r = 0; r < preds.rows(); ++r) {
        double mx = preds.at(r, 0);
        for (std::size_t c = 1; c < preds.cols(); ++c) mx = std::max(mx, preds.at(r, c));
        mean_max += mx;
      }
      mean_max /= static_cast<double>(preds.rows());
      if (mean_max < chance + 0.05) {
        std::ostringstream ss;
        ss << "mean top-class probability " << mean_max << " shows consistently low confidence";
        symptoms.push_back(json{{"symptom", "low_confidence"},
                                {"mean_max_probability", mean_max},
                                {"detail", ss.str()}});
        if (headline.empty()) headline = ss.str();
      }
    } else {
      if (trace.final_loss > 0.9 * trace.initial_loss) {
        std::ostringstream ss;
        ss << "loss barely decreased (initial " << trace.initial_loss << ", final "
           << trace.final_loss << ")";
        symptoms.push_back(json{{"symptom", "high_loss"},
                                {"initial_loss", trace.initial_loss},
                                {"final_loss", trace.final_loss},
                                {"detail", ss.str()}});
        if (headline.empty()) headline = ss.str();
      }
    }
  }
  if (symptoms.empty()) return {};
  json evidence;
  evidence["symptoms"] = symptoms;
  evidence["epochs"] = cfg.learnability.epochs;
  return {make_finding(checks::kModelNotLearning, Stage::data, Severity::error,
                       "mock model is not learning from this data: " + headline, "",
                       evidence)};
}

std::vector<Finding> check_data_learnability(const Dataset& ds, const ModelInterface& mi,
                                             const DataStageConfig& cfg) {
  std::vector<std::vector<Finding>> per_run;
  for (int i = 0; i < cfg.runs; ++i) {
    per_run.push_back(check_data_learnability_run(ds, mi, cfg, cfg.seed + i));
  }
  return majority_vote(per_run, cfg.runs);
}

Report run_data_stage(const Dataset& ds, const DataInterface& di, const ModelInterface& mi,
                      const DataStageConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  validate(di);
  if (ds.num_features != static_cast<std::size_t>(di.num_features)) {
    throw ContractError("data stage: dataset has " + std::to_string(ds.num_features) +
                        " feature columns but the data interface declares " +
                        std::to_string(di.num_features));
  }
  if (di.task_type != mi.task_type) {
    throw ContractError("data stage: data interface task is " + to_string(di.task_type) +
                        " but model interface task is " + to_string(mi.task_type));
  }
  if (cfg.runs < 1 || cfg.runs % 2 == 0) {
    throw ContractError("data stage: runs must be odd and >= 1");
  }

  Report r;
  r.stage = Stage::data;
  r.seed = cfg.seed;
  r.runs = cfg.runs;
  r.interfaces = json{{"data_interface",
                       json{{"num_features", di.num_features},
                            {"data_kind", to_string(di.data_kind)},
                            {"task_type", to_string(di.task_type)},
                            {"num_classes", di.num_classes}}},
                      {"model_interface",
                       json{{"architecture_type", to_string(mi.architecture_type)},
                            {"task_type", to_string(mi.task_type)}}}};
  r.config = data_stage_config_json(cfg);

  auto append = [&r](std::vector<Finding> fs) {
    for (Finding& f : fs) r.findings.push_back(std::move(f));
  };
  append(check_missing_values(ds));
  r.executed.push_back({checks::kMissingValues, "run"});
  append(check_missing_labels(ds));
  r.executed.push_back({checks::kMissingLabels, "run"});
  if (is_classification(di.task_type)) {
    append(check_class_imbalance(ds, di, cfg));
    r.executed.push_back({checks::kClassImbalance, "run"});
  } else {
    r.executed.push_back({checks::kClassImbalance, "skipped"});
  }
  append(check_categorical_encoding(ds));
  r.executed.push_back({checks::kMissingEncoding, "run"});
  append(check_scaling(ds, cfg));
  r.executed.push_back({checks::kMissingScaling, "run"});
  append(check_label_problem_match(ds, di));
  r.executed.push_back({checks::kLabelProblemMismatch, "run"});

  bool structural_error = false;
  for (const Finding& f : r.findings) {
    structural_error = structural_error || f.severity == Severity::error;
  }
  if (structural_error && !cfg.force_learnability) {
    r.executed.push_back({checks::kModelNotLearning, "gated"});
  } else {
    for (int i = 0; i < cfg.runs; ++i) {
      r.per_run_findings.push_back(check_data_learnability_run(ds, mi, cfg, cfg.seed + i));
    }
    append(majority_vote(r.per_run_findings, cfg.runs));
    r.executed.push_back({checks::kModelNotLearning, "run"});
  }

  sort_findings(r.findings);
  const auto t1 = std::chrono::steady_clock::now();
  r.elapsed_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return r;
}

}  // namespace mockcheck
