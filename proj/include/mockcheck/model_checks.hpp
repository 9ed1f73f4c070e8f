#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mockcheck/findings.hpp"
#include "mockcheck/interfaces.hpp"
#include "mockcheck/mock.hpp"
#include "mockcheck/report.hpp"

namespace mockcheck {

struct DynamicsBudget {
  int epochs = 60;
  int batch_size = 32;
  int sample_every = 5;
};

enum class BinaryOutputStrictness { lenient, strict };

struct ModelStageConfig {
  double lr_min = 1e-6;
  double lr_max = 1.0;
  DynamicsBudget dynamics;
  int oscillation_reversals = 3;
  double oscillation_amplitude_fraction = 0.10;
  double slow_convergence_fraction = 0.05;
  int runs = 3;
  std::uint64_t seed = 42;
  BinaryOutputStrictness binary_output_strictness = BinaryOutputStrictness::lenient;
  MockDataConfig mock_data;  // knobs for the generated dynamics dataset
};

ModelStageConfig parse_model_stage_config(const nlohmann::json& overrides);
nlohmann::json model_stage_config_json(const ModelStageConfig& cfg);

// Pure structural digest of a spec: composed output width plus the effective
// activation story (standalone activation layers credited to the preceding
// parameterized layer).
struct SpecAnalysis {
  bool composes = true;
  std::string error;
  std::size_t output_width = 0;
  std::vector<std::size_t> param_layers;      // indices of dense/conv defs
  std::vector<bool> param_layer_nonlinear;    // any nonlinearity in its chain
  ActivationKind output_activation = ActivationKind::none;  // last applied
};

SpecAnalysis analyze_spec(const ModelSpec& spec);

// Structural checks A-G: pure functions of (spec, interface, config).
std::vector<Finding> check_input_shape(const ModelSpec& spec, const DataInterface& di);
std::vector<Finding> check_output_shape(const ModelSpec& spec, const DataInterface& di);
std::vector<Finding> check_hidden_activations(const ModelSpec& spec);
std::vector<Finding> check_output_activation(const ModelSpec& spec, const DataInterface& di,
                                             const ModelStageConfig& cfg);
std::vector<Finding> check_learning_rate(const ModelSpec& spec, const ModelStageConfig& cfg);
std::vector<Finding> check_loss_function(const ModelSpec& spec, const DataInterface& di);
std::vector<Finding> check_metrics(const ModelSpec& spec, const DataInterface& di);

// Loss sampled at the 5-epoch cadence next to the full per-epoch trace.
struct LossTrace {
  std::vector<double> full;
  std::vector<double> sampled;
};

LossTrace sample_losses(const std::vector<double>& full, int sample_every);

// Reversal at i: consecutive deltas d(i-1), d(i) have opposite signs and both
// exceed the amplitude threshold.
int count_direction_reversals(const std::vector<double>& sampled, double amplitude);

// Check H: train the user's model on mock data.  Stochastic; plain entry
// point majority-votes over cfg.runs seeded runs.
std::vector<Finding> check_training_dynamics_run(const ModelSpec& spec,
                                                 const DataInterface& di,
                                                 const ModelStageConfig& cfg,
                                                 std::uint64_t seed);
std::vector<Finding> check_training_dynamics(const ModelSpec& spec, const DataInterface& di,
                                             const ModelStageConfig& cfg);

Report run_model_stage(const ModelSpec& spec, const DataInterface& di,
                       const ModelStageConfig& cfg);

}  // namespace mockcheck
