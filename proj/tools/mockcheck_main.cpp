// mockcheck: pipeline checks for tabular deep-learning setups.
//
// Exit codes: 0 clean, 1 findings reported (any severity), 2 usage/parse/IO.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mockcheck/data_checks.hpp"
#include "mockcheck/dataset.hpp"
#include "mockcheck/errors.hpp"
#include "mockcheck/interfaces.hpp"
#include "mockcheck/mock.hpp"
#include "mockcheck/model_checks.hpp"
#include "mockcheck/report.hpp"

namespace {

using nlohmann::json;
using namespace mockcheck;

std::uint64_t default_seed() {
  const char* env = std::getenv("MOCKCHECK_SEED");
  if (env == nullptr || *env == '\0') return 42;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0') {
    throw ParseError(std::string("MOCKCHECK_SEED is not an unsigned integer: '") + env + "'");
  }
  return static_cast<std::uint64_t>(v);
}

json load_json_file(const std::string& path, const char* what) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + " " + path + ": " + e.what());
  }
}

ReportFormat parse_format(const std::string& s) {
  return s == "json" ? ReportFormat::json : ReportFormat::text;
}

int emit(const Report& report, const std::string& format) {
  std::cout << render_report(report, parse_format(format));
  return report.findings.empty() ? 0 : 1;
}

struct SharedArgs {
  std::uint64_t seed = 42;
  int runs = 3;
  std::string format = "text";
  std::string config_path;
};

void add_shared(CLI::App* cmd, SharedArgs& args) {
  cmd->add_option("--seed", args.seed, "Base RNG seed (env MOCKCHECK_SEED overrides the default)")
      ->default_val(args.seed);
  cmd->add_option("--runs", args.runs, "Stochastic-check repetitions (odd)")->default_val(3);
  cmd->add_option("--format", args.format, "Report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->default_val("text");
  cmd->add_option("--config", args.config_path, "JSON file with threshold overrides");
}

json load_config(const SharedArgs& args) {
  if (args.config_path.empty()) return json::object();
  return load_json_file(args.config_path, "config");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mock-model / mock-data checks for tabular DL pipelines"};
  app.require_subcommand(1);

  SharedArgs shared;
  try {
    shared.seed = default_seed();
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  // check-data
  auto* check_data = app.add_subcommand("check-data", "Run the data-stage checks on a CSV");
  std::string data_path, label_column, di_path, mi_path;
  bool force_learnability = false;
  check_data->add_option("--data", data_path, "Dataset CSV")->required();
  check_data->add_option("--label", label_column, "Label column name or 0-based index")
      ->required();
  check_data->add_option("--data-interface", di_path, "Data-interface JSON")->required();
  check_data->add_option("--model-interface", mi_path, "Model-interface JSON")->required();
  check_data->add_flag("--force-learnability", force_learnability,
                       "Run the learnability check even when structural checks fail");
  SharedArgs data_shared = shared;
  add_shared(check_data, data_shared);

  // check-model
  auto* check_model = app.add_subcommand("check-model", "Run the model-stage checks on a spec");
  std::string model_path, model_di_path;
  bool strict_binary = false;
  check_model->add_option("--model", model_path, "Model-spec JSON")->required();
  check_model->add_option("--data-interface", model_di_path, "Data-interface JSON")->required();
  check_model->add_flag("--strict-binary-output", strict_binary,
                        "Require sigmoid binary outputs (reject 2-unit softmax)");
  SharedArgs model_shared = shared;
  add_shared(check_model, model_shared);

  // gen-mock-data
  auto* gen_data = app.add_subcommand("gen-mock-data", "Generate a mock dataset CSV");
  std::string gen_di_path, gen_data_out;
  double class_sep = 2.0, noise_fraction = 0.1;
  std::uint64_t gen_seed = shared.seed;
  gen_data->add_option("--data-interface", gen_di_path, "Data-interface JSON")->required();
  gen_data->add_option("--out", gen_data_out, "Output CSV path (default: stdout)");
  gen_data->add_option("--seed", gen_seed, "RNG seed")->default_val(gen_seed);
  gen_data->add_option("--class-sep", class_sep, "Centroid separation scale")->default_val(2.0);
  gen_data->add_option("--noise-fraction", noise_fraction, "Regression label noise fraction")
      ->default_val(0.1);

  // gen-mock-model
  auto* gen_model = app.add_subcommand("gen-mock-model", "Emit the mock model spec");
  std::string gen_mi_path, gen_model_di_path, gen_model_out;
  gen_model->add_option("--model-interface", gen_mi_path, "Model-interface JSON")->required();
  gen_model->add_option("--data-interface", gen_model_di_path, "Data-interface JSON")
      ->required();
  gen_model->add_option("--out", gen_model_out, "Output JSON path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*check_data) {
      const DataInterface di =
          parse_data_interface(read_file(di_path));
      const ModelInterface mi =
          parse_model_interface(read_file(mi_path));
      DataStageConfig cfg = parse_data_stage_config(load_config(data_shared));
      cfg.seed = data_shared.seed;
      cfg.runs = data_shared.runs;
      cfg.force_learnability = cfg.force_learnability || force_learnability;
      const Dataset ds = load_dataset_text(read_file(data_path), label_column);
      return emit(run_data_stage(ds, di, mi, cfg), data_shared.format);
    }
    if (*check_model) {
      const DataInterface di =
          parse_data_interface(read_file(model_di_path));
      const ModelSpec spec = parse_model_spec(read_file(model_path));
      ModelStageConfig cfg = parse_model_stage_config(load_config(model_shared));
      cfg.seed = model_shared.seed;
      cfg.runs = model_shared.runs;
      if (strict_binary) cfg.binary_output_strictness = BinaryOutputStrictness::strict;
      return emit(run_model_stage(spec, di, cfg), model_shared.format);
    }
    if (*gen_data) {
      const DataInterface di =
          parse_data_interface(read_file(gen_di_path));
      MockDataConfig cfg;
      cfg.seed = gen_seed;
      cfg.class_sep = class_sep;
      cfg.noise_fraction = noise_fraction;
      const std::string csv = generate_mock_data(di, cfg).to_csv();
      if (gen_data_out.empty()) std::cout << csv;
      else write_file(gen_data_out, csv);
      return 0;
    }
    if (*gen_model) {
      const ModelInterface mi =
          parse_model_interface(read_file(gen_mi_path));
      const DataInterface di =
          parse_data_interface(read_file(gen_model_di_path));
      const MockModelRecipe recipe = mock_model_recipe(mi, di.num_features, di.num_classes);
      const std::string doc = serialize(mock_model_spec(recipe, di.num_features));
      if (gen_model_out.empty()) std::cout << doc;
      else write_file(gen_model_out, doc);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
