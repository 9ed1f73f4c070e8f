// Python bindings: JSON/CSV text in, JSON/CSV text out.  Keeps the Python
// surface schema-identical to the CLI so reports match byte for byte.

#include <pybind11/pybind11.h>

#include <json.hpp>

#include "mockcheck/data_checks.hpp"
#include "mockcheck/dataset.hpp"
#include "mockcheck/errors.hpp"
#include "mockcheck/interfaces.hpp"
#include "mockcheck/mock.hpp"
#include "mockcheck/model_checks.hpp"
#include "mockcheck/report.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace mockcheck;

namespace {

json parse_config(const std::string& text) {
  if (text.empty()) return json::object();
  return json::parse(text);
}

std::string py_generate_mock_data(const std::string& data_interface, std::uint64_t seed,
                                  double class_sep, double noise_fraction) {
  const DataInterface di = parse_data_interface(data_interface);
  MockDataConfig cfg;
  cfg.seed = seed;
  cfg.class_sep = class_sep;
  cfg.noise_fraction = noise_fraction;
  return generate_mock_data(di, cfg).to_csv();
}

std::string py_mock_model_spec(const std::string& model_interface,
                               const std::string& data_interface) {
  const ModelInterface mi = parse_model_interface(model_interface);
  const DataInterface di = parse_data_interface(data_interface);
  const MockModelRecipe recipe = mock_model_recipe(mi, di.num_features, di.num_classes);
  return serialize(mock_model_spec(recipe, di.num_features));
}

std::string py_check_data(const std::string& csv_text, const std::string& label_column,
                          const std::string& data_interface,
                          const std::string& model_interface, const std::string& config,
                          std::uint64_t seed, int runs, bool force_learnability) {
  const DataInterface di = parse_data_interface(data_interface);
  const ModelInterface mi = parse_model_interface(model_interface);
  DataStageConfig cfg = parse_data_stage_config(parse_config(config));
  cfg.seed = seed;
  cfg.runs = runs;
  cfg.force_learnability = cfg.force_learnability || force_learnability;
  const Dataset ds = load_dataset_text(csv_text, label_column);
  return render_report(run_data_stage(ds, di, mi, cfg), ReportFormat::json);
}

std::string py_check_model(const std::string& model_spec, const std::string& data_interface,
                           const std::string& config, std::uint64_t seed, int runs,
                           bool strict_binary_output) {
  const DataInterface di = parse_data_interface(data_interface);
  const ModelSpec spec = parse_model_spec(model_spec);
  ModelStageConfig cfg = parse_model_stage_config(parse_config(config));
  cfg.seed = seed;
  cfg.runs = runs;
  if (strict_binary_output) cfg.binary_output_strictness = BinaryOutputStrictness::strict;
  return render_report(run_model_stage(spec, di, cfg), ReportFormat::json);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "mock-model / mock-data checks for tabular DL pipelines";

  // Base first: pybind tries the most recently registered translator first,
  // so ParseError (derived) must be registered after ContractError.
  py::register_exception<ContractError>(m, "MockcheckContractError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "MockcheckParseError", PyExc_ValueError);

  m.def("generate_mock_data", &py_generate_mock_data, py::arg("data_interface"),
        py::arg("seed") = 42, py::arg("class_sep") = 2.0, py::arg("noise_fraction") = 0.1,
        "Generate a mock dataset for a data-interface JSON document; returns CSV text.");
  m.def("mock_model_spec", &py_mock_model_spec, py::arg("model_interface"),
        py::arg("data_interface"),
        "Derive the mock model spec for the given interfaces; returns a JSON document.");
  m.def("check_data", &py_check_data, py::arg("csv_text"), py::arg("label_column"),
        py::arg("data_interface"), py::arg("model_interface"), py::arg("config") = "",
        py::arg("seed") = 42, py::arg("runs") = 3, py::arg("force_learnability") = false,
        "Run the data-stage checks; returns the report as a JSON document.");
  m.def("check_model", &py_check_model, py::arg("model_spec"), py::arg("data_interface"),
        py::arg("config") = "", py::arg("seed") = 42, py::arg("runs") = 3,
        py::arg("strict_binary_output") = false,
        "Run the model-stage checks; returns the report as a JSON document.");
}
