#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mockcheck/findings.hpp"

namespace mockcheck {

enum class ReportFormat { text, json };

struct CheckExecution {
  std::string check_id;
  std::string status;  // "run" | "skipped" | "gated"

  bool operator==(const CheckExecution&) const = default;
};

struct Report {
  Stage stage = Stage::data;
  std::uint64_t seed = 42;
  int runs = 3;
  nlohmann::json interfaces = nlohmann::json::object();  // input document echo
  nlohmann::json config = nlohmann::json::object();      // thresholds echo
  std::vector<CheckExecution> executed;
  std::vector<Finding> findings;
  // Raw stochastic-check findings per run, for majority transparency.
  std::vector<std::vector<Finding>> per_run_findings;
  // Wall-clock; shown in text output only, excluded from JSON so identical
  // inputs render byte-identical reports.
  double elapsed_ms = 0.0;

  bool pass() const;  // true iff zero error-severity findings
};

// Keeps a finding iff its (check_id, locus) key appears in more than runs/2
// of the per-run sets.  Message/evidence come from the first run containing
// the finding.  runs must be odd and >= 1.
std::vector<Finding> majority_vote(const std::vector<std::vector<Finding>>& per_run,
                                   int runs);

// Stable report order: (check_id, locus).
void sort_findings(std::vector<Finding>& findings);

nlohmann::json to_json(const Finding& f);
Finding finding_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const Report& r);
Report report_from_json(const nlohmann::json& j);

std::string render_report(const Report& r, ReportFormat format);

}  // namespace mockcheck
