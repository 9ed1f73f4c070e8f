#include "mockcheck/report.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "mockcheck/errors.hpp"

namespace mockcheck {

using nlohmann::json;

bool Report::pass() const {
  for (const Finding& f : findings) {
    if (f.severity == Severity::error) return false;
  }
  return true;
}

std::vector<Finding> majority_vote(const std::vector<std::vector<Finding>>& per_run,
                                   int runs) {
  if (runs < 1 || runs % 2 == 0) {
    throw ContractError("majority_vote: runs must be odd and >= 1");
  }
  if (per_run.size() != static_cast<std::size_t>(runs)) {
    throw ContractError("majority_vote: expected one finding set per run");
  }
  // Count distinct runs per (check_id, locus) key; keep insertion order of
  // first appearance deterministic by scanning runs in order.
  std::map<std::pair<std::string, std::string>, int> counts;
  std::map<std::pair<std::string, std::string>, Finding> first_seen;
  for (const auto& run : per_run) {
    std::map<std::pair<std::string, std::string>, bool> seen_this_run;
    for (const Finding& f : run) {
      const auto key = std::make_pair(f.check_id, f.locus);
      if (seen_this_run[key]) continue;
      seen_this_run[key] = true;
      counts[key] += 1;
      first_seen.try_emplace(key, f);
    }
  }
  std::vector<Finding> kept;
  for (const auto& [key, count] : counts) {
    if (count > runs / 2) kept.push_back(first_seen.at(key));
  }
  sort_findings(kept);
  return kept;
}

void sort_findings(std::vector<Finding>& findings) {
  std::stable_sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
    if (a.check_id != b.check_id) return a.check_id < b.check_id;
    return a.locus < b.locus;
  });
}

json to_json(const Finding& f) {
  json j;
  j["check_id"] = f.check_id;
  j["stage"] = to_string(f.stage);
  j["severity"] = to_string(f.severity);
  j["message"] = f.message;
  j["fix"] = f.fix;
  j["locus"] = f.locus;
  j["evidence"] = f.evidence;
  return j;
}

Finding finding_from_json(const json& j) {
  Finding f;
  f.check_id = j.at("check_id").get<std::string>();
  f.stage = j.at("stage").get<std::string>() == "data" ? Stage::data : Stage::model;
  f.severity =
      j.at("severity").get<std::string>() == "error" ? Severity::error : Severity::warning;
  f.message = j.at("message").get<std::string>();
  f.fix = j.at("fix").get<std::string>();
  f.locus = j.at("locus").get<std::string>();
  f.evidence = j.at("evidence");
  return f;
}

json report_to_json(const Report& r) {
  json j;
  j["schema_version"] = 1;
  j["stage"] = to_string(r.stage);
  j["verdict"] = r.pass() ? "pass" : "fail";
  j["seed"] = r.seed;
  j["runs"] = r.runs;
  j["interfaces"] = r.interfaces;
  j["config"] = r.config;
  json executed = json::array();
  for (const CheckExecution& e : r.executed) {
    executed.push_back(json{{"check", e.check_id}, {"status", e.status}});
  }
  j["executed"] = executed;
  json findings = json::array();
  for (const Finding& f : r.findings) findings.push_back(to_json(f));
  j["findings"] = findings;
  json per_run = json::array();
  for (const auto& run : r.per_run_findings) {
    json run_j = json::array();
    for (const Finding& f : run) run_j.push_back(to_json(f));
    per_run.push_back(run_j);
  }
  j["per_run_findings"] = per_run;
  return j;
}

Report report_from_json(const json& j) {
  if (!j.is_object() || !j.contains("schema_version") ||
      j.at("schema_version").get<int>() != 1) {
    throw ParseError("report: unsupported schema");
  }
  Report r;
  r.stage = j.at("stage").get<std::string>() == "data" ? Stage::data : Stage::model;
  r.seed = j.at("seed").get<std::uint64_t>();
  r.runs = j.at("runs").get<int>();
  r.interfaces = j.at("interfaces");
  r.config = j.at("config");
  for (const auto& e : j.at("executed")) {
    r.executed.push_back({e.at("check").get<std::string>(), e.at("status").get<std::string>()});
  }
  for (const auto& f : j.at("findings")) r.findings.push_back(finding_from_json(f));
  for (const auto& run : j.at("per_run_findings")) {
    std::vector<Finding> fs;
    for (const auto& f : run) fs.push_back(finding_from_json(f));
    r.per_run_findings.push_back(std::move(fs));
  }
  return r;
}

std::string render_report(const Report& r, ReportFormat format) {
  if (format == ReportFormat::json) {
    return report_to_json(r).dump(2) + "\n";
  }
  std::ostringstream out;
  out << "mockcheck " << to_string(r.stage) << "-stage report\n";
  out << "seed " << r.seed << ", runs " << r.runs << "\n";
  out << "checks:";
  for (const CheckExecution& e : r.executed) {
    out << " " << e.check_id << "=" << e.status;
  }
  out << "\n";
  if (r.findings.empty()) {
    out << "findings: none\n";
  } else {
    out << "findings (" << r.findings.size() << "):\n";
    for (const Finding& f : r.findings) {
      out << "  " << f.check_id << " [" << to_string(f.severity) << "] " << f.message
          << " → " << f.fix << "\n";
    }
  }
  int errors = 0, warnings = 0;
  for (const Finding& f : r.findings) {
    (f.severity == Severity::error ? errors : warnings) += 1;
  }
  out << "verdict: " << (r.pass() ? "PASS" : "FAIL") << " (" << errors << " error"
      << (errors == 1 ? "" : "s") << ", " << warnings << " warning"
      << (warnings == 1 ? "" : "s") << ")\n";
  if (r.elapsed_ms > 0.0) {
    out << "elapsed: " << r.elapsed_ms << " ms\n";
  }
  return out.str();
}

}  // namespace mockcheck
