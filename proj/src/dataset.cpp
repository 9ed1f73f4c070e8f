#include "mockcheck/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mockcheck/errors.hpp"

namespace mockcheck {

std::string to_string(ColumnKind k) {
  switch (k) {
    case ColumnKind::numeric: return "numeric";
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::mixed: return "mixed";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

}  // namespace

bool is_missing_token(const std::string& cell) {
  const std::string t = lower(trim(cell));
  return t.empty() || t == "nan" || t == "na" || t == "n/a" || t == "null" || t == "?";
}

bool parse_numeric(const std::string& cell, double& out) {
  const std::string t = trim(cell);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (*first == '+') ++first;  // from_chars rejects an explicit plus
  if (first == last) return false;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return false;
  if (!std::isfinite(v)) return false;  // "inf"/overflow is not usable data
  out = v;
  return true;
}

ColumnProfile infer_column_profile(const std::string& name,
                                   const std::vector<std::string>& values) {
  if (values.empty()) throw ContractError("infer_column_profile: empty column");
  ColumnProfile p;
  p.name = name;

  std::set<std::string> distinct;
  std::vector<double> nums;
  std::size_t non_missing = 0;
  for (const std::string& cell : values) {
    if (is_missing_token(cell)) {
      ++p.missing_count;
      continue;
    }
    ++non_missing;
    distinct.insert(trim(cell));
    double v;
    if (parse_numeric(cell, v)) nums.push_back(v);
  }
  p.distinct_count = distinct.size();

  if (non_missing == 0) {
    p.all_missing = true;
    return p;
  }
  const double parse_ratio =
      static_cast<double>(nums.size()) / static_cast<double>(non_missing);
  if (parse_ratio >= 0.9) {
    p.kind = ColumnKind::numeric;
    // Stray unparseable tokens in a numeric-majority column count as missing.
    p.missing_count += non_missing - nums.size();
  } else if (nums.empty()) {
    p.kind = ColumnKind::categorical;
  } else {
    p.kind = ColumnKind::mixed;
  }

  if (!nums.empty()) {
    p.has_stats = true;
    p.min = *std::min_element(nums.begin(), nums.end());
    p.max = *std::max_element(nums.begin(), nums.end());
    double sum = 0.0;
    for (double v : nums) sum += v;
    p.mean = sum / static_cast<double>(nums.size());
    double ss = 0.0;
    for (double v : nums) ss += (v - p.mean) * (v - p.mean);
    p.std_dev = std::sqrt(ss / static_cast<double>(nums.size()));  // population
    p.zero_variance = (p.std_dev == 0.0);
  }
  return p;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool any_field_content = false;  // true once the current record has content

  auto end_field = [&] {
    record.push_back(field);
    field.clear();
  };
  auto end_record = [&] {
    end_field();
    records.push_back(record);
    record.clear();
    any_field_content = false;
  };

  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < n && text[i + 1] == '"') {
          field += '"';
          i += 2;
          continue;
        }
        in_quotes = false;
        ++i;
        continue;
      }
      field += c;
      ++i;
      continue;
    }
    switch (c) {
      case '"':
        if (field.empty()) {
          in_quotes = true;
          any_field_content = true;
        } else {
          field += c;  // tolerate a stray quote mid-field
        }
        ++i;
        break;
      case ',':
        end_field();
        any_field_content = true;
        ++i;
        break;
      case '\r':
        if (i + 1 < n && text[i + 1] == '\n') ++i;
        [[fallthrough]];
      case '\n':
        end_record();
        ++i;
        break;
      default:
        field += c;
        any_field_content = true;
        ++i;
        break;
    }
  }
  if (in_quotes) throw ParseError("csv: unterminated quoted field");
  if (!field.empty() || !record.empty() || any_field_content) end_record();
  return records;
}

Tensor Dataset::feature_tensor() const {
  Tensor t({num_rows, num_features});
  t.values = features;
  return t;
}

Dataset Dataset::from_numeric(std::vector<std::string> names, std::vector<double> feats,
                              std::size_t rows, std::string label_name,
                              std::vector<double> labels_in) {
  Dataset d;
  d.feature_names = std::move(names);
  d.num_features = d.feature_names.size();
  d.num_rows = rows;
  if (feats.size() != rows * d.num_features || labels_in.size() != rows) {
    throw ContractError("from_numeric: inconsistent row counts");
  }
  d.features = std::move(feats);
  d.label_name = std::move(label_name);
  d.labels = std::move(labels_in);
  d.raw_labels.reserve(rows);
  for (double v : d.labels) d.raw_labels.push_back(format_double(v));
  d.recompute_profiles();
  return d;
}

void Dataset::recompute_profiles() {
  profiles.clear();
  std::vector<std::string> cells(num_rows);
  for (std::size_t c = 0; c < num_features; ++c) {
    for (std::size_t r = 0; r < num_rows; ++r) cells[r] = format_double(feature_at(r, c));
    profiles.push_back(infer_column_profile(feature_names[c], cells));
  }
  label_profile = infer_column_profile(label_name, raw_labels);
}

std::string Dataset::to_csv() const {
  std::ostringstream out;
  for (std::size_t c = 0; c < num_features; ++c) {
    out << csv_escape(feature_names[c]) << ',';
  }
  out << csv_escape(label_name) << '\n';
  for (std::size_t r = 0; r < num_rows; ++r) {
    for (std::size_t c = 0; c < num_features; ++c) {
      out << format_double(feature_at(r, c)) << ',';
    }
    out << csv_escape(raw_labels[r]) << '\n';
  }
  return out.str();
}

Dataset load_dataset_text(const std::string& csv_text, const std::string& label_column) {
  const auto records = parse_csv(csv_text);
  if (records.empty()) throw ParseError("csv: missing header row");
  const std::vector<std::string>& header = records[0];

  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != header.size()) {
      throw ParseError("csv: row " + std::to_string(r + 1) + " has " +
                       std::to_string(records[r].size()) + " fields, expected " +
                       std::to_string(header.size()));
    }
  }
  if (records.size() < 2) throw ParseError("csv: no data rows");

  // Label column: exact header name, else a 0-based column index.
  std::size_t label_idx = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (trim(header[c]) == label_column) {
      label_idx = c;
      break;
    }
  }
  if (label_idx == header.size()) {
    bool digits = !label_column.empty() &&
                  std::all_of(label_column.begin(), label_column.end(),
                              [](char c) { return c >= '0' && c <= '9'; });
    if (digits) {
      const std::size_t idx = std::stoul(label_column);
      if (idx < header.size()) label_idx = idx;
    }
  }
  if (label_idx == header.size()) {
    std::string cols;
    for (const auto& h : header) cols += (cols.empty() ? "" : ", ") + trim(h);
    throw ParseError("unknown label column '" + label_column + "'; columns are: " + cols);
  }

  Dataset d;
  d.num_rows = records.size() - 1;
  d.num_features = header.size() - 1;
  if (d.num_features == 0) throw ParseError("csv: no feature columns besides the label");
  d.label_name = trim(header[label_idx]);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_idx) d.feature_names.push_back(trim(header[c]));
  }

  d.features.assign(d.num_rows * d.num_features, 0.0);
  d.labels.assign(d.num_rows, 0.0);
  d.raw_labels.assign(d.num_rows, "");
  std::vector<std::vector<std::string>> columns(d.num_features,
                                                std::vector<std::string>(d.num_rows));
  const double nan = std::nan("");
  for (std::size_t r = 0; r < d.num_rows; ++r) {
    const auto& rec = records[r + 1];
    std::size_t fc = 0;
    for (std::size_t c = 0; c < rec.size(); ++c) {
      if (c == label_idx) {
        d.raw_labels[r] = rec[c];
        double v;
        d.labels[r] = parse_numeric(rec[c], v) ? v : nan;
        continue;
      }
      columns[fc][r] = rec[c];
      double v;
      d.features[r * d.num_features + fc] = parse_numeric(rec[c], v) ? v : nan;
      ++fc;
    }
  }
  for (std::size_t c = 0; c < d.num_features; ++c) {
    d.profiles.push_back(infer_column_profile(d.feature_names[c], columns[c]));
  }
  d.label_profile = infer_column_profile(d.label_name, d.raw_labels);
  return d;
}

Dataset load_dataset(const std::string& path, const std::string& label_column) {
  return load_dataset_text(read_file(path), label_column);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open file for writing: " + path);
  out << content;
  if (!out) throw ParseError("failed writing file: " + path);
}

}  // namespace mockcheck
