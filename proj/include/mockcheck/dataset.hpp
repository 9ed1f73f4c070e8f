#pragma once

#include <string>
#include <vector>

#include "mockcheck/tensor.hpp"

namespace mockcheck {

enum class ColumnKind { numeric, categorical, mixed };

std::string to_string(ColumnKind k);

struct ColumnProfile {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  std::size_t missing_count = 0;
  std::size_t distinct_count = 0;  // distinct non-missing raw values
  // Statistics over the numeric cells only; meaningless when has_stats is
  // false (all-missing or purely categorical column).
  bool has_stats = false;
  bool all_missing = false;
  bool zero_variance = false;
  double min = 0.0, max = 0.0, mean = 0.0, std_dev = 0.0;  // population std
};

struct Dataset {
  std::vector<std::string> feature_names;
  std::string label_name;
  std::size_t num_rows = 0;
  std::size_t num_features = 0;
  // Row-major num_rows x num_features; NaN marks missing/unparseable cells.
  std::vector<double> features;
  std::vector<std::string> raw_labels;
  std::vector<double> labels;  // NaN where missing or unparseable
  std::vector<ColumnProfile> profiles;
  ColumnProfile label_profile;

  double feature_at(std::size_t r, std::size_t c) const {
    return features[r * num_features + c];
  }
  Tensor feature_tensor() const;

  // Numeric construction path used by the mock-data generator.
  static Dataset from_numeric(std::vector<std::string> feature_names,
                              std::vector<double> features, std::size_t num_rows,
                              std::string label_name, std::vector<double> labels);

  void recompute_profiles();
  std::string to_csv() const;
};

// True for the missing-value tokens: empty cell, NaN, NA, N/A, null, "?"
// (case-insensitive, surrounding whitespace ignored).
bool is_missing_token(const std::string& cell);

// Strict numeric parse: finite reals only, "." decimal, full-cell match.
bool parse_numeric(const std::string& cell, double& out);

ColumnProfile infer_column_profile(const std::string& name,
                                   const std::vector<std::string>& values);

// RFC-4180 CSV: quoted fields, escaped quotes, embedded newlines, CRLF or LF.
// Returns one vector of cells per record.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

Dataset load_dataset(const std::string& path, const std::string& label_column);
Dataset load_dataset_text(const std::string& csv_text, const std::string& label_column);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace mockcheck
