#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "compreg/composition.hpp"
#include "compreg/simgen.hpp"
#include "compreg/transition.hpp"

namespace compreg {

/// Raw CSV contents: header row plus string cells (RFC-4180-style quoting).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable parse_csv(const std::string& text, const std::string& origin);
CsvTable read_csv(const std::string& path);

/// Maps CSV headers to composition parts. Column sets must be disjoint and
/// non-empty; id_col is optional (empty = use 1-based row numbers).
struct TableSchema {
  std::vector<std::string> x_cols;
  std::vector<std::string> y_cols;
  std::string id_col;
};

/// Loads a paired-composition dataset. Rows whose part sums deviate from 1
/// by at most 1e-6 are re-closed; larger deviations are rejected.
CompositionDataset load_dataset(const std::string& path,
                                const TableSchema& schema);

/// Full-precision decimal (17 significant digits; round-trips any double).
std::string format_full(double v);
/// Display rounding used in reports (3 decimals).
std::string format_display(double v);

void write_text_file(const std::string& path, const std::string& content);

void write_dataset_csv(const std::string& path, const CompositionDataset& data,
                       const TableSchema& schema);

/// Row-stochastic matrix with named parts; first column holds the x part
/// name, remaining columns one y part each.
void write_matrix_csv(const std::string& path, const TransitionMatrix& b,
                      const std::vector<std::string>& row_names,
                      const std::vector<std::string>& col_names);
TransitionMatrix read_matrix_csv(const std::string& path);

void write_report_csv(const std::string& path, const ExperimentReport& report);

/// Flat key = value file with '#' comments.
std::map<std::string, std::string> read_config(const std::string& path);

/// Flat key = value manifest, one pair per line, written in the given order.
void write_manifest(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& kv);

// Small parsing helpers shared by config and CLI handling; all throw
// ConfigError with the offending key on bad input.
std::vector<std::string> split_list(const std::string& csv);
double parse_real(const std::string& value, const std::string& key);
std::int64_t parse_int(const std::string& value, const std::string& key);
std::uint64_t parse_uint(const std::string& value, const std::string& key);

}  // namespace compreg
