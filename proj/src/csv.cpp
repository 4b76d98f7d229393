#include "compreg/csv.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "compreg/errors.hpp"

namespace compreg {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

bool needs_quoting(const std::string& cell) {
  return cell.find_first_of(",\"\n\r") != std::string::npos;
}

std::string quote_cell(const std::string& cell) {
  if (!needs_quoting(cell)) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

CsvTable parse_csv(const std::string& text, const std::string& origin) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string cell;
  bool in_quotes = false;
  bool cell_started = false;
  std::size_t line = 1;

  auto end_cell = [&] {
    record.push_back(std::move(cell));
    cell.clear();
    cell_started = false;
  };
  auto end_record = [&] {
    end_cell();
    // Skip fully empty records (blank lines).
    if (!(record.size() == 1 && record[0].empty())) records.push_back(record);
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        cell += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (cell.empty() && !cell_started) {
          in_quotes = true;
          cell_started = true;
        } else {
          throw ParseError(origin + ":" + std::to_string(line) +
                           ": stray quote inside unquoted cell");
        }
        break;
      case ',':
        end_cell();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        cell += c;
        cell_started = true;
        break;
    }
  }
  if (in_quotes)
    throw ParseError(origin + ": unterminated quoted cell at end of file");
  if (cell_started || !record.empty()) end_record();

  if (records.empty()) throw EmptyData(origin + ": no rows");
  CsvTable table;
  table.header = std::move(records.front());
  table.rows.assign(std::make_move_iterator(records.begin() + 1),
                    std::make_move_iterator(records.end()));
  for (std::size_t r = 0; r < table.rows.size(); ++r)
    if (table.rows[r].size() != table.header.size())
      throw ParseError(origin + ": row " + std::to_string(r + 1) + " has " +
                       std::to_string(table.rows[r].size()) + " cells, header has " +
                       std::to_string(table.header.size()));
  return table;
}

CsvTable read_csv(const std::string& path) {
  return parse_csv(read_file(path), path);
}

namespace {

std::size_t find_column(const CsvTable& table, const std::string& name,
                        const std::string& path) {
  const auto it = std::find(table.header.begin(), table.header.end(), name);
  if (it == table.header.end())
    throw SchemaError(path + ": missing column '" + name + "'");
  return static_cast<std::size_t>(it - table.header.begin());
}

double parse_cell(const std::string& cell, const std::string& where) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0' || errno == ERANGE || std::isnan(v))
    throw ParseError(where + ": non-numeric cell '" + cell + "'");
  return v;
}

Composition parse_parts(const CsvTable& table, std::size_t row,
                        const std::vector<std::size_t>& cols,
                        const std::string& row_id, const std::string& path,
                        const char* role) {
  std::vector<double> parts(cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const std::string where = path + ": row " + row_id + ", column '" +
                              table.header[cols[c]] + "'";
    parts[c] = parse_cell(table.rows[row][cols[c]], where);
    if (parts[c] < 0.0)
      throw NegativeInput(where + ": negative " + role + " value " +
                          table.rows[row][cols[c]]);
  }
  double sum = 0.0;
  for (double p : parts) sum += p;
  if (std::abs(sum - 1.0) > 1e-6)
    throw DegenerateInput(path + ": row " + row_id + ": " + role +
                          " parts sum to " + format_full(sum) +
                          ", outside the 1e-6 re-closure tolerance");
  return closure(std::move(parts));
}

}  // namespace

CompositionDataset load_dataset(const std::string& path,
                                const TableSchema& schema) {
  if (schema.x_cols.empty() || schema.y_cols.empty())
    throw SchemaError("schema: predictor and outcome column lists must be non-empty");
  for (const auto& xc : schema.x_cols)
    if (std::find(schema.y_cols.begin(), schema.y_cols.end(), xc) !=
        schema.y_cols.end())
      throw SchemaError("schema: column '" + xc +
                        "' appears in both predictor and outcome lists");

  const CsvTable table = read_csv(path);
  std::vector<std::size_t> xcols, ycols;
  for (const auto& c : schema.x_cols) xcols.push_back(find_column(table, c, path));
  for (const auto& c : schema.y_cols) ycols.push_back(find_column(table, c, path));
  std::size_t id_col = 0;
  const bool has_id = !schema.id_col.empty();
  if (has_id) id_col = find_column(table, schema.id_col, path);

  std::vector<Composition> xs, ys;
  std::vector<std::string> labels;
  xs.reserve(table.rows.size());
  ys.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string row_id =
        has_id ? table.rows[r][id_col] : std::to_string(r + 1);
    xs.push_back(parse_parts(table, r, xcols, row_id, path, "predictor"));
    ys.push_back(parse_parts(table, r, ycols, row_id, path, "outcome"));
    labels.push_back(row_id);
  }
  return CompositionDataset(std::move(xs), std::move(ys), std::move(labels));
}

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_display(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << content;
  if (!out) throw ConfigError("failed writing file: " + path);
}

void write_dataset_csv(const std::string& path, const CompositionDataset& data,
                       const TableSchema& schema) {
  if (schema.x_cols.size() != data.ds() || schema.y_cols.size() != data.dr())
    throw SchemaError("write_dataset_csv: schema column counts do not match data");
  std::string out;
  const std::string id_name = schema.id_col.empty() ? "id" : schema.id_col;
  out += quote_cell(id_name);
  for (const auto& c : schema.x_cols) out += "," + quote_cell(c);
  for (const auto& c : schema.y_cols) out += "," + quote_cell(c);
  out += '\n';
  for (std::size_t i = 0; i < data.n(); ++i) {
    out += quote_cell(data.row_labels()[i]);
    for (std::size_t j = 0; j < data.ds(); ++j)
      out += "," + format_full(data.x(i)[j]);
    for (std::size_t k = 0; k < data.dr(); ++k)
      out += "," + format_full(data.y(i)[k]);
    out += '\n';
  }
  write_text_file(path, out);
}

void write_matrix_csv(const std::string& path, const TransitionMatrix& b,
                      const std::vector<std::string>& row_names,
                      const std::vector<std::string>& col_names) {
  if (row_names.size() != b.rows() || col_names.size() != b.cols())
    throw SchemaError("write_matrix_csv: name counts do not match matrix shape");
  std::string out = "part";
  for (const auto& c : col_names) out += "," + quote_cell(c);
  out += '\n';
  for (std::size_t j = 0; j < b.rows(); ++j) {
    out += quote_cell(row_names[j]);
    for (std::size_t k = 0; k < b.cols(); ++k)
      out += "," + format_full(b.at(j, k));
    out += '\n';
  }
  write_text_file(path, out);
}

TransitionMatrix read_matrix_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() < 3)
    throw SchemaError(path + ": matrix CSV needs a part column plus at least "
                             "two value columns");
  if (table.rows.empty()) throw EmptyData(path + ": matrix CSV has no rows");
  std::vector<Composition> rows;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::vector<double> vals(table.header.size() - 1);
    double sum = 0.0;
    for (std::size_t c = 1; c < table.header.size(); ++c) {
      const std::string where =
          path + ": row " + std::to_string(r + 1) + ", column '" +
          table.header[c] + "'";
      vals[c - 1] = parse_cell(table.rows[r][c], where);
      if (vals[c - 1] < 0.0) throw NegativeInput(where + ": negative entry");
      sum += vals[c - 1];
    }
    if (std::abs(sum - 1.0) > 1e-6)
      throw DegenerateInput(path + ": row " + std::to_string(r + 1) +
                            " sums to " + format_full(sum) +
                            ", outside the 1e-6 re-closure tolerance");
    rows.push_back(closure(std::move(vals)));
  }
  return TransitionMatrix(std::move(rows));
}

void write_report_csv(const std::string& path, const ExperimentReport& report) {
  std::string out = "truth,dgm,n,model,metric,value,log_value,replicates,failures\n";
  for (const auto& row : report.rows) {
    out += quote_cell(row.truth) + "," + quote_cell(row.dgm) + "," +
           std::to_string(row.n) + "," + quote_cell(row.model) + "," +
           quote_cell(row.metric) + "," + format_full(row.value) + "," +
           format_full(row.log_value) + "," + std::to_string(row.replicates) +
           "," + std::to_string(row.failures) + '\n';
  }
  write_text_file(path, out);
}

std::map<std::string, std::string> read_config(const std::string& path) {
  const std::string text = read_file(path);
  std::map<std::string, std::string> config;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    if (config.count(key))
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");
    config[key] = value;
  }
  return config;
}

void write_manifest(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + '\n';
  write_text_file(path, out);
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(csv);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) items.push_back(item.substr(b, e - b + 1));
  }
  return items;
}

double parse_real(const std::string& value, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a real number, got '" +
                      value + "'");
  }
}

std::int64_t parse_int(const std::string& value, const std::string& key) {
  try {
    std::size_t pos = 0;
    const std::int64_t v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + value +
                      "'");
  }
}

std::uint64_t parse_uint(const std::string& value, const std::string& key) {
  try {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a non-negative integer, got '" +
                      value + "'");
  }
}

}  // namespace compreg
