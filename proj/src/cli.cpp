#include "compreg/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>

#include "compreg/baselines.hpp"
#include "compreg/csv.hpp"
#include "compreg/em.hpp"
#include "compreg/inference.hpp"
#include "compreg/simgen.hpp"
#include "compreg/ternary.hpp"

namespace compreg {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using KvList = std::vector<std::pair<std::string, std::string>>;

constexpr const char* kVersion = "0.1.0";

struct GlobalOpts {
  std::uint64_t seed = 20240801;
  unsigned threads = 1;
  std::string out_dir = ".";
  std::string model = "direct";
};

struct DataOpts {
  std::string data_path;
  std::string x_cols, y_cols, id_col;
  std::string config_path;
};

ModelKind model_kind(const std::string& name) {
  if (name == "direct") return ModelKind::direct;
  if (name == "ilr") return ModelKind::ilr;
  if (name == "logit") return ModelKind::logit;
  throw InvalidArgument("unknown model '" + name +
                        "' (expected direct, ilr, or logit)");
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path prepare_out_dir(const GlobalOpts& g) {
  fs::path dir(g.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + g.out_dir +
                            "': " + ec.message());
  return dir;
}

void emit_manifest(const fs::path& dir, const std::string& command,
                   const GlobalOpts& g, const KvList& extra,
                   Clock::time_point started) {
  KvList kv;
  kv.emplace_back("command", command);
  kv.emplace_back("version", kVersion);
  kv.emplace_back("seed", std::to_string(g.seed));
  kv.emplace_back("threads", std::to_string(g.threads));
  kv.emplace_back("out_dir", g.out_dir);
  for (const auto& e : extra) kv.push_back(e);
  kv.emplace_back("timestamp", iso_timestamp());
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      Clock::now() - started)
                      .count();
  kv.emplace_back("duration_ms", std::to_string(ms));
  write_manifest((dir / "manifest.txt").string(), kv);
}

TableSchema schema_from(const DataOpts& d) {
  TableSchema schema;
  schema.x_cols = split_list(d.x_cols);
  schema.y_cols = split_list(d.y_cols);
  schema.id_col = d.id_col;
  if (schema.x_cols.empty())
    throw SchemaError("no predictor columns given (--x-cols)");
  if (schema.y_cols.empty())
    throw SchemaError("no outcome columns given (--y-cols)");
  return schema;
}

KvList data_manifest_entries(const DataOpts& d) {
  return {{"data", d.data_path},
          {"x_cols", d.x_cols},
          {"y_cols", d.y_cols},
          {"id_col", d.id_col.empty() ? "(row numbers)" : d.id_col}};
}

std::string compositions_display(const TransitionMatrix& b,
                                 const std::vector<std::string>& row_names,
                                 const std::vector<std::string>& col_names) {
  std::string out;
  std::size_t w = 6;
  for (const auto& n : row_names) w = std::max(w, n.size());
  out += std::string(w, ' ');
  for (const auto& c : col_names) {
    out += "  ";
    out += c.size() < 6 ? std::string(6 - c.size(), ' ') + c : c;
  }
  out += '\n';
  for (std::size_t j = 0; j < b.rows(); ++j) {
    out += std::string(w - row_names[j].size(), ' ') + row_names[j];
    for (std::size_t k = 0; k < b.cols(); ++k) {
      const std::string v = format_display(b.at(j, k));
      out += "  " + (v.size() < 6 ? std::string(6 - v.size(), ' ') + v : v);
    }
    out += '\n';
  }
  return out;
}

// ------------------------------------------------------------------- fit ---

struct FitOpts {
  double tol = 1e-10;
  std::size_t max_iter = 10000;
};

int run_fit(const GlobalOpts& g, const DataOpts& d, const FitOpts& f) {
  const auto started = Clock::now();
  const fs::path dir = prepare_out_dir(g);
  const TableSchema schema = schema_from(d);
  const CompositionDataset data = load_dataset(d.data_path, schema);
  KvList extra = data_manifest_entries(d);
  extra.emplace_back("model", g.model);

  std::string report;
  report += "model: " + g.model + "\n";
  report += "data: " + d.data_path + "\n";
  report += "rows: " + std::to_string(data.n()) + "\n";
  report += "predictor parts: " + std::to_string(data.ds()) + "\n";
  report += "outcome parts: " + std::to_string(data.dr()) + "\n\n";

  if (g.model == "direct") {
    EmFitOptions opts;
    opts.tol = f.tol;
    opts.max_iter = f.max_iter;
    const FitResult result = fit(data, opts);
    write_matrix_csv((dir / "B_hat.csv").string(), result.b_hat, schema.x_cols,
                     schema.y_cols);
    extra.emplace_back("output", "B_hat.csv");

    report += "final objective: " + format_full(result.final_objective) + "\n";
    report += "iterations: " + std::to_string(result.iterations) + "\n";
    report += std::string("converged: ") + (result.converged ? "yes" : "no") + "\n";
    if (!result.starved_rows.empty()) {
      report += "starved predictor rows (kept at their previous value):";
      for (auto j : result.starved_rows) report += " " + schema.x_cols[j];
      report += '\n';
    }
    report += "\ncoefficient matrix (rows: predictor parts, columns: outcome parts)\n";
    report += compositions_display(result.b_hat, schema.x_cols, schema.y_cols);
    report += "\nrow contrasts at delta = 0.100\n";
    report += "(change in E[y] when 0.100 of predictor mass moves to the first-named part\n";
    report += " from the second; rows of the coefficient matrix differenced and scaled)\n";
    for (std::size_t j = 0; j < data.ds(); ++j) {
      for (std::size_t k = j + 1; k < data.ds(); ++k) {
        const auto dy = contrast(result.b_hat, j, k, 0.10);
        report += "  " + schema.x_cols[j] + " vs " + schema.x_cols[k] + ": (";
        for (std::size_t c = 0; c < dy.size(); ++c)
          report += (c ? ", " : "") + format_display(dy[c]);
        report += ")\n";
      }
    }
  } else if (g.model == "ilr") {
    const IlrPivotModel model = fit_ilr_pivot(data);
    std::string csv = "pivot_y,pivot_x,term,coordinate,value\n";
    for (std::size_t l1 = 0; l1 < data.dr(); ++l1)
      for (std::size_t l2 = 0; l2 < data.ds(); ++l2) {
        const auto& sub = model.sub(l1, l2);
        for (std::size_t r = 0; r < data.ds(); ++r)
          for (std::size_t c = 0; c + 1 < data.dr(); ++c) {
            const std::string term =
                r == 0 ? "intercept" : "ilr" + std::to_string(r);
            csv += schema.y_cols[l1] + "," + schema.x_cols[l2] + "," + term +
                   "," + std::to_string(c + 1) + "," +
                   format_full(sub.coef[r * (data.dr() - 1) + c]) + "\n";
          }
      }
    write_text_file((dir / "coefficients.csv").string(), csv);
    extra.emplace_back("output", "coefficients.csv");
    report += "sub-models fitted: " +
              std::to_string(data.dr() * data.ds()) + "\n";
    report += "headline slope (first pivot pair): " +
              format_full(model.beta11(0, 0)) + "\n";
    const auto& sub = model.sub(0, 0);
    report += "residual scale (first pivot pair):";
    for (double s : sub.resid_scale) report += " " + format_display(s);
    report += '\n';
  } else if (g.model == "logit") {
    const LogitQmlModel model = fit_logit_qml(data);
    std::string csv = "category,term,value\n";
    for (std::size_t k = 0; k + 1 < data.dr(); ++k)
      for (std::size_t j = 0; j < data.ds(); ++j) {
        const std::string term = j == 0 ? "intercept" : "ilr" + std::to_string(j);
        csv += schema.y_cols[k] + "," + term + "," +
               format_full(model.beta(k, j)) + "\n";
      }
    write_text_file((dir / "coefficients.csv").string(), csv);
    extra.emplace_back("output", "coefficients.csv");
    report += "reference category: " + schema.y_cols[data.dr() - 1] + "\n";
    report += "final quasi-log-likelihood: " + format_full(model.final_qml()) + "\n";
    report += "iterations: " + std::to_string(model.iterations()) + "\n";
    report += "gradient norm: " + format_full(model.gradient_norm()) + "\n";
    if (model.used_gradient_fallback())
      report += "note: gradient-step fallback was used on a singular Hessian\n";
  } else {
    throw InvalidArgument("unknown model '" + g.model + "'");
  }

  write_text_file((dir / "fit_report.txt").string(), report);
  emit_manifest(dir, "fit", g, extra, started);
  return 0;
}

// ---------------------------------------------------------------- predict ---

int run_predict(const GlobalOpts& g, const std::string& matrix_path,
                const DataOpts& d) {
  const auto started = Clock::now();
  if (g.model != "direct")
    throw InvalidArgument(
        "predict reads a saved coefficient matrix and supports only the "
        "direct model");
  const fs::path dir = prepare_out_dir(g);
  const TransitionMatrix b = read_matrix_csv(matrix_path);
  const CsvTable head = read_csv(matrix_path);

  const auto x_names = split_list(d.x_cols);
  if (x_names.size() != b.rows())
    throw SchemaError("predict: --x-cols lists " +
                      std::to_string(x_names.size()) + " columns but the matrix has " +
                      std::to_string(b.rows()) + " rows");
  const CsvTable table = read_csv(d.data_path);
  std::vector<std::size_t> xcols;
  for (const auto& name : x_names) {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end())
      throw SchemaError(d.data_path + ": missing column '" + name + "'");
    xcols.push_back(static_cast<std::size_t>(it - table.header.begin()));
  }
  std::size_t id_col = 0;
  const bool has_id = !d.id_col.empty();
  if (has_id) {
    const auto it =
        std::find(table.header.begin(), table.header.end(), d.id_col);
    if (it == table.header.end())
      throw SchemaError(d.data_path + ": missing column '" + d.id_col + "'");
    id_col = static_cast<std::size_t>(it - table.header.begin());
  }

  std::string csv = "id";
  for (std::size_t k = 1; k < head.header.size(); ++k)
    csv += ",pred_" + head.header[k];
  csv += '\n';
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::vector<double> parts(xcols.size());
    double sum = 0.0;
    for (std::size_t c = 0; c < xcols.size(); ++c) {
      const std::string cell = table.rows[r][xcols[c]];
      char* end = nullptr;
      parts[c] = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        throw ParseError(d.data_path + ": row " + std::to_string(r + 1) +
                         ": non-numeric cell '" + cell + "'");
      if (parts[c] < 0.0)
        throw NegativeInput(d.data_path + ": row " + std::to_string(r + 1) +
                            ": negative predictor value");
      sum += parts[c];
    }
    if (std::abs(sum - 1.0) > 1e-6)
      throw DegenerateInput(d.data_path + ": row " + std::to_string(r + 1) +
                            ": predictor parts sum to " + format_full(sum));
    const Composition yhat = predict(b, closure(std::move(parts)));
    csv += has_id ? table.rows[r][id_col] : std::to_string(r + 1);
    for (std::size_t k = 0; k < yhat.dim(); ++k)
      csv += "," + format_full(yhat[k]);
    csv += '\n';
  }
  write_text_file((dir / "predictions.csv").string(), csv);
  emit_manifest(dir, "predict", g,
                {{"matrix", matrix_path},
                 {"data", d.data_path},
                 {"x_cols", d.x_cols},
                 {"output", "predictions.csv"}},
                started);
  return 0;
}

// ------------------------------------------------------------------- test ---

int run_test(const GlobalOpts& g, const DataOpts& d, std::size_t permutations,
             const FitOpts& f) {
  const auto started = Clock::now();
  const fs::path dir = prepare_out_dir(g);
  const TableSchema schema = schema_from(d);
  const CompositionDataset data = load_dataset(d.data_path, schema);
  EmFitOptions opts;
  opts.tol = f.tol;
  opts.max_iter = f.max_iter;
  opts.track_objective = false;
  const auto result = permutation_test(data, permutations, g.seed, opts,
                                       model_kind(g.model), g.threads);
  std::string out;
  out += "model = " + g.model + "\n";
  out += "lambda_obs = " + format_full(result.lambda_obs) + "\n";
  out += "p_value = " + format_full(result.p_value) + "\n";
  out += "p_value_add_one = " + format_full(result.p_value_add_one) + "\n";
  out += "n_permutations = " + std::to_string(result.n_permutations) + "\n";
  out += "seed = " + std::to_string(result.seed) + "\n";
  write_text_file((dir / "test_result.txt").string(), out);
  KvList extra = data_manifest_entries(d);
  extra.emplace_back("model", g.model);
  extra.emplace_back("permutations", std::to_string(permutations));
  extra.emplace_back("output", "test_result.txt");
  emit_manifest(dir, "test", g, extra, started);
  return 0;
}

// ------------------------------------------------------------------ loocv ---

int run_loocv(const GlobalOpts& g, const DataOpts& d,
              const std::string& models_csv, const FitOpts& f) {
  const auto started = Clock::now();
  const fs::path dir = prepare_out_dir(g);
  const TableSchema schema = schema_from(d);
  const CompositionDataset data = load_dataset(d.data_path, schema);
  if (data.n() < 2)
    throw InvalidArgument("leave-one-out needs at least 2 rows, got " +
                          std::to_string(data.n()));
  const auto models = split_list(models_csv);
  if (models.empty()) throw InvalidArgument("no models requested");
  for (const auto& m : models) model_kind(m);  // validate names

  EmFitOptions opts;
  opts.tol = f.tol;
  opts.max_iter = f.max_iter;
  opts.track_objective = false;

  std::string csv = "id,model";
  for (const auto& c : schema.y_cols) csv += ",pred_" + c;
  csv += ",kld,status\n";
  std::string summary;
  for (const auto& m : models) {
    const ModelKind kind = model_kind(m);
    double kld_sum = 0.0;
    std::size_t used = 0, failed = 0;
    for (std::size_t i = 0; i < data.n(); ++i) {
      csv += data.row_labels()[i] + "," + m;
      try {
        const CompositionDataset rest = data.without_row(i);
        Composition pred = Composition::barycenter(data.dr());
        switch (kind) {
          case ModelKind::direct:
            pred = predict(fit(rest, opts).b_hat, data.x(i));
            break;
          case ModelKind::ilr:
            pred = predict_ilr(fit_ilr_pivot(rest), data.x(i));
            break;
          case ModelKind::logit:
            pred = predict_logit(fit_logit_qml(rest), data.x(i));
            break;
        }
        const double k = kld(data.y(i), pred);
        kld_sum += k;
        ++used;
        for (std::size_t c = 0; c < pred.dim(); ++c)
          csv += "," + format_full(pred[c]);
        csv += "," + format_full(k) + ",ok\n";
      } catch (const Error& e) {
        ++failed;
        for (std::size_t c = 0; c < data.dr(); ++c) csv += ",";
        csv += ",,error\n";
        (void)e;
      }
    }
    summary += m + ": mean_kld = " +
               (used ? format_full(kld_sum / static_cast<double>(used))
                     : std::string("nan")) +
               " (rows used " + std::to_string(used) + ", failures " +
               std::to_string(failed) + ")\n";
  }
  write_text_file((dir / "predictions.csv").string(), csv);
  write_text_file((dir / "kld_summary.txt").string(), summary);
  KvList extra = data_manifest_entries(d);
  extra.emplace_back("models", models_csv);
  extra.emplace_back("output", "predictions.csv kld_summary.txt");
  emit_manifest(dir, "loocv", g, extra, started);
  return 0;
}

// -------------------------------------------------------------- bootstrap ---

int run_bootstrap(const GlobalOpts& g, const DataOpts& d, std::size_t replicates,
                  double level, bool svg, const FitOpts& f) {
  const auto started = Clock::now();
  const fs::path dir = prepare_out_dir(g);
  const TableSchema schema = schema_from(d);
  const CompositionDataset data = load_dataset(d.data_path, schema);
  EmFitOptions opts;
  opts.tol = f.tol;
  opts.max_iter = f.max_iter;
  opts.track_objective = false;
  BootstrapResult boot = bootstrap_rows(data, replicates, g.seed, opts, g.threads);
  boot.region_level = level;
  if (boot.dropped_count * 20 > boot.n_requested)
    std::cerr << "warning: " << boot.dropped_count << " of " << boot.n_requested
              << " bootstrap replicates failed to fit (more than 5%)\n";

  std::string rep_csv = "replicate,part";
  for (const auto& c : schema.y_cols) rep_csv += "," + c;
  rep_csv += '\n';
  for (std::size_t r = 0; r < boot.replicates.size(); ++r)
    for (std::size_t j = 0; j < data.ds(); ++j) {
      rep_csv += std::to_string(r + 1) + "," + schema.x_cols[j];
      for (std::size_t k = 0; k < data.dr(); ++k)
        rep_csv += "," + format_full(boot.replicates[r].at(j, k));
      rep_csv += '\n';
    }
  write_text_file((dir / "replicates.csv").string(), rep_csv);

  const FitResult point = fit(data, opts);
  KvList extra = data_manifest_entries(d);
  extra.emplace_back("replicates", std::to_string(replicates));
  extra.emplace_back("dropped", std::to_string(boot.dropped_count));
  extra.emplace_back("level", format_full(level));

  std::string reg_csv = "part,vertex,ternary_x,ternary_y\n";
  if (data.dr() == 3) {
    TernaryOverlay overlay;
    overlay.corner_labels = {schema.y_cols[0], schema.y_cols[1],
                             schema.y_cols[2]};
    for (std::size_t j = 0; j < data.ds(); ++j) {
      const auto region = region_coordinates(boot, j);
      for (std::size_t v = 0; v < region.size(); ++v)
        reg_csv += schema.x_cols[j] + "," + std::to_string(v + 1) + "," +
                   format_full(region[v][0]) + "," + format_full(region[v][1]) +
                   '\n';
      overlay.polygons.push_back(region);
      overlay.points.emplace_back(ternary_xy(point.b_hat.row(j)),
                                  schema.x_cols[j]);
    }
    write_text_file((dir / "regions.csv").string(), reg_csv);
    if (svg) {
      write_text_file((dir / "regions.svg").string(), ternary_svg(overlay));
      extra.emplace_back("output", "replicates.csv regions.csv regions.svg");
    } else {
      extra.emplace_back("output", "replicates.csv regions.csv");
    }
  } else {
    write_text_file((dir / "regions.csv").string(), reg_csv);
    std::cerr << "note: ternary regions need a 3-part outcome (got " +
                     std::to_string(data.dr()) +
                     " parts); regions.csv is empty and the SVG was skipped\n";
    extra.emplace_back("regions_note",
                       "unsupported dimension: ternary regions need 3 outcome "
                       "parts");
    extra.emplace_back("output", "replicates.csv regions.csv");
  }
  emit_manifest(dir, "bootstrap", g, extra, started);
  return 0;
}

// --------------------------------------------------------------- simulate ---

struct SimulateOpts {
  std::string truth = "b1";
  std::string dgm = "dirichlet";
  std::size_t n = 250;
  double concentration = 10.0;
  std::int64_t count_min = 1, count_max = 30;
  double noise_sd = 1.0;
};

int run_simulate(const GlobalOpts& g, const SimulateOpts& s) {
  const auto started = Clock::now();
  const fs::path dir = prepare_out_dir(g);
  const TruthModel truth = truth_by_name(s.truth);
  DgmSpec spec;
  spec.kind = dgm_by_name(s.dgm);
  spec.concentration = s.concentration;
  spec.count_min = s.count_min;
  spec.count_max = s.count_max;
  spec.noise_sd = s.noise_sd;
  Rng rng = Rng::substream(g.seed, 0);
  const CompositionDataset data = gen_dataset(s.n, truth, spec, rng);
  TableSchema schema;
  for (std::size_t j = 0; j < data.ds(); ++j)
    schema.x_cols.push_back("x" + std::to_string(j + 1));
  for (std::size_t k = 0; k < data.dr(); ++k)
    schema.y_cols.push_back("y" + std::to_string(k + 1));
  schema.id_col = "id";
  write_dataset_csv((dir / "dataset.csv").string(), data, schema);
  emit_manifest(dir, "simulate", g,
                {{"truth", s.truth},
                 {"dgm", s.dgm},
                 {"n", std::to_string(s.n)},
                 {"concentration", format_full(s.concentration)},
                 {"count_min", std::to_string(s.count_min)},
                 {"count_max", std::to_string(s.count_max)},
                 {"noise_sd", format_full(s.noise_sd)},
                 {"output", "dataset.csv"}},
                started);
  return 0;
}

// ------------------------------------------------------------- experiment ---

struct ExperimentOpts {
  std::string kind = "model_comparison";
  std::string config_path;
  // Optional CLI overrides; empty string / 0 sentinel means "not set".
  std::string truths, dgms, ns;
  std::size_t replicates = 0;
  std::size_t permutations = 0;
  std::size_t test_points = 0;
  double alpha = -1.0;
  double concentration = -1.0;
  double noise_sd = -1.0;
  std::int64_t count_min = 0, count_max = 0;
};

std::vector<std::size_t> parse_size_list(const std::string& value,
                                         const std::string& key) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(value)) {
    const auto v = parse_int(item, key);
    if (v < 1) throw ConfigError("key '" + key + "': values must be >= 1");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

int run_experiment(const GlobalOpts& g, const ExperimentOpts& e) {
  const auto started = Clock::now();
  const fs::path dir = prepare_out_dir(g);
  std::map<std::string, std::string> config;
  if (!e.config_path.empty()) config = read_config(e.config_path);
  auto from_config = [&](const char* key) -> std::optional<std::string> {
    const auto it = config.find(key);
    if (it == config.end()) return std::nullopt;
    return it->second;
  };
  std::string kind = e.kind;
  if (const auto v = from_config("kind"); v && e.kind == "model_comparison")
    kind = *v;

  KvList extra;
  extra.emplace_back("kind", kind);
  if (!e.config_path.empty()) extra.emplace_back("config", e.config_path);

  ExperimentReport report;
  if (kind == "model_comparison") {
    ModelComparisonConfig c;
    c.seed = g.seed;
    c.threads = g.threads;
    if (const auto v = from_config("truths")) c.truths = split_list(*v);
    if (const auto v = from_config("ns")) c.ns = parse_size_list(*v, "ns");
    if (const auto v = from_config("replicates"))
      c.replicates = static_cast<std::size_t>(parse_uint(*v, "replicates"));
    if (const auto v = from_config("test_points"))
      c.test_points = static_cast<std::size_t>(parse_uint(*v, "test_points"));
    if (const auto v = from_config("concentration"))
      c.concentration = parse_real(*v, "concentration");
    if (const auto v = from_config("noise_sd"))
      c.noise_sd = parse_real(*v, "noise_sd");
    if (const auto v = from_config("seed")) c.seed = parse_uint(*v, "seed");
    if (!e.truths.empty()) c.truths = split_list(e.truths);
    if (!e.ns.empty()) c.ns = parse_size_list(e.ns, "ns");
    if (e.replicates) c.replicates = e.replicates;
    if (e.test_points) c.test_points = e.test_points;
    if (e.concentration > 0) c.concentration = e.concentration;
    if (e.noise_sd > 0) c.noise_sd = e.noise_sd;
    report = run_model_comparison(c);
    extra.emplace_back("truths", [&] {
      std::string s;
      for (const auto& t : c.truths) s += (s.empty() ? "" : ",") + t;
      return s;
    }());
    extra.emplace_back("replicates", std::to_string(c.replicates));
    extra.emplace_back("test_points", std::to_string(c.test_points));
  } else if (kind == "error_rate") {
    ErrorRateConfig c;
    c.seed = g.seed;
    c.threads = g.threads;
    if (const auto v = from_config("truths")) c.truths = split_list(*v);
    if (const auto v = from_config("dgms")) c.dgms = split_list(*v);
    if (const auto v = from_config("ns")) c.ns = parse_size_list(*v, "ns");
    if (const auto v = from_config("replicates"))
      c.replicates = static_cast<std::size_t>(parse_uint(*v, "replicates"));
    if (const auto v = from_config("permutations"))
      c.permutations = static_cast<std::size_t>(parse_uint(*v, "permutations"));
    if (const auto v = from_config("alpha")) c.alpha = parse_real(*v, "alpha");
    if (const auto v = from_config("concentration"))
      c.concentration = parse_real(*v, "concentration");
    if (const auto v = from_config("count_min"))
      c.count_min = parse_int(*v, "count_min");
    if (const auto v = from_config("count_max"))
      c.count_max = parse_int(*v, "count_max");
    if (const auto v = from_config("noise_sd"))
      c.noise_sd = parse_real(*v, "noise_sd");
    if (const auto v = from_config("seed")) c.seed = parse_uint(*v, "seed");
    if (!e.truths.empty()) c.truths = split_list(e.truths);
    if (!e.dgms.empty()) c.dgms = split_list(e.dgms);
    if (!e.ns.empty()) c.ns = parse_size_list(e.ns, "ns");
    if (e.replicates) c.replicates = e.replicates;
    if (e.permutations) c.permutations = e.permutations;
    if (e.alpha > 0) c.alpha = e.alpha;
    if (e.concentration > 0) c.concentration = e.concentration;
    if (e.noise_sd > 0) c.noise_sd = e.noise_sd;
    if (e.count_min) c.count_min = e.count_min;
    if (e.count_max) c.count_max = e.count_max;
    report = run_error_rate_study(c);
    extra.emplace_back("replicates", std::to_string(c.replicates));
    extra.emplace_back("permutations", std::to_string(c.permutations));
  } else {
    throw InvalidArgument("unknown experiment kind '" + kind +
                          "' (expected model_comparison or error_rate)");
  }
  write_report_csv((dir / "report.csv").string(), report);
  extra.emplace_back("output", "report.csv");
  emit_manifest(dir, "experiment", g, extra, started);
  return 0;
}

}  // namespace

int cli_run(int argc, const char* const* argv) {
  GlobalOpts g;
  DataOpts d;
  FitOpts f;
  SimulateOpts sim;
  ExperimentOpts exp;
  std::string matrix_path, models_csv = "direct,ilr,logit";
  std::size_t permutations = 1000, replicates = 1000;
  double level = 0.95;
  bool no_svg = false;

  CLI::App app{
      "Direct linear regression for compositional outcomes on compositional "
      "covariates: EM fitting, permutation independence tests, bootstrap "
      "confidence regions, baselines, and simulation studies."};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  app.add_option("--seed", g.seed, "RNG seed (default 20240801)");
  app.add_option("--threads", g.threads, "Worker threads (default 1)");
  app.add_option("--out-dir", g.out_dir, "Output directory (default .)");
  app.add_option("--model", g.model, "Model: direct, ilr, or logit");

  auto add_data_opts = [&](CLI::App* cmd, bool need_y) {
    cmd->add_option("--data", d.data_path, "Input CSV path")->required();
    cmd->add_option("--x-cols", d.x_cols,
                    "Comma-separated predictor part columns")
        ->required();
    auto* y = cmd->add_option("--y-cols", d.y_cols,
                              "Comma-separated outcome part columns");
    if (need_y) y->required();
    cmd->add_option("--id-col", d.id_col, "Optional row-label column");
  };
  auto add_fit_opts = [&](CLI::App* cmd) {
    cmd->add_option("--tol", f.tol, "EM convergence tolerance (default 1e-10)");
    cmd->add_option("--max-iter", f.max_iter,
                    "EM iteration cap (default 10000)");
  };

  auto* fit_cmd =
      app.add_subcommand("fit", "Fit a model and write its coefficients");
  add_data_opts(fit_cmd, true);
  add_fit_opts(fit_cmd);

  auto* predict_cmd = app.add_subcommand(
      "predict", "Predict outcomes from a saved coefficient matrix");
  predict_cmd->add_option("--matrix", matrix_path, "Coefficient matrix CSV")
      ->required();
  add_data_opts(predict_cmd, false);

  auto* test_cmd = app.add_subcommand(
      "test", "Permutation test of linear independence between y and x");
  add_data_opts(test_cmd, true);
  add_fit_opts(test_cmd);
  test_cmd->add_option("--permutations", permutations,
                       "Permutation count (default 1000)");

  auto* loocv_cmd = app.add_subcommand(
      "loocv", "Leave-one-out predictions and mean KLD per model");
  add_data_opts(loocv_cmd, true);
  add_fit_opts(loocv_cmd);
  loocv_cmd->add_option("--models", models_csv,
                        "Models to compare (default direct,ilr,logit)");

  auto* boot_cmd = app.add_subcommand(
      "bootstrap", "Pairs-bootstrap replicates and confidence regions");
  add_data_opts(boot_cmd, true);
  add_fit_opts(boot_cmd);
  boot_cmd->add_option("--replicates", replicates,
                       "Bootstrap replicates (default 1000)");
  boot_cmd->add_option("--level", level, "Region level (default 0.95)");
  boot_cmd->add_flag("--no-svg", no_svg, "Skip the SVG ternary diagram");

  auto* sim_cmd =
      app.add_subcommand("simulate", "Generate a synthetic dataset CSV");
  sim_cmd->add_option("--truth", sim.truth,
                      "Truth name (b1,b2,b3,null,ilr1,ilr2,ilr3,logit1)");
  sim_cmd->add_option("--dgm", sim.dgm,
                      "Mechanism (dirichlet, multinomial_prop, dirmult_prop, "
                      "ilr_normal)");
  sim_cmd->add_option("--n", sim.n, "Rows to generate (default 250)");
  sim_cmd->add_option("--concentration", sim.concentration,
                      "Dirichlet concentration (default 10)");
  sim_cmd->add_option("--count-min", sim.count_min, "Smallest multinomial size");
  sim_cmd->add_option("--count-max", sim.count_max, "Largest multinomial size");
  sim_cmd->add_option("--noise-sd", sim.noise_sd, "ilr-normal noise sd");

  auto* exp_cmd = app.add_subcommand(
      "experiment", "Run a simulation study and write report.csv");
  exp_cmd->add_option("--kind", exp.kind,
                      "model_comparison (default) or error_rate");
  exp_cmd->add_option("--config", exp.config_path,
                      "Flat key = value config file (flags override it)");
  exp_cmd->add_option("--truths", exp.truths, "Comma-separated truth names");
  exp_cmd->add_option("--dgms", exp.dgms, "Comma-separated mechanisms");
  exp_cmd->add_option("--ns", exp.ns, "Comma-separated sample sizes");
  exp_cmd->add_option("--replicates", exp.replicates, "Replicates per cell");
  exp_cmd->add_option("--permutations", exp.permutations,
                      "Permutations per test (error_rate)");
  exp_cmd->add_option("--test-points", exp.test_points,
                      "Test covariates per replicate (model_comparison)");
  exp_cmd->add_option("--alpha", exp.alpha, "Rejection level (error_rate)");
  exp_cmd->add_option("--concentration", exp.concentration,
                      "Dirichlet concentration");
  exp_cmd->add_option("--noise-sd", exp.noise_sd, "ilr-normal noise sd");
  exp_cmd->add_option("--count-min", exp.count_min, "Smallest multinomial size");
  exp_cmd->add_option("--count-max", exp.count_max, "Largest multinomial size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ErrorFamily::invalid_argument);
  }

  try {
    if (app.got_subcommand(fit_cmd)) return run_fit(g, d, f);
    if (app.got_subcommand(predict_cmd)) return run_predict(g, matrix_path, d);
    if (app.got_subcommand(test_cmd))
      return run_test(g, d, permutations, f);
    if (app.got_subcommand(loocv_cmd)) return run_loocv(g, d, models_csv, f);
    if (app.got_subcommand(boot_cmd))
      return run_bootstrap(g, d, replicates, level, !no_svg, f);
    if (app.got_subcommand(sim_cmd)) return run_simulate(g, sim);
    if (app.got_subcommand(exp_cmd)) return run_experiment(g, exp);
    throw InvalidArgument("no subcommand given");
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int cli_run(const std::vector<std::string>& args) {
  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.push_back("compreg");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const auto& a : full) argv.push_back(a.c_str());
  return cli_run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace compreg
