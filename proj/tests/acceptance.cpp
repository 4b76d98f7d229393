// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Usage: acceptance [N] runs criterion N only (default: all).
//
// Criterion 9 checks fitted anchors on two reference datasets and is skipped
// with a notice when the data files are not present (see README for the
// expected paths and column schemas).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "compreg/baselines.hpp"
#include "compreg/cli.hpp"
#include "compreg/csv.hpp"
#include "compreg/em.hpp"
#include "compreg/errors.hpp"
#include "compreg/inference.hpp"
#include "compreg/rng.hpp"
#include "compreg/simgen.hpp"
#include "compreg/transition.hpp"

using namespace compreg;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok;
  std::string detail;
};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

// ------------------------------------------------------- random generators --

Composition random_composition(std::mt19937_64& gen, std::size_t d,
                               bool allow_zeros) {
  std::uniform_real_distribution<double> u(allow_zeros ? 0.0 : 0.05, 1.0);
  std::bernoulli_distribution zero(0.25);
  std::vector<double> v(d);
  double sum = 0.0;
  while (sum == 0.0) {
    sum = 0.0;
    for (auto& p : v) {
      p = u(gen);
      if (allow_zeros && zero(gen)) p = 0.0;
      sum += p;
    }
  }
  return closure(std::move(v));
}

CompositionDataset random_dataset(std::mt19937_64& gen, std::size_t n,
                                  std::size_t ds, std::size_t dr,
                                  bool allow_zeros) {
  std::vector<Composition> xs, ys;
  xs.reserve(n);
  ys.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (allow_zeros && i % 10 == 9) {
      // Sprinkle vertices among the boundary cases.
      xs.push_back(Composition::vertex(ds, i % ds));
      ys.push_back(random_composition(gen, dr, true));
    } else {
      xs.push_back(random_composition(gen, ds, allow_zeros));
      ys.push_back(random_composition(gen, dr, allow_zeros));
    }
  }
  return CompositionDataset(std::move(xs), std::move(ys));
}

// Categorical predictor: every one of the ds categories occurs at least once.
std::vector<std::size_t> random_categories(std::mt19937_64& gen, std::size_t n,
                                           std::size_t ds) {
  std::uniform_int_distribution<std::size_t> cat(0, ds - 1);
  std::vector<std::size_t> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = i < ds ? i : cat(gen);
  return c;
}

// ------------------------------------------------------------ criterion 1 --

Outcome criterion1() {
  std::mt19937_64 gen(101);
  std::uniform_int_distribution<std::size_t> nd(10, 200), dd(2, 5);
  double worst_step = 0.0;
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t n = nd(gen), ds = dd(gen), dr = dd(gen);
    const CompositionDataset data = random_dataset(gen, n, ds, dr, true);
    EmFitOptions opts;
    opts.max_iter = 300;
    const FitResult r = fit(data, opts);
    for (std::size_t t = 0; t + 1 < r.objective_trace.size(); ++t) {
      const double step = r.objective_trace[t + 1] - r.objective_trace[t];
      worst_step = std::min(worst_step, step);
      if (step < -1e-10)
        return {false, "objective decreased by " + fmt("%.3g", -step) +
                           " in replicate " + std::to_string(rep)};
    }
  }
  return {true, "500 objective traces non-decreasing (worst step " +
                    fmt("%.3g", worst_step) + ")"};
}

// ------------------------------------------------------------ criterion 2 --

Outcome criterion2() {
  std::mt19937_64 gen(202);
  std::uniform_int_distribution<std::size_t> nd(20, 200), dd(2, 5);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = nd(gen), ds = dd(gen), dr = dd(gen);
    const auto cats = random_categories(gen, n, ds);
    std::uniform_int_distribution<std::size_t> ycat(0, dr - 1);
    std::vector<Composition> xs, ys;
    std::vector<std::vector<double>> counts(ds, std::vector<double>(dr, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = ycat(gen);
      xs.push_back(Composition::vertex(ds, cats[i]));
      ys.push_back(Composition::vertex(dr, k));
      counts[cats[i]][k] += 1.0;
    }
    const FitResult r = fit(CompositionDataset(std::move(xs), std::move(ys)));
    for (std::size_t j = 0; j < ds; ++j) {
      double rowsum = 0.0;
      for (double c : counts[j]) rowsum += c;
      for (std::size_t k = 0; k < dr; ++k) {
        const double diff = std::abs(r.b_hat.at(j, k) - counts[j][k] / rowsum);
        worst = std::max(worst, diff);
        if (diff > 1e-8)
          return {false, "cell (" + std::to_string(j) + "," + std::to_string(k) +
                             ") off by " + fmt("%.3g", diff) + " in replicate " +
                             std::to_string(rep)};
      }
    }
  }
  return {true, "100 contingency fits match conditional proportions (max gap " +
                    fmt("%.3g", worst) + ")"};
}

// ------------------------------------------------------------ criterion 3 --

Outcome criterion3() {
  std::mt19937_64 gen(303);
  std::uniform_int_distribution<std::size_t> nd(20, 150), dd(2, 5);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = nd(gen), ds = dd(gen), dr = dd(gen);
    const auto cats = random_categories(gen, n, ds);
    std::vector<Composition> xs, ys;
    for (std::size_t i = 0; i < n; ++i) {
      xs.push_back(Composition::vertex(ds, cats[i]));
      ys.push_back(random_composition(gen, dr, true));
    }
    const CompositionDataset data(xs, ys);
    const FitResult r = fit(data);
    for (std::size_t j = 0; j < ds; ++j) {
      std::vector<double> mean(dr, 0.0);
      double members = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (cats[i] != j) continue;
        members += 1.0;
        for (std::size_t k = 0; k < dr; ++k) mean[k] += ys[i][k];
      }
      for (std::size_t k = 0; k < dr; ++k) {
        const double diff = std::abs(r.b_hat.at(j, k) - mean[k] / members);
        worst = std::max(worst, diff);
        if (diff > 1e-8)
          return {false, "row " + std::to_string(j) + " off by " +
                             fmt("%.3g", diff) + " in replicate " +
                             std::to_string(rep)};
      }
    }
  }
  return {true, "100 categorical fits match within-group means (max gap " +
                    fmt("%.3g", worst) + ")"};
}

// ------------------------------------------------------------ criterion 4 --

Outcome criterion4() {
  std::mt19937_64 gen(404);
  std::uniform_int_distribution<std::size_t> nd(5, 100), dd(2, 5);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = nd(gen), ds = dd(gen), dr = dd(gen);
    const CompositionDataset data = random_dataset(gen, n, ds, dr, true);

    // Componentwise mean, accumulated exactly as the estimator accumulates.
    std::vector<double> mean(dr, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& yi = data.y(i).parts();
      for (std::size_t k = 0; k < dr; ++k) mean[k] += yi[k];
    }
    for (double& m : mean) m /= static_cast<double>(n);
    const Composition want(std::move(mean));
    const Composition mu = fit_null(data);
    if (!(mu == want))
      return {false, "null fit differs from the componentwise mean in "
                     "replicate " + std::to_string(rep)};

    const double direct = pll_h0(data);
    const double via_matrix =
        quasi_loglik(TransitionMatrix::equal_rows(ds, mu), data);
    const double diff = std::abs(direct - via_matrix);
    worst = std::max(worst, diff);
    if (diff > 1e-12)
      return {false, "null quasi-log-likelihoods disagree by " +
                         fmt("%.3g", diff) + " in replicate " +
                         std::to_string(rep)};
  }
  return {true, "100 null fits exact; objective agreement within 1e-12 "
                "(max gap " + fmt("%.3g", worst) + ")"};
}

// ------------------------------------------------------------ criterion 5 --

Outcome criterion5() {
  const TruthModel truth = truth_by_name("b1");
  const TransitionMatrix& b_true = std::get<DirectTruth>(truth).b;
  DgmSpec spec;  // Dirichlet at concentration 10
  EmFitOptions opts;
  opts.tol = 1e-9;
  opts.max_iter = 2000;
  opts.track_objective = false;
  std::size_t hits = 0;
  double worst = 0.0;
  for (std::uint64_t r = 0; r < 50; ++r) {
    Rng rng = Rng::substream(50505, r);
    const CompositionDataset data = gen_dataset(1000, truth, spec, rng);
    const double err = fit(data, opts).b_hat.max_abs_diff(b_true);
    worst = std::max(worst, err);
    if (err < 0.05) ++hits;
  }
  const bool ok = hits >= 48;  // 95% of 50 replicates
  return {ok, "recovered within .05 in " + std::to_string(hits) +
                  "/50 replicates (worst error " + fmt("%.3g", worst) + ")"};
}

// ------------------------------------------------------------ criterion 6 --

Outcome criterion6() {
  ErrorRateConfig c;
  c.truths = {"null"};
  c.dgms = {"dirichlet", "multinomial_prop"};
  c.ns = {250};
  c.replicates = 500;
  c.permutations = 200;
  c.alpha = 0.05;
  c.seed = 60606;
  c.threads = 1;
  const ExperimentReport rep = run_error_rate_study(c);
  std::string detail;
  bool ok = true;
  for (const auto& row : rep.rows) {
    if (!detail.empty()) detail += ", ";
    detail += row.dgm + " " + fmt("%.3f", row.value);
    if (row.failures)
      detail += " (" + std::to_string(row.failures) + " failures)";
    if (row.value < 0.03 || row.value > 0.07) ok = false;
  }
  return {ok, "size at alpha=.05 over 500 null datasets: " + detail +
                  (ok ? " (all within [.03,.07])" : " (outside [.03,.07])")};
}

// ------------------------------------------------------------ criterion 7 --

Outcome criterion7() {
  ErrorRateConfig strong;
  strong.truths = {"b1", "b3"};
  strong.dgms = {"dirichlet"};
  strong.ns = {100};
  strong.replicates = 100;
  strong.permutations = 200;
  strong.alpha = 0.05;
  strong.seed = 70707;
  strong.threads = 1;
  const ExperimentReport srep = run_error_rate_study(strong);

  ErrorRateConfig weak;
  weak.truths = {"b2"};
  weak.dgms = {"dirichlet"};
  weak.ns = {1000};
  weak.replicates = 100;
  weak.permutations = 200;
  weak.alpha = 0.05;
  weak.seed = 70708;
  weak.threads = 1;
  const ExperimentReport wrep = run_error_rate_study(weak);

  std::string detail;
  bool ok = true;
  for (const auto& row : srep.rows) {
    if (!detail.empty()) detail += ", ";
    detail += row.truth + "@100 " + fmt("%.2f", row.value);
    if (row.value < 0.99) ok = false;
  }
  for (const auto& row : wrep.rows) {
    detail += ", " + row.truth + "@1000 " + fmt("%.2f", row.value);
    if (row.value < 0.95) ok = false;
  }
  return {ok, "rejection rates: " + detail};
}

// ------------------------------------------------------------ criterion 8 --

Outcome criterion8() {
  ModelComparisonConfig c;
  c.truths = {"b1", "ilr1", "logit1"};
  c.ns = {500};
  c.replicates = 100;
  c.test_points = 2000;
  c.seed = 80808;
  c.threads = 1;
  const ExperimentReport rep = run_model_comparison(c);

  std::map<std::string, std::map<std::string, double>> kld_by_truth;
  std::size_t failures = 0;
  for (const auto& row : rep.rows) {
    kld_by_truth[row.truth][row.model] = row.value;
    failures += row.failures;
  }
  const std::map<std::string, std::string> correct = {
      {"b1", "direct"}, {"ilr1", "ilr"}, {"logit1", "logit"}};

  bool ok = true;
  std::string detail;
  for (const auto& truth : c.truths) {
    const auto& vals = kld_by_truth.at(truth);
    const std::string& winner = correct.at(truth);
    for (const auto& [model, v] : vals)
      if (model != winner && v <= vals.at(winner)) ok = false;
    if (!detail.empty()) detail += "; ";
    detail += truth + ": direct " + fmt("%.4f", vals.at("direct")) + ", ilr " +
              fmt("%.4f", vals.at("ilr")) + ", logit " +
              fmt("%.4f", vals.at("logit"));
  }
  // The outcome-transforming model pays the steepest price when misspecified:
  // it is the worst cell under both of the other truths.
  for (const char* truth : {"b1", "logit1"}) {
    const auto& vals = kld_by_truth.at(truth);
    if (vals.at("ilr") <= vals.at("direct") ||
        vals.at("ilr") <= vals.at("logit"))
      ok = false;
  }
  if (failures) detail += "; " + std::to_string(failures) + " fit failures";
  return {ok, detail};
}

// ------------------------------------------------------------ criterion 9 --

struct AnchorSpec {
  std::string path;
  TableSchema schema;
  std::vector<double> b;                  // expected 3x3 coefficients
  double kld_direct, kld_ilr, kld_logit;  // expected LOOCV mean KLDs
  double kld_tol;
};

std::string check_anchor(const AnchorSpec& a) {
  const CompositionDataset data = load_dataset(a.path, a.schema);
  const TransitionMatrix expected(3, 3, a.b);

  const FitResult r = fit(data);
  const double berr = r.b_hat.max_abs_diff(expected);
  if (berr > 0.01)
    return a.path + ": coefficients off by " + fmt("%.3g", berr);

  EmFitOptions loo_opts;
  loo_opts.track_objective = false;
  const auto loocv_kld = [&](auto&& predict_one) {
    double sum = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i)
      sum += kld(data.y(i), predict_one(data.without_row(i), data.x(i)));
    return sum / static_cast<double>(data.n());
  };
  const double kd = loocv_kld([&](const CompositionDataset& rest,
                                  const Composition& x) {
    return predict(fit(rest, loo_opts).b_hat, x);
  });
  const double ki = loocv_kld([&](const CompositionDataset& rest,
                                  const Composition& x) {
    return predict_ilr(fit_ilr_pivot(rest), x);
  });
  const double kl = loocv_kld([&](const CompositionDataset& rest,
                                  const Composition& x) {
    return predict_logit(fit_logit_qml(rest), x);
  });
  if (std::abs(kd - a.kld_direct) > a.kld_tol ||
      std::abs(ki - a.kld_ilr) > a.kld_tol ||
      std::abs(kl - a.kld_logit) > a.kld_tol)
    return a.path + ": LOOCV KLDs " + fmt("%.4f", kd) + "/" + fmt("%.4f", ki) +
           "/" + fmt("%.4f", kl) + " outside their anchors";

  EmFitOptions test_opts;
  test_opts.tol = 1e-7;
  test_opts.max_iter = 500;
  test_opts.track_objective = false;
  const auto test = permutation_test(data, 1000, 90909, test_opts);
  if (test.p_value != 0.0)
    return a.path + ": independence p-value " + fmt("%.4f", test.p_value) +
           " (expected 0 at 1000 permutations)";
  return "";
}

Outcome criterion9() {
  AnchorSpec education;
  education.path = "data/education.csv";
  education.schema.x_cols = {"mother_low", "mother_medium", "mother_high"};
  education.schema.y_cols = {"father_low", "father_medium", "father_high"};
  education.schema.id_col = "country";
  education.b = {.91, .05, .04, .00, .91, .09, .00, .14, .86};
  education.kld_direct = education.kld_ilr = education.kld_logit = .024;
  education.kld_tol = .005;

  AnchorSpec cells;
  cells.path = "data/whitecells.csv";
  cells.schema.x_cols = {"image_granulocytes", "image_lymphocytes",
                         "image_monocytes"};
  cells.schema.y_cols = {"micro_granulocytes", "micro_lymphocytes",
                         "micro_monocytes"};
  cells.schema.id_col = "sample";
  cells.b = {.97, .03, .00, .00, 1.00, .00, .00, .04, .96};
  cells.kld_direct = .005;
  cells.kld_ilr = .005;
  cells.kld_logit = .006;
  cells.kld_tol = .003;

  std::string detail;
  bool any_checked = false;
  for (const auto& anchor : {education, cells}) {
    if (!detail.empty()) detail += "; ";
    if (!fs::exists(anchor.path)) {
      detail += anchor.path + " not present, skipped";
      continue;
    }
    any_checked = true;
    const std::string err = check_anchor(anchor);
    if (!err.empty()) return {false, err};
    detail += anchor.path + " anchors hold";
  }
  if (!any_checked) detail += " (see README for schemas)";
  return {true, detail};
}

// ----------------------------------------------------------- criterion 10 --

Outcome criterion10() {
  std::mt19937_64 gen(1010);
  std::uniform_int_distribution<std::size_t> dd(2, 5);

  // KLD: non-negative, zero exactly at equality, +inf off the support.
  for (int rep = 0; rep < 2000; ++rep) {
    const std::size_t d = dd(gen);
    const Composition p = random_composition(gen, d, false);
    const Composition q = random_composition(gen, d, false);
    if (kld(p, p) != 0.0) return {false, "kld(p,p) != 0"};
    const double v = kld(p, q);
    if (!(v >= 0.0)) return {false, "kld(p,q) negative"};
    if (!(p == q) && !(v > 0.0)) return {false, "kld(p,q) zero for p != q"};
  }
  {
    const Composition y({0.5, 0.5, 0.0});
    const Composition inner({0.25, 0.25, 0.5});
    if (!(kld(y, inner) >= 0.0) || std::isinf(kld(y, inner)))
      return {false, "kld with zero outcome part should stay finite"};
    if (!std::isinf(kld(inner, y)))
      return {false, "kld off the mean's support should be +inf"};
  }

  // ILR round-trip on the interior.
  for (int rep = 0; rep < 2000; ++rep) {
    const Composition x = random_composition(gen, dd(gen), false);
    const Composition back = ilr_inverse(ilr(x));
    for (std::size_t k = 0; k < x.dim(); ++k)
      if (std::abs(back[k] - x[k]) > 1e-10)
        return {false, "ilr round-trip error above 1e-10"};
  }

  // Predictions land exactly on the simplex, vertices included.
  for (int rep = 0; rep < 10000; ++rep) {
    const std::size_t ds = dd(gen), dr = dd(gen);
    std::vector<Composition> rows;
    for (std::size_t j = 0; j < ds; ++j)
      rows.push_back(random_composition(gen, dr, rep % 3 == 0));
    const TransitionMatrix b(rows);
    const Composition x = rep % 7 == 0 ? Composition::vertex(ds, rep % ds)
                                       : random_composition(gen, ds, true);
    const Composition yhat = predict(b, x);
    if (yhat.dim() != dr) return {false, "prediction dimension mismatch"};
    double sum = 0.0;
    for (std::size_t k = 0; k < dr; ++k) {
      if (yhat[k] < 0.0) return {false, "negative prediction entry"};
      sum += yhat[k];
    }
    if (sum != 1.0) return {false, "prediction parts do not sum to 1 exactly"};
  }

  // Same seed, same bytes, end to end.
  const fs::path base = fs::temp_directory_path() / "compreg_acceptance_seed";
  fs::remove_all(base);
  for (const char* sub : {"a", "b"}) {
    const int rc = cli_run({"--seed", "424242", "--out-dir",
                            (base / sub).string(), "simulate", "--truth", "b2",
                            "--dgm", "dirmult_prop", "--n", "50"});
    if (rc != 0) return {false, "simulate exited with " + std::to_string(rc)};
  }
  const auto read_bytes = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
  };
  if (read_bytes(base / "a" / "dataset.csv") !=
      read_bytes(base / "b" / "dataset.csv"))
    return {false, "same-seed runs produced different dataset bytes"};

  // Aggregating outcome columns commutes with prediction: exactly on dyadic
  // inputs, to rounding everywhere else.
  {
    const TransitionMatrix b(2, 3, {0.5, 0.25, 0.25, 0.125, 0.375, 0.5});
    const Composition x({0.75, 0.25});
    const Composition full = predict(b, x);
    const Composition merged = predict(aggregate_outcome_cols(b, 1, 2), x);
    if (merged[0] != full[0] || merged[1] != full[1] + full[2])
      return {false, "dyadic column-aggregation identity not exact"};
  }
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t ds = dd(gen), dr = std::max<std::size_t>(3, dd(gen));
    std::vector<Composition> rows;
    for (std::size_t j = 0; j < ds; ++j)
      rows.push_back(random_composition(gen, dr, false));
    const TransitionMatrix b(rows);
    const Composition x = random_composition(gen, ds, false);
    std::uniform_int_distribution<std::size_t> kd(0, dr - 1);
    std::size_t k1 = kd(gen), k2 = kd(gen);
    if (k1 == k2) continue;
    if (k1 > k2) std::swap(k1, k2);
    const Composition full = predict(b, x);
    const Composition merged = predict(aggregate_outcome_cols(b, k1, k2), x);
    std::vector<double> want(dr - 1, 0.0);
    for (std::size_t k = 0; k < dr; ++k) {
      const std::size_t target = k == k2 ? k1 : k - (k > k2 ? 1 : 0);
      want[target] += full[k];
    }
    for (std::size_t m = 0; m + 1 < dr; ++m)
      if (std::abs(merged[m] - want[m]) > 1e-14)
        return {false, "column-aggregation identity off by more than 1e-14"};
  }

  return {true, "kld, ilr round-trip, prediction closure, seed determinism, "
                "and column aggregation all hold"};
}

// -------------------------------------------------------------------- main --

struct Criterion {
  int n;
  const char* label;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "EM objective monotonicity", criterion1},
    {2, "contingency-table proportions", criterion2},
    {3, "within-group means", criterion3},
    {4, "null-model identities", criterion4},
    {5, "coefficient recovery", criterion5},
    {6, "permutation-test size", criterion6},
    {7, "permutation-test power", criterion7},
    {8, "model-comparison ordering", criterion8},
    {9, "reference dataset anchors", criterion9},
    {10, "property suite", criterion10},
};

}  // namespace

int main(int argc, char** argv) {
  int selected = 0;
  if (argc > 1) {
    selected = std::atoi(argv[1]);
    if (selected < 1 || selected > 10) {
      std::fprintf(stderr, "usage: %s [1..10]\n", argv[0]);
      return 2;
    }
  }
  bool all_ok = true;
  for (const auto& c : kCriteria) {
    if (selected != 0 && c.n != selected) continue;
    Outcome out{false, ""};
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, e.what()};
    }
    std::printf("%s criterion %d: %s — %s\n", out.ok ? "PASS" : "FAIL", c.n,
                c.label, out.detail.c_str());
    std::fflush(stdout);
    all_ok = all_ok && out.ok;
  }
  return all_ok ? 0 : 1;
}
