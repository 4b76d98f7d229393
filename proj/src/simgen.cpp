#include "compreg/simgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "compreg/baselines.hpp"
#include "compreg/inference.hpp"
#include "compreg/parallel.hpp"

namespace compreg {

std::size_t truth_ds(const TruthModel& truth) {
  return std::visit(
      [](const auto& t) -> std::size_t {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, DirectTruth>)
          return t.b.rows();
        else
          return t.ds;
      },
      truth);
}

std::size_t truth_dr(const TruthModel& truth) {
  return std::visit(
      [](const auto& t) -> std::size_t {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, DirectTruth>)
          return t.b.cols();
        else
          return t.dr;
      },
      truth);
}

Composition truth_mean(const TruthModel& truth, const Composition& x) {
  if (x.dim() != truth_ds(truth))
    throw DimMismatch("truth_mean: covariate dimension mismatch");
  if (std::holds_alternative<DirectTruth>(truth))
    return predict(std::get<DirectTruth>(truth).b, x);

  if (!x.is_interior())
    throw BoundaryPoint("ilr/logit truth models require interior covariates");
  const auto u = ilr(x);
  if (const auto* t = std::get_if<IlrCoefTruth>(&truth)) {
    const std::size_t dr1 = t->dr - 1;
    std::vector<double> v(dr1);
    for (std::size_t c = 0; c < dr1; ++c) {
      double acc = t->coef[0 * dr1 + c];
      for (std::size_t j = 0; j < u.size(); ++j)
        acc += t->coef[(j + 1) * dr1 + c] * u[j];
      v[c] = acc;
    }
    return ilr_inverse(v);
  }
  const auto& t = std::get<LogitCoefTruth>(truth);
  const std::size_t km1 = t.dr - 1;
  std::vector<double> eta(km1 + 1, 0.0);
  for (std::size_t k = 0; k < km1; ++k) {
    double acc = t.coef[k * t.ds + 0];
    for (std::size_t j = 0; j < u.size(); ++j)
      acc += t.coef[k * t.ds + 1 + j] * u[j];
    eta[k] = acc;
  }
  const double mx = *std::max_element(eta.begin(), eta.end());
  std::vector<double> ex(km1 + 1);
  for (std::size_t k = 0; k <= km1; ++k) ex[k] = std::exp(eta[k] - mx);
  return closure(std::move(ex));
}

TruthModel truth_by_name(const std::string& name) {
  const double third = 1.0 / 3.0;
  if (name == "b1")
    return DirectTruth{TransitionMatrix(3, 3,
                                        {0.90, 0.05, 0.05,  //
                                         0.05, 0.90, 0.05,  //
                                         0.05, 0.05, 0.90})};
  if (name == "b2")
    return DirectTruth{TransitionMatrix(3, 3,
                                        {0.40, 0.30, 0.30,  //
                                         0.30, 0.40, 0.30,  //
                                         0.30, 0.30, 0.40})};
  if (name == "b3")
    // Printed as rows of .33; re-closed so each row sums to 1.
    return DirectTruth{TransitionMatrix(3, 3,
                                        {0.90, 0.05, 0.05,  //
                                         third, third, third,  //
                                         third, third, third})};
  if (name == "null")
    return DirectTruth{
        TransitionMatrix::equal_rows(3, Composition::barycenter(3))};
  // Ilr coefficient layout: rows intercept, slope on ilr(x)_1, slope on
  // ilr(x)_2; columns are the two ilr(y) coordinates.
  if (name == "ilr1")
    return IlrCoefTruth{3, 3,
                        {1.0, -2.0,  //
                         2.0, -1.0,  //
                         -1.0, 2.0}};
  if (name == "ilr2")
    return IlrCoefTruth{3, 3,
                        {1.0, -2.0,  //
                         0.333, -0.333,  //
                         -0.333, 0.333}};
  if (name == "ilr3")
    return IlrCoefTruth{3, 3,
                        {1.0, -2.0,  //
                         2.0, -1.0,  //
                         0.0, 0.0}};
  // Demo softmax truth with moderate, clearly non-null effects.
  if (name == "logit1")
    return LogitCoefTruth{3, 3,
                          {0.5, 1.0, -0.5,  //
                           -0.5, -0.5, 1.0}};
  throw InvalidArgument("unknown truth name: " + name +
                        " (expected one of b1,b2,b3,null,ilr1,ilr2,ilr3,logit1)");
}

std::vector<std::string> builtin_truth_names() {
  return {"b1", "b2", "b3", "null", "ilr1", "ilr2", "ilr3", "logit1"};
}

DgmKind dgm_by_name(const std::string& name) {
  if (name == "dirichlet") return DgmKind::dirichlet;
  if (name == "multinomial_prop") return DgmKind::multinomial_prop;
  if (name == "dirmult_prop") return DgmKind::dirmult_prop;
  if (name == "ilr_normal") return DgmKind::ilr_normal;
  throw InvalidArgument(
      "unknown data generating mechanism: " + name +
      " (expected dirichlet, multinomial_prop, dirmult_prop, or ilr_normal)");
}

std::string dgm_name(DgmKind kind) {
  switch (kind) {
    case DgmKind::dirichlet: return "dirichlet";
    case DgmKind::multinomial_prop: return "multinomial_prop";
    case DgmKind::dirmult_prop: return "dirmult_prop";
    case DgmKind::ilr_normal: return "ilr_normal";
  }
  throw InvalidArgument("unknown data generating mechanism");
}

std::vector<Composition> gen_covariates(std::size_t n, std::size_t ds, Rng& rng) {
  if (n < 1) throw InvalidArgument("gen_covariates: need at least one draw");
  if (ds < 2) throw UnsupportedDimension("gen_covariates: need at least 2 parts");
  const std::vector<double> ones(ds, 1.0);
  std::vector<Composition> x;
  x.reserve(n);
  for (std::size_t i = 0; i < n; ++i) x.push_back(rng.dirichlet(ones));
  return x;
}

std::vector<Composition> gen_covariates(std::size_t n, std::size_t ds,
                                        std::uint64_t seed) {
  Rng rng(seed);
  return gen_covariates(n, ds, rng);
}

namespace {

void validate_spec(const DgmSpec& spec) {
  if (!(spec.concentration > 0.0))
    throw InvalidArgument("dgm: concentration must be positive");
  if (spec.count_min < 1)
    throw InvalidArgument("dgm: count range lower bound must be at least 1");
  if (spec.count_max < spec.count_min)
    throw InvalidArgument("dgm: count range upper bound below lower bound");
  if (!(spec.noise_sd > 0.0))
    throw InvalidArgument("dgm: noise sd must be positive");
}

std::vector<double> scaled_mean(const Composition& m, double c) {
  std::vector<double> alpha(m.dim());
  for (std::size_t k = 0; k < m.dim(); ++k) {
    if (m[k] == 0.0)
      throw ZeroConcentration(
          "conditional mean has a zero component; Dirichlet concentration "
          "parameters must be positive");
    alpha[k] = c * m[k];
  }
  return alpha;
}

Composition counts_to_composition(const std::vector<std::int64_t>& counts) {
  std::vector<double> v(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k)
    v[k] = static_cast<double>(counts[k]);
  return closure(std::move(v));
}

}  // namespace

std::vector<Composition> gen_outcomes(const std::vector<Composition>& x,
                                      const TruthModel& truth,
                                      const DgmSpec& spec, Rng& rng) {
  validate_spec(spec);
  std::vector<Composition> y;
  y.reserve(x.size());
  for (const auto& xi : x) {
    const Composition m = truth_mean(truth, xi);
    switch (spec.kind) {
      case DgmKind::dirichlet:
        y.push_back(rng.dirichlet(scaled_mean(m, spec.concentration)));
        break;
      case DgmKind::multinomial_prop: {
        const auto ni = rng.uniform_int(spec.count_min, spec.count_max);
        y.push_back(counts_to_composition(rng.multinomial(ni, m.parts())));
        break;
      }
      case DgmKind::dirmult_prop: {
        const Composition p = rng.dirichlet(scaled_mean(m, spec.concentration));
        const auto ni = rng.uniform_int(spec.count_min, spec.count_max);
        y.push_back(counts_to_composition(rng.multinomial(ni, p.parts())));
        break;
      }
      case DgmKind::ilr_normal: {
        if (!m.is_interior())
          throw BoundaryPoint(
              "ilr_normal mechanism needs an interior conditional mean");
        auto u = ilr(m);
        for (double& uj : u) uj = rng.normal(uj, spec.noise_sd);
        y.push_back(ilr_inverse(u));
        break;
      }
    }
  }
  return y;
}

CompositionDataset gen_dataset(std::size_t n, const TruthModel& truth,
                               const DgmSpec& spec, Rng& rng) {
  auto x = gen_covariates(n, truth_ds(truth), rng);
  auto y = gen_outcomes(x, truth, spec, rng);
  return CompositionDataset(std::move(x), std::move(y));
}

double test_set_kld(const Predictor& fitted, const TruthModel& truth,
                    std::size_t m, std::uint64_t seed) {
  if (m < 1) throw InvalidArgument("test_set_kld: need at least one test point");
  const auto xs = gen_covariates(m, truth_ds(truth), seed);
  double acc = 0.0;
  for (const auto& x : xs) acc += kld(truth_mean(truth, x), fitted(x));
  return acc / static_cast<double>(m);
}

namespace {

// Distinct, order-independent seed for replicate r of experiment cell `cell`.
std::uint64_t cell_seed(std::uint64_t seed, std::uint64_t cell, std::uint64_t r) {
  return mix64(mix64(seed ^ mix64(cell + 1)) + r);
}

DgmKind canonical_dgm(const TruthModel& truth) {
  return std::holds_alternative<IlrCoefTruth>(truth) ? DgmKind::ilr_normal
                                                     : DgmKind::dirichlet;
}

}  // namespace

ExperimentReport run_model_comparison(const ModelComparisonConfig& config) {
  if (config.replicates < 1)
    throw InvalidArgument("model comparison: need at least one replicate");
  ExperimentReport report;
  report.kind = "model_comparison";
  report.seed = config.seed;

  const char* models[] = {"direct", "ilr", "logit"};
  std::uint64_t cell = 0;
  for (const auto& truth_name : config.truths) {
    const TruthModel truth = truth_by_name(truth_name);
    DgmSpec spec;
    spec.kind = canonical_dgm(truth);
    spec.concentration = config.concentration;
    spec.noise_sd = config.noise_sd;
    for (const std::size_t n : config.ns) {
      ++cell;
      const std::size_t reps = config.replicates;
      // Per replicate and model: KLD, or NaN when that fit failed.
      std::vector<std::array<double, 3>> klds(
          reps, {std::numeric_limits<double>::quiet_NaN(),
                 std::numeric_limits<double>::quiet_NaN(),
                 std::numeric_limits<double>::quiet_NaN()});
      parallel_for(reps, config.threads, [&](std::size_t r) {
        const std::uint64_t rs = cell_seed(config.seed, cell, r);
        Rng rng = Rng::substream(rs, 0);
        const CompositionDataset data = gen_dataset(n, truth, spec, rng);
        const std::uint64_t test_seed = mix64(rs ^ 0x7E57DA7Aull);
        try {
          const auto fitted = fit(data, config.fit_opts).b_hat;
          klds[r][0] = test_set_kld(
              [&](const Composition& x) { return predict(fitted, x); }, truth,
              config.test_points, test_seed);
        } catch (const Error&) {
        }
        try {
          const auto model = fit_ilr_pivot(data);
          klds[r][1] = test_set_kld(
              [&](const Composition& x) { return predict_ilr(model, x); },
              truth, config.test_points, test_seed);
        } catch (const Error&) {
        }
        try {
          const auto model = fit_logit_qml(data);
          klds[r][2] = test_set_kld(
              [&](const Composition& x) { return predict_logit(model, x); },
              truth, config.test_points, test_seed);
        } catch (const Error&) {
        }
      });
      for (int mdl = 0; mdl < 3; ++mdl) {
        ReportRow row;
        row.truth = truth_name;
        row.dgm = dgm_name(spec.kind);
        row.n = n;
        row.model = models[mdl];
        row.metric = "mean_kld";
        row.replicates = reps;
        double sum = 0.0, logsum = 0.0;
        std::size_t ok = 0;
        for (std::size_t r = 0; r < reps; ++r) {
          const double v = klds[r][mdl];
          if (std::isnan(v)) continue;
          sum += v;
          logsum += std::log(std::max(v, 1e-300));
          ++ok;
        }
        row.failures = reps - ok;
        row.value = ok ? sum / static_cast<double>(ok)
                       : std::numeric_limits<double>::quiet_NaN();
        row.log_value = ok ? logsum / static_cast<double>(ok)
                           : std::numeric_limits<double>::quiet_NaN();
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

ExperimentReport run_error_rate_study(const ErrorRateConfig& config) {
  if (config.replicates < 1)
    throw InvalidArgument("error rate study: need at least one replicate");
  if (config.permutations < 1)
    throw InvalidArgument("error rate study: need at least one permutation");
  ExperimentReport report;
  report.kind = "error_rate";
  report.seed = config.seed;

  std::uint64_t cell = 0;
  for (const auto& truth_name : config.truths) {
    const TruthModel truth = truth_by_name(truth_name);
    for (const auto& dgm : config.dgms) {
      DgmSpec spec;
      spec.kind = dgm_by_name(dgm);
      spec.concentration = config.concentration;
      spec.count_min = config.count_min;
      spec.count_max = config.count_max;
      spec.noise_sd = config.noise_sd;
      for (const std::size_t n : config.ns) {
        ++cell;
        const std::size_t reps = config.replicates;
        // 1 = reject, 0 = retain, -1 = replicate failed.
        std::vector<int> outcome(reps, -1);
        parallel_for(reps, config.threads, [&](std::size_t r) {
          const std::uint64_t rs = cell_seed(config.seed, cell, r);
          Rng rng = Rng::substream(rs, 0);
          try {
            const CompositionDataset data = gen_dataset(n, truth, spec, rng);
            const auto test = permutation_test(data, config.permutations,
                                               mix64(rs ^ 0x9E2577ull),
                                               config.fit_opts);
            outcome[r] = test.p_value <= config.alpha ? 1 : 0;
          } catch (const Error&) {
            outcome[r] = -1;
          }
        });
        ReportRow row;
        row.truth = truth_name;
        row.dgm = dgm;
        row.n = n;
        row.model = "direct";
        row.metric = "rejection_rate";
        row.replicates = reps;
        std::size_t ok = 0, rejected = 0;
        for (const int o : outcome) {
          if (o < 0) continue;
          ++ok;
          rejected += static_cast<std::size_t>(o);
        }
        row.failures = reps - ok;
        row.value = ok ? static_cast<double>(rejected) / static_cast<double>(ok)
                       : std::numeric_limits<double>::quiet_NaN();
        row.log_value = std::numeric_limits<double>::quiet_NaN();
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

}  // namespace compreg
