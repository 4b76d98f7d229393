#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "compreg/composition.hpp"
#include "compreg/em.hpp"
#include "compreg/rng.hpp"
#include "compreg/transition.hpp"

namespace compreg {

// ---------------------------------------------------------------- truths ---

/// Conditional-mean truth E[y|x] = B'x.
struct DirectTruth {
  TransitionMatrix b;
};

/// Conditional-mean truth on the ilr scale: coordinate c of ilr(y) has mean
/// coef[0][c] + sum_j coef[1+j][c] * ilr(x)_j. coef is row-major with ds rows
/// (intercept + ds-1 slopes) and dr-1 columns.
struct IlrCoefTruth {
  std::size_t ds, dr;
  std::vector<double> coef;
};

/// Softmax conditional mean with the last category as reference: category
/// k < dr-1 has linear predictor coef[k][0] + sum_j coef[k][1+j] * ilr(x)_j.
/// coef is row-major with dr-1 rows and ds columns.
struct LogitCoefTruth {
  std::size_t ds, dr;
  std::vector<double> coef;
};

using TruthModel = std::variant<DirectTruth, IlrCoefTruth, LogitCoefTruth>;

std::size_t truth_ds(const TruthModel& truth);
std::size_t truth_dr(const TruthModel& truth);

/// True conditional mean E[y|x] under the given truth.
Composition truth_mean(const TruthModel& truth, const Composition& x);

/// Built-in truth sets: "b1", "b2", "b3" (direct), "ilr1".."ilr3"
/// (ilr-scale linear models), "logit1" (demo softmax model), and "null"
/// (equal rows at the barycenter — the independence null).
TruthModel truth_by_name(const std::string& name);
std::vector<std::string> builtin_truth_names();

// ------------------------------------------------------------------ DGMs ---

enum class DgmKind { dirichlet, multinomial_prop, dirmult_prop, ilr_normal };

DgmKind dgm_by_name(const std::string& name);
std::string dgm_name(DgmKind kind);

struct DgmSpec {
  DgmKind kind = DgmKind::dirichlet;
  double concentration = 10.0;   // Dirichlet scale on the mean
  std::int64_t count_min = 1;    // multinomial size range (inclusive)
  std::int64_t count_max = 30;
  double noise_sd = 1.0;         // ilr_normal coordinate noise
};

/// N independent uniform-Dirichlet covariates on the ds-simplex.
std::vector<Composition> gen_covariates(std::size_t n, std::size_t ds, Rng& rng);
std::vector<Composition> gen_covariates(std::size_t n, std::size_t ds,
                                        std::uint64_t seed);

/// Outcomes drawn by the chosen mechanism at the truth's conditional means.
std::vector<Composition> gen_outcomes(const std::vector<Composition>& x,
                                      const TruthModel& truth,
                                      const DgmSpec& spec, Rng& rng);

/// Covariates + outcomes as a ready dataset.
CompositionDataset gen_dataset(std::size_t n, const TruthModel& truth,
                               const DgmSpec& spec, Rng& rng);

// ----------------------------------------------------------- experiments ---

using Predictor = std::function<Composition(const Composition&)>;

/// Mean KLD from the true conditional mean to the model prediction over M
/// fresh uniform-Dirichlet test covariates.
double test_set_kld(const Predictor& fitted, const TruthModel& truth,
                    std::size_t m, std::uint64_t seed);

struct ReportRow {
  std::string truth;
  std::string dgm;
  std::size_t n = 0;
  std::string model;
  std::string metric;
  double value = 0.0;      // mean KLD or rejection rate
  double log_value = 0.0;  // mean log KLD where applicable, else NaN
  std::size_t replicates = 0;
  std::size_t failures = 0;
};

struct ExperimentReport {
  std::string kind;  // "model_comparison" or "error_rate"
  std::uint64_t seed = 0;
  std::vector<ReportRow> rows;
};

struct ModelComparisonConfig {
  std::vector<std::string> truths = {"b1", "ilr1", "logit1"};
  std::vector<std::size_t> ns = {500};
  std::size_t replicates = 200;
  std::size_t test_points = 2000;
  double concentration = 10.0;
  double noise_sd = 1.0;
  std::uint64_t seed = 20240501;
  unsigned threads = 1;
  EmFitOptions fit_opts{1e-9, 2000, false, {}};
};

/// One row per (truth, N, fitted model): mean test-set KLD and mean log-KLD.
/// Data are generated under each truth's own canonical mechanism (Dirichlet
/// at concentration x mean for direct/logit truths, ilr-normal for ilr
/// truths); all three models are fitted to every dataset.
ExperimentReport run_model_comparison(const ModelComparisonConfig& config);

struct ErrorRateConfig {
  std::vector<std::string> truths = {"null"};
  std::vector<std::string> dgms = {"dirichlet"};
  std::vector<std::size_t> ns = {250};
  std::size_t replicates = 200;
  std::size_t permutations = 200;
  double alpha = 0.05;
  double concentration = 10.0;
  std::int64_t count_min = 1;
  std::int64_t count_max = 30;
  double noise_sd = 1.0;
  std::uint64_t seed = 20240502;
  unsigned threads = 1;
  EmFitOptions fit_opts{1e-7, 500, false, {}};
};

/// One row per (truth, dgm, N): permutation-test rejection rate at alpha.
ExperimentReport run_error_rate_study(const ErrorRateConfig& config);

}  // namespace compreg
