#include "compreg/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "compreg/baselines.hpp"
#include "compreg/parallel.hpp"
#include "compreg/rng.hpp"

namespace compreg {

Composition fit_null(const CompositionDataset& data) {
  std::vector<double> mean(data.dr(), 0.0);
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto& yi = data.y(i).parts();
    for (std::size_t k = 0; k < data.dr(); ++k) mean[k] += yi[k];
  }
  const auto n = static_cast<double>(data.n());
  for (double& m : mean) m /= n;
  return Composition(std::move(mean));
}

double pll_h0(const CompositionDataset& data) {
  const Composition mu = fit_null(data);
  double obj = 0.0;
  for (std::size_t k = 0; k < data.dr(); ++k) {
    double colsum = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i) colsum += data.y(i)[k];
    if (colsum == 0.0) continue;  // 0 * log(anything) contributes nothing
    obj += colsum * std::log(mu[k]);
  }
  return obj;
}

namespace {

// Quasi-log-likelihood of observed outcomes at arbitrary predicted means.
double pll_at_predictions(const CompositionDataset& data,
                          const std::vector<Composition>& pred) {
  double obj = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto& yi = data.y(i).parts();
    for (std::size_t k = 0; k < data.dr(); ++k) {
      if (yi[k] == 0.0) continue;
      if (pred[i][k] <= 0.0) return -std::numeric_limits<double>::infinity();
      obj += yi[k] * std::log(pred[i][k]);
    }
  }
  return obj;
}

double pll_ha(const CompositionDataset& data, const EmFitOptions& fit_opts,
              ModelKind kind) {
  switch (kind) {
    case ModelKind::direct:
      return fit(data, fit_opts).final_objective;
    case ModelKind::ilr: {
      const IlrPivotModel model = fit_ilr_pivot(data);
      std::vector<Composition> pred;
      pred.reserve(data.n());
      for (std::size_t i = 0; i < data.n(); ++i)
        pred.push_back(predict_ilr(model, data.x(i)));
      return pll_at_predictions(data, pred);
    }
    case ModelKind::logit:
      return fit_logit_qml(data).final_qml();
  }
  throw InvalidArgument("unknown model kind");
}

}  // namespace

double lambda_statistic(const CompositionDataset& data,
                        const EmFitOptions& fit_opts, ModelKind kind) {
  return pll_ha(data, fit_opts, kind) - pll_h0(data);
}

IndependenceTestResult permutation_test(const CompositionDataset& data,
                                        std::size_t n_permutations,
                                        std::uint64_t seed,
                                        const EmFitOptions& fit_opts,
                                        ModelKind kind, unsigned threads) {
  if (n_permutations < 1)
    throw InvalidArgument("permutation_test: need at least one permutation");
  const double lambda_obs = lambda_statistic(data, fit_opts, kind);

  std::vector<double> lambda_perm(n_permutations);
  std::vector<std::string> failures(n_permutations);
  parallel_for(n_permutations, threads, [&](std::size_t b) {
    Rng rng = Rng::substream(seed, b);
    const auto perm = rng.permutation(data.n());
    try {
      lambda_perm[b] = lambda_statistic(data.with_x_permuted(perm), fit_opts, kind);
    } catch (const Error& e) {
      failures[b] = e.what();
    }
  });
  for (std::size_t b = 0; b < n_permutations; ++b)
    if (!failures[b].empty())
      throw Error(ErrorFamily::convergence_failure,
                  "permutation replicate " + std::to_string(b) +
                      " failed: " + failures[b]);

  std::size_t exceed = 0;
  for (double l : lambda_perm)
    if (l >= lambda_obs) ++exceed;
  IndependenceTestResult result;
  result.lambda_obs = lambda_obs;
  result.lambda_perm = std::move(lambda_perm);
  result.p_value =
      static_cast<double>(exceed) / static_cast<double>(n_permutations);
  result.p_value_add_one = static_cast<double>(exceed + 1) /
                           static_cast<double>(n_permutations + 1);
  result.n_permutations = n_permutations;
  result.seed = seed;
  return result;
}

BootstrapResult bootstrap_rows(const CompositionDataset& data, std::size_t r,
                               std::uint64_t seed, const EmFitOptions& fit_opts,
                               unsigned threads) {
  if (r < 1) throw InvalidArgument("bootstrap_rows: need at least one replicate");
  const std::size_t n = data.n();
  std::vector<std::optional<TransitionMatrix>> fits(r);
  parallel_for(r, threads, [&](std::size_t b) {
    Rng rng = Rng::substream(seed, b);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i)
      idx[i] = static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
    try {
      fits[b] = fit(data.resample(idx), fit_opts).b_hat;
    } catch (const Error&) {
      // Dropped and counted below.
    }
  });
  BootstrapResult result;
  result.n_requested = r;
  result.seed = seed;
  result.dropped_count = 0;
  result.replicates.reserve(r);
  for (auto& f : fits) {
    if (f)
      result.replicates.push_back(std::move(*f));
    else
      ++result.dropped_count;
  }
  if (result.replicates.empty())
    throw EmptyData("bootstrap_rows: every replicate fit failed");
  return result;
}

std::vector<Point2> region_coordinates(const BootstrapResult& boot,
                                       std::size_t row) {
  if (boot.replicates.empty()) throw EmptyData("bootstrap result has no replicates");
  if (boot.replicates.front().cols() != 3)
    throw UnsupportedDimension(
        "ternary confidence regions require a 3-part outcome");
  if (row >= boot.replicates.front().rows())
    throw IndexError("region row index out of range");
  std::vector<Point2> pts;
  pts.reserve(boot.replicates.size());
  for (const auto& b : boot.replicates) pts.push_back(ternary_xy(b.row(row)));
  return hull_peel(pts, boot.region_level);
}

}  // namespace compreg
