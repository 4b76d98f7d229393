#pragma once

#include <cstdint>
#include <vector>

#include "compreg/composition.hpp"
#include "compreg/em.hpp"
#include "compreg/ternary.hpp"
#include "compreg/transition.hpp"

namespace compreg {

/// Which fitted conditional-mean model supplies the alternative-hypothesis
/// quasi-likelihood in the independence test.
enum class ModelKind { direct, ilr, logit };

/// Arithmetic average of the observed outcomes: the conditional mean under
/// the independence null E[y|x] = mu.
Composition fit_null(const CompositionDataset& data);

/// Null quasi-log-likelihood sum_i sum_k y_ik log(mean_k).
double pll_h0(const CompositionDataset& data);

/// Quasi-log-likelihood ratio statistic lambda = PLL_HA - PLL_H0. For the
/// baseline kinds, PLL_HA evaluates the multinomial quasi-likelihood at the
/// baseline's predicted conditional means.
double lambda_statistic(const CompositionDataset& data,
                        const EmFitOptions& fit_opts = {},
                        ModelKind kind = ModelKind::direct);

struct IndependenceTestResult {
  double lambda_obs;
  std::vector<double> lambda_perm;
  double p_value;          // (1/B) sum 1[lambda_perm >= lambda_obs]; can be 0
  double p_value_add_one;  // (b+1)/(B+1), never 0
  std::size_t n_permutations;
  std::uint64_t seed;
};

/// Permutation test of global linear independence: permutes the rows of X
/// (observation labels) while Y stays fixed, refits, and compares statistics.
/// Deterministic given seed for any thread count.
IndependenceTestResult permutation_test(const CompositionDataset& data,
                                        std::size_t n_permutations,
                                        std::uint64_t seed,
                                        const EmFitOptions& fit_opts = {},
                                        ModelKind kind = ModelKind::direct,
                                        unsigned threads = 1);

struct BootstrapResult {
  std::vector<TransitionMatrix> replicates;
  std::size_t n_requested;
  std::size_t dropped_count;
  std::uint64_t seed;
  double region_level = 0.95;
};

/// Nonparametric pairs bootstrap of the direct fit: resample (x_i, y_i) rows
/// with replacement, refit, keep every B-hat. Failed replicates are dropped
/// and counted. Deterministic given seed for any thread count.
BootstrapResult bootstrap_rows(const CompositionDataset& data, std::size_t r,
                               std::uint64_t seed,
                               const EmFitOptions& fit_opts = {},
                               unsigned threads = 1);

/// Ternary coordinates of the peeled-hull confidence region for one row of B.
/// Requires a 3-part outcome.
std::vector<Point2> region_coordinates(const BootstrapResult& boot,
                                       std::size_t row);

}  // namespace compreg
