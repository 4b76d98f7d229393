#ifndef COMPREG_EM_HPP
#define COMPREG_EM_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "compreg/composition.hpp"
#include "compreg/transition.hpp"

namespace compreg {

/// Log-quasi-multinomial likelihood sum_i sum_k y_ik log(sum_j B_jk x_ij).
/// Terms with y_ik = 0 contribute nothing; a zero mean component with
/// positive y_ik yields the -infinity sentinel.
double quasi_loglik(const TransitionMatrix& b, const CompositionDataset& data);

/// Responsibility weights, indexed (i, j, k): the conditional probability
/// that part j of x_i generated outcome component k under the current B.
struct EmWeights {
  std::size_t n = 0, ds = 0, dr = 0;
  std::vector<double> values;  // n * ds * dr, i-major then j then k

  double at(std::size_t i, std::size_t j, std::size_t k) const {
    return values[(i * ds + j) * dr + k];
  }
  double& at(std::size_t i, std::size_t j, std::size_t k) {
    return values[(i * ds + j) * dr + k];
  }
};

/// E-step: pi_ijk = x_ij B_jk / sum_j' x_ij' B_j'k. For (i, k) cells with
/// y_ik = 0 and a vanishing denominator the weights fall back to x_i (they
/// are unused by the M-step); a vanishing denominator with y_ik > 0 is a
/// support violation.
EmWeights em_e_step(const TransitionMatrix& b, const CompositionDataset& data);

/// M-step: B_jk = sum_i y_ik pi_ijk / sum_k' sum_i y_ik' pi_ijk'. Rows sum
/// to 1 by construction. A row whose denominator vanishes is starved
/// (unidentifiable) and raises RowStarvation with the offending row.
TransitionMatrix em_m_step(const EmWeights& weights, const CompositionDataset& data);

struct EmFitOptions {
  double tol = 1e-10;
  std::size_t max_iter = 10000;
  // With tracking on, fitting stops when successive objective values differ
  // by less than tol and the full objective trace is recorded. With tracking
  // off, the stopping rule is max parameter change < tol and the trace holds
  // only the final objective; this skips one log() per observation component
  // per iteration, which matters inside permutation loops.
  bool track_objective = true;
  std::optional<TransitionMatrix> init;  // default: uniform (all entries 1/D_r)
};

struct FitResult {
  TransitionMatrix b_hat;
  double final_objective = 0.0;
  std::size_t iterations = 0;  // number of M-step updates performed
  bool converged = false;
  std::vector<double> objective_trace;     // monotone non-decreasing
  std::vector<std::size_t> starved_rows;   // rows left at their initial value
};

/// Fits E[y|x] = B'x by EM on the multinomial quasi-likelihood.
FitResult fit(const CompositionDataset& data, const EmFitOptions& opts = {});

}  // namespace compreg

#endif  // COMPREG_EM_HPP
