#include "compreg/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "unit_sum.hpp"

namespace compreg {

namespace {

struct FlatData {
  std::size_t n, ds, dr;
  std::vector<double> x;  // n * ds
  std::vector<double> y;  // n * dr
};

FlatData flatten(const CompositionDataset& data) {
  FlatData f{data.n(), data.ds(), data.dr(), {}, {}};
  f.x.reserve(f.n * f.ds);
  f.y.reserve(f.n * f.dr);
  for (std::size_t i = 0; i < f.n; ++i) {
    const auto& xp = data.x(i).parts();
    const auto& yp = data.y(i).parts();
    f.x.insert(f.x.end(), xp.begin(), xp.end());
    f.y.insert(f.y.end(), yp.begin(), yp.end());
  }
  return f;
}

// Divides a row by its sum and pins the total to exactly 1.0 (the same pin
// the Composition constructor applies, so rebuilding a TransitionMatrix from
// these rows leaves every bit unchanged).
void normalize_row(double* row, std::size_t len, double rowsum) {
  for (std::size_t k = 0; k < len; ++k) row[k] /= rowsum;
  detail::pin_unit_sum(row, len);
}

// One pass over the data at the current B: accumulates the M-step numerators
// sum_i y_ik pi_ijk into `numer` (ds x dr, zeroed here) and, when requested,
// the objective sum_i sum_k y_ik log(denom_ik). Throws SupportError if a
// positive-weight cell has a vanishing mean.
double em_pass(const FlatData& d, const std::vector<double>& b,
               std::vector<double>& numer, bool want_objective) {
  std::fill(numer.begin(), numer.end(), 0.0);
  double obj = 0.0;
  for (std::size_t i = 0; i < d.n; ++i) {
    const double* xi = &d.x[i * d.ds];
    const double* yi = &d.y[i * d.dr];
    for (std::size_t k = 0; k < d.dr; ++k) {
      const double yik = yi[k];
      if (yik == 0.0) continue;
      double denom = 0.0;
      for (std::size_t j = 0; j < d.ds; ++j) denom += xi[j] * b[j * d.dr + k];
      if (denom <= 0.0)
        throw SupportError("mean component " + std::to_string(k) +
                           " vanished for observation " + std::to_string(i) +
                           " while its outcome weight is positive");
      if (want_objective) obj += yik * std::log(denom);
      const double inv = 1.0 / denom;
      for (std::size_t j = 0; j < d.ds; ++j)
        numer[j * d.dr + k] += yik * (xi[j] * b[j * d.dr + k] * inv);
    }
  }
  return obj;
}

// Applies the closed-form M-step in place. Starved rows (zero denominator)
// are left unchanged and reported.
void em_update(std::vector<double>& b, const std::vector<double>& numer,
               std::size_t ds, std::size_t dr, std::set<std::size_t>& starved) {
  std::vector<double> row(dr);
  for (std::size_t j = 0; j < ds; ++j) {
    double rowsum = 0.0;
    for (std::size_t k = 0; k < dr; ++k) rowsum += numer[j * dr + k];
    if (rowsum == 0.0) {
      starved.insert(j);
      continue;
    }
    std::copy_n(&numer[j * dr], dr, b.begin() + j * dr);
    normalize_row(&b[j * dr], dr, rowsum);
  }
}

}  // namespace

double quasi_loglik(const TransitionMatrix& b, const CompositionDataset& data) {
  if (b.rows() != data.ds() || b.cols() != data.dr())
    throw DimMismatch("quasi_loglik: matrix shape does not match data");
  double obj = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto& xi = data.x(i).parts();
    const auto& yi = data.y(i).parts();
    for (std::size_t k = 0; k < data.dr(); ++k) {
      if (yi[k] == 0.0) continue;
      double denom = 0.0;
      for (std::size_t j = 0; j < data.ds(); ++j) denom += xi[j] * b.at(j, k);
      if (denom <= 0.0) return -std::numeric_limits<double>::infinity();
      obj += yi[k] * std::log(denom);
    }
  }
  return obj;
}

EmWeights em_e_step(const TransitionMatrix& b, const CompositionDataset& data) {
  if (b.rows() != data.ds() || b.cols() != data.dr())
    throw DimMismatch("em_e_step: matrix shape does not match data");
  const std::size_t n = data.n(), ds = data.ds(), dr = data.dr();
  EmWeights w{n, ds, dr, std::vector<double>(n * ds * dr, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto& xi = data.x(i).parts();
    const auto& yi = data.y(i).parts();
    for (std::size_t k = 0; k < dr; ++k) {
      double denom = 0.0;
      for (std::size_t j = 0; j < ds; ++j) denom += xi[j] * b.at(j, k);
      if (denom <= 0.0) {
        if (yi[k] > 0.0)
          throw SupportError("e-step denominator vanished for observation " +
                             std::to_string(i) + ", outcome component " +
                             std::to_string(k));
        // Unused by the M-step; x_i itself is a valid weight vector.
        for (std::size_t j = 0; j < ds; ++j) w.at(i, j, k) = xi[j];
        continue;
      }
      const double inv = 1.0 / denom;
      for (std::size_t j = 0; j < ds; ++j)
        w.at(i, j, k) = xi[j] * b.at(j, k) * inv;
    }
  }
  return w;
}

TransitionMatrix em_m_step(const EmWeights& weights, const CompositionDataset& data) {
  const std::size_t n = data.n(), ds = data.ds(), dr = data.dr();
  if (weights.n != n || weights.ds != ds || weights.dr != dr)
    throw DimMismatch("em_m_step: weight shape does not match data");
  std::vector<double> numer(ds * dr, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& yi = data.y(i).parts();
    for (std::size_t k = 0; k < dr; ++k) {
      const double yik = yi[k];
      if (yik == 0.0) continue;
      for (std::size_t j = 0; j < ds; ++j)
        numer[j * dr + k] += yik * weights.at(i, j, k);
    }
  }
  std::vector<double> b(ds * dr);
  for (std::size_t j = 0; j < ds; ++j) {
    double rowsum = 0.0;
    for (std::size_t k = 0; k < dr; ++k) rowsum += numer[j * dr + k];
    if (rowsum == 0.0)
      throw RowStarvation(j, "m-step denominator vanished for predictor row " +
                                 std::to_string(j));
    std::copy_n(&numer[j * dr], dr, b.begin() + j * dr);
    normalize_row(&b[j * dr], dr, rowsum);
  }
  return TransitionMatrix(ds, dr, std::move(b));
}

FitResult fit(const CompositionDataset& data, const EmFitOptions& opts) {
  const FlatData d = flatten(data);
  std::vector<double> b;
  if (opts.init) {
    if (opts.init->rows() != d.ds || opts.init->cols() != d.dr)
      throw DimMismatch("fit: init matrix shape does not match data");
    b = opts.init->data();
  } else {
    b = TransitionMatrix::uniform(d.ds, d.dr).data();
  }

  std::vector<double> numer(d.ds * d.dr);
  std::set<std::size_t> starved;
  std::vector<double> trace;
  bool converged = false;
  std::size_t updates = 0;

  if (opts.track_objective) {
    trace.push_back(em_pass(d, b, numer, true));
    std::vector<double> prev_b = b;
    while (updates < opts.max_iter) {
      prev_b = b;
      em_update(b, numer, d.ds, d.dr, starved);
      ++updates;
      trace.push_back(em_pass(d, b, numer, true));
      double param_change = 0.0;
      for (std::size_t t = 0; t < b.size(); ++t)
        param_change = std::max(param_change, std::abs(b[t] - prev_b[t]));
      if (std::abs(trace[trace.size() - 1] - trace[trace.size() - 2]) < opts.tol ||
          param_change < opts.tol) {
        converged = true;
        break;
      }
    }
  } else {
    std::vector<double> prev_b(b.size());
    while (updates < opts.max_iter) {
      em_pass(d, b, numer, false);
      prev_b = b;
      em_update(b, numer, d.ds, d.dr, starved);
      ++updates;
      double param_change = 0.0;
      for (std::size_t t = 0; t < b.size(); ++t)
        param_change = std::max(param_change, std::abs(b[t] - prev_b[t]));
      if (param_change < opts.tol) {
        converged = true;
        break;
      }
    }
    trace.push_back(em_pass(d, b, numer, true));
  }

  FitResult result{TransitionMatrix(d.ds, d.dr, std::move(b)),
                   trace.back(),
                   updates,
                   converged,
                   std::move(trace),
                   {starved.begin(), starved.end()}};
  return result;
}

}  // namespace compreg
