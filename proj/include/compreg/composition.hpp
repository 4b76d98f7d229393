#ifndef COMPREG_COMPOSITION_HPP
#define COMPREG_COMPOSITION_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "compreg/errors.hpp"

namespace compreg {

// Sum tolerance for accepting a vector as a member of the simplex. Vectors
// within the tolerance are re-closed silently, beyond it rejected.
inline constexpr double kSimplexSumTol = 1e-9;

/// A point of the unit simplex. Parts are non-negative and sum to exactly
/// 1.0 after construction; boundary points (parts equal to 0 or 1) are valid.
class Composition {
 public:
  // Accepts a non-negative vector summing to 1 within kSimplexSumTol.
  explicit Composition(std::vector<double> parts);

  std::size_t dim() const { return parts_.size(); }
  double operator[](std::size_t k) const { return parts_[k]; }
  const std::vector<double>& parts() const { return parts_; }

  bool is_interior() const;
  bool is_vertex() const;

  // Vertex e_j of the D-simplex.
  static Composition vertex(std::size_t dim, std::size_t j);
  // Barycenter (1/D, ..., 1/D).
  static Composition barycenter(std::size_t dim);

  friend bool operator==(const Composition& a, const Composition& b) {
    return a.parts_ == b.parts_;
  }

 private:
  struct AlreadyClosed {};
  Composition(std::vector<double> parts, AlreadyClosed) : parts_(std::move(parts)) {}
  std::vector<double> parts_;

  friend Composition closure(std::vector<double> v);
  friend Composition pivot(const Composition& z, std::size_t l);
};

/// Normalizes a non-negative vector onto the simplex. The result's parts sum
/// to exactly 1.0: after dividing by the sum, any residual rounding (at most
/// one ulp) is folded into the largest part. A vector already summing to
/// exactly 1.0 is returned unchanged.
Composition closure(std::vector<double> v);

/// Kullback-Leibler divergence sum_k y_k log(y_k / mu_k) with the convention
/// 0 * log(0/.) = 0. Returns +infinity when mu_k = 0 for some k with y_k > 0.
double kld(const Composition& y, const Composition& mu);

/// Pivot-coordinate ILR transform; defined on the strict interior only.
std::vector<double> ilr(const Composition& z);

/// Inverse of ilr(); any real vector maps to a strictly interior composition.
Composition ilr_inverse(const std::vector<double>& coords);

/// Moves part `l` (0-based) to the front, keeping the rest in order.
Composition pivot(const Composition& z, std::size_t l);

/// Paired predictor/outcome rows. X rows share one dimension, Y rows another.
class CompositionDataset {
 public:
  // Omitting row_labels fills in 1-based row numbers.
  CompositionDataset(std::vector<Composition> x, std::vector<Composition> y,
                     std::vector<std::string> row_labels = {});

  std::size_t n() const { return x_.size(); }
  std::size_t ds() const { return x_.empty() ? 0 : x_.front().dim(); }
  std::size_t dr() const { return y_.empty() ? 0 : y_.front().dim(); }

  const Composition& x(std::size_t i) const { return x_[i]; }
  const Composition& y(std::size_t i) const { return y_[i]; }
  const std::vector<Composition>& xs() const { return x_; }
  const std::vector<Composition>& ys() const { return y_; }
  const std::vector<std::string>& row_labels() const { return labels_; }

  // Rows of X reordered by `perm` (Y left fixed). perm must be a permutation
  // of 0..n-1; used by the independence test.
  CompositionDataset with_x_permuted(const std::vector<std::size_t>& perm) const;

  // Case resample: rows (x_i, y_i) picked by `idx`, with repeats allowed.
  CompositionDataset resample(const std::vector<std::size_t>& idx) const;

  // Dataset without row i (for leave-one-out fits).
  CompositionDataset without_row(std::size_t i) const;

 private:
  std::vector<Composition> x_;
  std::vector<Composition> y_;
  std::vector<std::string> labels_;
};

}  // namespace compreg

#endif  // COMPREG_COMPOSITION_HPP
