#ifndef COMPREG_TRANSITION_HPP
#define COMPREG_TRANSITION_HPP

#include <cstddef>
#include <vector>

#include "compreg/composition.hpp"

namespace compreg {

/// Row-stochastic coefficient matrix B (D_s rows, D_r columns). Every row is
/// a valid composition; entries are non-negative and each row sums to 1.
class TransitionMatrix {
 public:
  TransitionMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
  explicit TransitionMatrix(std::vector<Composition> rows);

  static TransitionMatrix uniform(std::size_t rows, std::size_t cols);
  static TransitionMatrix identity(std::size_t n);
  // Every row equal to mu (the linear-independence null model).
  static TransitionMatrix equal_rows(std::size_t rows, const Composition& mu);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double at(std::size_t j, std::size_t k) const { return data_[j * cols_ + k]; }
  Composition row(std::size_t j) const;
  const std::vector<double>& data() const { return data_; }

  double max_abs_diff(const TransitionMatrix& other) const;

  friend bool operator==(const TransitionMatrix& a, const TransitionMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;  // row-major
};

/// E[y | x] = B'x. Always a valid composition (a convex combination of the
/// rows of B), including when x is a vertex.
Composition predict(const TransitionMatrix& b, const Composition& x);

/// Expected change of E[y] when part j of x gains `delta` at the expense of
/// part k: delta * (B_j. - B_k.). Entries sum to zero.
std::vector<double> contrast(const TransitionMatrix& b, std::size_t j, std::size_t k,
                             double delta);

struct RowMergeResult {
  TransitionMatrix merged;
  bool rows_differed;    // inputs were not equal within tolerance
  double max_row_diff;   // largest entrywise gap between the merged rows
};

/// Replaces rows j1 and j2 by their plain average (placed at min(j1, j2)).
/// The identity that justifies the merge only holds for equal rows; the
/// result carries a warning flag when they differ by more than 1e-6.
RowMergeResult aggregate_predictor_rows(const TransitionMatrix& b, std::size_t j1,
                                        std::size_t j2);

/// Replaces columns k1 and k2 by their sum (placed at min(k1, k2)). Rows
/// remain row-stochastic; predictions from the merged matrix equal sums of
/// the corresponding components of the original predictions.
TransitionMatrix aggregate_outcome_cols(const TransitionMatrix& b, std::size_t k1,
                                        std::size_t k2);

}  // namespace compreg

#endif  // COMPREG_TRANSITION_HPP
