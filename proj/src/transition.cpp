#include "compreg/transition.hpp"

#include <algorithm>
#include <cmath>

namespace compreg {

TransitionMatrix::TransitionMatrix(std::size_t rows, std::size_t cols,
                                   std::vector<double> row_major)
    : rows_(rows), cols_(cols) {
  if (rows == 0 || cols == 0) throw DimMismatch("transition matrix must be non-empty");
  if (row_major.size() != rows * cols)
    throw DimMismatch("transition matrix data size does not match shape");
  data_.reserve(rows * cols);
  for (std::size_t j = 0; j < rows; ++j) {
    // Route each row through Composition to validate and pin the row sum.
    Composition r(std::vector<double>(row_major.begin() + j * cols,
                                      row_major.begin() + (j + 1) * cols));
    data_.insert(data_.end(), r.parts().begin(), r.parts().end());
  }
}

TransitionMatrix::TransitionMatrix(std::vector<Composition> rows) {
  if (rows.empty()) throw DimMismatch("transition matrix must be non-empty");
  rows_ = rows.size();
  cols_ = rows.front().dim();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.dim() != cols_)
      throw DimMismatch("transition matrix rows have mixed dimensions");
    data_.insert(data_.end(), r.parts().begin(), r.parts().end());
  }
}

TransitionMatrix TransitionMatrix::uniform(std::size_t rows, std::size_t cols) {
  std::vector<Composition> r(rows, Composition::barycenter(cols));
  return TransitionMatrix(std::move(r));
}

TransitionMatrix TransitionMatrix::identity(std::size_t n) {
  std::vector<Composition> r;
  r.reserve(n);
  for (std::size_t j = 0; j < n; ++j) r.push_back(Composition::vertex(n, j));
  return TransitionMatrix(std::move(r));
}

TransitionMatrix TransitionMatrix::equal_rows(std::size_t rows, const Composition& mu) {
  std::vector<Composition> r(rows, mu);
  return TransitionMatrix(std::move(r));
}

Composition TransitionMatrix::row(std::size_t j) const {
  if (j >= rows_) throw IndexError("row index out of range");
  return Composition(std::vector<double>(data_.begin() + j * cols_,
                                         data_.begin() + (j + 1) * cols_));
}

double TransitionMatrix::max_abs_diff(const TransitionMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw DimMismatch("transition matrices have different shapes");
  double m = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i)
    m = std::max(m, std::abs(data_[i] - other.data_[i]));
  return m;
}

Composition predict(const TransitionMatrix& b, const Composition& x) {
  if (x.dim() != b.rows())
    throw DimMismatch("predict: x dimension differs from matrix rows");
  std::vector<double> out(b.cols(), 0.0);
  for (std::size_t k = 0; k < b.cols(); ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < b.rows(); ++j) acc += x[j] * b.at(j, k);
    out[k] = acc;
  }
  return Composition(std::move(out));
}

std::vector<double> contrast(const TransitionMatrix& b, std::size_t j, std::size_t k,
                             double delta) {
  if (j >= b.rows() || k >= b.rows()) throw IndexError("contrast row index out of range");
  if (!(delta > 0.0 && delta <= 1.0))
    throw InvalidArgument("contrast delta must lie in (0, 1]");
  std::vector<double> out(b.cols());
  for (std::size_t c = 0; c < b.cols(); ++c) out[c] = delta * (b.at(j, c) - b.at(k, c));
  return out;
}

RowMergeResult aggregate_predictor_rows(const TransitionMatrix& b, std::size_t j1,
                                        std::size_t j2) {
  if (j1 >= b.rows() || j2 >= b.rows()) throw IndexError("row index out of range");
  if (j1 == j2) throw IndexError("rows to merge must be distinct");
  if (b.rows() < 2) throw DimMismatch("cannot merge rows of a single-row matrix");
  const std::size_t lo = std::min(j1, j2), hi = std::max(j1, j2);
  double max_diff = 0.0;
  for (std::size_t c = 0; c < b.cols(); ++c)
    max_diff = std::max(max_diff, std::abs(b.at(j1, c) - b.at(j2, c)));
  std::vector<Composition> rows;
  rows.reserve(b.rows() - 1);
  for (std::size_t j = 0; j < b.rows(); ++j) {
    if (j == hi) continue;
    if (j == lo) {
      std::vector<double> avg(b.cols());
      for (std::size_t c = 0; c < b.cols(); ++c)
        avg[c] = 0.5 * (b.at(j1, c) + b.at(j2, c));
      rows.emplace_back(std::move(avg));
    } else {
      rows.push_back(b.row(j));
    }
  }
  return RowMergeResult{TransitionMatrix(std::move(rows)), max_diff > 1e-6, max_diff};
}

TransitionMatrix aggregate_outcome_cols(const TransitionMatrix& b, std::size_t k1,
                                        std::size_t k2) {
  if (k1 >= b.cols() || k2 >= b.cols()) throw IndexError("column index out of range");
  if (k1 == k2) throw IndexError("columns to merge must be distinct");
  if (b.cols() < 2) throw DimMismatch("cannot merge columns of a single-column matrix");
  const std::size_t lo = std::min(k1, k2), hi = std::max(k1, k2);
  std::vector<Composition> rows;
  rows.reserve(b.rows());
  for (std::size_t j = 0; j < b.rows(); ++j) {
    std::vector<double> r;
    r.reserve(b.cols() - 1);
    for (std::size_t c = 0; c < b.cols(); ++c) {
      if (c == hi) continue;
      r.push_back(c == lo ? b.at(j, k1) + b.at(j, k2) : b.at(j, c));
    }
    rows.emplace_back(std::move(r));
  }
  return TransitionMatrix(std::move(rows));
}

}  // namespace compreg
