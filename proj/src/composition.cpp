#include "compreg/composition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "unit_sum.hpp"

namespace compreg {

namespace {

void fix_sum(std::vector<double>& p) { detail::pin_unit_sum(p.data(), p.size()); }

}  // namespace

Composition::Composition(std::vector<double> parts) {
  if (parts.empty()) throw DegenerateInput("composition must have at least one part");
  double sum = 0.0;
  for (double p : parts) {
    if (std::isnan(p)) throw ParseError("composition part is NaN");
    if (p < 0.0) throw NegativeInput("composition part is negative");
    sum += p;
  }
  if (sum == 0.0) throw DegenerateInput("composition parts are all zero");
  if (std::abs(sum - 1.0) > kSimplexSumTol)
    throw DegenerateInput("composition parts sum to " + std::to_string(sum) +
                          ", outside tolerance of 1");
  if (sum != 1.0) {
    for (double& p : parts) p /= sum;
    fix_sum(parts);
  }
  parts_ = std::move(parts);
}

bool Composition::is_interior() const {
  return std::all_of(parts_.begin(), parts_.end(), [](double p) { return p > 0.0; });
}

bool Composition::is_vertex() const {
  return std::any_of(parts_.begin(), parts_.end(), [](double p) { return p == 1.0; });
}

Composition Composition::vertex(std::size_t dim, std::size_t j) {
  if (j >= dim) throw IndexError("vertex index out of range");
  std::vector<double> p(dim, 0.0);
  p[j] = 1.0;
  return Composition(std::move(p), AlreadyClosed{});
}

Composition Composition::barycenter(std::size_t dim) {
  if (dim == 0) throw DegenerateInput("composition must have at least one part");
  std::vector<double> p(dim, 1.0 / static_cast<double>(dim));
  fix_sum(p);
  return Composition(std::move(p), AlreadyClosed{});
}

Composition closure(std::vector<double> v) {
  if (v.empty()) throw DegenerateInput("cannot close an empty vector");
  double sum = 0.0;
  for (double p : v) {
    if (std::isnan(p)) throw ParseError("cannot close a vector containing NaN");
    if (p < 0.0) throw NegativeInput("cannot close a vector with negative entries");
    sum += p;
  }
  if (sum == 0.0) throw DegenerateInput("cannot close the all-zero vector");
  if (sum != 1.0) {
    for (double& p : v) p /= sum;
    fix_sum(v);
  }
  return Composition(std::move(v), Composition::AlreadyClosed{});
}

double kld(const Composition& y, const Composition& mu) {
  if (y.dim() != mu.dim()) throw DimMismatch("kld: dimensions differ");
  double acc = 0.0;
  for (std::size_t k = 0; k < y.dim(); ++k) {
    if (y[k] == 0.0) continue;
    if (mu[k] == 0.0) return std::numeric_limits<double>::infinity();
    acc += y[k] * std::log(y[k] / mu[k]);
  }
  return acc < 0.0 ? 0.0 : acc;  // clamp roundoff on the identity case
}

std::vector<double> ilr(const Composition& z) {
  if (!z.is_interior())
    throw BoundaryPoint("ilr is undefined for compositions with zero parts");
  const std::size_t d = z.dim();
  std::vector<double> logz(d);
  for (std::size_t k = 0; k < d; ++k) logz[k] = std::log(z[k]);
  // Suffix sums of log parts give the log geometric means of the tails.
  std::vector<double> out(d - 1);
  double tail = 0.0;
  for (std::size_t k = d; k-- > 1;) tail += logz[k];
  for (std::size_t j = 0; j < d - 1; ++j) {
    const double m = static_cast<double>(d - 1 - j);  // parts after j
    out[j] = std::sqrt(m / (m + 1.0)) * (logz[j] - tail / m);
    tail -= logz[j + 1];
  }
  return out;
}

Composition ilr_inverse(const std::vector<double>& coords) {
  const std::size_t d = coords.size() + 1;
  if (d < 2) throw DimMismatch("ilr_inverse needs at least one coordinate");
  // Reconstruct log-scale values from the orthonormal pivot basis, then close.
  std::vector<double> logz(d, 0.0);
  for (std::size_t j = 0; j < d - 1; ++j) {
    const double m = static_cast<double>(d - 1 - j);
    const double s = std::sqrt(m / (m + 1.0));
    logz[j] += s * coords[j];
    const double off = -s / m * coords[j];
    for (std::size_t k = j + 1; k < d; ++k) logz[k] += off;
  }
  const double mx = *std::max_element(logz.begin(), logz.end());
  std::vector<double> z(d);
  for (std::size_t k = 0; k < d; ++k) z[k] = std::exp(logz[k] - mx);
  return closure(std::move(z));
}

Composition pivot(const Composition& z, std::size_t l) {
  if (l >= z.dim()) throw IndexError("pivot index out of range");
  // A pure permutation; no renormalization, so the multiset of parts is
  // preserved bit for bit.
  std::vector<double> p;
  p.reserve(z.dim());
  p.push_back(z[l]);
  for (std::size_t k = 0; k < z.dim(); ++k)
    if (k != l) p.push_back(z[k]);
  return Composition(std::move(p), Composition::AlreadyClosed{});
}

CompositionDataset::CompositionDataset(std::vector<Composition> x,
                                       std::vector<Composition> y,
                                       std::vector<std::string> row_labels)
    : x_(std::move(x)), y_(std::move(y)), labels_(std::move(row_labels)) {
  if (x_.size() != y_.size())
    throw DimMismatch("dataset: predictor and outcome row counts differ");
  if (x_.empty()) throw EmptyData("dataset has no rows");
  for (const auto& r : x_)
    if (r.dim() != x_.front().dim())
      throw DimMismatch("dataset: predictor rows have mixed dimensions");
  for (const auto& r : y_)
    if (r.dim() != y_.front().dim())
      throw DimMismatch("dataset: outcome rows have mixed dimensions");
  if (!labels_.empty() && labels_.size() != x_.size())
    throw DimMismatch("dataset: row label count differs from row count");
  if (labels_.empty()) {
    labels_.reserve(x_.size());
    for (std::size_t i = 0; i < x_.size(); ++i)
      labels_.push_back(std::to_string(i + 1));
  }
}

CompositionDataset CompositionDataset::with_x_permuted(
    const std::vector<std::size_t>& perm) const {
  if (perm.size() != n()) throw DimMismatch("permutation length differs from n");
  std::vector<bool> seen(n(), false);
  for (std::size_t p : perm) {
    if (p >= n() || seen[p])
      throw InvalidArgument("with_x_permuted: not a permutation of 0..n-1");
    seen[p] = true;
  }
  std::vector<Composition> px;
  px.reserve(n());
  for (std::size_t i = 0; i < n(); ++i) px.push_back(x_[perm[i]]);
  return CompositionDataset(std::move(px), y_, labels_);
}

CompositionDataset CompositionDataset::resample(
    const std::vector<std::size_t>& idx) const {
  std::vector<Composition> rx, ry;
  std::vector<std::string> rl;
  rx.reserve(idx.size());
  ry.reserve(idx.size());
  rl.reserve(idx.size());
  for (std::size_t i : idx) {
    if (i >= n()) throw IndexError("resample index out of range");
    rx.push_back(x_[i]);
    ry.push_back(y_[i]);
    rl.push_back(labels_[i]);
  }
  return CompositionDataset(std::move(rx), std::move(ry), std::move(rl));
}

CompositionDataset CompositionDataset::without_row(std::size_t drop) const {
  if (drop >= n()) throw IndexError("row index out of range");
  if (n() < 2) throw EmptyData("cannot drop the only row");
  std::vector<Composition> rx, ry;
  std::vector<std::string> rl;
  rx.reserve(n() - 1);
  ry.reserve(n() - 1);
  rl.reserve(n() - 1);
  for (std::size_t i = 0; i < n(); ++i) {
    if (i == drop) continue;
    rx.push_back(x_[i]);
    ry.push_back(y_[i]);
    rl.push_back(labels_[i]);
  }
  return CompositionDataset(std::move(rx), std::move(ry), std::move(rl));
}

}  // namespace compreg
