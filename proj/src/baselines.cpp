#include "compreg/baselines.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "compreg/errors.hpp"

namespace compreg {

namespace {

void require_interior(const Composition& z, const char* what, std::size_t i) {
  if (!z.is_interior())
    throw BoundaryPoint(std::string(what) + " row " + std::to_string(i) +
                        " has a zero part; ilr-based models require strictly "
                        "interior compositions");
}

Eigen::VectorXd ilr_vec(const Composition& z) {
  const auto c = ilr(z);
  return Eigen::Map<const Eigen::VectorXd>(c.data(),
                                           static_cast<Eigen::Index>(c.size()));
}

}  // namespace

const IlrSubModel& IlrPivotModel::sub(std::size_t l1, std::size_t l2) const {
  if (l1 >= dr_ || l2 >= ds_) throw IndexError("ilr sub-model index out of range");
  return subs_[l1 * ds_ + l2];
}

double IlrPivotModel::beta11(std::size_t l1, std::size_t l2) const {
  // coef row 1 (first slope), column 0 (first outcome coordinate).
  return sub(l1, l2).coef[1 * (dr_ - 1) + 0];
}

IlrPivotModel fit_ilr_pivot(const CompositionDataset& data) {
  const std::size_t n = data.n(), ds = data.ds(), dr = data.dr();
  for (std::size_t i = 0; i < n; ++i) {
    require_interior(data.x(i), "predictor", i);
    require_interior(data.y(i), "outcome", i);
  }
  const std::size_t p = ds;  // intercept + (ds-1) ilr coordinates
  if (n <= p)
    throw RankDeficient("need more than " + std::to_string(p) +
                        " observations to fit the ilr regression");

  // Response blocks: one (n x (dr-1)) matrix per outcome pivot part.
  std::vector<Eigen::MatrixXd> resp(dr, Eigen::MatrixXd(n, dr - 1));
  for (std::size_t l1 = 0; l1 < dr; ++l1)
    for (std::size_t i = 0; i < n; ++i)
      resp[l1].row(static_cast<Eigen::Index>(i)) =
          ilr_vec(pivot(data.y(i), l1)).transpose();

  std::vector<IlrSubModel> subs(dr * ds);
  Eigen::MatrixXd design(n, p);
  for (std::size_t l2 = 0; l2 < ds; ++l2) {
    design.col(0).setOnes();
    for (std::size_t i = 0; i < n; ++i)
      design.row(static_cast<Eigen::Index>(i)).tail(ds - 1) =
          ilr_vec(pivot(data.x(i), l2)).transpose();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < static_cast<Eigen::Index>(p))
      throw RankDeficient("design matrix for predictor pivot part " +
                          std::to_string(l2) + " is rank deficient");
    for (std::size_t l1 = 0; l1 < dr; ++l1) {
      Eigen::MatrixXd coef = qr.solve(resp[l1]);
      Eigen::MatrixXd resid = resp[l1] - design * coef;
      IlrSubModel sub;
      // Eigen stores column-major; flatten to row-major for the struct.
      sub.coef.resize(p * (dr - 1));
      for (std::size_t r = 0; r < p; ++r)
        for (std::size_t c = 0; c < dr - 1; ++c)
          sub.coef[r * (dr - 1) + c] =
              coef(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      sub.resid_scale.resize(dr - 1);
      for (std::size_t c = 0; c < dr - 1; ++c)
        sub.resid_scale[c] = std::sqrt(
            resid.col(static_cast<Eigen::Index>(c)).squaredNorm() /
            static_cast<double>(n - p));
      subs[l1 * ds + l2] = std::move(sub);
    }
  }
  return IlrPivotModel(ds, dr, std::move(subs));
}

Composition predict_ilr(const IlrPivotModel& model, const Composition& x) {
  if (x.dim() != model.ds())
    throw DimMismatch("predict_ilr: predictor dimension mismatch");
  require_interior(x, "predictor", 0);
  const auto& sub = model.sub(0, 0);
  const auto u = ilr(x);
  const std::size_t dr1 = model.dr() - 1;
  std::vector<double> v(dr1);
  for (std::size_t c = 0; c < dr1; ++c) {
    double acc = sub.coef[0 * dr1 + c];
    for (std::size_t j = 0; j < u.size(); ++j)
      acc += sub.coef[(j + 1) * dr1 + c] * u[j];
    v[c] = acc;
  }
  return ilr_inverse(v);
}

double LogitQmlModel::beta(std::size_t k, std::size_t j) const {
  if (k >= dr_ - 1 || j >= ds_) throw IndexError("logit coefficient index out of range");
  return coef_[k * ds_ + j];
}

namespace {

// Multinomial quasi-log-likelihood sum_i sum_k y_ik log mu_ik at linear
// predictors eta (n x (dr-1)); the reference category has eta = 0.
double logit_qml_value(const Eigen::MatrixXd& eta, const Eigen::MatrixXd& y) {
  const Eigen::Index n = eta.rows(), km1 = eta.cols();
  double obj = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double mx = 0.0;
    for (Eigen::Index k = 0; k < km1; ++k) mx = std::max(mx, eta(i, k));
    double lse = std::exp(-mx);  // reference category term
    for (Eigen::Index k = 0; k < km1; ++k) lse += std::exp(eta(i, k) - mx);
    lse = mx + std::log(lse);
    for (Eigen::Index k = 0; k < km1; ++k)
      if (y(i, k) != 0.0) obj += y(i, k) * (eta(i, k) - lse);
    if (y(i, km1) != 0.0) obj += y(i, km1) * (0.0 - lse);
  }
  return obj;
}

void softmax_rows(const Eigen::MatrixXd& eta, Eigen::MatrixXd& mu) {
  const Eigen::Index n = eta.rows(), km1 = eta.cols();
  for (Eigen::Index i = 0; i < n; ++i) {
    double mx = 0.0;
    for (Eigen::Index k = 0; k < km1; ++k) mx = std::max(mx, eta(i, k));
    double denom = std::exp(-mx);
    for (Eigen::Index k = 0; k < km1; ++k) {
      mu(i, k) = std::exp(eta(i, k) - mx);
      denom += mu(i, k);
    }
    for (Eigen::Index k = 0; k < km1; ++k) mu(i, k) /= denom;
    mu(i, km1) = std::exp(-mx) / denom;
  }
}

}  // namespace

LogitQmlModel fit_logit_qml(const CompositionDataset& data,
                            std::size_t max_iter, double tol) {
  const std::size_t n = data.n(), ds = data.ds(), dr = data.dr();
  for (std::size_t i = 0; i < n; ++i) require_interior(data.x(i), "predictor", i);

  // Design (intercept + ilr coordinates) and outcome matrix.
  Eigen::MatrixXd z(n, ds);
  Eigen::MatrixXd y(n, dr);
  for (std::size_t i = 0; i < n; ++i) {
    z(static_cast<Eigen::Index>(i), 0) = 1.0;
    z.row(static_cast<Eigen::Index>(i)).tail(ds - 1) =
        ilr_vec(data.x(i)).transpose();
    for (std::size_t k = 0; k < dr; ++k)
      y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          data.y(i)[k];
  }

  const std::size_t km1 = dr - 1;
  const std::size_t npar = km1 * ds;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(npar);  // theta(k*ds + j)
  Eigen::MatrixXd eta(n, km1), mu(n, dr);
  Eigen::VectorXd grad(npar), step(npar);
  Eigen::MatrixXd neg_hess(npar, npar);

  auto compute_eta = [&](const Eigen::VectorXd& th) {
    for (std::size_t k = 0; k < km1; ++k)
      eta.col(static_cast<Eigen::Index>(k)) =
          z * th.segment(static_cast<Eigen::Index>(k * ds),
                         static_cast<Eigen::Index>(ds));
  };

  compute_eta(theta);
  double obj = logit_qml_value(eta, y);
  bool used_fallback = false;
  double grad_norm = 0.0;
  double prev_grad_norm = std::numeric_limits<double>::infinity();
  bool flat_step = false;
  std::size_t it = 0;

  for (; it < max_iter; ++it) {
    softmax_rows(eta, mu);
    for (std::size_t k = 0; k < km1; ++k)
      grad.segment(static_cast<Eigen::Index>(k * ds),
                   static_cast<Eigen::Index>(ds)) =
          z.transpose() *
          (y.col(static_cast<Eigen::Index>(k)) -
           mu.col(static_cast<Eigen::Index>(k)));
    grad_norm = grad.norm();
    if (grad_norm < tol) {
      return LogitQmlModel(ds, dr, {theta.data(), theta.data() + npar}, obj,
                           it, grad_norm, used_fallback);
    }
    // Once the objective saturates, Newton steps can still polish the
    // gradient; but when a flat step no longer shrinks it either, the
    // iteration is at its numerical floor and would otherwise cycle here
    // until max_iter.
    if (flat_step && grad_norm >= prev_grad_norm) {
      if (grad_norm < std::sqrt(tol))
        return LogitQmlModel(ds, dr, {theta.data(), theta.data() + npar}, obj,
                             it, grad_norm, used_fallback);
      throw ConvergenceFailure(
          "logit ascent stalled with the gradient above tolerance",
          {theta.data(), theta.data() + npar}, grad_norm);
    }
    prev_grad_norm = grad_norm;

    // Negative Hessian blocks: sum_i mu_ik (delta_kk' - mu_ik') z_i z_i'.
    for (std::size_t k = 0; k < km1; ++k) {
      for (std::size_t k2 = k; k2 < km1; ++k2) {
        Eigen::VectorXd w;
        if (k == k2)
          w = (mu.col(static_cast<Eigen::Index>(k)).array() *
               (1.0 - mu.col(static_cast<Eigen::Index>(k)).array()))
                  .matrix();
        else
          w = (-mu.col(static_cast<Eigen::Index>(k)).array() *
               mu.col(static_cast<Eigen::Index>(k2)).array())
                  .matrix();
        Eigen::MatrixXd block = z.transpose() * w.asDiagonal() * z;
        neg_hess.block(static_cast<Eigen::Index>(k * ds),
                       static_cast<Eigen::Index>(k2 * ds),
                       static_cast<Eigen::Index>(ds),
                       static_cast<Eigen::Index>(ds)) = block;
        if (k2 != k)
          neg_hess.block(static_cast<Eigen::Index>(k2 * ds),
                         static_cast<Eigen::Index>(k * ds),
                         static_cast<Eigen::Index>(ds),
                         static_cast<Eigen::Index>(ds)) = block.transpose();
      }
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(neg_hess);
    bool newton_ok = (ldlt.info() == Eigen::Success && ldlt.isPositive());
    if (newton_ok) {
      step = ldlt.solve(grad);
      if (!step.allFinite()) newton_ok = false;
    }
    if (!newton_ok) {
      // Singular or indefinite curvature: ascend along the gradient.
      used_fallback = true;
      step = grad / std::max(1.0, grad_norm);
    }

    double s = 1.0;
    double new_obj = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd cand;
    bool improved = false;
    for (int h = 0; h <= 30; ++h) {
      cand = theta + s * step;
      compute_eta(cand);
      new_obj = logit_qml_value(eta, y);
      if (new_obj >= obj) {
        improved = true;
        break;
      }
      s *= 0.5;
    }
    if (!improved) {
      // No uphill move found: numerically stationary. Accept if the gradient
      // is small at a looser scale, otherwise report failure.
      compute_eta(theta);
      if (grad_norm < std::sqrt(tol))
        return LogitQmlModel(ds, dr, {theta.data(), theta.data() + npar}, obj,
                             it, grad_norm, used_fallback);
      throw ConvergenceFailure("logit step-halving found no ascent direction",
                               {theta.data(), theta.data() + npar}, grad_norm);
    }
    flat_step = (new_obj == obj);
    theta = cand;
    obj = new_obj;
  }

  throw ConvergenceFailure("logit fit did not converge in " +
                               std::to_string(max_iter) + " iterations",
                           {theta.data(), theta.data() + npar}, grad_norm);
}

Composition predict_logit(const LogitQmlModel& model, const Composition& x) {
  if (x.dim() != model.ds())
    throw DimMismatch("predict_logit: predictor dimension mismatch");
  require_interior(x, "predictor", 0);
  const auto u = ilr(x);
  const std::size_t km1 = model.dr() - 1;
  std::vector<double> eta(km1 + 1, 0.0);
  for (std::size_t k = 0; k < km1; ++k) {
    double acc = model.beta(k, 0);
    for (std::size_t j = 0; j < u.size(); ++j) acc += model.beta(k, j + 1) * u[j];
    eta[k] = acc;
  }
  const double mx = *std::max_element(eta.begin(), eta.end());
  std::vector<double> ex(km1 + 1);
  for (std::size_t k = 0; k <= km1; ++k) ex[k] = std::exp(eta[k] - mx);
  return closure(std::move(ex));
}

}  // namespace compreg
