#pragma once

#include <cstddef>
#include <vector>

#include "compreg/composition.hpp"

namespace compreg {

/// One least-squares fit of all ilr(y) coordinates on [1, ilr(x)] for a fixed
/// pair of pivot parts. coef is (ds x (dr-1)) with row 0 the intercepts and
/// row 1+j the slope on ilr coordinate j of the pivoted predictor.
struct IlrSubModel {
  std::vector<double> coef;         // row-major, ds rows x (dr-1) cols
  std::vector<double> resid_scale;  // per outcome coordinate, sqrt(RSS/(N-p))
};

/// Pivot-coordinate OLS: one sub-model per (outcome pivot, predictor pivot)
/// pair. Each sub-model regresses the pivoted outcome's ilr coordinates on an
/// intercept plus the pivoted predictor's ilr coordinates.
class IlrPivotModel {
 public:
  IlrPivotModel(std::size_t ds, std::size_t dr, std::vector<IlrSubModel> subs)
      : ds_(ds), dr_(dr), subs_(std::move(subs)) {}

  std::size_t ds() const { return ds_; }
  std::size_t dr() const { return dr_; }

  /// Sub-model for outcome pivot part l1 and predictor pivot part l2
  /// (0-based part indices).
  const IlrSubModel& sub(std::size_t l1, std::size_t l2) const;

  /// Headline slope: effect of the pivoted predictor part's first ilr
  /// coordinate on the pivoted outcome part's first ilr coordinate.
  double beta11(std::size_t l1, std::size_t l2) const;

 private:
  std::size_t ds_, dr_;
  std::vector<IlrSubModel> subs_;  // index l1 * ds_ + l2
};

IlrPivotModel fit_ilr_pivot(const CompositionDataset& data);

/// Plug-in conditional mean: ilr_inverse of the (0,0) sub-model's fitted
/// linear predictor at ilr(x).
Composition predict_ilr(const IlrPivotModel& model, const Composition& x);

/// Multinomial-logit quasi-maximum-likelihood fit on z = ilr(x): softmax mean
/// with the last outcome category as the zero-coefficient reference.
class LogitQmlModel {
 public:
  LogitQmlModel(std::size_t ds, std::size_t dr, std::vector<double> coef,
                double final_qml, std::size_t iterations, double gradient_norm,
                bool used_gradient_fallback)
      : ds_(ds),
        dr_(dr),
        coef_(std::move(coef)),
        final_qml_(final_qml),
        iterations_(iterations),
        gradient_norm_(gradient_norm),
        used_gradient_fallback_(used_gradient_fallback) {}

  std::size_t ds() const { return ds_; }
  std::size_t dr() const { return dr_; }

  /// beta(k, j): coefficient on regressor j (0 = intercept, then ilr(x)
  /// coordinates) for outcome category k in 0..dr-2.
  double beta(std::size_t k, std::size_t j) const;

  double final_qml() const { return final_qml_; }
  std::size_t iterations() const { return iterations_; }
  double gradient_norm() const { return gradient_norm_; }
  bool used_gradient_fallback() const { return used_gradient_fallback_; }

 private:
  std::size_t ds_, dr_;
  std::vector<double> coef_;  // (dr-1) rows x ds cols, row-major
  double final_qml_;
  std::size_t iterations_;
  double gradient_norm_;
  bool used_gradient_fallback_;
};

LogitQmlModel fit_logit_qml(const CompositionDataset& data,
                            std::size_t max_iter = 200, double tol = 1e-8);

/// Softmax mean at z = ilr(x); always strictly interior.
Composition predict_logit(const LogitQmlModel& model, const Composition& x);

}  // namespace compreg
