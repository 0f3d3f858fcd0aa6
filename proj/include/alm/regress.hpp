#pragma once

#include <Eigen/Dense>
#include <memory>

namespace alm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Rows are observations, columns are features. An intercept, when wanted, is an
// explicit leading column of ones supplied by the caller.
using DesignMatrix = Matrix;

// When X'X is ill-conditioned (or rows < cols) the fit uses (X'X + lambda I)
// with lambda = relative_lambda * trace(X'X) / cols.
struct RidgePolicy {
  double condition_limit = 1e10;
  double relative_lambda = 1e-6;
};

// Closed-form least-squares fit. Immutable once built; carries the sufficient
// statistics (X'X, X'y, y'y, n) so that adding an observation is an exact refit.
class FitState {
 public:
  const Vector& beta() const noexcept { return beta_; }
  // (X'X + lambda I)^-1
  const Matrix& info_inverse() const noexcept { return info_inverse_; }
  // RSS / (rows - cols) when rows > cols, otherwise 0 (see sigma2_defined()).
  double sigma2_hat() const noexcept { return sigma2_hat_; }
  bool sigma2_defined() const noexcept { return rows_ > dim(); }
  double ridge_lambda() const noexcept { return ridge_lambda_; }

  Eigen::Index rows() const noexcept { return rows_; }
  Eigen::Index dim() const noexcept { return beta_.size(); }

  const Matrix& gram() const noexcept { return gram_; }
  const Vector& xty() const noexcept { return xty_; }
  double yty() const noexcept { return yty_; }
  const RidgePolicy& ridge_policy() const noexcept { return policy_; }

  double predict(const Eigen::Ref<const Vector>& x) const { return x.dot(beta_); }

  // Builds a fit from accumulated moments. Throws InvalidArgument when the
  // (regularized) information matrix is not positive definite.
  static FitState from_moments(Matrix gram, Vector xty, double yty, Eigen::Index rows,
                               const RidgePolicy& policy = {});

 private:
  FitState() = default;

  Vector beta_;
  Matrix info_inverse_;
  double sigma2_hat_ = 0.0;
  double ridge_lambda_ = 0.0;
  Matrix gram_;
  Vector xty_;
  double yty_ = 0.0;
  Eigen::Index rows_ = 0;
  RidgePolicy policy_;
};

FitState ols_fit(const DesignMatrix& x, const Vector& y, const RidgePolicy& policy = {});

// Same result as ols_fit on the data with (x_new, y_new) appended.
FitState rank_one_refit(const FitState& fit, const Vector& x_new, double y_new);

// trace(info_inverse) * sigma2. The caller supplies the (frozen) variance.
double param_variance_loss(const FitState& fit, double sigma2);

// (1/N) sum_k (y_k - x_k' beta)^2
double validation_mse(const FitState& fit, const DesignMatrix& x_val, const Vector& y_val);

enum class LossKind { ParamVariance, ValidationMse };

struct ValidationSet {
  DesignMatrix x;
  Vector y;
};

// Which loss the market optimizes. ValidationMse requires a non-empty set.
struct LossSpec {
  LossKind kind = LossKind::ParamVariance;
  std::shared_ptr<const ValidationSet> validation;

  static LossSpec param_variance() { return {}; }
  static LossSpec validation_mse(std::shared_ptr<const ValidationSet> set);
};

// The multiplier used for ParamVariance when sigma2 is fixed at market start:
// sigma2_hat when defined, otherwise 1 (loss reduces to pure design geometry).
double frozen_sigma2(const FitState& fit);

double evaluate_loss(const LossSpec& spec, const FitState& fit, double sigma2);

}  // namespace alm
