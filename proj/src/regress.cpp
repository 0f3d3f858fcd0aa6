#include "alm/regress.hpp"

#include <cmath>
#include <limits>

#include "alm/error.hpp"

namespace alm {

namespace {

double condition_estimate(const Matrix& gram) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace

FitState FitState::from_moments(Matrix gram, Vector xty, double yty, Eigen::Index rows,
                                const RidgePolicy& policy) {
  const Eigen::Index p = gram.rows();
  if (p < 1 || gram.cols() != p || xty.size() != p) {
    throw Error(ErrorKind::DimensionMismatch, "moment dimensions disagree");
  }

  double lambda = 0.0;
  if (rows < p || condition_estimate(gram) > policy.condition_limit) {
    lambda = policy.relative_lambda * gram.trace() / static_cast<double>(p);
  }

  Matrix regularized = gram;
  regularized.diagonal().array() += lambda;
  Eigen::LLT<Matrix> llt(regularized);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidArgument, "information matrix is singular even with ridge");
  }

  FitState fit;
  fit.beta_ = llt.solve(xty);
  fit.info_inverse_ = llt.solve(Matrix::Identity(p, p));
  // Symmetrize away solver round-off.
  fit.info_inverse_ = 0.5 * (fit.info_inverse_ + fit.info_inverse_.transpose()).eval();
  fit.ridge_lambda_ = lambda;
  fit.rows_ = rows;
  fit.policy_ = policy;

  if (rows > p) {
    const double rss = yty - 2.0 * fit.beta_.dot(xty) + fit.beta_.dot(gram * fit.beta_);
    fit.sigma2_hat_ = std::max(0.0, rss) / static_cast<double>(rows - p);
  }

  fit.gram_ = std::move(gram);
  fit.xty_ = std::move(xty);
  fit.yty_ = yty;
  return fit;
}

FitState ols_fit(const DesignMatrix& x, const Vector& y, const RidgePolicy& policy) {
  if (x.rows() == 0) throw Error(ErrorKind::EmptyDesign, "design matrix has no rows");
  if (y.size() != x.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "label count differs from design rows");
  }
  if (x.cols() < 1) throw Error(ErrorKind::DimensionMismatch, "design matrix has no columns");
  if (!x.allFinite() || !y.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "non-finite entry in design or labels");
  }
  Matrix gram = x.transpose() * x;
  Vector xty = x.transpose() * y;
  return FitState::from_moments(std::move(gram), std::move(xty), y.squaredNorm(), x.rows(),
                                policy);
}

FitState rank_one_refit(const FitState& fit, const Vector& x_new, double y_new) {
  if (x_new.size() != fit.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "new row has the wrong dimension");
  }
  Matrix gram = fit.gram();
  gram.selfadjointView<Eigen::Lower>().rankUpdate(x_new);
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  Vector xty = fit.xty() + y_new * x_new;
  return FitState::from_moments(std::move(gram), std::move(xty), fit.yty() + y_new * y_new,
                                fit.rows() + 1, fit.ridge_policy());
}

double param_variance_loss(const FitState& fit, double sigma2) {
  return fit.info_inverse().trace() * sigma2;
}

double validation_mse(const FitState& fit, const DesignMatrix& x_val, const Vector& y_val) {
  if (x_val.cols() != fit.dim() || y_val.size() != x_val.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "validation set does not match the fit");
  }
  if (x_val.rows() == 0) throw Error(ErrorKind::EmptyInput, "validation set is empty");
  return (y_val - x_val * fit.beta()).squaredNorm() / static_cast<double>(x_val.rows());
}

LossSpec LossSpec::validation_mse(std::shared_ptr<const ValidationSet> set) {
  if (!set || set->x.rows() == 0) {
    throw Error(ErrorKind::EmptyInput, "validation loss needs a non-empty validation set");
  }
  return {LossKind::ValidationMse, std::move(set)};
}

double frozen_sigma2(const FitState& fit) {
  return fit.sigma2_defined() ? fit.sigma2_hat() : 1.0;
}

double evaluate_loss(const LossSpec& spec, const FitState& fit, double sigma2) {
  switch (spec.kind) {
    case LossKind::ParamVariance:
      return param_variance_loss(fit, sigma2);
    case LossKind::ValidationMse:
      return validation_mse(fit, spec.validation->x, spec.validation->y);
  }
  return 0.0;
}

}  // namespace alm
