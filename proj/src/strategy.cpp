#include "alm/strategy.hpp"

#include <cmath>
#include <limits>

#include "alm/error.hpp"
#include "alm/rng.hpp"

namespace alm {

namespace {

CandidateScore argmax_lowest(const Vector& scores) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return {best, scores[best]};
}

}  // namespace

double upv_score(const Matrix& info_inverse, const Vector& x) {
  if (info_inverse.rows() != x.size() || info_inverse.cols() != x.size()) {
    throw Error(ErrorKind::DimensionMismatch, "upv_score dimensions disagree");
  }
  return std::max(0.0, x.dot(info_inverse * x));
}

CandidateScore select_vbal(const FitState& fit, const DesignMatrix& pool) {
  if (pool.rows() == 0) throw Error(ErrorKind::EmptyPool, "VBAL selection over an empty pool");
  if (pool.cols() != fit.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "pool columns differ from the fit dimension");
  }
  Vector scores(pool.rows());
  for (Eigen::Index i = 0; i < pool.rows(); ++i) {
    scores[i] = upv_score(fit.info_inverse(), pool.row(i).transpose());
  }
  return argmax_lowest(scores);
}

Matrix committee_predictions(const DesignMatrix& labelled_x, const Vector& labelled_y,
                             const DesignMatrix& pool, const CommitteeSpec& spec) {
  if (spec.size < 2) throw Error(ErrorKind::InvalidArgument, "committee needs at least two members");
  if (!(spec.bootstrap_fraction > 0.0 && spec.bootstrap_fraction <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "bootstrap fraction must lie in (0, 1]");
  }
  const Eigen::Index n = labelled_x.rows();
  if (n < 2) throw Error(ErrorKind::DegenerateCommittee, "fewer than two labelled rows");
  const auto draws = static_cast<Eigen::Index>(
      std::ceil(spec.bootstrap_fraction * static_cast<double>(n) - 1e-12));

  Matrix predictions(spec.size, pool.rows());
  int trained = 0;
  for (int m = 0; m < spec.size; ++m) {
    // Per-member stream: results do not depend on member evaluation order.
    Rng rng = make_rng(spec.seed, "bootstrap-member", static_cast<std::uint64_t>(m));
    DesignMatrix xs(draws, labelled_x.cols());
    Vector ys(draws);
    for (Eigen::Index r = 0; r < draws; ++r) {
      const auto pick = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::size_t>(n)));
      xs.row(r) = labelled_x.row(pick);
      ys[r] = labelled_y[pick];
    }
    try {
      // ols_fit already falls back to ridge for rank-deficient resamples.
      const FitState member = ols_fit(xs, ys);
      predictions.row(m) = (pool * member.beta()).transpose();
      ++trained;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InvalidArgument) throw;
      predictions.row(m).setConstant(std::numeric_limits<double>::quiet_NaN());
    }
  }
  if (trained == 0) throw Error(ErrorKind::DegenerateCommittee, "no committee member could be trained");
  if (trained < spec.size) {
    // Drop untrainable members.
    Matrix kept(trained, pool.rows());
    int k = 0;
    for (int m = 0; m < spec.size; ++m) {
      if (predictions.row(m).allFinite()) kept.row(k++) = predictions.row(m);
    }
    return kept;
  }
  return predictions;
}

Vector committee_variance(const Matrix& predictions) {
  const double members = static_cast<double>(predictions.rows());
  const Vector mean = predictions.colwise().sum().transpose() / members;
  Vector var(predictions.cols());
  for (Eigen::Index j = 0; j < predictions.cols(); ++j) {
    var[j] = (predictions.col(j).array() - mean[j]).square().sum() / members;
    // Members that agree up to solver round-off count as zero disagreement.
    constexpr double kNoise = 1e-10;
    if (var[j] <= kNoise * kNoise * (1.0 + mean[j] * mean[j])) var[j] = 0.0;
  }
  return var;
}

CandidateScore select_qbc(const DesignMatrix& labelled_x, const Vector& labelled_y,
                          const DesignMatrix& pool, const CommitteeSpec& spec) {
  if (pool.rows() == 0) throw Error(ErrorKind::EmptyPool, "QBC selection over an empty pool");
  if (labelled_y.size() != labelled_x.rows() || pool.cols() != labelled_x.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "labelled set and pool disagree");
  }
  return argmax_lowest(committee_variance(committee_predictions(labelled_x, labelled_y, pool, spec)));
}

CandidateScore select_rsc(const DesignMatrix& pool, std::uint64_t seed) {
  if (pool.rows() == 0) throw Error(ErrorKind::EmptyPool, "random selection over an empty pool");
  Rng rng(seed);
  return {static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::size_t>(pool.rows()))),
          std::nullopt};
}

}  // namespace alm
