#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "alm/regress.hpp"

namespace alm {

enum class Strategy { VBAL, QBCAL, RSC };

struct CandidateScore {
  Eigen::Index pool_index = 0;
  // Unset for random selection.
  std::optional<double> score;
};

struct CommitteeSpec {
  int size = 10;
  double bootstrap_fraction = 1.0;
  std::uint64_t seed = 0;
};

// x' A x for A = info_inverse.
double upv_score(const Matrix& info_inverse, const Vector& x);

// Greedy G-optimality: argmax of UPV over pool rows, ties to the lowest index.
CandidateScore select_vbal(const FitState& fit, const DesignMatrix& pool);

// Committee predictions for every pool row (members x pool). Exposed for tests
// and diagnostics; select_qbc is built on it.
Matrix committee_predictions(const DesignMatrix& labelled_x, const Vector& labelled_y,
                             const DesignMatrix& pool, const CommitteeSpec& spec);

// Population variance (divisor M) of each column of a members x pool matrix.
Vector committee_variance(const Matrix& predictions);

// Bootstrap query-by-committee. Throws DegenerateCommittee when no member can be
// trained, EmptyPool on an empty pool.
CandidateScore select_qbc(const DesignMatrix& labelled_x, const Vector& labelled_y,
                          const DesignMatrix& pool, const CommitteeSpec& spec);

// Uniform pick over pool rows, deterministic in `seed`.
CandidateScore select_rsc(const DesignMatrix& pool, std::uint64_t seed);

}  // namespace alm
