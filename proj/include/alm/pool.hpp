#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "alm/regress.hpp"

namespace alm {

// Per-feature affine map: normalized = (raw - offset) / scale.
struct Normalization {
  std::vector<double> offset;
  std::vector<double> scale;

  Vector apply(const Vector& raw) const;
  Vector invert(const Vector& normalized) const;
  Matrix apply_rows(const Matrix& raw) const;
};

// The analyst's view of the market: labelled rows, the unlabelled pool whose
// labels are hidden with the sellers, and an optional validation set.
// Feature matrices are normalized and carry the leading intercept column.
struct LabelledPool {
  DesignMatrix labelled_x;
  Vector labelled_y;
  DesignMatrix pool_x;
  Vector pool_y;  // hidden labels, revealed one at a time by the market
  std::vector<std::string> pool_ids;
  std::shared_ptr<const ValidationSet> validation;

  std::vector<std::string> feature_names;  // excludes the intercept
  Normalization normalization;
  // Set when labels were standardized: y_model = (y_raw - offset) / scale.
  std::optional<std::pair<double, double>> label_normalization;

  // Raw (un-normalized) pool features, used for seller-side quantities.
  Matrix pool_raw;

  // Source row indices of each part, for partition audits.
  std::vector<std::size_t> labelled_rows;
  std::vector<std::size_t> pool_rows;
  std::vector<std::size_t> validation_rows;

  Eigen::Index pool_size() const { return pool_x.rows(); }
};

}  // namespace alm
