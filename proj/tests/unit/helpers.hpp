#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "alm/data.hpp"
#include "alm/regress.hpp"

namespace alm::test {

inline Matrix row_major(const std::vector<double>& values, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = values[static_cast<std::size_t>(r * cols + c)];
  }
  return m;
}

inline Vector vec(const std::vector<double>& values) {
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

// Gaussian design with a leading intercept column.
inline Matrix random_design(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal;
  Matrix x(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    x(r, 0) = 1.0;
    for (Eigen::Index c = 1; c < cols; ++c) x(r, c) = normal(rng);
  }
  return x;
}

inline Vector random_labels(std::mt19937_64& rng, const Matrix& x, double noise = 1.0) {
  std::normal_distribution<double> normal;
  Vector beta(x.cols());
  for (auto& b : beta) b = normal(rng);
  Vector y = x * beta;
  for (auto& v : y) v += noise * normal(rng);
  return y;
}

// A small staged pool built directly, bypassing the loaders.
inline LabelledPool make_pool(std::uint64_t seed, Eigen::Index k, Eigen::Index pool, Eigen::Index cols) {
  std::mt19937_64 rng(seed);
  LabelledPool p;
  p.labelled_x = random_design(rng, k, cols);
  p.pool_x = random_design(rng, pool, cols);
  Matrix all(k + pool, cols);
  all << p.labelled_x, p.pool_x;
  const Vector y = random_labels(rng, all, 0.5);
  p.labelled_y = y.head(k);
  p.pool_y = y.tail(pool);
  p.pool_raw = p.pool_x.rightCols(cols - 1);
  for (Eigen::Index i = 0; i < pool; ++i) p.pool_ids.push_back("s" + std::to_string(i));
  for (Eigen::Index c = 1; c < cols; ++c) p.feature_names.push_back("f" + std::to_string(c));
  return p;
}

inline std::string real_estate_csv(std::uint64_t seed, std::size_t rows = 414) {
  std::ostringstream out;
  write_real_estate_surrogate(out, seed, rows);
  return out.str();
}

}  // namespace alm::test
