#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "alm/market.hpp"
#include "alm/pool.hpp"

namespace alm {

// Raw rows before staging: one feature row and one label per observation.
struct RawTable {
  std::vector<std::string> feature_names;
  Matrix features;
  Vector labels;
  std::vector<std::string> row_ids;

  Eigen::Index rows() const { return features.rows(); }
  // Column index of a feature, or throws SchemaMismatch.
  Eigen::Index feature_index(const std::string& name) const;
};

// Real-estate valuation CSV. Columns are located by (case-insensitive) name
// fragments: "transaction date", "house age", "distance to the nearest MRT",
// "convenience stores" and "price of unit area". Feature names in the result
// are transaction_date, house_age, mrt_distance, convenience_stores.
RawTable load_real_estate(std::istream& in);
RawTable load_real_estate(const std::string& path);

// Hourly series for an analyst building and a seller building. Empty cells
// become NaN; rows are assumed to be consecutive hours in file order.
struct EnergySeries {
  std::vector<std::string> timestamps;
  std::vector<double> analyst;
  std::vector<double> seller;
};

EnergySeries load_energy(std::istream& in, const std::string& analyst_column,
                         const std::string& seller_column);
EnergySeries load_energy(const std::string& path, const std::string& analyst_column,
                         const std::string& seller_column);

struct LagSpec {
  // Offsets in hours, strictly decreasing.
  std::vector<int> lags{168, 144, 120, 96, 72, 48, 24};
};

struct LagSamples {
  Matrix features;                 // row i: (s[t-lag_0], ..., s[t-lag_k])
  Vector labels;                   // s[t]
  std::vector<std::size_t> times;  // t of each sample
};

// One sample per t >= max lag. With skip_nonfinite, samples touching a
// non-finite value are dropped; otherwise a non-finite value is an error.
LagSamples build_lag_samples(std::span<const double> series, const LagSpec& spec,
                             bool skip_nonfinite = false);

struct SplitSpec {
  std::size_t k_init = 30;
  std::size_t pool_size = 100;
  double val_fraction = 0.0;
  bool standardize_labels = false;
};

// Seeded shuffle, then labelled / pool / validation partition (validation is
// taken from the tail of the shuffled order). Features are standardized with
// the mean and population std of the labelled and pool rows; an intercept
// column is prepended.
LabelledPool split_pool(const RawTable& table, const SplitSpec& spec, std::uint64_t seed);

struct EnergySplitSpec {
  std::size_t k_init = 100;
  std::size_t pool_size = 300;
  double val_fraction = 0.2;  // last share of analyst samples, chronological
};

// Analyst lag samples form the labelled set (seeded draw from the training
// window) and the validation set (chronological tail). The pool is a seeded
// draw of the seller's samples that precede the validation window.
LabelledPool stage_energy(const EnergySeries& series, const LagSpec& lags,
                          const EnergySplitSpec& spec, std::uint64_t seed);

struct WtsModel {
  enum class Kind { Synthetic, Uniform };
  Kind kind = Kind::Uniform;
  double d0 = 0.0;
  double d1 = 0.0;
  std::string driver;       // feature name (Synthetic)
  double driver_min = 0.0;  // observed range over the full dataset
  double driver_max = 0.0;
  double value = 0.0;  // Uniform
  double scale = 1.0;  // multiplies every willingness to sell

  // Takes [min, max] of the driver over every row of `full`.
  static WtsModel synthetic(double d0, double d1, const std::string& driver, const RawTable& full);
  static WtsModel uniform(double value);
};

// eta_j = d0 + d1 * (1 - (x_j - min) / (max - min)) or a constant, times scale.
std::vector<double> synth_wts(const Matrix& pool_raw, const std::vector<std::string>& feature_names,
                              const WtsModel& model);

// Offers aligned with the pool rows of `data`.
std::vector<SellerOffer> make_offers(const LabelledPool& data, const WtsModel& model);

// Seeded surrogate datasets that follow the published schemas: a 414-row
// real-estate valuation table and two years of hourly consumption for an
// analyst building ("Rachael") and a seller building ("Madge").
void write_real_estate_surrogate(std::ostream& out, std::uint64_t seed, std::size_t rows = 414);
void write_energy_surrogate(std::ostream& out, std::uint64_t seed, std::size_t hours = 17544);

}  // namespace alm
