#include "alm/data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>

#include "alm/csv.hpp"
#include "alm/error.hpp"
#include "alm/rng.hpp"

namespace alm {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

long find_column(const csv::Table& table, const std::string& fragment) {
  const std::string needle = lower(fragment);
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (lower(table.header[i]).find(needle) != std::string::npos) return static_cast<long>(i);
  }
  return -1;
}

// Fisher-Yates with the library's portable bounded draw.
std::vector<std::size_t> shuffled(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
  return order;
}

Normalization fit_normalization(const Matrix& rows) {
  Normalization norm;
  const auto n = static_cast<double>(rows.rows());
  for (Eigen::Index c = 0; c < rows.cols(); ++c) {
    const double mean = rows.col(c).sum() / n;
    const double var = (rows.col(c).array() - mean).square().sum() / n;
    const double sd = std::sqrt(var);
    norm.offset.push_back(mean);
    norm.scale.push_back(sd > 0.0 ? sd : 1.0);
  }
  return norm;
}

DesignMatrix with_intercept(const Matrix& normalized) {
  DesignMatrix out(normalized.rows(), normalized.cols() + 1);
  out.col(0).setOnes();
  out.rightCols(normalized.cols()) = normalized;
  return out;
}

Matrix take_rows(const Matrix& m, const std::vector<std::size_t>& idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

Vector take(const Vector& v, const std::vector<std::size_t>& idx) {
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[static_cast<Eigen::Index>(idx[i])];
  return out;
}

// Fills the normalized parts of a LabelledPool from raw labelled / pool /
// validation rows.
void assemble(LabelledPool& out, const Matrix& lab_raw, const Vector& lab_y, const Matrix& pool_raw,
              const Vector& pool_y, const Matrix& val_raw, const Vector& val_y,
              bool standardize_labels) {
  Matrix both(lab_raw.rows() + pool_raw.rows(), lab_raw.cols());
  both.topRows(lab_raw.rows()) = lab_raw;
  both.bottomRows(pool_raw.rows()) = pool_raw;
  out.normalization = fit_normalization(both);

  double y_offset = 0.0;
  double y_scale = 1.0;
  if (standardize_labels) {
    // Analyst-side statistics only: hidden labels never leak into the scale.
    const double n = static_cast<double>(lab_y.size());
    y_offset = lab_y.sum() / n;
    const double sd = std::sqrt((lab_y.array() - y_offset).square().sum() / n);
    y_scale = sd > 0.0 ? sd : 1.0;
    out.label_normalization = std::make_pair(y_offset, y_scale);
  }
  auto ys = [&](const Vector& y) -> Vector { return (y.array() - y_offset) / y_scale; };

  out.labelled_x = with_intercept(out.normalization.apply_rows(lab_raw));
  out.labelled_y = ys(lab_y);
  out.pool_x = with_intercept(out.normalization.apply_rows(pool_raw));
  out.pool_y = ys(pool_y);
  out.pool_raw = pool_raw;
  if (val_raw.rows() > 0) {
    auto set = std::make_shared<ValidationSet>();
    set->x = with_intercept(out.normalization.apply_rows(val_raw));
    set->y = ys(val_y);
    out.validation = std::move(set);
  }
}

}  // namespace

Vector Normalization::apply(const Vector& raw) const {
  Vector out(raw.size());
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    out[i] = (raw[i] - offset[static_cast<std::size_t>(i)]) / scale[static_cast<std::size_t>(i)];
  }
  return out;
}

Vector Normalization::invert(const Vector& normalized) const {
  Vector out(normalized.size());
  for (Eigen::Index i = 0; i < normalized.size(); ++i) {
    out[i] = normalized[i] * scale[static_cast<std::size_t>(i)] + offset[static_cast<std::size_t>(i)];
  }
  return out;
}

Matrix Normalization::apply_rows(const Matrix& raw) const {
  Matrix out(raw.rows(), raw.cols());
  for (Eigen::Index r = 0; r < raw.rows(); ++r) out.row(r) = apply(raw.row(r).transpose()).transpose();
  return out;
}

Eigen::Index RawTable::feature_index(const std::string& name) const {
  for (std::size_t i = 0; i < feature_names.size(); ++i) {
    if (feature_names[i] == name) return static_cast<Eigen::Index>(i);
  }
  throw Error(ErrorKind::SchemaMismatch, "no feature named '" + name + "'");
}

RawTable load_real_estate(std::istream& in) {
  const csv::Table table = csv::read(in);
  struct Wanted {
    const char* fragment;
    const char* name;
  };
  static constexpr Wanted kFeatures[] = {{"transaction date", "transaction_date"},
                                         {"house age", "house_age"},
                                         {"distance to the nearest mrt", "mrt_distance"},
                                         {"convenience stores", "convenience_stores"}};
  std::vector<long> cols;
  std::string missing;
  for (const auto& w : kFeatures) {
    cols.push_back(find_column(table, w.fragment));
    if (cols.back() < 0) missing += std::string(missing.empty() ? "" : ", ") + w.fragment;
  }
  const long label_col = find_column(table, "price of unit area");
  if (label_col < 0) missing += std::string(missing.empty() ? "" : ", ") + "price of unit area";
  if (!missing.empty()) throw Error(ErrorKind::SchemaMismatch, "missing columns: " + missing);
  const long id_col = table.find("No");

  RawTable raw;
  for (const auto& w : kFeatures) raw.feature_names.emplace_back(w.name);
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  raw.features.resize(n, static_cast<Eigen::Index>(cols.size()));
  raw.labels.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = table.rows[static_cast<std::size_t>(r)];
    try {
      for (std::size_t c = 0; c < cols.size(); ++c) {
        raw.features(r, static_cast<Eigen::Index>(c)) = csv::parse_real(row[static_cast<std::size_t>(cols[c])]);
      }
      raw.labels[r] = csv::parse_real(row[static_cast<std::size_t>(label_col)]);
    } catch (const Error& e) {
      throw Error(ErrorKind::ParseError,
                  "row " + std::to_string(table.line_numbers[static_cast<std::size_t>(r)]) + ": " + e.what());
    }
    raw.row_ids.push_back("re-" + (id_col >= 0 ? row[static_cast<std::size_t>(id_col)] : std::to_string(r + 1)));
  }
  if (n == 0) throw Error(ErrorKind::ParseError, "real-estate file has a header but no rows");
  if (!raw.features.allFinite() || !raw.labels.allFinite()) {
    throw Error(ErrorKind::ParseError, "non-finite value in real-estate data");
  }
  return raw;
}

RawTable load_real_estate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  return load_real_estate(in);
}

EnergySeries load_energy(std::istream& in, const std::string& analyst_column,
                         const std::string& seller_column) {
  const csv::Table table = csv::read(in);
  const long ts = table.find("timestamp");
  const long a = table.find(analyst_column);
  const long s = table.find(seller_column);
  std::string missing;
  if (ts < 0) missing += "timestamp ";
  if (a < 0) missing += analyst_column + " ";
  if (s < 0) missing += seller_column;
  if (!missing.empty()) throw Error(ErrorKind::SchemaMismatch, "missing columns: " + missing);
  if (table.rows.empty()) throw Error(ErrorKind::ParseError, "energy file has no rows");

  EnergySeries out;
  auto cell = [&](const std::vector<std::string>& row, long col, std::size_t line) {
    const std::string& text = row[static_cast<std::size_t>(col)];
    if (text.empty() || text == "NA" || text == "nan") return std::nan("");
    try {
      return csv::parse_real(text);
    } catch (const Error& e) {
      throw Error(ErrorKind::ParseError, "row " + std::to_string(line) + ": " + e.what());
    }
  };
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    out.timestamps.push_back(row[static_cast<std::size_t>(ts)]);
    out.analyst.push_back(cell(row, a, table.line_numbers[r]));
    out.seller.push_back(cell(row, s, table.line_numbers[r]));
  }
  return out;
}

EnergySeries load_energy(const std::string& path, const std::string& analyst_column,
                         const std::string& seller_column) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  return load_energy(in, analyst_column, seller_column);
}

LagSamples build_lag_samples(std::span<const double> series, const LagSpec& spec,
                             bool skip_nonfinite) {
  if (spec.lags.empty()) throw Error(ErrorKind::InvalidArgument, "no lags given");
  for (std::size_t i = 0; i < spec.lags.size(); ++i) {
    if (spec.lags[i] <= 0 || (i > 0 && spec.lags[i] >= spec.lags[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "lags must be positive and strictly decreasing");
    }
  }
  const auto max_lag = static_cast<std::size_t>(spec.lags.front());
  if (series.size() <= max_lag) {
    throw Error(ErrorKind::SeriesTooShort, "series of length " + std::to_string(series.size()) +
                                               " needs more than " + std::to_string(max_lag) + " points");
  }
  const auto width = static_cast<Eigen::Index>(spec.lags.size());
  std::vector<double> buffer;
  LagSamples out;
  for (std::size_t t = max_lag; t < series.size(); ++t) {
    bool finite = std::isfinite(series[t]);
    for (int lag : spec.lags) finite = finite && std::isfinite(series[t - static_cast<std::size_t>(lag)]);
    if (!finite) {
      if (skip_nonfinite) continue;
      throw Error(ErrorKind::InvalidArgument, "non-finite value near t=" + std::to_string(t));
    }
    for (int lag : spec.lags) buffer.push_back(series[t - static_cast<std::size_t>(lag)]);
    buffer.push_back(series[t]);
    out.times.push_back(t);
  }
  const auto n = static_cast<Eigen::Index>(out.times.size());
  out.features.resize(n, width);
  out.labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t base = static_cast<std::size_t>(i * (width + 1));
    for (Eigen::Index c = 0; c < width; ++c) out.features(i, c) = buffer[base + static_cast<std::size_t>(c)];
    out.labels[i] = buffer[base + static_cast<std::size_t>(width)];
  }
  return out;
}

LabelledPool split_pool(const RawTable& table, const SplitSpec& spec, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(table.rows());
  const auto n_val = static_cast<std::size_t>(std::llround(spec.val_fraction * static_cast<double>(n)));
  if (spec.k_init < 1) throw Error(ErrorKind::SizeConflict, "k_init must be at least 1");
  if (spec.val_fraction < 0.0 || spec.val_fraction >= 1.0 || spec.k_init + spec.pool_size + n_val > n) {
    throw Error(ErrorKind::SizeConflict, "k_init + pool_size + validation exceed " + std::to_string(n) + " rows");
  }
  Rng rng = make_rng(seed, "split");
  const auto order = shuffled(n, rng);

  LabelledPool out;
  out.feature_names = table.feature_names;
  out.labelled_rows.assign(order.begin(), order.begin() + static_cast<long>(spec.k_init));
  out.pool_rows.assign(order.begin() + static_cast<long>(spec.k_init),
                       order.begin() + static_cast<long>(spec.k_init + spec.pool_size));
  out.validation_rows.assign(order.end() - static_cast<long>(n_val), order.end());
  for (std::size_t r : out.pool_rows) out.pool_ids.push_back(table.row_ids[r]);

  assemble(out, take_rows(table.features, out.labelled_rows), take(table.labels, out.labelled_rows),
           take_rows(table.features, out.pool_rows), take(table.labels, out.pool_rows),
           take_rows(table.features, out.validation_rows), take(table.labels, out.validation_rows),
           spec.standardize_labels);
  return out;
}

LabelledPool stage_energy(const EnergySeries& series, const LagSpec& lags,
                          const EnergySplitSpec& spec, std::uint64_t seed) {
  const LagSamples analyst = build_lag_samples(series.analyst, lags, true);
  const LagSamples seller = build_lag_samples(series.seller, lags, true);
  const auto n = static_cast<std::size_t>(analyst.labels.size());
  const auto n_val = static_cast<std::size_t>(std::llround(spec.val_fraction * static_cast<double>(n)));
  if (n_val == 0 || spec.k_init < 1 || spec.k_init > n - n_val) {
    throw Error(ErrorKind::SizeConflict, "analyst series cannot supply k_init and a validation window");
  }
  const std::size_t train_end = n - n_val;
  const std::size_t val_start_time = analyst.times[train_end];

  std::vector<std::size_t> seller_candidates;
  for (std::size_t i = 0; i < seller.times.size(); ++i) {
    if (seller.times[i] < val_start_time) seller_candidates.push_back(i);
  }
  if (spec.pool_size > seller_candidates.size()) {
    throw Error(ErrorKind::SizeConflict, "seller series has fewer than pool_size samples before validation");
  }

  Rng lab_rng = make_rng(seed, "split-labelled");
  auto lab_order = shuffled(train_end, lab_rng);
  std::vector<std::size_t> lab_idx(lab_order.begin(), lab_order.begin() + static_cast<long>(spec.k_init));
  std::sort(lab_idx.begin(), lab_idx.end());

  Rng pool_rng = make_rng(seed, "split-pool");
  auto pool_order = shuffled(seller_candidates.size(), pool_rng);
  std::vector<std::size_t> pool_idx;
  for (std::size_t i = 0; i < spec.pool_size; ++i) pool_idx.push_back(seller_candidates[pool_order[i]]);
  std::sort(pool_idx.begin(), pool_idx.end());

  std::vector<std::size_t> val_idx(n_val);
  std::iota(val_idx.begin(), val_idx.end(), train_end);

  LabelledPool out;
  for (int lag : lags.lags) out.feature_names.push_back("lag_" + std::to_string(lag));
  for (std::size_t i : lab_idx) out.labelled_rows.push_back(analyst.times[i]);
  for (std::size_t i : val_idx) out.validation_rows.push_back(analyst.times[i]);
  for (std::size_t i : pool_idx) {
    out.pool_rows.push_back(seller.times[i]);
    const std::string& stamp = seller.times[i] < series.timestamps.size()
                                   ? series.timestamps[seller.times[i]]
                                   : std::to_string(seller.times[i]);
    out.pool_ids.push_back("seller@" + stamp);
  }
  assemble(out, take_rows(analyst.features, lab_idx), take(analyst.labels, lab_idx),
           take_rows(seller.features, pool_idx), take(seller.labels, pool_idx),
           take_rows(analyst.features, val_idx), take(analyst.labels, val_idx), false);
  return out;
}

WtsModel WtsModel::synthetic(double d0, double d1, const std::string& driver, const RawTable& full) {
  WtsModel m;
  m.kind = Kind::Synthetic;
  m.d0 = d0;
  m.d1 = d1;
  m.driver = driver;
  const auto col = full.features.col(full.feature_index(driver));
  m.driver_min = col.minCoeff();
  m.driver_max = col.maxCoeff();
  return m;
}

WtsModel WtsModel::uniform(double value) {
  WtsModel m;
  m.kind = Kind::Uniform;
  m.value = value;
  return m;
}

std::vector<double> synth_wts(const Matrix& pool_raw, const std::vector<std::string>& feature_names,
                              const WtsModel& model) {
  std::vector<double> out(static_cast<std::size_t>(pool_raw.rows()));
  if (model.kind == WtsModel::Kind::Uniform) {
    std::fill(out.begin(), out.end(), model.value * model.scale);
    return out;
  }
  const auto it = std::find(feature_names.begin(), feature_names.end(), model.driver);
  if (it == feature_names.end()) {
    throw Error(ErrorKind::SchemaMismatch, "WTS driver '" + model.driver + "' is not a feature");
  }
  const double range = model.driver_max - model.driver_min;
  if (!(range > 0.0)) throw Error(ErrorKind::DegenerateRange, "WTS driver has no spread");
  const auto col = static_cast<Eigen::Index>(it - feature_names.begin());
  for (Eigen::Index r = 0; r < pool_raw.rows(); ++r) {
    const double u = (pool_raw(r, col) - model.driver_min) / range;
    out[static_cast<std::size_t>(r)] = (model.d0 + model.d1 * (1.0 - u)) * model.scale;
  }
  return out;
}

std::vector<SellerOffer> make_offers(const LabelledPool& data, const WtsModel& model) {
  const auto wts = synth_wts(data.pool_raw, data.feature_names, model);
  std::vector<SellerOffer> offers;
  offers.reserve(wts.size());
  for (std::size_t i = 0; i < wts.size(); ++i) offers.push_back({data.pool_ids[i], wts[i]});
  return offers;
}

}  // namespace alm
