#include <algorithm>
#include <cmath>
#include <numeric>

#include "alm/error.hpp"
#include "alm/experiments.hpp"

namespace alm {

namespace {

constexpr std::size_t kExactLimit = 25;

// Number of sign patterns per value of the doubled positive rank sum.
std::vector<double> null_counts(const std::vector<int>& doubled_ranks) {
  const int total = std::accumulate(doubled_ranks.begin(), doubled_ranks.end(), 0);
  std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
  counts[0] = 1.0;
  int reach = 0;
  for (int r : doubled_ranks) {
    reach += r;
    for (int s = reach; s >= r; --s) counts[static_cast<std::size_t>(s)] += counts[static_cast<std::size_t>(s - r)];
  }
  return counts;
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::LengthMismatch, "paired samples differ in length");
  if (x.empty()) throw Error(ErrorKind::EmptyInput, "no pairs");

  std::vector<double> diffs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (std::isnan(d)) throw Error(ErrorKind::InvalidArgument, "NaN difference");
    if (d != 0.0) diffs.push_back(d);
  }
  WilcoxonResult out;
  out.n_effective = diffs.size();
  if (diffs.empty()) return out;

  const std::size_t n = diffs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(diffs[a]) < std::abs(diffs[b]); });

  // Doubled average ranks stay integral: a tie block over positions i..j-1
  // (1-based i+1..j) has average rank (i+1+j)/2.
  std::vector<int> doubled(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && std::abs(diffs[order[j]]) == std::abs(diffs[order[i]])) ++j;
    for (std::size_t k = i; k < j; ++k) doubled[order[k]] = static_cast<int>(i + 1 + j);
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  int w_plus2 = 0;
  int total2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total2 += doubled[i];
    if (diffs[i] > 0.0) w_plus2 += doubled[i];
  }
  const int w2 = std::min(w_plus2, total2 - w_plus2);
  out.statistic = w2 / 2.0;

  const double nn = static_cast<double>(n);
  if (n <= kExactLimit) {
    const auto counts = null_counts(doubled);
    double tail = 0.0;
    for (int s = 0; s <= w2; ++s) tail += counts[static_cast<std::size_t>(s)];
    out.p_value = std::min(1.0, 2.0 * tail / std::ldexp(1.0, static_cast<int>(n)));
    out.exact = true;
    return out;
  }
  const double mean = nn * (nn + 1.0) / 4.0;
  const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
  const double z = std::min(0.0, (out.statistic - mean + 0.5) / std::sqrt(var));
  out.p_value = std::min(1.0, std::erfc(-z / std::sqrt(2.0)));
  out.exact = false;
  return out;
}

PairedComparison paired_comparison(std::span<const double> method, std::span<const double> baseline) {
  const WilcoxonResult w = wilcoxon_signed_rank(method, baseline);
  std::vector<double> delta(method.size());
  for (std::size_t i = 0; i < method.size(); ++i) delta[i] = method[i] - baseline[i];
  return {method.size(), w.statistic, w.p_value, percentile(delta, 0.5)};
}

double percentile(std::span<const double> values, double q) {
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "percentile of no values");
  if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorKind::InvalidArgument, "quantile outside [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace alm
