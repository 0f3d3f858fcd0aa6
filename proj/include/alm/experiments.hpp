#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "alm/data.hpp"
#include "alm/market.hpp"

namespace alm {

struct WilcoxonResult {
  double statistic = 0.0;  // min(W+, W-)
  double p_value = 1.0;    // two-sided
  std::size_t n_effective = 0;  // pairs with a nonzero difference
  bool exact = true;
};

// Zero differences are dropped, tied |d| get average ranks. Exact null
// distribution for n_effective <= 25, tie-corrected normal approximation with
// continuity correction above that.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y);

struct PairedComparison {
  std::size_t n = 0;
  double statistic = 0.0;
  double p_value = 1.0;
  double median_delta = 0.0;  // median of (method - baseline)
};

PairedComparison paired_comparison(std::span<const double> method, std::span<const double> baseline);

// Linear interpolation between closest ranks: h = (n - 1) q.
double percentile(std::span<const double> values, double q);

// A dataset plus the rules that turn a seed into one market instance.
struct Scenario {
  enum class Kind { RealEstate, Energy };
  Kind kind = Kind::RealEstate;
  RawTable table;  // RealEstate
  SplitSpec split;
  EnergySeries series;  // Energy
  LagSpec lags;
  EnergySplitSpec energy_split;
  WtsModel wts;
};

struct StagedMarket {
  LabelledPool data;
  std::vector<SellerOffer> offers;
  LossSpec loss;  // parameter variance (real estate) or validation MSE (energy)
};

StagedMarket stage(const Scenario& scenario, std::uint64_t split_seed);

enum class SweepParameter { None, WTP, WtsScale, Budget };

std::string_view to_string(SweepParameter parameter);
SweepParameter parse_sweep_parameter(std::string_view text);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::None;
  std::vector<double> values{0.0};  // ignored entries when parameter is None
  MarketConfig base_config;
  std::size_t replications = 1;
  // Fresh split per replication; otherwise every replication reuses the split
  // of replication 0 and only the market streams differ.
  bool resample = true;
  std::vector<Strategy> strategies{Strategy::VBAL, Strategy::QBCAL, Strategy::RSC};
  std::vector<Pricing> pricings{Pricing::BuyerCentric, Pricing::SellerCentric};
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

struct ReplicationRow {
  std::size_t replication = 0;
  Strategy strategy = Strategy::VBAL;
  Pricing pricing = Pricing::BuyerCentric;
  double param_value = 0.0;
  int acquired = 0;
  int incorporated = 0;
  double spent = 0.0;
  double improvement_pct = 0.0;
  bool budget_exhausted = false;
  bool threshold_met = false;
  std::uint64_t split_fingerprint = 0;

  // spent / incorporated, NaN when nothing was incorporated.
  double avg_cost() const;
};

struct RunSummary {
  Strategy strategy = Strategy::VBAL;
  Pricing pricing = Pricing::BuyerCentric;
  double param_value = 0.0;
  std::vector<int> incorporated;
  std::vector<double> spent;
  std::vector<double> improvement_pct;
  double mean = 0.0;  // of incorporated counts
  double p25 = 0.0;
  double p75 = 0.0;
};

struct SweepResult {
  std::vector<ReplicationRow> rows;  // ordered by replication, then cell
  std::vector<RunSummary> cells;     // ordered by param value, strategy, pricing
};

// Seed of replication i: every cell of the sweep shares it.
std::uint64_t replication_seed(std::uint64_t root, std::size_t replication);

SweepResult sweep(const Scenario& scenario, const SweepSpec& spec);

// One cell of a sweep.
RunSummary monte_carlo(const Scenario& scenario, const MarketConfig& cfg, std::size_t replications,
                       std::uint64_t seed, unsigned jobs = 1);

// Aggregates rows into cells; a pure function of the rows.
std::vector<RunSummary> summarize(const std::vector<ReplicationRow>& rows);

struct ComparisonRow {
  std::string comparison;  // e.g. "VBAL-RSC"
  Pricing pricing = Pricing::BuyerCentric;
  double param_value = 0.0;
  PairedComparison result;
};

// Paired average-cost comparison of each non-RSC strategy against RSC, per
// pricing scheme and parameter value. Replications where either side
// incorporated nothing are dropped.
std::vector<ComparisonRow> compare_average_cost(const std::vector<ReplicationRow>& rows);

// replication,strategy,pricing,param_value,acquired,incorporated,spent,improvement_pct
void write_raw_reps_csv(std::ostream& out, const std::vector<ReplicationRow>& rows);
std::vector<ReplicationRow> read_raw_reps_csv(std::istream& in);
void write_summary_json(std::ostream& out, const std::vector<RunSummary>& cells,
                        SweepParameter parameter);
// strategy,pricing,param_value,incorporated,frequency
void write_histogram_csv(std::ostream& out, const std::vector<RunSummary>& cells);
// comparison,pricing,param_value,n,statistic,p_value,median_delta
void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);

}  // namespace alm
