#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "alm/pool.hpp"
#include "alm/regress.hpp"
#include "alm/strategy.hpp"

namespace alm {

enum class Pricing { BuyerCentric, SellerCentric };

std::string_view to_string(Pricing pricing);
std::string_view to_string(Strategy strategy);
Pricing parse_pricing(std::string_view text);
Strategy parse_strategy(std::string_view text);

// One seller per pool row; offers[i] belongs to pool row i.
struct SellerOffer {
  std::string seller_id;
  double wts = 0.0;
};

struct MarketConfig {
  double wtp = 1.0;     // currency per unit loss reduction
  double budget = 1.0;  // currency
  // Smallest meaningful amount of currency: the budget counts as spent once
  // less than this remains, so a near-zero budget buys nothing.
  double budget_resolution = 1e-3;
  // Exactly one of the two must be set. A relative target r becomes the
  // absolute level alpha = (1 - r) * L0 at market start.
  std::optional<double> improvement_target;
  std::optional<double> alpha;
  Pricing pricing = Pricing::BuyerCentric;
  Strategy strategy = Strategy::VBAL;
  // Random selection incorporates on l > 0 only unless this is set, in which
  // case it also applies the willingness-to-pay rule.
  bool rsc_applies_wtp_check = false;
  CommitteeSpec committee;  // seed field is ignored; streams derive from `seed`
  // Draw fresh bootstrap resamples every step (true) or reuse step 0's stream.
  bool refresh_committee = true;
  // Re-estimate sigma^2 after every incorporated label instead of freezing it.
  bool refit_sigma2 = false;
  std::uint64_t seed = 0;
};

struct TransactionRecord {
  int step = 0;
  std::string seller_id;
  double loss_reduction = 0.0;
  double price = 0.0;
  bool acquired = true;
  bool incorporated = false;
  double cumulative_cost = 0.0;
  double loss_after = 0.0;
};

struct MarketOutcome {
  bool budget_exhausted = false;
  bool threshold_met = false;
  int n_acquired = 0;
  int n_incorporated = 0;
  double total_spent = 0.0;
  double initial_loss = 0.0;
  double alpha = 0.0;
  double final_loss = 0.0;
  double improvement_pct = 0.0;
  double sigma2 = 0.0;  // variance multiplier in force at termination
  int committee_fallbacks = 0;  // QBC steps that fell back to random selection
  std::vector<TransactionRecord> ledger;
  std::optional<FitState> final_fit;
};

// True iff l > 0 and eta / l <= phi. Evaluated as eta <= phi * l so that an
// accepted label always satisfies phi * l >= eta in floating point.
bool purchase_decision(double loss_reduction, double wts, double wtp);

double price(double loss_reduction, double wts, double wtp, Pricing scheme, bool incorporated);

MarketOutcome run_market(const LabelledPool& data, const std::vector<SellerOffer>& offers,
                         const MarketConfig& cfg, const LossSpec& loss);

struct PropertyReport {
  bool budget_balance = true;
  bool individual_rationality = true;
  bool zero_element = true;
  bool pre_purchase_budget = true;
  std::optional<bool> symmetry;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

// Checks budget balance, individual rationality, zero-element (buyer-centric)
// and the pre-purchase budget rule on a completed ledger.
PropertyReport check_market_properties(const MarketOutcome& outcome,
                                       const std::vector<SellerOffer>& offers,
                                       const MarketConfig& cfg);

// Same checks; throws PropertyViolation naming the first offending record.
void require_market_properties(const MarketOutcome& outcome,
                               const std::vector<SellerOffer>& offers, const MarketConfig& cfg);

// Reruns the market with every seller id replaced and checks that the
// sequence of selected pool rows and all amounts are unchanged.
bool check_selection_symmetry(const LabelledPool& data, const std::vector<SellerOffer>& offers,
                              const MarketConfig& cfg, const LossSpec& loss,
                              const MarketOutcome& outcome);

// Cumulative (sum of incorporated l) / (sum of prices) over ledger prefixes,
// skipping prefixes whose price sum is zero.
std::vector<double> cost_efficiency_trajectory(const std::vector<TransactionRecord>& ledger);

struct SellerRevenue {
  std::string seller_id;
  double revenue_bc = 0.0;
  double revenue_sc = 0.0;
};

// Every offered seller, sorted by buyer-centric revenue (descending), then
// seller-centric revenue (descending), then id.
std::vector<SellerRevenue> seller_revenue_comparison(const MarketOutcome& outcome_bc,
                                                     const MarketOutcome& outcome_sc,
                                                     const std::vector<SellerOffer>& offers);

// Ledger CSV: step,seller_id,l_j,p_j,acquired,incorporated,cumulative_cost,loss_after
void write_ledger_csv(std::ostream& out, const std::vector<TransactionRecord>& ledger);
std::vector<TransactionRecord> read_ledger_csv(std::istream& in);

}  // namespace alm
