#include "alm/market.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "alm/error.hpp"
#include "alm/rng.hpp"

namespace alm {

std::string_view to_string(Pricing pricing) {
  return pricing == Pricing::BuyerCentric ? "BC" : "SC";
}

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::VBAL: return "VBAL";
    case Strategy::QBCAL: return "QBCAL";
    case Strategy::RSC: return "RSC";
  }
  return "?";
}

Pricing parse_pricing(std::string_view text) {
  if (text == "BC" || text == "bc" || text == "buyer-centric") return Pricing::BuyerCentric;
  if (text == "SC" || text == "sc" || text == "seller-centric") return Pricing::SellerCentric;
  throw Error(ErrorKind::InvalidArgument, "unknown pricing scheme '" + std::string(text) + "'");
}

Strategy parse_strategy(std::string_view text) {
  if (text == "VBAL" || text == "vbal") return Strategy::VBAL;
  if (text == "QBCAL" || text == "qbcal" || text == "QBC") return Strategy::QBCAL;
  if (text == "RSC" || text == "rsc") return Strategy::RSC;
  throw Error(ErrorKind::InvalidArgument, "unknown strategy '" + std::string(text) + "'");
}

bool purchase_decision(double loss_reduction, double wts, double wtp) {
  return loss_reduction > 0.0 && wts <= wtp * loss_reduction;
}

double price(double loss_reduction, double wts, double wtp, Pricing scheme, bool incorporated) {
  if (scheme == Pricing::SellerCentric) return wts;
  return incorporated ? wtp * loss_reduction : 0.0;
}

namespace {

void validate(const LabelledPool& data, const std::vector<SellerOffer>& offers,
              const MarketConfig& cfg) {
  if (cfg.improvement_target.has_value() == cfg.alpha.has_value()) {
    throw Error(ErrorKind::ConfigConflict,
                "give exactly one of improvement_target and alpha");
  }
  if (!(cfg.wtp > 0.0)) throw Error(ErrorKind::InvalidArgument, "willingness to pay must be > 0");
  if (!(cfg.budget > 0.0)) throw Error(ErrorKind::InvalidArgument, "budget must be > 0");
  if (!(cfg.budget_resolution >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "budget resolution must be >= 0");
  }
  if (cfg.improvement_target &&
      !(*cfg.improvement_target > 0.0 && *cfg.improvement_target < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "relative improvement target must lie in (0, 1)");
  }
  if (cfg.alpha && !(*cfg.alpha >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "absolute threshold must be >= 0");
  }
  if (static_cast<Eigen::Index>(offers.size()) != data.pool_size() ||
      data.pool_y.size() != data.pool_size()) {
    throw Error(ErrorKind::DimensionMismatch, "offers and hidden labels must cover every pool row");
  }
  for (const auto& offer : offers) {
    if (!(offer.wts >= 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "negative willingness to sell for " + offer.seller_id);
    }
  }
}

}  // namespace

MarketOutcome run_market(const LabelledPool& data, const std::vector<SellerOffer>& offers,
                         const MarketConfig& cfg, const LossSpec& loss) {
  validate(data, offers, cfg);

  std::optional<FitState> fit;
  try {
    fit = ols_fit(data.labelled_x, data.labelled_y);
  } catch (const Error& e) {
    throw Error(ErrorKind::UntrainableInitialSet, e.what());
  }

  const double sigma2_start = frozen_sigma2(*fit);
  auto sigma2_of = [&](const FitState& f) {
    return cfg.refit_sigma2 ? frozen_sigma2(f) : sigma2_start;
  };

  MarketOutcome out;
  out.initial_loss = evaluate_loss(loss, *fit, sigma2_of(*fit));
  out.alpha = cfg.alpha ? *cfg.alpha : (1.0 - *cfg.improvement_target) * out.initial_loss;

  DesignMatrix labelled_x = data.labelled_x;
  Vector labelled_y = data.labelled_y;
  std::vector<Eigen::Index> live(static_cast<std::size_t>(data.pool_size()));
  std::iota(live.begin(), live.end(), Eigen::Index{0});

  double current = out.initial_loss;
  double spent = 0.0;
  int step = 0;

  while (spent < cfg.budget - cfg.budget_resolution && current > out.alpha && !live.empty()) {
    ++step;
    const DesignMatrix candidates = data.pool_x(live, Eigen::all);

    Eigen::Index pick = 0;
    bool random_pick = cfg.strategy == Strategy::RSC;
    if (cfg.strategy == Strategy::VBAL) {
      pick = select_vbal(*fit, candidates).pool_index;
    } else if (cfg.strategy == Strategy::QBCAL) {
      CommitteeSpec committee = cfg.committee;
      committee.seed = derive_seed(cfg.seed, "bootstrap",
                                   cfg.refresh_committee ? static_cast<std::uint64_t>(step) : 0);
      try {
        pick = select_qbc(labelled_x, labelled_y, candidates, committee).pool_index;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateCommittee) throw;
        random_pick = true;
        ++out.committee_fallbacks;
      }
    }
    if (random_pick) {
      pick = select_rsc(candidates, derive_seed(cfg.seed, "rsc", static_cast<std::uint64_t>(step)))
                 .pool_index;
    }

    const Eigen::Index row = live[static_cast<std::size_t>(pick)];
    const Vector x = data.pool_x.row(row).transpose();
    const double y = data.pool_y[row];  // label is bought before its value is known
    const SellerOffer& offer = offers[static_cast<std::size_t>(row)];

    FitState trial = rank_one_refit(*fit, x, y);
    const double trial_loss = evaluate_loss(loss, trial, sigma2_of(trial));
    const double reduction = current - trial_loss;

    const bool wtp_rule = cfg.strategy != Strategy::RSC || cfg.rsc_applies_wtp_check;
    const bool incorporated = wtp_rule ? purchase_decision(reduction, offer.wts, cfg.wtp)
                                       : reduction > 0.0;
    const double paid = price(reduction, offer.wts, cfg.wtp, cfg.pricing, incorporated);

    if (incorporated) {
      fit = std::move(trial);
      current = trial_loss;
      labelled_x.conservativeResize(labelled_x.rows() + 1, Eigen::NoChange);
      labelled_x.row(labelled_x.rows() - 1) = x.transpose();
      labelled_y.conservativeResize(labelled_y.size() + 1);
      labelled_y[labelled_y.size() - 1] = y;
      ++out.n_incorporated;
    }
    live.erase(live.begin() + pick);
    spent += paid;
    ++out.n_acquired;

    TransactionRecord rec;
    rec.step = step;
    rec.seller_id = offer.seller_id;
    rec.loss_reduction = reduction;
    rec.price = paid;
    rec.acquired = true;
    rec.incorporated = incorporated;
    rec.cumulative_cost = spent;
    rec.loss_after = current;
    out.ledger.push_back(std::move(rec));
  }

  out.total_spent = spent;
  out.final_loss = current;
  out.budget_exhausted = spent >= cfg.budget - cfg.budget_resolution;
  out.threshold_met = current <= out.alpha;
  out.improvement_pct =
      out.initial_loss > 0.0 ? 100.0 * (out.initial_loss - current) / out.initial_loss : 0.0;
  out.sigma2 = sigma2_of(*fit);
  out.final_fit = std::move(fit);
  return out;
}

namespace {

PropertyReport evaluate_properties(const MarketOutcome& outcome,
                                   const std::vector<SellerOffer>& offers,
                                   const MarketConfig& cfg) {
  PropertyReport report;
  std::map<std::string, double, std::less<>> wts;
  for (const auto& offer : offers) wts[offer.seller_id] = offer.wts;

  auto flag = [&](bool& slot, const TransactionRecord& rec, const std::string& what) {
    slot = false;
    report.violations.push_back("step " + std::to_string(rec.step) + " seller " + rec.seller_id +
                                ": " + what);
  };

  double running = 0.0;
  for (const auto& rec : outcome.ledger) {
    if (running >= cfg.budget - cfg.budget_resolution) flag(report.pre_purchase_budget, rec, "bought after budget was spent");
    running += rec.price;
    if (running != rec.cumulative_cost) {
      flag(report.budget_balance, rec, "cumulative cost is not the running sum of prices");
    }
    const auto it = wts.find(rec.seller_id);
    if (it == wts.end()) {
      flag(report.individual_rationality, rec, "seller has no offer");
      continue;
    }
    if (rec.incorporated && !(rec.price >= it->second)) {
      flag(report.individual_rationality, rec, "paid below willingness to sell");
    }
    if (cfg.pricing == Pricing::BuyerCentric && rec.loss_reduction <= 0.0 && rec.price != 0.0) {
      flag(report.zero_element, rec, "paid for a label with no value");
    }
    if (rec.incorporated && !(rec.loss_reduction > 0.0)) {
      flag(report.zero_element, rec, "incorporated a non-improving label");
    }
  }
  if (running != outcome.total_spent) {
    report.budget_balance = false;
    report.violations.push_back("total spent differs from the sum of ledger prices");
  }
  return report;
}

}  // namespace

PropertyReport check_market_properties(const MarketOutcome& outcome,
                                       const std::vector<SellerOffer>& offers,
                                       const MarketConfig& cfg) {
  return evaluate_properties(outcome, offers, cfg);
}

void require_market_properties(const MarketOutcome& outcome,
                               const std::vector<SellerOffer>& offers, const MarketConfig& cfg) {
  const auto report = evaluate_properties(outcome, offers, cfg);
  if (!report.ok()) throw Error(ErrorKind::PropertyViolation, report.violations.front());
}

bool check_selection_symmetry(const LabelledPool& data, const std::vector<SellerOffer>& offers,
                              const MarketConfig& cfg, const LossSpec& loss,
                              const MarketOutcome& outcome) {
  std::vector<SellerOffer> renamed = offers;
  std::map<std::string, std::string, std::less<>> back;
  for (std::size_t i = 0; i < renamed.size(); ++i) {
    renamed[i].seller_id = "clone-" + std::to_string(renamed.size() - i) + "-" + offers[i].seller_id;
    back[renamed[i].seller_id] = offers[i].seller_id;
  }
  const MarketOutcome rerun = run_market(data, renamed, cfg, loss);
  if (rerun.ledger.size() != outcome.ledger.size()) return false;
  for (std::size_t k = 0; k < rerun.ledger.size(); ++k) {
    const auto& a = outcome.ledger[k];
    const auto& b = rerun.ledger[k];
    if (back[b.seller_id] != a.seller_id || a.price != b.price ||
        a.loss_reduction != b.loss_reduction || a.incorporated != b.incorporated) {
      return false;
    }
  }
  return true;
}

std::vector<double> cost_efficiency_trajectory(const std::vector<TransactionRecord>& ledger) {
  std::vector<double> out;
  double value = 0.0;
  double cost = 0.0;
  for (const auto& rec : ledger) {
    if (rec.incorporated) value += rec.loss_reduction;
    cost += rec.price;
    if (cost != 0.0) out.push_back(value / cost);
  }
  return out;
}

std::vector<SellerRevenue> seller_revenue_comparison(const MarketOutcome& outcome_bc,
                                                     const MarketOutcome& outcome_sc,
                                                     const std::vector<SellerOffer>& offers) {
  std::map<std::string, SellerRevenue, std::less<>> by_id;
  for (const auto& offer : offers) by_id[offer.seller_id].seller_id = offer.seller_id;
  for (const auto& rec : outcome_bc.ledger) {
    auto& r = by_id[rec.seller_id];
    r.seller_id = rec.seller_id;
    r.revenue_bc += rec.price;
  }
  for (const auto& rec : outcome_sc.ledger) {
    auto& r = by_id[rec.seller_id];
    r.seller_id = rec.seller_id;
    r.revenue_sc += rec.price;
  }
  std::vector<SellerRevenue> out;
  out.reserve(by_id.size());
  for (auto& [id, rev] : by_id) out.push_back(rev);
  std::stable_sort(out.begin(), out.end(), [](const SellerRevenue& a, const SellerRevenue& b) {
    if (a.revenue_bc != b.revenue_bc) return a.revenue_bc > b.revenue_bc;
    if (a.revenue_sc != b.revenue_sc) return a.revenue_sc > b.revenue_sc;
    return a.seller_id < b.seller_id;
  });
  return out;
}

}  // namespace alm
