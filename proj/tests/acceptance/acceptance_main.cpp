// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "alm/cli.hpp"
#include "alm/experiments.hpp"
#include "alm/market.hpp"
#include "alm/regress.hpp"
#include "alm/rng.hpp"
#include "alm/strategy.hpp"

#ifndef ALM_SOURCE_DIR
#define ALM_SOURCE_DIR "."
#endif

namespace {

using namespace alm;
namespace fs = std::filesystem;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [" << what << "]";
    }
  }
};

unsigned worker_count() { return std::max(1U, std::thread::hardware_concurrency()); }

std::string config_path(const char* name) { return std::string(ALM_SOURCE_DIR) + "/configs/" + name; }

Matrix gaussian_design(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal;
  Matrix x(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    x(r, 0) = 1.0;
    for (Eigen::Index c = 1; c < cols; ++c) x(r, c) = normal(rng);
  }
  return x;
}

Vector noisy_labels(std::mt19937_64& rng, const Matrix& x) {
  std::normal_distribution<double> normal;
  Vector beta(x.cols());
  for (auto& b : beta) b = normal(rng);
  Vector y = x * beta;
  for (auto& v : y) v += normal(rng);
  return y;
}

// Normal equations in long double, Gauss-Jordan with partial pivoting.
std::vector<long double> long_double_ols(const Matrix& x, const Vector& y) {
  const auto p = static_cast<std::size_t>(x.cols());
  std::vector<std::vector<long double>> a(p, std::vector<long double>(p + 1, 0.0L));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (std::size_t i = 0; i < p; ++i) {
      const long double xi = x(r, static_cast<Eigen::Index>(i));
      for (std::size_t j = 0; j < p; ++j) a[i][j] += xi * static_cast<long double>(x(r, static_cast<Eigen::Index>(j)));
      a[i][p] += xi * static_cast<long double>(y[r]);
    }
  }
  for (std::size_t c = 0; c < p; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < p; ++r) {
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    for (std::size_t r = 0; r < p; ++r) {
      if (r == c) continue;
      const long double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= p; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<long double> beta(p);
  for (std::size_t i = 0; i < p; ++i) beta[i] = a[i][p] / a[i][i];
  return beta;
}

// Least squares by QR; a resample whose Gram matrix is singular or has
// condition number above 1e10 gets the documented ridge term
// 1e-6 * trace(X'X) / p, solved in long double.
Vector member_beta(const Matrix& xs, const Vector& ys) {
  const Eigen::JacobiSVD<Matrix> svd(xs);
  const Vector sv = svd.singularValues();
  const double smin = sv.size() < xs.cols() ? 0.0 : sv.minCoeff();
  const bool ill = xs.rows() < xs.cols() || smin == 0.0 || (sv.maxCoeff() / smin) * (sv.maxCoeff() / smin) > 1e10;
  if (!ill) return xs.colPivHouseholderQr().solve(ys);
  const auto p = static_cast<std::size_t>(xs.cols());
  std::vector<std::vector<long double>> a(p, std::vector<long double>(p + 1, 0.0L));
  long double trace = 0.0L;
  for (Eigen::Index r = 0; r < xs.rows(); ++r) {
    for (std::size_t i = 0; i < p; ++i) {
      const long double xi = xs(r, static_cast<Eigen::Index>(i));
      for (std::size_t j = 0; j < p; ++j) a[i][j] += xi * xs(r, static_cast<Eigen::Index>(j));
      a[i][p] += xi * ys[r];
    }
  }
  for (std::size_t i = 0; i < p; ++i) trace += a[i][i];
  for (std::size_t i = 0; i < p; ++i) a[i][i] += 1e-6L * trace / static_cast<long double>(p);
  for (std::size_t c = 0; c < p; ++c) {
    for (std::size_t r = 0; r < p; ++r) {
      if (r == c) continue;
      const long double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= p; ++k) a[r][k] -= f * a[c][k];
    }
  }
  Vector beta(xs.cols());
  for (std::size_t i = 0; i < p; ++i) beta[static_cast<Eigen::Index>(i)] = static_cast<double>(a[i][p] / a[i][i]);
  return beta;
}

// ---------------------------------------------------------------- 1
void selection_oracle(Verdict& v) {
  std::mt19937_64 rng(1001);
  int vbal_bad = 0;
  int qbc_bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index cols = 2 + trial % 5;
    const Eigen::Index pool_rows = 1 + static_cast<Eigen::Index>(rng() % 50);
    const Matrix lx = gaussian_design(rng, cols + 8, cols);
    const Vector ly = noisy_labels(rng, lx);
    const Matrix pool = gaussian_design(rng, pool_rows, cols);

    // UPV from the triangular factor of a QR of the design.
    const Eigen::HouseholderQR<Matrix> qr(lx);
    const Matrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
    Eigen::Index upv_best = 0;
    double upv_max = -1.0;
    for (Eigen::Index j = 0; j < pool_rows; ++j) {
      const Vector z = r.transpose().triangularView<Eigen::Lower>().solve(pool.row(j).transpose());
      if (z.squaredNorm() > upv_max) {
        upv_max = z.squaredNorm();
        upv_best = j;
      }
    }
    if (select_vbal(ols_fit(lx, ly), pool).pool_index != upv_best) ++vbal_bad;

    // Committee disagreement recomputed with QR solves and two-pass variance.
    const CommitteeSpec spec{10, 1.0, static_cast<std::uint64_t>(trial)};
    Matrix preds(spec.size, pool_rows);
    for (int m = 0; m < spec.size; ++m) {
      Rng member = make_rng(spec.seed, "bootstrap-member", static_cast<std::uint64_t>(m));
      Matrix xs(lx.rows(), cols);
      Vector ys(lx.rows());
      for (Eigen::Index i = 0; i < lx.rows(); ++i) {
        const auto pick = static_cast<Eigen::Index>(uniform_index(member, static_cast<std::size_t>(lx.rows())));
        xs.row(i) = lx.row(pick);
        ys[i] = ly[pick];
      }
      preds.row(m) = (pool * member_beta(xs, ys)).transpose();
    }
    Eigen::Index qbc_best = 0;
    double qbc_max = -1.0;
    for (Eigen::Index j = 0; j < pool_rows; ++j) {
      const double mean = preds.col(j).mean();
      const double var = (preds.col(j).array() - mean).square().mean();
      if (var > qbc_max) {
        qbc_max = var;
        qbc_best = j;
      }
    }
    if (select_qbc(lx, ly, pool, spec).pool_index != qbc_best) ++qbc_bad;
  }
  v.detail << "vbal mismatches " << vbal_bad << "/1000, qbc mismatches " << qbc_bad << "/1000";
  v.require(vbal_bad == 0, "vbal");
  v.require(qbc_bad == 0, "qbc");
}

// ---------------------------------------------------------------- 2
void regression_oracle(Verdict& v) {
  std::mt19937_64 rng(2002);
  double beta_err = 0.0;
  double refit_err = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index cols = 2 + trial % 6;
    const Eigen::Index rows = cols + 2 + static_cast<Eigen::Index>(rng() % 40);
    const Matrix x = gaussian_design(rng, rows + 1, cols);
    const Vector y = noisy_labels(rng, x);
    const FitState fit = ols_fit(x.topRows(rows), y.head(rows));
    const auto ref = long_double_ols(x.topRows(rows), y.head(rows));
    for (Eigen::Index i = 0; i < cols; ++i) {
      beta_err = std::max(beta_err, static_cast<double>(std::fabs(fit.beta()[i] - ref[static_cast<std::size_t>(i)])));
    }
    const FitState updated = rank_one_refit(fit, x.row(rows).transpose(), y[rows]);
    const FitState full = ols_fit(x, y);
    refit_err = std::max(refit_err, (updated.beta() - full.beta()).cwiseAbs().maxCoeff());
    refit_err = std::max(refit_err, (updated.info_inverse() - full.info_inverse()).cwiseAbs().maxCoeff());
  }
  v.detail << "max |beta - oracle| " << beta_err << ", max rank-one vs refit " << refit_err;
  v.require(beta_err <= 1e-8, "beta");
  v.require(refit_err <= 1e-8, "rank-one");
}

// ---------------------------------------------------------------- 3
struct LoadedScenario {
  cli::ExperimentConfig cfg;
  Scenario scenario;
  MarketConfig market;
};

const LoadedScenario& real_estate() {
  static const LoadedScenario s = [] {
    LoadedScenario out;
    out.cfg = cli::load_config(config_path("real_estate.json"));
    out.scenario = cli::load_scenario(out.cfg);
    out.market = cli::market_config(out.cfg);
    return out;
  }();
  return s;
}

const LoadedScenario& energy() {
  static const LoadedScenario s = [] {
    LoadedScenario out;
    out.cfg = cli::load_config(config_path("energy.json"));
    out.scenario = cli::load_scenario(out.cfg);
    out.market = cli::market_config(out.cfg);
    return out;
  }();
  return s;
}

void property_invariants(Verdict& v) {
  std::mt19937_64 rng(3003);
  std::uniform_real_distribution<double> unit;
  int failures = 0;
  int library_disagreements = 0;
  int records = 0;
  double bc_gap = 0.0;
  const Strategy strategies[] = {Strategy::VBAL, Strategy::QBCAL, Strategy::RSC};
  const Pricing pricings[] = {Pricing::BuyerCentric, Pricing::SellerCentric};
  for (int run = 0; run < 200; ++run) {
    const bool use_energy = run % 5 == 4;
    const LoadedScenario& s = use_energy ? energy() : real_estate();
    MarketConfig cfg = s.market;
    cfg.strategy = strategies[run % 3];
    cfg.pricing = pricings[(run / 3) % 2];
    cfg.rsc_applies_wtp_check = true;
    cfg.budget *= 0.5 + 2.0 * unit(rng);
    cfg.wtp *= 0.75 + 0.5 * unit(rng);
    const std::uint64_t seed = replication_seed(s.cfg.seed + 77, static_cast<std::size_t>(run));
    cfg.seed = seed;
    const StagedMarket staged = stage(s.scenario, seed);
    const MarketOutcome out = run_market(staged.data, staged.offers, cfg, staged.loss);

    std::map<std::string, double> wts;
    for (const auto& o : staged.offers) wts[o.seller_id] = o.wts;
    bool ok = true;
    double running = 0.0;
    double value = 0.0;
    for (const auto& rec : out.ledger) {
      ++records;
      ok = ok && running < cfg.budget;  // pre-purchase budget check
      running += rec.price;
      ok = ok && running == rec.cumulative_cost;
      if (rec.incorporated) {
        ok = ok && rec.price >= wts.at(rec.seller_id);
        value += rec.loss_reduction;
      }
      if (cfg.pricing == Pricing::BuyerCentric) {
        if (rec.loss_reduction <= 0.0 || !rec.incorporated) ok = ok && rec.price == 0.0;
      } else {
        ok = ok && rec.price == wts.at(rec.seller_id);
      }
    }
    ok = ok && running == out.total_spent;
    if (cfg.pricing == Pricing::BuyerCentric) {
      const double gap = std::fabs(out.total_spent - cfg.wtp * value);
      bc_gap = std::max(bc_gap, gap);
      ok = ok && gap <= 1e-9;
    }
    const bool library_ok = check_market_properties(out, staged.offers, cfg).ok();
    if (library_ok != ok) ++library_disagreements;
    if (!ok) ++failures;
  }
  v.detail << "200 runs, " << records << " ledger records, violating runs " << failures
           << ", max |BC spent - wtp*sum(l)| " << bc_gap << ", checker disagreements " << library_disagreements;
  v.require(failures == 0, "invariants");
  v.require(library_disagreements == 0, "checker");
}

// ---------------------------------------------------------------- 4, 5
const SweepResult& case_study_runs() {
  static const SweepResult r = [] {
    const LoadedScenario& s = real_estate();
    SweepSpec spec;
    spec.base_config = s.market;
    spec.replications = 50;
    spec.seed = s.cfg.seed;
    spec.jobs = worker_count();
    return sweep(s.scenario, spec);
  }();
  return r;
}

using RowIndex = std::map<std::tuple<std::size_t, Strategy, Pricing>, const ReplicationRow*>;

RowIndex index_rows(const std::vector<ReplicationRow>& rows) {
  RowIndex idx;
  for (const auto& r : rows) idx[{r.replication, r.strategy, r.pricing}] = &r;
  return idx;
}

void real_estate_case_study(Verdict& v) {
  const SweepResult& r = case_study_runs();
  const RowIndex idx = index_rows(r.rows);
  const std::size_t n = 50;
  for (Pricing p : {Pricing::BuyerCentric, Pricing::SellerCentric}) {
    for (Strategy s : {Strategy::VBAL, Strategy::QBCAL, Strategy::RSC}) {
      std::size_t feasible = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto* row = idx.at({i, s, p});
        if (row->threshold_met && !row->budget_exhausted) ++feasible;
      }
      const double share = static_cast<double>(feasible) / static_cast<double>(n);
      v.detail << " (a) " << to_string(s) << "/" << to_string(p) << " " << share << ";";
      v.require(share >= 0.90, std::string("a ") + std::string(to_string(s)) + "/" + std::string(to_string(p)));
    }
  }
  for (Pricing p : {Pricing::BuyerCentric, Pricing::SellerCentric}) {
    for (Strategy s : {Strategy::VBAL, Strategy::QBCAL}) {
      std::size_t fewer = 0;
      std::size_t cheaper = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto* m = idx.at({i, s, p});
        const auto* b = idx.at({i, Strategy::RSC, p});
        if (m->incorporated <= b->incorporated) ++fewer;
        if (m->avg_cost() < b->avg_cost()) ++cheaper;
      }
      const double fewer_share = static_cast<double>(fewer) / static_cast<double>(n);
      v.detail << " (b) " << to_string(s) << "/" << to_string(p) << " " << fewer_share << ";";
      v.require(fewer_share >= 0.80, std::string("b ") + std::string(to_string(s)) + "/" + std::string(to_string(p)));
      if (p == Pricing::SellerCentric) {
        const double cheaper_share = static_cast<double>(cheaper) / static_cast<double>(n);
        v.detail << " (c) " << to_string(s) << "/SC " << cheaper_share << ";";
        v.require(cheaper_share >= 0.80, std::string("c ") + std::string(to_string(s)));
      }
    }
  }
  v.detail << " mean incorporated BC:";
  for (const auto& c : r.cells) {
    if (c.pricing == Pricing::BuyerCentric) v.detail << " " << to_string(c.strategy) << "=" << c.mean;
  }
}

// Brute force over all 2^n sign patterns with average ranks.
double enumerated_p(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> d;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != y[i]) d.push_back(x[i] - y[i]);
  }
  const std::size_t n = d.size();
  if (n == 0) return 1.0;
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    double below = 0.0;
    double equal = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::fabs(d[j]) < std::fabs(d[i])) below += 1.0;
      if (std::fabs(d[j]) == std::fabs(d[i])) equal += 1.0;
    }
    rank[i] = below + (equal + 1.0) / 2.0;
  }
  double total = 0.0;
  double w_plus = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += rank[i];
    if (d[i] > 0.0) w_plus += rank[i];
  }
  const double w = std::min(w_plus, total - w_plus);
  std::size_t extreme = 0;
  const std::size_t patterns = std::size_t{1} << n;
  for (std::size_t mask = 0; mask < patterns; ++mask) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1U) s += rank[i];
    }
    if (s <= w + 1e-9) ++extreme;
  }
  return std::min(1.0, 2.0 * static_cast<double>(extreme) / static_cast<double>(patterns));
}

void wilcoxon_validation(Verdict& v) {
  const SweepResult& r = case_study_runs();
  for (const auto& c : compare_average_cost(r.rows)) {
    v.detail << c.comparison << "/" << to_string(c.pricing) << ": n=" << c.result.n
             << " median delta " << c.result.median_delta << " p=" << c.result.p_value << "; ";
    const std::string tag = c.comparison + "/" + std::string(to_string(c.pricing));
    v.require(c.result.median_delta < 0.0, tag + " direction");
    v.require(c.result.p_value < 0.05, tag + " p");
  }

  std::vector<std::pair<std::vector<double>, std::vector<double>>> corpus;
  std::mt19937_64 rng(5005);
  for (std::size_t n = 1; n <= 12; ++n) {
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> x(n);
      std::vector<double> y(n);
      for (std::size_t i = 0; i < n; ++i) {
        // Small integer grid so ties and zero differences occur.
        x[i] = static_cast<double>(rng() % 7);
        y[i] = rep % 2 == 0 ? static_cast<double>(rng() % 7) : std::ldexp(static_cast<double>(rng() % 1000), -7);
      }
      corpus.emplace_back(x, y);
    }
  }
  double worst = 0.0;
  for (const auto& [x, y] : corpus) {
    worst = std::max(worst, std::fabs(wilcoxon_signed_rank(x, y).p_value - enumerated_p(x, y)));
  }
  v.detail << "enumeration corpus " << corpus.size() << " cases, max |dp| " << worst;
  v.require(worst <= 1e-12, "enumeration");
}

// ---------------------------------------------------------------- 6
void energy_case_study(Verdict& v) {
  const LoadedScenario& s = energy();
  const int runs = 20;
  const auto quota = static_cast<int>(std::ceil(s.market.budget / s.cfg.wts_value));
  for (Pricing p : {Pricing::BuyerCentric, Pricing::SellerCentric}) {
    for (Strategy strat : {Strategy::VBAL, Strategy::QBCAL, Strategy::RSC}) {
      int pattern = 0;
      int exact_quota = 0;
      int budget_bound = 0;
      int overshoot_ok = 0;
      for (int i = 0; i < runs; ++i) {
        const std::uint64_t seed = replication_seed(s.cfg.seed, static_cast<std::size_t>(i));
        const StagedMarket staged = stage(s.scenario, seed);
        MarketConfig cfg = s.market;
        cfg.strategy = strat;
        cfg.pricing = p;
        cfg.seed = seed;
        const MarketOutcome out = run_market(staged.data, staged.offers, cfg, staged.loss);
        if (out.budget_exhausted && !out.threshold_met) ++pattern;
        // The quota applies to markets that ran until the budget was spent.
        if (!out.threshold_met) {
          ++budget_bound;
          if (out.n_acquired == quota) ++exact_quota;
        }
        double last = 0.0;
        for (const auto& rec : out.ledger) last = rec.price;
        if (out.total_spent <= cfg.budget || out.total_spent - last < cfg.budget) ++overshoot_ok;
      }
      const double share = static_cast<double>(pattern) / runs;
      const std::string tag = std::string(to_string(strat)) + "/" + std::string(to_string(p));
      v.detail << " " << tag << " exhausted-before-threshold " << share;
      v.require(share >= 0.80, tag + " pattern");
      v.require(overshoot_ok == runs, tag + " overshoot");
      if (p == Pricing::SellerCentric) {
        v.detail << ", acquired " << quota << " in " << exact_quota << "/" << budget_bound << " budget-bound runs";
        v.require(exact_quota == budget_bound, tag + " quota");
      }
      v.detail << ";";
    }
  }
}

// ---------------------------------------------------------------- 7
void monte_carlo_robustness(Verdict& v) {
  const LoadedScenario& s = real_estate();
  SweepSpec spec;
  spec.base_config = s.market;
  spec.replications = 200;
  spec.seed = s.cfg.seed + 1;
  spec.jobs = worker_count();
  const SweepResult r = sweep(s.scenario, spec);
  for (Pricing p : {Pricing::BuyerCentric, Pricing::SellerCentric}) {
    std::map<Strategy, double> iqr;
    for (const auto& c : r.cells) {
      if (c.pricing == p) iqr[c.strategy] = c.p75 - c.p25;
    }
    v.detail << " " << to_string(p) << " IQR VBAL " << iqr[Strategy::VBAL] << " QBCAL " << iqr[Strategy::QBCAL]
             << " RSC " << iqr[Strategy::RSC] << ";";
    v.require(iqr[Strategy::VBAL] <= iqr[Strategy::RSC], std::string("VBAL/") + std::string(to_string(p)));
    v.require(iqr[Strategy::QBCAL] <= iqr[Strategy::RSC], std::string("QBCAL/") + std::string(to_string(p)));
  }
}

// ---------------------------------------------------------------- 8
std::vector<double> cell_means(const SweepResult& r, Strategy s, Pricing p) {
  std::vector<double> means;
  for (const auto& c : r.cells) {
    if (c.strategy == s && c.pricing == p) means.push_back(c.mean);
  }
  return means;
}

void sensitivity_trends(Verdict& v) {
  const LoadedScenario& s = real_estate();
  SweepSpec spec;
  spec.base_config = s.market;
  spec.replications = 50;
  spec.seed = s.cfg.seed;
  spec.jobs = worker_count();

  spec.parameter = SweepParameter::WtsScale;
  spec.values = {0.5, 1.0, 1.5, 2.0, 2.5};
  spec.pricings = {Pricing::SellerCentric};
  spec.strategies = {Strategy::VBAL, Strategy::QBCAL};
  const SweepResult wts = sweep(s.scenario, spec);
  for (Strategy strat : {Strategy::VBAL, Strategy::QBCAL}) {
    const auto m = cell_means(wts, strat, Pricing::SellerCentric);
    int rises = 0;
    v.detail << " wts_scale " << to_string(strat) << "/SC:";
    for (std::size_t i = 0; i < m.size(); ++i) {
      v.detail << " " << m[i];
      if (i > 0 && m[i] > m[i - 1]) ++rises;
    }
    v.detail << ";";
    v.require(rises <= 1, std::string("wts_scale ") + std::string(to_string(strat)));
  }

  spec.parameter = SweepParameter::Budget;
  spec.values = {10.0, 15.0, 20.0, 25.0, 30.0};
  spec.pricings = {Pricing::BuyerCentric};
  spec.strategies = {Strategy::RSC};
  const SweepResult budget = sweep(s.scenario, spec);
  const auto m = cell_means(budget, Strategy::RSC, Pricing::BuyerCentric);
  bool monotone = true;
  v.detail << " budget RSC/BC:";
  for (std::size_t i = 0; i < m.size(); ++i) {
    v.detail << " " << m[i];
    if (i > 0 && m[i] < m[i - 1]) monotone = false;
  }
  v.require(monotone, "budget RSC/BC");
}

// ---------------------------------------------------------------- 9
int almkt(std::vector<std::string> args) {
  args.insert(args.begin(), "almkt");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::cout.setstate(std::ios::failbit);
  const int code = cli::run(static_cast<int>(argv.size()), argv.data());
  std::cout.clear();
  return code;
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    files[fs::relative(e.path(), root).string()] = s.str();
  }
  return files;
}

void determinism(Verdict& v) {
  const fs::path base = fs::temp_directory_path() / "almkt-acceptance-determinism";
  fs::remove_all(base);
  const std::string re = config_path("real_estate.json");
  const std::string en = config_path("energy.json");
  const std::vector<std::vector<std::string>> commands = {
      {"run", re, "--paired"},
      {"run", re, "--set", "strategy=QBCAL", "--set", "pricing=SC"},
      {"run", en, "--paired", "--set", "strategy=RSC"},
      {"montecarlo", re, "--replications", "8", "--jobs", "1"},
      {"sweep", re, "--parameter", "wtp", "--values", "1000,1200", "--replications", "4"},
      {"compare", re, "--replications", "6"},
  };
  std::size_t files = 0;
  int mismatched = 0;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    std::map<std::string, std::string> first;
    for (int attempt = 0; attempt < 2; ++attempt) {
      const fs::path out = base / (std::to_string(c) + "-" + std::to_string(attempt));
      auto args = commands[c];
      args.push_back("--out");
      args.push_back(out.string());
      if (attempt == 1 && args[0] == "montecarlo") args[5] = std::to_string(worker_count() + 2);
      if (almkt(args) != cli::kOk) {
        v.require(false, "command " + std::to_string(c) + " failed");
        continue;
      }
      auto snap = snapshot(out);
      if (attempt == 0) {
        first = std::move(snap);
        files += first.size();
      } else if (snap != first) {
        ++mismatched;
      }
    }
  }
  fs::remove_all(base);
  v.detail << commands.size() << " commands rerun, " << files << " files compared, mismatched commands "
           << mismatched;
  v.require(mismatched == 0, "bytes differ");
  v.require(files > 0, "no files");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<void(Verdict&)> body;
  };
  const std::vector<Criterion> criteria = {
      {1, "selection oracle equivalence", 10, selection_oracle},
      {2, "regression correctness", 10, regression_oracle},
      {3, "pricing and property invariants", 60, property_invariants},
      {4, "real-estate case study", 300, real_estate_case_study},
      {5, "Wilcoxon validation", 300, wilcoxon_validation},
      {6, "energy case study", 300, energy_case_study},
      {7, "Monte Carlo robustness", 600, monte_carlo_robustness},
      {8, "sensitivity trends", 600, sensitivity_trends},
      {9, "determinism", 600, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.require(secs < c.limit_seconds, "runtime");
    if (!v.pass) ++failed;
    std::printf("%s %d %s (%.1fs): %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, secs, v.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
