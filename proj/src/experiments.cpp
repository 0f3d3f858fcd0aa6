#include "alm/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <ostream>
#include <thread>

#include "alm/csv.hpp"
#include "alm/error.hpp"
#include "alm/rng.hpp"

namespace alm {

namespace {

std::uint64_t fingerprint(const LabelledPool& data) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  for (auto r : data.labelled_rows) mix(r);
  mix(~0ULL);
  for (auto r : data.pool_rows) mix(r);
  return h;
}

struct Cell {
  double param_value;
  Strategy strategy;
  Pricing pricing;
};

std::vector<Cell> cells_of(const SweepSpec& spec) {
  std::vector<double> values = spec.values;
  if (spec.parameter == SweepParameter::None) values = {0.0};
  std::vector<Cell> cells;
  for (double v : values) {
    for (Strategy s : spec.strategies) {
      for (Pricing p : spec.pricings) cells.push_back({v, s, p});
    }
  }
  return cells;
}

std::vector<ReplicationRow> run_replication(const Scenario& scenario, const SweepSpec& spec,
                                            const std::vector<Cell>& cells, std::size_t rep) {
  const std::uint64_t seed = replication_seed(spec.seed, rep);
  const StagedMarket staged = stage(scenario, spec.resample ? seed : replication_seed(spec.seed, 0));
  const std::uint64_t print = fingerprint(staged.data);
  std::vector<ReplicationRow> rows;
  for (const Cell& cell : cells) {
    MarketConfig cfg = spec.base_config;
    cfg.strategy = cell.strategy;
    cfg.pricing = cell.pricing;
    cfg.seed = seed;
    std::vector<SellerOffer> offers = staged.offers;
    switch (spec.parameter) {
      case SweepParameter::WTP: cfg.wtp = cell.param_value; break;
      case SweepParameter::Budget: cfg.budget = cell.param_value; break;
      case SweepParameter::WtsScale:
        for (auto& o : offers) o.wts *= cell.param_value;
        break;
      case SweepParameter::None: break;
    }
    const MarketOutcome out = run_market(staged.data, offers, cfg, staged.loss);
    ReplicationRow row;
    row.replication = rep;
    row.strategy = cell.strategy;
    row.pricing = cell.pricing;
    row.param_value = cell.param_value;
    row.acquired = out.n_acquired;
    row.incorporated = out.n_incorporated;
    row.spent = out.total_spent;
    row.improvement_pct = out.improvement_pct;
    row.budget_exhausted = out.budget_exhausted;
    row.threshold_met = out.threshold_met;
    row.split_fingerprint = print;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

double ReplicationRow::avg_cost() const {
  return incorporated > 0 ? spent / incorporated : std::nan("");
}

StagedMarket stage(const Scenario& scenario, std::uint64_t split_seed) {
  StagedMarket out;
  if (scenario.kind == Scenario::Kind::RealEstate) {
    out.data = split_pool(scenario.table, scenario.split, split_seed);
    out.loss = LossSpec::param_variance();
  } else {
    out.data = stage_energy(scenario.series, scenario.lags, scenario.energy_split, split_seed);
    out.loss = LossSpec::validation_mse(out.data.validation);
  }
  out.offers = make_offers(out.data, scenario.wts);
  return out;
}

std::string_view to_string(SweepParameter parameter) {
  switch (parameter) {
    case SweepParameter::None: return "none";
    case SweepParameter::WTP: return "wtp";
    case SweepParameter::WtsScale: return "wts_scale";
    case SweepParameter::Budget: return "budget";
  }
  return "none";
}

SweepParameter parse_sweep_parameter(std::string_view text) {
  if (text == "none") return SweepParameter::None;
  if (text == "wtp") return SweepParameter::WTP;
  if (text == "wts_scale") return SweepParameter::WtsScale;
  if (text == "budget") return SweepParameter::Budget;
  throw Error(ErrorKind::InvalidArgument, "unknown sweep parameter '" + std::string(text) + "'");
}

std::uint64_t replication_seed(std::uint64_t root, std::size_t replication) {
  return derive_seed(root, "montecarlo-rep", replication);
}

SweepResult sweep(const Scenario& scenario, const SweepSpec& spec) {
  if (spec.replications < 1) throw Error(ErrorKind::InvalidArgument, "replications must be >= 1");
  if (spec.parameter != SweepParameter::None && spec.values.empty()) {
    throw Error(ErrorKind::InvalidArgument, "sweep needs at least one value");
  }
  if (spec.strategies.empty() || spec.pricings.empty()) {
    throw Error(ErrorKind::InvalidArgument, "sweep needs at least one strategy and pricing scheme");
  }
  const auto cells = cells_of(spec);
  std::vector<std::vector<ReplicationRow>> per_rep(spec.replications);
  std::vector<std::exception_ptr> errors(spec.replications);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t rep = next++; rep < spec.replications; rep = next++) {
      try {
        per_rep[rep] = run_replication(scenario, spec, cells, rep);
      } catch (...) {
        errors[rep] = std::current_exception();
      }
    }
  };
  const unsigned jobs = std::max(1U, std::min<unsigned>(spec.jobs, static_cast<unsigned>(spec.replications)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t rep = 0; rep < spec.replications; ++rep) {
    if (!errors[rep]) continue;
    try {
      std::rethrow_exception(errors[rep]);
    } catch (const Error& e) {
      throw Error(e.kind(), "replication " + std::to_string(rep) + ": " + e.what());
    }
  }

  SweepResult result;
  for (auto& rows : per_rep) result.rows.insert(result.rows.end(), rows.begin(), rows.end());
  result.cells = summarize(result.rows);
  return result;
}

RunSummary monte_carlo(const Scenario& scenario, const MarketConfig& cfg, std::size_t replications,
                       std::uint64_t seed, unsigned jobs) {
  SweepSpec spec;
  spec.base_config = cfg;
  spec.replications = replications;
  spec.strategies = {cfg.strategy};
  spec.pricings = {cfg.pricing};
  spec.seed = seed;
  spec.jobs = jobs;
  return sweep(scenario, spec).cells.front();
}

std::vector<RunSummary> summarize(const std::vector<ReplicationRow>& rows) {
  // Cells keep the order in which they first appear in the rows.
  std::vector<RunSummary> cells;
  for (const auto& row : rows) {
    auto it = std::find_if(cells.begin(), cells.end(), [&](const RunSummary& c) {
      return c.strategy == row.strategy && c.pricing == row.pricing && c.param_value == row.param_value;
    });
    if (it == cells.end()) {
      RunSummary cell;
      cell.strategy = row.strategy;
      cell.pricing = row.pricing;
      cell.param_value = row.param_value;
      cells.push_back(cell);
      it = cells.end() - 1;
    }
    it->incorporated.push_back(row.incorporated);
    it->spent.push_back(row.spent);
    it->improvement_pct.push_back(row.improvement_pct);
  }
  for (auto& cell : cells) {
    const std::vector<double> counts(cell.incorporated.begin(), cell.incorporated.end());
    double sum = 0.0;
    for (double c : counts) sum += c;
    cell.mean = sum / static_cast<double>(counts.size());
    cell.p25 = percentile(counts, 0.25);
    cell.p75 = percentile(counts, 0.75);
  }
  std::stable_sort(cells.begin(), cells.end(), [](const RunSummary& a, const RunSummary& b) {
    return a.param_value < b.param_value;
  });
  return cells;
}

std::vector<ComparisonRow> compare_average_cost(const std::vector<ReplicationRow>& rows) {
  // (pricing, param, strategy) -> replication -> average cost
  std::map<std::tuple<int, double, int>, std::map<std::size_t, double>> costs;
  for (const auto& row : rows) {
    costs[{static_cast<int>(row.pricing), row.param_value, static_cast<int>(row.strategy)}][row.replication] =
        row.avg_cost();
  }
  std::vector<ComparisonRow> out;
  for (const auto& [key, method] : costs) {
    const auto [pricing, param, strategy] = key;
    if (strategy == static_cast<int>(Strategy::RSC)) continue;
    const auto base_it = costs.find({pricing, param, static_cast<int>(Strategy::RSC)});
    if (base_it == costs.end()) continue;
    std::vector<double> m;
    std::vector<double> b;
    for (const auto& [rep, cost] : method) {
      const auto hit = base_it->second.find(rep);
      if (hit == base_it->second.end() || std::isnan(cost) || std::isnan(hit->second)) continue;
      m.push_back(cost);
      b.push_back(hit->second);
    }
    if (m.empty()) continue;
    ComparisonRow row;
    row.comparison = std::string(to_string(static_cast<Strategy>(strategy))) + "-RSC";
    row.pricing = static_cast<Pricing>(pricing);
    row.param_value = param;
    row.result = paired_comparison(m, b);
    out.push_back(row);
  }
  return out;
}

void write_raw_reps_csv(std::ostream& out, const std::vector<ReplicationRow>& rows) {
  out << "replication,strategy,pricing,param_value,acquired,incorporated,spent,improvement_pct\n";
  for (const auto& r : rows) {
    out << csv::join({std::to_string(r.replication), std::string(to_string(r.strategy)),
                      std::string(to_string(r.pricing)), csv::format_real(r.param_value),
                      std::to_string(r.acquired), std::to_string(r.incorporated),
                      csv::format_real(r.spent), csv::format_real(r.improvement_pct)})
        << '\n';
  }
}

std::vector<ReplicationRow> read_raw_reps_csv(std::istream& in) {
  const csv::Table table = csv::read(in);
  if (csv::join(table.header) !=
      "replication,strategy,pricing,param_value,acquired,incorporated,spent,improvement_pct") {
    throw Error(ErrorKind::SchemaMismatch, "unexpected raw replication header");
  }
  std::vector<ReplicationRow> rows;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    try {
      ReplicationRow r;
      r.replication = static_cast<std::size_t>(csv::parse_real(f[0]));
      r.strategy = parse_strategy(f[1]);
      r.pricing = parse_pricing(f[2]);
      r.param_value = csv::parse_real(f[3]);
      r.acquired = static_cast<int>(csv::parse_real(f[4]));
      r.incorporated = static_cast<int>(csv::parse_real(f[5]));
      r.spent = csv::parse_real(f[6]);
      r.improvement_pct = csv::parse_real(f[7]);
      rows.push_back(r);
    } catch (const Error& e) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(table.line_numbers[i]) + ": " + e.what());
    }
  }
  return rows;
}

void write_summary_json(std::ostream& out, const std::vector<RunSummary>& cells, SweepParameter parameter) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["parameter"] = std::string(to_string(parameter));
  doc["cells"] = ordered_json::array();
  for (const auto& c : cells) {
    const double n = static_cast<double>(c.incorporated.size());
    double spent = 0.0;
    double improvement = 0.0;
    for (double s : c.spent) spent += s;
    for (double v : c.improvement_pct) improvement += v;
    ordered_json cell;
    cell["strategy"] = std::string(to_string(c.strategy));
    cell["pricing"] = std::string(to_string(c.pricing));
    cell["param_value"] = c.param_value;
    cell["replications"] = c.incorporated.size();
    cell["incorporated_mean"] = c.mean;
    cell["incorporated_p25"] = c.p25;
    cell["incorporated_p75"] = c.p75;
    cell["spent_mean"] = spent / n;
    cell["improvement_pct_mean"] = improvement / n;
    doc["cells"].push_back(cell);
  }
  out << doc.dump(2) << '\n';
}

void write_histogram_csv(std::ostream& out, const std::vector<RunSummary>& cells) {
  out << "strategy,pricing,param_value,incorporated,frequency\n";
  for (const auto& c : cells) {
    std::map<int, int> freq;
    for (int k : c.incorporated) ++freq[k];
    for (const auto& [k, count] : freq) {
      out << to_string(c.strategy) << ',' << to_string(c.pricing) << ',' << csv::format_real(c.param_value)
          << ',' << k << ',' << count << '\n';
    }
  }
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "comparison,pricing,param_value,n,statistic,p_value,median_delta\n";
  for (const auto& r : rows) {
    out << r.comparison << ',' << to_string(r.pricing) << ',' << csv::format_real(r.param_value) << ','
        << r.result.n << ',' << csv::format_real(r.result.statistic) << ','
        << csv::format_real(r.result.p_value) << ',' << csv::format_real(r.result.median_delta) << '\n';
  }
}

}  // namespace alm
