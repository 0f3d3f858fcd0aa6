#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <nlohmann/json.hpp>

#include "alm/cli.hpp"
#include "alm/csv.hpp"
#include "alm/error.hpp"

namespace alm::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;
};

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("config", common.config_path, "experiment config (JSON)")->required();
  cmd->add_option("--set", common.overrides, "override a config key, key=value (repeatable)");
  cmd->add_option("--out", common.out, "output directory");
}

fs::path output_dir(const Common& common, const ExperimentConfig& cfg) {
  if (!common.out.empty()) return common.out;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
  return "almkt-out";
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  body(out);
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

void write_offers_csv(std::ostream& out, const std::vector<SellerOffer>& offers) {
  out << "seller_id,wts\n";
  for (const auto& o : offers) out << csv::join({o.seller_id, csv::format_real(o.wts)}) << '\n';
}

std::vector<SellerOffer> read_offers_csv(const std::string& path) {
  const csv::Table table = csv::read_file(path);
  if (csv::join(table.header) != "seller_id,wts") {
    throw Error(ErrorKind::SchemaMismatch, "offers header must be seller_id,wts");
  }
  std::vector<SellerOffer> offers;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    try {
      offers.push_back({table.rows[i][0], csv::parse_real(table.rows[i][1])});
    } catch (const Error& e) {
      throw Error(ErrorKind::ParseError, "offers line " + std::to_string(table.line_numbers[i]) + ": " + e.what());
    }
  }
  return offers;
}

ordered_json run_summary(const MarketOutcome& out, const MarketConfig& m) {
  ordered_json j;
  j["strategy"] = std::string(to_string(m.strategy));
  j["pricing"] = std::string(to_string(m.pricing));
  j["budget_exhausted"] = out.budget_exhausted;
  j["threshold_met"] = out.threshold_met;
  j["bought"] = out.n_acquired;
  j["incorporated"] = out.n_incorporated;
  j["spent"] = out.total_spent;
  j["improvement"] = out.improvement_pct;
  j["avg_cost"] = out.n_incorporated > 0 ? ordered_json(out.total_spent / out.n_incorporated) : ordered_json();
  j["initial_loss"] = out.initial_loss;
  j["final_loss"] = out.final_loss;
  j["alpha"] = out.alpha;
  j["committee_fallbacks"] = out.committee_fallbacks;
  return j;
}

void emit_run(const fs::path& dir, const ExperimentConfig& cfg, const MarketConfig& m,
              const MarketOutcome& out, const std::vector<SellerOffer>& offers) {
  write_file(dir / "offers.csv", [&](std::ostream& s) { write_offers_csv(s, offers); });
  if (cfg.emit_ledger) write_file(dir / "ledger.csv", [&](std::ostream& s) { write_ledger_csv(s, out.ledger); });
  if (cfg.emit_trajectory) {
    write_file(dir / "trajectory.csv", [&](std::ostream& s) {
      s << "step,cumulative_cost,improvement_pct\n0,0,0\n";
      for (const auto& r : out.ledger) {
        const double pct = out.initial_loss > 0.0 ? 100.0 * (out.initial_loss - r.loss_after) / out.initial_loss : 0.0;
        s << r.step << ',' << csv::format_real(r.cumulative_cost) << ',' << csv::format_real(pct) << '\n';
      }
    });
    write_file(dir / "cost_efficiency.csv", [&](std::ostream& s) {
      s << "step,cost_efficiency\n";
      double value = 0.0;
      double cost = 0.0;
      for (const auto& r : out.ledger) {
        if (r.incorporated) value += r.loss_reduction;
        cost += r.price;
        if (cost != 0.0) s << r.step << ',' << csv::format_real(value / cost) << '\n';
      }
    });
  }
  if (cfg.emit_summary) {
    write_file(dir / "summary.json", [&](std::ostream& s) { s << run_summary(out, m).dump(2) << '\n'; });
  }
}

void print_outcome(const MarketConfig& m, const MarketOutcome& out) {
  std::cout << to_string(m.strategy) << '/' << to_string(m.pricing) << ": bought " << out.n_acquired
            << ", incorporated " << out.n_incorporated << ", spent " << out.total_spent << ", improvement "
            << out.improvement_pct << "%, threshold " << (out.threshold_met ? "met" : "not met")
            << ", budget " << (out.budget_exhausted ? "exhausted" : "left") << '\n';
}

int cmd_run(const Common& common, bool paired) {
  const ExperimentConfig cfg = load_config(common.config_path, common.overrides);
  const Scenario scenario = load_scenario(cfg);
  const StagedMarket staged = stage(scenario, cfg.seed);
  const fs::path dir = output_dir(common, cfg);
  MarketConfig m = market_config(cfg);
  if (!paired) {
    const MarketOutcome out = run_market(staged.data, staged.offers, m, staged.loss);
    emit_run(dir, cfg, m, out, staged.offers);
    print_outcome(m, out);
    return kOk;
  }
  m.pricing = Pricing::BuyerCentric;
  const MarketOutcome bc = run_market(staged.data, staged.offers, m, staged.loss);
  emit_run(dir / "BC", cfg, m, bc, staged.offers);
  print_outcome(m, bc);
  MarketConfig m_sc = m;
  m_sc.pricing = Pricing::SellerCentric;
  const MarketOutcome sc = run_market(staged.data, staged.offers, m_sc, staged.loss);
  emit_run(dir / "SC", cfg, m_sc, sc, staged.offers);
  print_outcome(m_sc, sc);
  write_file(dir / "revenue.csv", [&](std::ostream& s) {
    s << "rank,seller_id,revenue_bc,revenue_sc\n";
    std::size_t rank = 0;
    for (const auto& r : seller_revenue_comparison(bc, sc, staged.offers)) {
      s << ++rank << ',' << csv::join({r.seller_id}) << ',' << csv::format_real(r.revenue_bc) << ','
        << csv::format_real(r.revenue_sc) << '\n';
    }
  });
  return kOk;
}

struct MonteCarloFlags {
  std::optional<std::size_t> replications;
  std::optional<unsigned> jobs;
  std::optional<std::string> parameter;
  std::vector<double> values;
};

void add_mc_flags(CLI::App* cmd, MonteCarloFlags& f) {
  cmd->add_option("--replications", f.replications, "number of replications");
  cmd->add_option("--jobs", f.jobs, "worker threads (results do not depend on it)");
}

SweepResult run_sweep(const ExperimentConfig& cfg, const MonteCarloFlags& f, bool use_sweep) {
  SweepSpec spec;
  spec.base_config = market_config(cfg);
  spec.replications = f.replications.value_or(cfg.replications);
  spec.jobs = f.jobs.value_or(cfg.jobs);
  spec.resample = cfg.resample;
  spec.seed = cfg.seed;
  if (use_sweep) {
    spec.parameter = parse_sweep_parameter(f.parameter.value_or(cfg.sweep_parameter));
    spec.values = f.values.empty() ? cfg.sweep_values : f.values;
    if (spec.parameter == SweepParameter::None || spec.values.empty()) {
      throw Error(ErrorKind::ConfigConflict, "sweep needs a parameter and at least one value");
    }
  }
  if (spec.replications < 1) throw Error(ErrorKind::ConfigConflict, "replications must be at least 1");
  return sweep(load_scenario(cfg), spec);
}

void emit_sweep(const fs::path& dir, const ExperimentConfig& cfg, const SweepResult& result,
                SweepParameter parameter) {
  if (cfg.emit_raw_reps) {
    write_file(dir / "raw_reps.csv", [&](std::ostream& s) { write_raw_reps_csv(s, result.rows); });
  }
  if (cfg.emit_summary) {
    write_file(dir / "summary.json", [&](std::ostream& s) { write_summary_json(s, result.cells, parameter); });
  }
  write_file(dir / "histogram.csv", [&](std::ostream& s) { write_histogram_csv(s, result.cells); });
}

void print_cells(const std::vector<RunSummary>& cells, SweepParameter parameter) {
  for (const auto& c : cells) {
    std::cout << to_string(c.strategy) << '/' << to_string(c.pricing);
    if (parameter != SweepParameter::None) std::cout << ' ' << to_string(parameter) << '=' << c.param_value;
    std::cout << ": incorporated " << c.mean << " [" << c.p25 << "-" << c.p75 << "]\n";
  }
}

int cmd_montecarlo(const Common& common, const MonteCarloFlags& f, bool use_sweep) {
  const ExperimentConfig cfg = load_config(common.config_path, common.overrides);
  const SweepResult result = run_sweep(cfg, f, use_sweep);
  const SweepParameter parameter =
      use_sweep ? parse_sweep_parameter(f.parameter.value_or(cfg.sweep_parameter)) : SweepParameter::None;
  emit_sweep(output_dir(common, cfg), cfg, result, parameter);
  print_cells(result.cells, parameter);
  return kOk;
}

int cmd_compare(const Common& common, const MonteCarloFlags& f, const std::string& raw_path) {
  std::vector<ReplicationRow> rows;
  fs::path dir;
  if (!raw_path.empty()) {
    std::ifstream in(raw_path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + raw_path);
    rows = read_raw_reps_csv(in);
    dir = !common.out.empty() ? fs::path(common.out) : fs::path(raw_path).parent_path();
  } else {
    const ExperimentConfig cfg = load_config(common.config_path, common.overrides);
    const SweepResult result = run_sweep(cfg, f, false);
    rows = result.rows;
    dir = output_dir(common, cfg);
    if (cfg.emit_raw_reps) {
      write_file(dir / "raw_reps.csv", [&](std::ostream& s) { write_raw_reps_csv(s, rows); });
    }
  }
  const auto table = compare_average_cost(rows);
  write_file(dir / "comparison.csv", [&](std::ostream& s) { write_comparison_csv(s, table); });
  for (const auto& r : table) {
    std::cout << r.comparison << ' ' << to_string(r.pricing) << ": n=" << r.result.n
              << " median delta " << r.result.median_delta << ", p=" << r.result.p_value << '\n';
  }
  return kOk;
}

struct PropertyFlags {
  std::string ledger;
  std::string offers;
  double wtp = 0.0;
  double budget = 0.0;
  std::string pricing;
};

int cmd_properties(const PropertyFlags& f) {
  std::ifstream in(f.ledger);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + f.ledger);
  MarketOutcome outcome;
  outcome.ledger = read_ledger_csv(in);
  outcome.total_spent = outcome.ledger.empty() ? 0.0 : outcome.ledger.back().cumulative_cost;
  MarketConfig m;
  m.wtp = f.wtp;
  m.budget = f.budget;
  m.pricing = parse_pricing(f.pricing);
  const PropertyReport report = check_market_properties(outcome, read_offers_csv(f.offers), m);
  auto line = [](const char* name, bool ok) { std::cout << name << ": " << (ok ? "holds" : "VIOLATED") << '\n'; };
  line("budget balance", report.budget_balance);
  line("individual rationality", report.individual_rationality);
  line("zero element", report.zero_element);
  line("pre-purchase budget", report.pre_purchase_budget);
  for (const auto& v : report.violations) std::cout << "  " << v << '\n';
  return report.ok() ? kOk : kMarketError;
}

int cmd_synth(const std::string& kind, const std::string& path, std::uint64_t seed) {
  write_file(path, [&](std::ostream& s) {
    if (kind == "real_estate") {
      write_real_estate_surrogate(s, seed);
    } else {
      write_energy_surrogate(s, seed);
    }
  });
  return kOk;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::ConfigConflict:
    case ErrorKind::InvalidArgument: return kConfigError;
    default: break;
  }
  return is_data_error(e.kind()) ? kDataError : kMarketError;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Active learning market simulator"};
  app.require_subcommand(1);

  Common common;
  bool paired = false;
  auto* run_cmd = app.add_subcommand("run", "single market run");
  add_common(run_cmd, common);
  run_cmd->add_flag("--paired", paired, "run both pricing schemes and write seller revenues");

  MonteCarloFlags mc;
  auto* mc_cmd = app.add_subcommand("montecarlo", "replications over resampled splits, every strategy and scheme");
  add_common(mc_cmd, common);
  add_mc_flags(mc_cmd, mc);

  auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo over a parameter grid");
  add_common(sweep_cmd, common);
  add_mc_flags(sweep_cmd, mc);
  sweep_cmd->add_option("--parameter", mc.parameter, "wtp | wts_scale | budget");
  sweep_cmd->add_option("--values", mc.values, "comma separated values")->delimiter(',');

  std::string raw_path;
  auto* cmp_cmd = app.add_subcommand("compare", "paired Wilcoxon comparison of average cost against RSC");
  cmp_cmd->add_option("config", common.config_path, "experiment config (JSON)");
  cmp_cmd->add_option("--set", common.overrides, "override a config key, key=value (repeatable)");
  cmp_cmd->add_option("--out", common.out, "output directory");
  cmp_cmd->add_option("--raw", raw_path, "reuse an existing raw_reps.csv instead of running");
  add_mc_flags(cmp_cmd, mc);

  PropertyFlags props;
  auto* prop_cmd = app.add_subcommand("properties", "check market properties of a stored ledger");
  prop_cmd->add_option("--ledger", props.ledger, "ledger.csv")->required();
  prop_cmd->add_option("--offers", props.offers, "offers.csv")->required();
  prop_cmd->add_option("--wtp", props.wtp, "willingness to pay")->required();
  prop_cmd->add_option("--budget", props.budget, "budget")->required();
  prop_cmd->add_option("--pricing", props.pricing, "BC | SC")->required();

  std::string synth_kind;
  std::string synth_path;
  std::uint64_t synth_seed = 1;
  auto* synth_cmd = app.add_subcommand("synth", "write a seeded surrogate dataset");
  synth_cmd->add_option("dataset", synth_kind, "real_estate | energy")
      ->required()
      ->check(CLI::IsMember({"real_estate", "energy"}));
  synth_cmd->add_option("--out", synth_path, "output CSV")->required();
  synth_cmd->add_option("--seed", synth_seed, "seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run_cmd) return cmd_run(common, paired);
    if (*mc_cmd) return cmd_montecarlo(common, mc, false);
    if (*sweep_cmd) return cmd_montecarlo(common, mc, true);
    if (*cmp_cmd) {
      if (raw_path.empty() && common.config_path.empty()) {
        std::cerr << "almkt: error: compare needs a config or --raw\n";
        return kConfigError;
      }
      return cmd_compare(common, mc, raw_path);
    }
    if (*prop_cmd) return cmd_properties(props);
    if (*synth_cmd) return cmd_synth(synth_kind, synth_path, synth_seed);
  } catch (const Error& e) {
    std::cerr << "almkt: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "almkt: error: " << e.what() << '\n';
    return kMarketError;
  }
  return kConfigError;
}

}  // namespace alm::cli
