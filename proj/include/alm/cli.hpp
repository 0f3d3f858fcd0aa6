#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "alm/experiments.hpp"

namespace alm::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kDataError = 3, kMarketError = 4 };

// Default output directory when neither the config nor --out names one.
inline constexpr const char* kOutputDirEnv = "ALMKT_OUTPUT_DIR";

// One flat JSON object per experiment. Keys and defaults are listed in the
// README; unknown keys are rejected.
struct ExperimentConfig {
  std::string dataset = "real_estate";  // real_estate | energy
  std::string data_path;
  std::string analyst_column = "Rachael";
  std::string seller_column = "Madge";
  std::vector<int> lags{168, 144, 120, 96, 72, 48, 24};

  std::size_t k_init = 30;
  std::size_t pool_size = 100;
  double val_fraction = 0.0;
  bool standardize_labels = false;

  double wtp = 1.0;
  double budget = 1.0;
  double budget_resolution = 1e-3;
  std::optional<double> improvement_target;
  std::optional<double> alpha;
  std::string pricing = "BC";
  std::string strategy = "VBAL";
  bool rsc_applies_wtp_check = false;
  std::size_t committee_size = 10;
  double bootstrap_fraction = 1.0;
  bool refresh_committee = true;
  bool refit_sigma2 = false;
  std::uint64_t seed = 0;

  std::string wts_model = "synthetic";  // synthetic | uniform
  double wts_d0 = 0.1;
  double wts_d1 = 0.5;
  std::string wts_driver = "mrt_distance";
  double wts_value = 30.0;
  double wts_scale = 1.0;

  std::string output_dir;
  bool emit_ledger = true;
  bool emit_trajectory = true;
  bool emit_summary = true;
  bool emit_raw_reps = true;

  std::size_t replications = 50;
  bool resample = true;
  unsigned jobs = 1;
  std::string sweep_parameter = "none";
  std::vector<double> sweep_values;
};

// Parses a JSON document, then applies "key=value" overrides in order. Values
// are read as JSON when they parse as JSON, as strings otherwise. Relative
// data paths resolve against the config file's directory.
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});
ExperimentConfig parse_config(const std::string& json_text, const std::vector<std::string>& overrides = {},
                              const std::string& base_dir = "");

MarketConfig market_config(const ExperimentConfig& cfg);
// Loads the dataset named by the config.
Scenario load_scenario(const ExperimentConfig& cfg);

// Entry point of the almkt executable; returns the process exit status.
int run(int argc, char** argv);

}  // namespace alm::cli
