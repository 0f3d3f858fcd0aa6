#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "alm/cli.hpp"
#include "alm/error.hpp"

namespace alm::cli {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& message) {
  throw Error(ErrorKind::ConfigConflict, message);
}

template <typename T>
T as(const json& value, const std::string& key) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    config_error("config key '" + key + "' has the wrong type: " + value.dump());
  }
}

double real(const json& v, const std::string& key) {
  if (!v.is_number()) config_error("config key '" + key + "' must be a number");
  return v.get<double>();
}

std::size_t count(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    config_error("config key '" + key + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

bool flag(const json& v, const std::string& key) {
  if (!v.is_boolean()) config_error("config key '" + key + "' must be true or false");
  return v.get<bool>();
}

using Setter = std::function<void(ExperimentConfig&, const json&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"dataset", [](auto& c, const json& v, const auto& k) { c.dataset = as<std::string>(v, k); }},
      {"data_path", [](auto& c, const json& v, const auto& k) { c.data_path = as<std::string>(v, k); }},
      {"analyst_column", [](auto& c, const json& v, const auto& k) { c.analyst_column = as<std::string>(v, k); }},
      {"seller_column", [](auto& c, const json& v, const auto& k) { c.seller_column = as<std::string>(v, k); }},
      {"lags", [](auto& c, const json& v, const auto& k) { c.lags = as<std::vector<int>>(v, k); }},
      {"k_init", [](auto& c, const json& v, const auto& k) { c.k_init = count(v, k); }},
      {"pool_size", [](auto& c, const json& v, const auto& k) { c.pool_size = count(v, k); }},
      {"val_fraction", [](auto& c, const json& v, const auto& k) { c.val_fraction = real(v, k); }},
      {"standardize_labels", [](auto& c, const json& v, const auto& k) { c.standardize_labels = flag(v, k); }},
      {"wtp", [](auto& c, const json& v, const auto& k) { c.wtp = real(v, k); }},
      {"budget", [](auto& c, const json& v, const auto& k) { c.budget = real(v, k); }},
      {"budget_resolution", [](auto& c, const json& v, const auto& k) { c.budget_resolution = real(v, k); }},
      {"improvement_target",
       [](auto& c, const json& v, const auto& k) {
         if (v.is_null()) c.improvement_target.reset(); else c.improvement_target = real(v, k);
       }},
      {"alpha",
       [](auto& c, const json& v, const auto& k) {
         if (v.is_null()) c.alpha.reset(); else c.alpha = real(v, k);
       }},
      {"pricing", [](auto& c, const json& v, const auto& k) { c.pricing = as<std::string>(v, k); }},
      {"strategy", [](auto& c, const json& v, const auto& k) { c.strategy = as<std::string>(v, k); }},
      {"rsc_applies_wtp_check",
       [](auto& c, const json& v, const auto& k) { c.rsc_applies_wtp_check = flag(v, k); }},
      {"committee_size", [](auto& c, const json& v, const auto& k) { c.committee_size = count(v, k); }},
      {"bootstrap_fraction", [](auto& c, const json& v, const auto& k) { c.bootstrap_fraction = real(v, k); }},
      {"refresh_committee", [](auto& c, const json& v, const auto& k) { c.refresh_committee = flag(v, k); }},
      {"refit_sigma2", [](auto& c, const json& v, const auto& k) { c.refit_sigma2 = flag(v, k); }},
      {"seed",
       [](auto& c, const json& v, const auto& k) {
         if (!v.is_number_unsigned()) config_error("config key '" + k + "' must be a nonnegative integer");
         c.seed = v.template get<std::uint64_t>();
       }},
      {"wts_model", [](auto& c, const json& v, const auto& k) { c.wts_model = as<std::string>(v, k); }},
      {"wts_d0", [](auto& c, const json& v, const auto& k) { c.wts_d0 = real(v, k); }},
      {"wts_d1", [](auto& c, const json& v, const auto& k) { c.wts_d1 = real(v, k); }},
      {"wts_driver", [](auto& c, const json& v, const auto& k) { c.wts_driver = as<std::string>(v, k); }},
      {"wts_value", [](auto& c, const json& v, const auto& k) { c.wts_value = real(v, k); }},
      {"wts_scale", [](auto& c, const json& v, const auto& k) { c.wts_scale = real(v, k); }},
      {"output_dir", [](auto& c, const json& v, const auto& k) { c.output_dir = as<std::string>(v, k); }},
      {"emit_ledger", [](auto& c, const json& v, const auto& k) { c.emit_ledger = flag(v, k); }},
      {"emit_trajectory", [](auto& c, const json& v, const auto& k) { c.emit_trajectory = flag(v, k); }},
      {"emit_summary", [](auto& c, const json& v, const auto& k) { c.emit_summary = flag(v, k); }},
      {"emit_raw_reps", [](auto& c, const json& v, const auto& k) { c.emit_raw_reps = flag(v, k); }},
      {"replications", [](auto& c, const json& v, const auto& k) { c.replications = count(v, k); }},
      {"resample", [](auto& c, const json& v, const auto& k) { c.resample = flag(v, k); }},
      {"jobs", [](auto& c, const json& v, const auto& k) { c.jobs = static_cast<unsigned>(count(v, k)); }},
      {"sweep_parameter", [](auto& c, const json& v, const auto& k) { c.sweep_parameter = as<std::string>(v, k); }},
      {"sweep_values", [](auto& c, const json& v, const auto& k) { c.sweep_values = as<std::vector<double>>(v, k); }},
  };
  return table;
}

void validate(const ExperimentConfig& c) {
  if (c.dataset != "real_estate" && c.dataset != "energy") {
    config_error("dataset must be real_estate or energy, not '" + c.dataset + "'");
  }
  if (c.data_path.empty()) config_error("data_path is required");
  if (c.wts_model != "synthetic" && c.wts_model != "uniform") {
    config_error("wts_model must be synthetic or uniform");
  }
  if (c.improvement_target && c.alpha) config_error("give improvement_target or alpha, not both");
  if (!c.improvement_target && !c.alpha) config_error("one of improvement_target or alpha is required");
  try {
    (void)parse_pricing(c.pricing);
    (void)parse_strategy(c.strategy);
    (void)parse_sweep_parameter(c.sweep_parameter);
  } catch (const Error& e) {
    config_error(e.what());
  }
  if (c.replications < 1) config_error("replications must be at least 1");
  if (c.wts_scale < 0.0) config_error("wts_scale must be nonnegative");
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, const std::vector<std::string>& overrides,
                              const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) config_error("config must be a JSON object");
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) config_error("override '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq);
    const std::string text = item.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    doc[key] = value;
  }

  ExperimentConfig cfg;
  if (doc.contains("dataset") && doc["dataset"] == "energy") {
    cfg.k_init = 100;
    cfg.pool_size = 300;
    cfg.val_fraction = 0.2;
    cfg.wts_model = "uniform";
  }
  const auto& table = setters();
  for (const auto& [key, value] : doc.items()) {
    const auto it = table.find(key);
    if (it == table.end()) config_error("unknown config key '" + key + "'");
    it->second(cfg, value, key);
  }
  validate(cfg);
  if (!base_dir.empty() && std::filesystem::path(cfg.data_path).is_relative()) {
    cfg.data_path = (std::filesystem::path(base_dir) / cfg.data_path).lexically_normal().string();
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config " + path);
  std::stringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), overrides, std::filesystem::path(path).parent_path().string());
}

MarketConfig market_config(const ExperimentConfig& c) {
  MarketConfig m;
  m.wtp = c.wtp;
  m.budget = c.budget;
  m.budget_resolution = c.budget_resolution;
  m.improvement_target = c.improvement_target;
  m.alpha = c.alpha;
  m.pricing = parse_pricing(c.pricing);
  m.strategy = parse_strategy(c.strategy);
  m.rsc_applies_wtp_check = c.rsc_applies_wtp_check;
  m.committee.size = static_cast<int>(c.committee_size);
  m.committee.bootstrap_fraction = c.bootstrap_fraction;
  m.refresh_committee = c.refresh_committee;
  m.refit_sigma2 = c.refit_sigma2;
  m.seed = c.seed;
  return m;
}

Scenario load_scenario(const ExperimentConfig& c) {
  Scenario s;
  if (c.dataset == "real_estate") {
    s.kind = Scenario::Kind::RealEstate;
    s.table = load_real_estate(c.data_path);
    s.split = {c.k_init, c.pool_size, c.val_fraction, c.standardize_labels};
    s.wts = c.wts_model == "synthetic" ? WtsModel::synthetic(c.wts_d0, c.wts_d1, c.wts_driver, s.table)
                                       : WtsModel::uniform(c.wts_value);
  } else {
    s.kind = Scenario::Kind::Energy;
    s.series = load_energy(c.data_path, c.analyst_column, c.seller_column);
    s.lags.lags = c.lags;
    s.energy_split = {c.k_init, c.pool_size, c.val_fraction};
    if (c.wts_model != "uniform") config_error("the energy dataset supports wts_model uniform only");
    s.wts = WtsModel::uniform(c.wts_value);
  }
  s.wts.scale = c.wts_scale;
  return s;
}

}  // namespace alm::cli
