#include "spikefolio/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>

namespace spikefolio {

namespace {

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
  std::size_t pos = 0;
  double d = std::stod(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("not a number: " + v);
  return d;
}

int to_int(const std::string& v) {
  std::size_t pos = 0;
  int i = std::stoi(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("not an integer: " + v);
  return i;
}

std::uint64_t to_u64(const std::string& v) {
  std::uint64_t out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw std::invalid_argument("not an unsigned integer: " + v);
  return out;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("not a boolean: " + v);
}

using Setter = std::function<void(Config&, const std::string&)>;

const std::map<std::string, Setter>& key_table() {
  static const std::map<std::string, Setter> table = {
      {"data.prices", [](Config& c, const std::string& v) { c.data_prices = v; }},
      {"data.universe", [](Config& c, const std::string& v) { c.data_universe = v; }},
      {"data.min_completeness", [](Config& c, const std::string& v) { c.data_min_completeness = to_double(v); }},
      {"data.impute", [](Config& c, const std::string& v) { c.data_impute = v; }},
      {"data.align_calendars", [](Config& c, const std::string& v) { c.data_align_calendars = to_bool(v); }},
      {"split.train_fraction", [](Config& c, const std::string& v) { c.split_train_fraction = to_double(v); }},

      {"cluster.enabled", [](Config& c, const std::string& v) { c.cluster_enabled = to_bool(v); }},
      {"cluster.per_market", [](Config& c, const std::string& v) { c.cluster_per_market = to_bool(v); }},
      {"cluster.k_min", [](Config& c, const std::string& v) { c.cluster_k_min = to_int(v); }},
      {"cluster.k_max", [](Config& c, const std::string& v) { c.cluster_k_max = to_int(v); }},

      {"objective.risk_free", [](Config& c, const std::string& v) { c.objective.risk_free = to_double(v); }},
      {"objective.eps", [](Config& c, const std::string& v) { c.objective.eps = to_double(v); }},
      {"objective.tx_cost", [](Config& c, const std::string& v) { c.objective.tx_cost_rate = to_double(v); }},
      {"objective.k_min", [](Config& c, const std::string& v) { c.objective.k_min = to_int(v); }},
      {"objective.k_max", [](Config& c, const std::string& v) { c.objective.k_max = to_int(v); }},
      {"objective.loss_w1", [](Config& c, const std::string& v) { c.objective.loss_w1 = to_double(v); }},
      // loss_w2 is the eta transaction-cost penalty of the optimization problem
      {"objective.loss_w2", [](Config& c, const std::string& v) { c.objective.loss_w2 = to_double(v); }},
      {"objective.loss_w3", [](Config& c, const std::string& v) { c.objective.loss_w3 = to_double(v); }},
      {"objective.loss_w4", [](Config& c, const std::string& v) { c.objective.loss_w4 = to_double(v); }},

      {"encode.population", [](Config& c, const std::string& v) { c.encoding.population = to_int(v); }},
      {"encode.range_lo", [](Config& c, const std::string& v) { c.encoding.range_lo = to_double(v); }},
      {"encode.range_hi", [](Config& c, const std::string& v) { c.encoding.range_hi = to_double(v); }},
      {"encode.amplitude", [](Config& c, const std::string& v) { c.encoding.amplitude = to_double(v); }},
      {"encode.noise_sigma", [](Config& c, const std::string& v) { c.encoding.noise_sigma = to_double(v); }},
      {"encode.lambda0", [](Config& c, const std::string& v) { c.schedule.lambda0 = to_double(v); }},
      {"encode.schedule", [](Config& c, const std::string& v) {
         if (v == "polynomial") c.schedule.mode = ScheduleMode::Polynomial;
         else if (v == "exponential") c.schedule.mode = ScheduleMode::Exponential;
         else throw std::invalid_argument("schedule must be polynomial or exponential");
       }},
      {"encode.alpha_decay", [](Config& c, const std::string& v) { c.schedule.alpha_decay = to_double(v); }},
      {"encode.beta_poly", [](Config& c, const std::string& v) { c.schedule.beta_poly = to_double(v); }},

      {"neuron.tau_m", [](Config& c, const std::string& v) { c.neuron.tau_m = to_double(v); }},
      {"neuron.dt", [](Config& c, const std::string& v) { c.neuron.dt = to_double(v); }},
      {"neuron.v_rest", [](Config& c, const std::string& v) { c.neuron.v_rest = to_double(v); }},
      {"neuron.v_reset", [](Config& c, const std::string& v) { c.neuron.v_reset = to_double(v); }},
      {"neuron.r_m", [](Config& c, const std::string& v) { c.neuron.r_m = to_double(v); }},
      {"neuron.v_th_init", [](Config& c, const std::string& v) { c.neuron.v_th_init = to_double(v); }},
      {"neuron.v_th_min", [](Config& c, const std::string& v) { c.neuron.v_th_min = to_double(v); }},
      {"neuron.v_target", [](Config& c, const std::string& v) { c.neuron.v_target = to_double(v); }},
      {"neuron.threshold_gamma", [](Config& c, const std::string& v) { c.neuron.threshold_gamma = to_double(v); }},

      {"stdp.a_plus", [](Config& c, const std::string& v) { c.stdp.a_plus = to_double(v); }},
      {"stdp.a_minus", [](Config& c, const std::string& v) { c.stdp.a_minus = to_double(v); }},
      {"stdp.tau_plus", [](Config& c, const std::string& v) { c.stdp.tau_plus = to_double(v); }},
      {"stdp.tau_minus", [](Config& c, const std::string& v) { c.stdp.tau_minus = to_double(v); }},

      {"train.epochs", [](Config& c, const std::string& v) { c.train.epochs = to_int(v); }},
      {"train.learning_rate", [](Config& c, const std::string& v) { c.train.learning_rate = to_double(v); }},
      {"train.lr_decay", [](Config& c, const std::string& v) { c.train.lr_decay = to_double(v); }},
      {"train.sim_steps", [](Config& c, const std::string& v) { c.train.sim_steps = to_int(v); }},
      {"train.w_syn_init", [](Config& c, const std::string& v) { c.train.w_syn_init = to_double(v); }},
      {"train.surrogate_alpha", [](Config& c, const std::string& v) { c.train.surrogate_alpha = to_double(v); }},
      {"train.stdp_rate", [](Config& c, const std::string& v) { c.train.stdp_rate = to_double(v); }},
      {"train.inhibition_beta", [](Config& c, const std::string& v) { c.train.inhibition_beta = to_double(v); }},
      {"train.theta_lat", [](Config& c, const std::string& v) { c.train.theta_lat = to_double(v); }},

      {"decode.window", [](Config& c, const std::string& v) { c.decode.window = to_int(v); }},
      {"decode.risk_gamma", [](Config& c, const std::string& v) { c.decode.risk_gamma = to_double(v); }},
      {"decode.k", [](Config& c, const std::string& v) { c.decode.k = to_int(v); }},
      {"decode.flush_eps", [](Config& c, const std::string& v) { c.decode.flush_eps = to_double(v); }},

      {"ann.enabled", [](Config& c, const std::string& v) { c.ann_enabled = to_bool(v); }},
      {"ann.hidden", [](Config& c, const std::string& v) { c.ann.hidden = to_int(v); }},
      {"ann.epochs", [](Config& c, const std::string& v) { c.ann.epochs = to_int(v); }},
      {"ann.learning_rate", [](Config& c, const std::string& v) { c.ann.learning_rate = to_double(v); }},
      {"ann.batch", [](Config& c, const std::string& v) { c.ann.batch = to_int(v); }},
      {"ann.dropout", [](Config& c, const std::string& v) { c.ann.dropout = to_double(v); }},
      {"ann.window", [](Config& c, const std::string& v) { c.ann.window = to_int(v); }},

      {"backtest.rebalance_days", [](Config& c, const std::string& v) { c.backtest_rebalance_days = to_int(v); }},
      {"backtest.rolling_window", [](Config& c, const std::string& v) { c.backtest_rolling_window = to_int(v); }},
      {"backtest.annualization", [](Config& c, const std::string& v) { c.backtest_annualization = to_int(v); }},

      {"seed", [](Config& c, const std::string& v) { c.seed = to_u64(v); }},
  };
  return table;
}

}  // namespace

ImputeMode Config::impute_mode() const {
  if (data_impute == "ffill") return ImputeMode::ForwardFill;
  if (data_impute == "linear") return ImputeMode::Linear;
  throw std::runtime_error("config: data.impute must be 'ffill' or 'linear', got '" +
                           data_impute + "'");
}

void Config::validate() const {
  impute_mode();
  if (!(data_min_completeness > 0.0) || data_min_completeness > 1.0)
    throw std::runtime_error("config: data.min_completeness must be in (0, 1]");
  if (!(split_train_fraction > 0.0) || !(split_train_fraction < 1.0))
    throw std::runtime_error("config: split.train_fraction must be in (0, 1)");
  if (cluster_k_min < 2 || cluster_k_min > cluster_k_max)
    throw std::runtime_error("config: need 2 <= cluster.k_min <= cluster.k_max (k_min=" +
                             std::to_string(cluster_k_min) +
                             ", k_max=" + std::to_string(cluster_k_max) + ")");
  if (objective.k_min > objective.k_max)
    throw std::runtime_error(
        "config: objective.k_min=" + std::to_string(objective.k_min) +
        " must not exceed objective.k_max=" + std::to_string(objective.k_max));
  objective.validate(0);
  encoding.validate();
  schedule.validate();
  neuron.validate();
  stdp.validate();
  train.validate();
  decode.validate();
  ann.validate();
  if (backtest_rebalance_days < 1)
    throw std::runtime_error("config: backtest.rebalance_days must be >= 1");
  if (backtest_rolling_window < 2)
    throw std::runtime_error("config: backtest.rolling_window must be >= 2");
  if (backtest_annualization < 1)
    throw std::runtime_error("config: backtest.annualization must be >= 1");
}

void apply_config_entry(Config& cfg, const std::string& key,
                        const std::string& value) {
  auto it = key_table().find(key);
  if (it == key_table().end())
    throw std::runtime_error("config: unknown key '" + key + "'");
  try {
    it->second(cfg, value);
  } catch (const std::exception& e) {
    throw std::runtime_error("config: key '" + key + "': " + e.what());
  }
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  Config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected key = value");
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    apply_config_entry(cfg, key, value);
  }
  // Noise seeds follow the global seed unless training is reseeded explicitly.
  cfg.encoding.seed = cfg.seed;
  cfg.train.seed = cfg.seed;
  cfg.ann.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

}  // namespace spikefolio
