#pragma once

#include <cstdint>
#include <string>

#include "spikefolio/ann_baseline.hpp"
#include "spikefolio/decoder.hpp"
#include "spikefolio/market_data.hpp"
#include "spikefolio/portfolio_math.hpp"
#include "spikefolio/snn_core.hpp"
#include "spikefolio/spike_encoding.hpp"

namespace spikefolio {

/**
 * @brief Full pipeline configuration, parsed from a flat `key = value` file.
 *
 * Unknown keys are rejected. `spikefolio run --help` and the README list the
 * key table; defaults mirror the standard hyperparameter set.
 */
struct Config {
  // data
  std::string data_prices;
  std::string data_universe;          ///< optional ticker,market file
  double data_min_completeness = 0.9;
  std::string data_impute = "ffill";  ///< ffill | linear
  bool data_align_calendars = true;
  double split_train_fraction = 0.8;

  // clustering
  bool cluster_enabled = true;
  bool cluster_per_market = true;
  int cluster_k_min = 2;
  int cluster_k_max = 10;

  ObjectiveConfig objective;
  EncodingConfig encoding;
  RiskAversionSchedule schedule;
  NeuronParams neuron;
  StdpParams stdp;
  TrainConfig train;
  DecodeConfig decode;

  bool ann_enabled = true;
  MlpConfig ann;

  int backtest_rebalance_days = 21;
  int backtest_rolling_window = 40;
  int backtest_annualization = 252;

  std::uint64_t seed = 42;

  ImputeMode impute_mode() const;
  void validate() const;
};

/// Parses and validates a config file. Throws std::runtime_error naming the
/// offending line/key on any problem.
Config load_config(const std::string& path);

/// Applies one `key = value` assignment (exposed for CLI overrides).
void apply_config_entry(Config& cfg, const std::string& key,
                        const std::string& value);

}  // namespace spikefolio
