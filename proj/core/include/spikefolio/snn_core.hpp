#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spikefolio/clustering.hpp"
#include "spikefolio/decoder.hpp"
#include "spikefolio/market_data.hpp"
#include "spikefolio/portfolio_math.hpp"
#include "spikefolio/snn_types.hpp"
#include "spikefolio/spike_encoding.hpp"

namespace spikefolio {

using BoolVec = Eigen::Array<bool, Eigen::Dynamic, 1>;

/// LIF neuron constants. Potentials in mV, times in ms; R_m = 1 puts input
/// currents directly on the mV scale.
struct NeuronParams {
  double tau_m = 0.8;
  double dt = 0.1;
  double v_rest = 0.0;
  double v_reset = 0.0;
  double r_m = 1.0;
  double v_th_init = 1.0;
  double v_th_min = 0.2;
  double v_target = 1.0;
  double threshold_gamma = 0.98;

  void validate() const;
};

struct StdpParams {
  double a_plus = 0.01;
  double a_minus = 0.01;
  double tau_plus = 20.0;
  double tau_minus = 20.0;

  void validate() const;
};

/// Mutable simulation state. last_spike_ms is NaN until a neuron first fires.
struct NetworkState {
  Eigen::VectorXd v;
  Eigen::VectorXd v_th;
  Eigen::VectorXd last_spike_ms;
  Eigen::MatrixXd w_lat;  ///< assets x assets, nonnegative, zero diagonal
  Eigen::VectorXd w_syn;  ///< per-neuron input gain
  double now_ms = 0.0;

  static NetworkState fresh(int neurons, const NeuronParams& p,
                            Eigen::MatrixXd w_lat, Eigen::VectorXd w_syn);
};

/**
 * @brief One forward-Euler step: V += (dt/tau_m) (-(V - V_rest) + R_m I),
 * spike where V >= V_th (boundary inclusive), then reset.
 *
 * v_pre_out, when given, receives the potentials after the update and before
 * the reset -- the values the threshold comparison saw.
 */
BoolVec lif_step(NetworkState& state, const Eigen::VectorXd& current,
                 const NeuronParams& p, Eigen::VectorXd* v_pre_out = nullptr);

/// V_th <- max(V_th_min, gamma V_th + (1-gamma) V_target) per neuron.
void adapt_thresholds(NetworkState& state, const NeuronParams& p);

/// w_lat_ij = max(0, rho_ij - theta_lat), zero diagonal.
Eigen::MatrixXd init_lateral_weights(const CorrelationMatrix& cm,
                                     double theta_lat);

/// I_inhibit_i = -beta * sum_{j != i} w_lat_ij * spiked_j, one value per asset.
Eigen::VectorXd lateral_inhibition_current(const BoolVec& asset_spiked_prev,
                                           const Eigen::MatrixXd& w_lat,
                                           double inhibition_beta);

/// Cauchy surrogate for dS/dV: (1/(pi alpha)) / (1 + ((V - V_th)/alpha)^2).
double surrogate_grad(double v, double v_th, double surrogate_alpha);

/// Classic pair-based STDP window; dt = t_post - t_pre. Zero at dt = 0.
double stdp_delta(double t_pre_ms, double t_post_ms, const StdpParams& p);

struct RunResult {
  SpikeRaster raster;
  NetworkState state;
};

/// Called after each simulated step with the pre-reset potentials and the
/// thresholds the spike comparison used.
using StepObserver =
    std::function<void(int step, const Eigen::VectorXd& v_pre,
                       const Eigen::VectorXd& v_th_used, const BoolVec& spikes)>;

/**
 * @brief Runs the network over per-step encoded input currents.
 *
 * Step order: input gain (w_syn) + lateral inhibition from the previous
 * step's asset-level spikes -> LIF update -> threshold adaptation -> spike
 * recording. An asset counts as spiking when any neuron of its population
 * fired. Deterministic.
 */
RunResult run_network(const std::vector<Eigen::VectorXd>& inputs,
                      const NeuronParams& p, NetworkState state,
                      int population, double inhibition_beta,
                      const StepObserver& observer = nullptr);

struct TrainConfig {
  int epochs = 250;
  double learning_rate = 0.2;
  double lr_decay = 0.995;     ///< multiplicative per-epoch decay
  int sim_steps = 100;         ///< simulated steps per epoch
  double w_syn_init = 0.02;    ///< initial input gain
  double surrogate_alpha = 1.0;
  double stdp_rate = 0.002;    ///< scale on STDP deltas (0.01 x learning rate)
  double inhibition_beta = 1.0;
  double theta_lat = 0.5;
  std::uint64_t seed = 42;

  void validate() const;
};

struct SnnConfig {
  EncodingConfig encoding;
  RiskAversionSchedule schedule;
  NeuronParams neuron;
  StdpParams stdp;
  DecodeConfig decode;
  ObjectiveConfig objective;
  TrainConfig train;
};

/// Everything needed to run the network after training.
struct TrainedNetwork {
  std::vector<std::string> tickers;
  int population = 0;
  ReceptiveFieldBank bank;
  NeuronParams neuron;
  Eigen::VectorXd w_syn;
  Eigen::MatrixXd w_lat;
  double inhibition_beta = 1.0;
};

struct EpochStats {
  double loss;
  double sharpe;
  double tx_cost;
  double cardinality_penalty;
  double diversity_penalty;
};

struct TrainResult {
  TrainedNetwork net;
  std::vector<EpochStats> history;
  SpikeRaster final_raster;          ///< last epoch's spike record
  PortfolioWeights final_weights;    ///< decode of the last epoch
  NetworkState final_state;          ///< network state after the last epoch
};

/**
 * @brief Surrogate-gradient training on the composite loss with an STDP
 * modulation term.
 *
 * Each epoch encodes sim_steps timesteps (cycling through the data rows) at
 * the epoch's risk-aversion level, runs the network, decodes a portfolio,
 * and updates the input gains: a gradient step through the decode path
 * first, then STDP deltas paired between strong receptive-field drive and
 * the neuron's spikes. Aborts with the epoch index if the loss goes
 * non-finite.
 */
TrainResult train(const NormalizedReturns& data, const Moments& moments,
                  const CorrelationMatrix& cm, const SnnConfig& cfg);

/// Inference pass: encode the given rows (no noise) at risk level lambda,
/// run the trained network, decode a portfolio.
DecodedPortfolio decode_with_network(const TrainedNetwork& net,
                                     const Eigen::MatrixXd& norm_rows,
                                     const Moments& moments, double lambda,
                                     const DecodeConfig& decode_cfg);

/// Versioned textual checkpoint of a trained network and its final state.
void save_checkpoint(const std::string& path, const TrainedNetwork& net,
                     const NetworkState& state);
struct Checkpoint {
  TrainedNetwork net;
  NetworkState state;
};
Checkpoint load_checkpoint(const std::string& path);

/// Raster export rows: step,neuron,asset.
void write_raster_csv(const std::string& path, const SpikeRaster& raster,
                      int population);

}  // namespace spikefolio
