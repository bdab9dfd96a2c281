#include "spikefolio/snn_core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "spikefolio/csv.hpp"

namespace spikefolio {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Keeps the decode-path derivative defined when an epoch produces no spikes.
constexpr double kCountSmoothing = 1e-6;
}  // namespace

void NeuronParams::validate() const {
  if (!(tau_m > 0.0)) throw std::invalid_argument("tau_m must be > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (dt > tau_m)
    throw std::invalid_argument("dt must not exceed tau_m (stability)");
  if (v_th_min > v_th_init)
    throw std::invalid_argument("v_th_min must be <= v_th_init");
  if (threshold_gamma < 0.0 || threshold_gamma > 1.0)
    throw std::invalid_argument("threshold_gamma must be in [0, 1]");
}

void StdpParams::validate() const {
  if (!(a_plus > 0.0) || !(a_minus > 0.0) || !(tau_plus > 0.0) ||
      !(tau_minus > 0.0))
    throw std::invalid_argument("STDP parameters must be strictly positive");
}

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (learning_rate < 0.0)
    throw std::invalid_argument("learning_rate must be >= 0");
  if (lr_decay <= 0.0 || lr_decay > 1.0)
    throw std::invalid_argument("lr_decay must be in (0, 1]");
  if (sim_steps < 1) throw std::invalid_argument("sim_steps must be >= 1");
  if (!(surrogate_alpha > 0.0))
    throw std::invalid_argument("surrogate_alpha must be > 0");
  if (stdp_rate < 0.0) throw std::invalid_argument("stdp_rate must be >= 0");
  if (inhibition_beta < 0.0)
    throw std::invalid_argument("inhibition_beta must be >= 0");
  if (w_syn_init < 0.0) throw std::invalid_argument("w_syn_init must be >= 0");
}

NetworkState NetworkState::fresh(int neurons, const NeuronParams& p,
                                 Eigen::MatrixXd w_lat, Eigen::VectorXd w_syn) {
  NetworkState s;
  s.v = Eigen::VectorXd::Constant(neurons, p.v_rest);
  s.v_th = Eigen::VectorXd::Constant(neurons, p.v_th_init);
  s.last_spike_ms = Eigen::VectorXd::Constant(neurons, kNaN);
  s.w_lat = std::move(w_lat);
  s.w_syn = std::move(w_syn);
  s.now_ms = 0.0;
  return s;
}

BoolVec lif_step(NetworkState& state, const Eigen::VectorXd& current,
                 const NeuronParams& p, Eigen::VectorXd* v_pre_out) {
  if (current.size() != state.v.size())
    throw std::invalid_argument("lif_step: current/state shape mismatch");
  for (Eigen::Index i = 0; i < current.size(); ++i)
    if (!std::isfinite(current(i)))
      throw std::runtime_error("lif_step: non-finite current at neuron " +
                               std::to_string(i));
  state.now_ms += p.dt;
  double leak = p.dt / p.tau_m;
  state.v.array() +=
      leak * (-(state.v.array() - p.v_rest) + p.r_m * current.array());
  if (v_pre_out) *v_pre_out = state.v;
  BoolVec spikes = state.v.array() >= state.v_th.array();
  for (Eigen::Index i = 0; i < spikes.size(); ++i) {
    if (spikes(i)) {
      state.v(i) = p.v_reset;
      state.last_spike_ms(i) = state.now_ms;
    }
  }
  return spikes;
}

void adapt_thresholds(NetworkState& state, const NeuronParams& p) {
  state.v_th = (p.threshold_gamma * state.v_th.array() +
                (1.0 - p.threshold_gamma) * p.v_target)
                   .max(p.v_th_min);
}

Eigen::MatrixXd init_lateral_weights(const CorrelationMatrix& cm,
                                     double theta_lat) {
  Eigen::MatrixXd w = (cm.rho.array() - theta_lat).max(0.0);
  w.diagonal().setZero();
  return w;
}

Eigen::VectorXd lateral_inhibition_current(const BoolVec& asset_spiked_prev,
                                           const Eigen::MatrixXd& w_lat,
                                           double inhibition_beta) {
  if (asset_spiked_prev.size() != w_lat.rows())
    throw std::invalid_argument("lateral_inhibition_current: shape mismatch");
  // Zero diagonal in w_lat already excludes j == i.
  Eigen::VectorXd s = asset_spiked_prev.cast<double>();
  return -inhibition_beta * (w_lat * s);
}

double surrogate_grad(double v, double v_th, double surrogate_alpha) {
  if (!(surrogate_alpha > 0.0))
    throw std::invalid_argument("surrogate_alpha must be > 0");
  double z = (v - v_th) / surrogate_alpha;
  return 1.0 / (std::numbers::pi * surrogate_alpha * (1.0 + z * z));
}

double stdp_delta(double t_pre_ms, double t_post_ms, const StdpParams& p) {
  if (!std::isfinite(t_pre_ms) || !std::isfinite(t_post_ms))
    throw std::invalid_argument("stdp_delta: non-finite spike time");
  double dt = t_post_ms - t_pre_ms;
  if (dt > 0.0) return p.a_plus * std::exp(-dt / p.tau_plus);
  if (dt < 0.0) return -p.a_minus * std::exp(dt / p.tau_minus);
  return 0.0;
}

RunResult run_network(const std::vector<Eigen::VectorXd>& inputs,
                      const NeuronParams& p, NetworkState state,
                      int population, double inhibition_beta,
                      const StepObserver& observer) {
  if (inputs.empty()) throw std::invalid_argument("run_network: no input steps");
  const auto neurons = state.v.size();
  if (population < 1 || neurons % population != 0)
    throw std::invalid_argument("run_network: bad population size");
  const Eigen::Index n_assets = neurons / population;
  if (state.w_lat.rows() != n_assets)
    throw std::invalid_argument("run_network: lateral matrix size mismatch");

  RunResult out;
  out.raster.steps = static_cast<int>(inputs.size());
  out.raster.neurons = static_cast<int>(neurons);
  out.raster.dt_ms = p.dt;
  out.raster.counts = Eigen::VectorXi::Zero(neurons);

  BoolVec asset_spiked_prev = BoolVec::Constant(n_assets, false);
  Eigen::VectorXd v_pre(neurons);
  Eigen::VectorXd v_th_used(neurons);
  for (int t = 0; t < out.raster.steps; ++t) {
    const Eigen::VectorXd& raw = inputs[static_cast<std::size_t>(t)];
    if (raw.size() != neurons)
      throw std::runtime_error("run_network: input size mismatch at step " +
                               std::to_string(t));
    Eigen::VectorXd inhibition =
        lateral_inhibition_current(asset_spiked_prev, state.w_lat,
                                   inhibition_beta);
    Eigen::VectorXd total = state.w_syn.cwiseProduct(raw);
    for (Eigen::Index i = 0; i < n_assets; ++i)
      total.segment(i * population, population).array() += inhibition(i);

    if (observer) v_th_used = state.v_th;
    BoolVec spikes = lif_step(state, total, p, observer ? &v_pre : nullptr);
    adapt_thresholds(state, p);

    asset_spiked_prev.setConstant(false);
    for (Eigen::Index nix = 0; nix < neurons; ++nix) {
      if (!spikes(nix)) continue;
      out.raster.events.push_back({t, static_cast<int>(nix)});
      out.raster.counts(nix) += 1;
      asset_spiked_prev(nix / population) = true;
    }
    if (observer) observer(t, v_pre, v_th_used, spikes);
  }
  out.state = std::move(state);
  return out;
}

namespace {

/// Nearest pre-event for a post spike, over a sorted event-time list.
double nearest_event(const std::vector<double>& sorted_times, double t) {
  auto it = std::lower_bound(sorted_times.begin(), sorted_times.end(), t);
  if (it == sorted_times.begin()) return *it;
  if (it == sorted_times.end()) return sorted_times.back();
  double after = *it;
  double before = *(it - 1);
  return (t - before) <= (after - t) ? before : after;
}

}  // namespace

TrainResult train(const NormalizedReturns& data, const Moments& moments,
                  const CorrelationMatrix& cm, const SnnConfig& cfg) {
  cfg.neuron.validate();
  cfg.stdp.validate();
  cfg.train.validate();
  cfg.encoding.validate();
  cfg.decode.validate();

  const Eigen::Index n = data.num_assets();
  if (n == 0) throw std::invalid_argument("train: empty universe");
  if (moments.size() != n || cm.rho.rows() != n)
    throw std::invalid_argument("train: moments/correlation shape mismatch");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(moments.sigma(i) > 0.0))
      throw std::invalid_argument(
          "train: degenerate asset (zero volatility) must be excluded: " +
          data.tickers[static_cast<std::size_t>(i)]);
  cfg.objective.validate(n);

  const int pop = cfg.encoding.population;
  const Eigen::Index neurons = n * pop;
  const int steps = cfg.train.sim_steps;
  const Eigen::Index rows = data.num_periods();

  ReceptiveFieldBank bank = build_receptive_fields(
      pop, cfg.encoding.range_lo, cfg.encoding.range_hi,
      cfg.encoding.amplitude);
  Eigen::MatrixXd w_lat = init_lateral_weights(cm, cfg.train.theta_lat);
  Eigen::VectorXd w_syn =
      Eigen::VectorXd::Constant(neurons, cfg.train.w_syn_init);

  RiskAversionSchedule sched = cfg.schedule;
  sched.t_max = cfg.train.epochs;  // lambda evolves over epochs
  sched.validate();

  TrainResult result;
  result.history.reserve(static_cast<std::size_t>(cfg.train.epochs));
  Eigen::VectorXd w_prev = Eigen::VectorXd::Constant(n, 1.0 / n);
  double lr = cfg.train.learning_rate;

  std::vector<Eigen::VectorXd> inputs(static_cast<std::size_t>(steps));
  std::vector<std::vector<double>> pre_events(
      static_cast<std::size_t>(neurons));
  Eigen::VectorXd grad_count(neurons);

  for (int epoch = 0; epoch < cfg.train.epochs; ++epoch) {
    double lambda = lambda_at(epoch, sched);
    std::uint64_t epoch_seed = mix_seed(cfg.train.seed,
                                        static_cast<std::uint64_t>(epoch));

    for (auto& v : pre_events) v.clear();
    // One-sigma field drive marks a pre-synaptic event for STDP pairing.
    const double pre_level = bank.amplitude * std::exp(-0.5);
    for (int t = 0; t < steps; ++t) {
      Eigen::VectorXd row = data.values.row(t % rows);
      Eigen::VectorXd noise = sample_encoding_noise(
          n, cfg.encoding.noise_sigma, epoch_seed,
          static_cast<std::uint64_t>(t));
      Eigen::VectorXd enc = encode_population_currents(
          row, moments.mu, moments.sigma, bank, lambda, noise);
      double event_time = (t + 1) * cfg.neuron.dt;
      for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd field = encode_input_current(row(i), bank);
        for (int j = 0; j < pop; ++j)
          if (field(j) >= pre_level)
            pre_events[static_cast<std::size_t>(i * pop + j)].push_back(
                event_time);
      }
      inputs[static_cast<std::size_t>(t)] = std::move(enc);
    }

    grad_count.setZero();
    auto observer = [&](int t, const Eigen::VectorXd& v_pre,
                        const Eigen::VectorXd& v_th_used, const BoolVec&) {
      const Eigen::VectorXd& raw = inputs[static_cast<std::size_t>(t)];
      double leak_gain = (cfg.neuron.dt / cfg.neuron.tau_m) * cfg.neuron.r_m;
      for (Eigen::Index nix = 0; nix < neurons; ++nix)
        grad_count(nix) +=
            surrogate_grad(v_pre(nix), v_th_used(nix),
                           cfg.train.surrogate_alpha) *
            leak_gain * raw(nix);
    };

    NetworkState state = NetworkState::fresh(static_cast<int>(neurons),
                                             cfg.neuron, w_lat, w_syn);
    RunResult run = run_network(inputs, cfg.neuron, std::move(state), pop,
                                cfg.train.inhibition_beta, observer);

    DecodeConfig dec = cfg.decode;
    dec.window = 0;  // decode over the whole epoch raster
    DecodedPortfolio decoded =
        decode_portfolio(run.raster, pop, moments.sigma, data.tickers, dec);
    const Eigen::VectorXd& w = decoded.weights.w;

    LossBreakdown loss = composite_loss(w, w_prev, moments, cfg.objective);
    if (!std::isfinite(loss.total))
      throw std::runtime_error("train: non-finite loss at epoch " +
                               std::to_string(epoch));
    result.history.push_back(EpochStats{loss.total, loss.sharpe, loss.tx_cost,
                                        loss.cardinality_penalty,
                                        loss.diversity_penalty});

    // --- gradient step through the decode path ---
    Eigen::VectorXd dl_dw =
        composite_loss_gradient(w, w_prev, moments, cfg.objective);
    // Spike-count shares after volatility adjustment, restricted to the
    // decoded support (everything when the raster was silent).
    Eigen::VectorXd asset_counts = Eigen::VectorXd::Zero(n);
    for (Eigen::Index nix = 0; nix < neurons; ++nix)
      asset_counts(nix / pop) += run.raster.counts(nix);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      bool in_support = decoded.degenerate || w(i) > 0.0;
      if (in_support)
        u(i) = (asset_counts(i) + kCountSmoothing) *
               std::pow(moments.sigma(i), -cfg.decode.risk_gamma);
    }
    double u_total = u.sum();
    Eigen::VectorXd w_soft = u / u_total;
    double inner = dl_dw.dot(w_soft);
    Eigen::VectorXd dl_dcount = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (u(i) == 0.0) continue;
      dl_dcount(i) = std::pow(moments.sigma(i), -cfg.decode.risk_gamma) /
                     u_total * (dl_dw(i) - inner);
    }
    for (Eigen::Index nix = 0; nix < neurons; ++nix)
      w_syn(nix) -= lr * dl_dcount(nix / pop) * grad_count(nix);

    // --- STDP modulation: pair each spike with its nearest input event ---
    if (cfg.train.stdp_rate > 0.0) {
      Eigen::VectorXd stdp_acc = Eigen::VectorXd::Zero(neurons);
      for (const auto& ev : run.raster.events) {
        const auto& pres = pre_events[static_cast<std::size_t>(ev.neuron)];
        if (pres.empty()) continue;
        double t_post = (ev.step + 1) * cfg.neuron.dt;
        double t_pre = nearest_event(pres, t_post);
        stdp_acc(ev.neuron) += stdp_delta(t_pre, t_post, cfg.stdp);
      }
      w_syn += cfg.train.stdp_rate * stdp_acc;
    }
    w_syn = w_syn.cwiseMax(0.0);

    lr *= cfg.train.lr_decay;
    w_prev = w;
    if (epoch == cfg.train.epochs - 1) {
      result.final_raster = std::move(run.raster);
      result.final_weights = decoded.weights;
      result.final_state = std::move(run.state);
    }
  }

  result.net.tickers = data.tickers;
  result.net.population = pop;
  result.net.bank = bank;
  result.net.neuron = cfg.neuron;
  result.net.w_syn = std::move(w_syn);
  result.net.w_lat = std::move(w_lat);
  result.net.inhibition_beta = cfg.train.inhibition_beta;
  return result;
}

DecodedPortfolio decode_with_network(const TrainedNetwork& net,
                                     const Eigen::MatrixXd& norm_rows,
                                     const Moments& moments, double lambda,
                                     const DecodeConfig& decode_cfg) {
  const Eigen::Index n = static_cast<Eigen::Index>(net.tickers.size());
  if (norm_rows.cols() != n || moments.size() != n)
    throw std::invalid_argument("decode_with_network: shape mismatch");
  if (norm_rows.rows() < 1)
    throw std::invalid_argument("decode_with_network: no input rows");
  Eigen::VectorXd zero_noise = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::VectorXd> inputs;
  inputs.reserve(static_cast<std::size_t>(norm_rows.rows()));
  for (Eigen::Index t = 0; t < norm_rows.rows(); ++t)
    inputs.push_back(encode_population_currents(norm_rows.row(t), moments.mu,
                                                moments.sigma, net.bank,
                                                lambda, zero_noise));
  NetworkState state =
      NetworkState::fresh(static_cast<int>(n) * net.population, net.neuron,
                          net.w_lat, net.w_syn);
  RunResult run = run_network(inputs, net.neuron, std::move(state),
                              net.population, net.inhibition_beta);
  return decode_portfolio(run.raster, net.population, moments.sigma,
                          net.tickers, decode_cfg);
}

namespace {

void write_vector(std::ofstream& out, const std::string& name,
                  const Eigen::VectorXd& v) {
  out << name << ' ' << v.size();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out << ' ' << csv::format_double(v(i));
  out << '\n';
}

Eigen::VectorXd read_vector(std::istream& in, const std::string& expect) {
  std::string name;
  Eigen::Index len = 0;
  in >> name >> len;
  if (!in || name != expect)
    throw std::runtime_error("checkpoint: expected field '" + expect + "'");
  Eigen::VectorXd v(len);
  for (Eigen::Index i = 0; i < len; ++i) {
    std::string tok;
    in >> tok;
    v(i) = tok == "nan" ? std::numeric_limits<double>::quiet_NaN()
                        : std::stod(tok);
  }
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const TrainedNetwork& net,
                     const NetworkState& state) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << "spikefolio-checkpoint v1\n";
  out << "tickers " << net.tickers.size();
  for (const auto& t : net.tickers) out << ' ' << t;
  out << '\n';
  out << "population " << net.population << '\n';
  out << "amplitude " << csv::format_double(net.bank.amplitude) << '\n';
  write_vector(out, "centers", net.bank.centers);
  write_vector(out, "widths", net.bank.widths);
  const auto& p = net.neuron;
  out << "neuron " << csv::format_double(p.tau_m) << ' '
      << csv::format_double(p.dt) << ' ' << csv::format_double(p.v_rest) << ' '
      << csv::format_double(p.v_reset) << ' ' << csv::format_double(p.r_m)
      << ' ' << csv::format_double(p.v_th_init) << ' '
      << csv::format_double(p.v_th_min) << ' ' << csv::format_double(p.v_target)
      << ' ' << csv::format_double(p.threshold_gamma) << '\n';
  out << "inhibition_beta " << csv::format_double(net.inhibition_beta) << '\n';
  write_vector(out, "w_syn", net.w_syn);
  out << "w_lat " << net.w_lat.rows();
  for (Eigen::Index r = 0; r < net.w_lat.rows(); ++r)
    for (Eigen::Index c = 0; c < net.w_lat.cols(); ++c)
      out << ' ' << csv::format_double(net.w_lat(r, c));
  out << '\n';
  write_vector(out, "state_v", state.v);
  write_vector(out, "state_v_th", state.v_th);
  write_vector(out, "state_last_spike", state.last_spike_ms);
  out << "state_now_ms " << csv::format_double(state.now_ms) << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string magic, version;
  in >> magic >> version;
  if (magic != "spikefolio-checkpoint" || version != "v1")
    throw std::runtime_error("checkpoint: unsupported format '" + magic + " " +
                             version + "'");
  Checkpoint cp;
  std::string field;
  std::size_t n_tickers = 0;
  in >> field >> n_tickers;
  if (field != "tickers") throw std::runtime_error("checkpoint: bad tickers");
  cp.net.tickers.resize(n_tickers);
  for (auto& t : cp.net.tickers) in >> t;
  in >> field >> cp.net.population;
  if (field != "population")
    throw std::runtime_error("checkpoint: bad population");
  in >> field >> cp.net.bank.amplitude;
  if (field != "amplitude") throw std::runtime_error("checkpoint: bad amplitude");
  cp.net.bank.centers = read_vector(in, "centers");
  cp.net.bank.widths = read_vector(in, "widths");
  in >> field;
  if (field != "neuron") throw std::runtime_error("checkpoint: bad neuron");
  auto& p = cp.net.neuron;
  in >> p.tau_m >> p.dt >> p.v_rest >> p.v_reset >> p.r_m >> p.v_th_init >>
      p.v_th_min >> p.v_target >> p.threshold_gamma;
  in >> field >> cp.net.inhibition_beta;
  if (field != "inhibition_beta")
    throw std::runtime_error("checkpoint: bad inhibition_beta");
  cp.net.w_syn = read_vector(in, "w_syn");
  Eigen::Index lat_n = 0;
  in >> field >> lat_n;
  if (field != "w_lat") throw std::runtime_error("checkpoint: bad w_lat");
  cp.net.w_lat.resize(lat_n, lat_n);
  for (Eigen::Index r = 0; r < lat_n; ++r)
    for (Eigen::Index c = 0; c < lat_n; ++c) in >> cp.net.w_lat(r, c);
  cp.state.v = read_vector(in, "state_v");
  cp.state.v_th = read_vector(in, "state_v_th");
  cp.state.last_spike_ms = read_vector(in, "state_last_spike");
  in >> field >> cp.state.now_ms;
  if (field != "state_now_ms" || !in)
    throw std::runtime_error("checkpoint: bad state_now_ms");
  cp.state.w_lat = cp.net.w_lat;
  cp.state.w_syn = cp.net.w_syn;
  return cp;
}

void write_raster_csv(const std::string& path, const SpikeRaster& raster,
                      int population) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write raster: " + path);
  out << "step,neuron,asset\n";
  for (const auto& ev : raster.events)
    out << ev.step << ',' << ev.neuron << ',' << ev.neuron / population << '\n';
}

}  // namespace spikefolio
