#include "spikefolio/spike_encoding.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spikefolio {

ReceptiveFieldBank build_receptive_fields(int population, double lo, double hi,
                                          double amplitude) {
  if (population < 2)
    throw std::invalid_argument("receptive field bank needs P >= 2, got " +
                                std::to_string(population));
  if (!(lo < hi))
    throw std::invalid_argument("receptive field range must satisfy lo < hi");
  if (!(amplitude > 0.0))
    throw std::invalid_argument("receptive field amplitude must be > 0");
  ReceptiveFieldBank bank;
  bank.amplitude = amplitude;
  bank.centers.resize(population);
  double spacing = (hi - lo) / static_cast<double>(population - 1);
  for (int j = 0; j < population; ++j)
    bank.centers(j) = lo + static_cast<double>(j) * spacing;
  bank.widths = Eigen::VectorXd::Constant(population, spacing);
  return bank;
}

Eigen::VectorXd encode_input_current(double r_norm,
                                     const ReceptiveFieldBank& bank) {
  if (!std::isfinite(r_norm))
    throw std::invalid_argument("encode_input_current: non-finite input");
  Eigen::ArrayXd z = (r_norm - bank.centers.array()) / bank.widths.array();
  return bank.amplitude * (-0.5 * z.square()).exp();
}

void RiskAversionSchedule::validate() const {
  if (lambda0 < 0.0 || lambda0 > 1.0)
    throw std::invalid_argument("lambda0 must be in [0, 1]");
  if (alpha_decay < 0.0) throw std::invalid_argument("alpha_decay must be >= 0");
  if (beta_poly <= 0.0) throw std::invalid_argument("beta_poly must be > 0");
  if (t_max < 1) throw std::invalid_argument("schedule t_max must be >= 1");
}

double lambda_at(int t, const RiskAversionSchedule& sched) {
  if (t < 0 || t > sched.t_max)
    throw std::invalid_argument("lambda_at: t=" + std::to_string(t) +
                                " outside [0, " + std::to_string(sched.t_max) +
                                "]");
  double frac = static_cast<double>(t) / static_cast<double>(sched.t_max);
  if (sched.mode == ScheduleMode::Exponential)
    return sched.lambda0 * std::exp(-sched.alpha_decay * frac);
  return sched.lambda0 * std::pow(1.0 - frac, sched.beta_poly);
}

double risk_return_current(double mu_i, double sigma_i, double lambda,
                           double noise) {
  if (!(sigma_i > 0.0))
    throw std::domain_error("risk_return_current: sigma must be > 0");
  return lambda * mu_i + (1.0 - lambda) / sigma_i + noise;
}

void EncodingConfig::validate() const {
  if (population < 2) throw std::invalid_argument("population must be >= 2");
  if (!(range_lo < range_hi))
    throw std::invalid_argument("encoding range must satisfy lo < hi");
  if (noise_sigma < 0.0)
    throw std::invalid_argument("noise_sigma must be >= 0");
}

Eigen::VectorXd sample_encoding_noise(Eigen::Index n_assets, double noise_sigma,
                                      std::uint64_t seed,
                                      std::uint64_t stream) {
  Eigen::VectorXd noise = Eigen::VectorXd::Zero(n_assets);
  if (noise_sigma > 0.0) {
    Rng rng(mix_seed(seed, stream));
    for (Eigen::Index i = 0; i < n_assets; ++i)
      noise(i) = rng.normal(0.0, noise_sigma);
  }
  return noise;
}

Eigen::VectorXd encode_population_currents(const Eigen::VectorXd& norm_row,
                                           const Eigen::VectorXd& mu,
                                           const Eigen::VectorXd& sigma,
                                           const ReceptiveFieldBank& bank,
                                           double lambda,
                                           const Eigen::VectorXd& noise) {
  const Eigen::Index n = norm_row.size();
  if (mu.size() != n || sigma.size() != n || noise.size() != n)
    throw std::invalid_argument("encode_population_currents: shape mismatch");
  const int p = bank.population();
  Eigen::VectorXd currents(n * p);
  for (Eigen::Index i = 0; i < n; ++i) {
    double asset_drive =
        risk_return_current(mu(i), sigma(i), lambda, noise(i));
    currents.segment(i * p, p) =
        encode_input_current(norm_row(i), bank).array() + asset_drive;
  }
  return currents;
}

Eigen::VectorXd encode_timestep(const Eigen::VectorXd& norm_row,
                                const Eigen::VectorXd& mu,
                                const Eigen::VectorXd& sigma,
                                const ReceptiveFieldBank& bank,
                                const RiskAversionSchedule& sched,
                                const EncodingConfig& cfg, int t) {
  Eigen::VectorXd noise = sample_encoding_noise(
      norm_row.size(), cfg.noise_sigma, cfg.seed, static_cast<std::uint64_t>(t));
  return encode_population_currents(norm_row, mu, sigma, bank,
                                    lambda_at(t, sched), noise);
}

}  // namespace spikefolio
