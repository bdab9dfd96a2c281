#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "spikefolio/rng.hpp"

namespace spikefolio {

/**
 * @brief Bank of overlapping Gaussian receptive fields shared by every
 * asset's neuron population.
 *
 * Centers are uniform over [lo, hi]; widths equal the center spacing, which
 * guarantees adjacent-field overlap.
 */
struct ReceptiveFieldBank {
  Eigen::VectorXd centers;
  Eigen::VectorXd widths;
  double amplitude = 1.0;

  int population() const { return static_cast<int>(centers.size()); }
};

ReceptiveFieldBank build_receptive_fields(int population, double lo, double hi,
                                          double amplitude);

/// I_j = A * exp(-(r - mu_j)^2 / (2 sigma_j^2)) for each field.
Eigen::VectorXd encode_input_current(double r_norm,
                                     const ReceptiveFieldBank& bank);

enum class ScheduleMode { Exponential, Polynomial };

/// Risk-aversion trajectory lambda(t): lambda0*exp(-alpha*t/T) or
/// lambda0*(1 - t/T)^beta.
struct RiskAversionSchedule {
  ScheduleMode mode = ScheduleMode::Polynomial;
  double lambda0 = 1.0;
  double alpha_decay = 0.85;
  double beta_poly = 1.0;
  int t_max = 250;

  void validate() const;
};

double lambda_at(int t, const RiskAversionSchedule& sched);

/// lambda*mu + (1-lambda)/sigma + noise. Throws std::domain_error on zero
/// volatility; degenerate assets must be excluded upstream.
double risk_return_current(double mu_i, double sigma_i, double lambda,
                           double noise);

struct EncodingConfig {
  int population = 120;
  double range_lo = -3.0;  ///< z-scored returns put >99% of mass in [-3, 3]
  double range_hi = 3.0;
  double amplitude = 1.0;
  double noise_sigma = 0.05;
  std::uint64_t seed = 42;

  void validate() const;
};

/**
 * @brief Currents for one timestep, every asset's population concatenated.
 *
 * Per neuron: Gaussian field response to the asset's normalized return, plus
 * the asset-level risk-return current (one noise draw per asset, shared by
 * its whole population).
 */
Eigen::VectorXd encode_population_currents(const Eigen::VectorXd& norm_row,
                                           const Eigen::VectorXd& mu,
                                           const Eigen::VectorXd& sigma,
                                           const ReceptiveFieldBank& bank,
                                           double lambda,
                                           const Eigen::VectorXd& noise);

/// One Gaussian noise draw per asset from the substream mix_seed(seed, stream).
Eigen::VectorXd sample_encoding_noise(Eigen::Index n_assets, double noise_sigma,
                                      std::uint64_t seed, std::uint64_t stream);

/// Spec composition for standalone encoding: lambda from the schedule at t,
/// noise from substream t. Deterministic given cfg.seed.
Eigen::VectorXd encode_timestep(const Eigen::VectorXd& norm_row,
                                const Eigen::VectorXd& mu,
                                const Eigen::VectorXd& sigma,
                                const ReceptiveFieldBank& bank,
                                const RiskAversionSchedule& sched,
                                const EncodingConfig& cfg, int t);

}  // namespace spikefolio
