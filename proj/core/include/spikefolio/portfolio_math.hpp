#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "spikefolio/market_data.hpp"

namespace spikefolio {

/**
 * @brief Sample moments of a return history: mean vector, covariance, and
 * per-asset volatility (sqrt of the covariance diagonal).
 */
struct Moments {
  Eigen::VectorXd mu;     ///< per-asset mean daily log return
  Eigen::MatrixXd cov;    ///< N x N sample covariance (1/(T-1))
  Eigen::VectorXd sigma;  ///< per-asset volatility

  Eigen::Index size() const { return mu.size(); }
};

/// Nonnegative asset weights summing to one.
struct PortfolioWeights {
  std::vector<std::string> tickers;
  Eigen::VectorXd w;

  Eigen::Index size() const { return w.size(); }
};

/**
 * @brief Objective configuration: Sharpe stabiliser, transaction-cost rate,
 * cardinality bounds, and the composite-loss weights.
 *
 * loss_w2 doubles as the transaction-cost penalty the optimization problem
 * calls eta; the two symbols name the same coefficient.
 */
struct ObjectiveConfig {
  double risk_free = 0.0;      ///< per-day risk-free rate
  double eps = 1e-8;           ///< Sharpe denominator stabiliser
  double tx_cost_rate = 0.0025;
  int k_min = 30;
  int k_max = 50;
  double loss_w1 = 1.0;   ///< Sharpe reward
  double loss_w2 = 0.1;   ///< transaction-cost penalty (eta)
  double loss_w3 = 0.01;  ///< cardinality penalty
  double loss_w4 = 0.1;   ///< diversity (HHI) penalty

  void validate(Eigen::Index n_assets) const;
};

Moments estimate_moments(const Eigen::MatrixXd& returns);
Moments estimate_moments(const ReturnMatrix& rm);

/// Throws std::invalid_argument unless w is nonnegative and sums to one
/// within tolerance.
void validate_weights(const Eigen::VectorXd& w, double tol = 1e-9);

/// (w'mu, w'Sigma w); variance within -1e-12 of zero is clamped to zero.
std::pair<double, double> portfolio_moments(const Eigen::VectorXd& w,
                                            const Moments& m);

/// (mu_p - rf) / (sigma_p + eps).
double sharpe(const Eigen::VectorXd& w, const Moments& m,
              const ObjectiveConfig& cfg);

/// Analytic gradient of sharpe() with respect to the weights.
Eigen::VectorXd sharpe_gradient(const Eigen::VectorXd& w, const Moments& m,
                                const ObjectiveConfig& cfg);

/// c_tc * sum_i |w_i - w_prev_i|.
double transaction_cost(const Eigen::VectorXd& w,
                        const Eigen::VectorXd& w_prev, double tx_cost_rate);

/// Count of strictly positive weights.
int cardinality(const Eigen::VectorXd& w);

/// Weights at or below eps are set to exact zero (no renormalisation).
Eigen::VectorXd flush_small_weights(const Eigen::VectorXd& w, double eps);

/// max(0, K_min - |supp|)^2 + max(0, |supp| - K_max)^2.
double cardinality_penalty(const Eigen::VectorXd& w, int k_min, int k_max);

/// Herfindahl concentration, sum of squared weights.
double diversity_penalty(const Eigen::VectorXd& w);

struct LossBreakdown {
  double total = 0.0;
  double sharpe = 0.0;
  double tx_cost = 0.0;
  double cardinality_penalty = 0.0;
  double diversity_penalty = 0.0;
};

/// L = -w1*Sharpe + w2*C + w3*CardinalityPenalty + w4*DiversityPenalty.
LossBreakdown composite_loss(const Eigen::VectorXd& w,
                             const Eigen::VectorXd& w_prev, const Moments& m,
                             const ObjectiveConfig& cfg);

/// Almost-everywhere gradient of the composite loss. The cardinality term is
/// piecewise constant in w and contributes nothing.
Eigen::VectorXd composite_loss_gradient(const Eigen::VectorXd& w,
                                        const Eigen::VectorXd& w_prev,
                                        const Moments& m,
                                        const ObjectiveConfig& cfg);

}  // namespace spikefolio
