#include "spikefolio/portfolio_math.hpp"

#include <cmath>
#include <stdexcept>

namespace spikefolio {

void ObjectiveConfig::validate(Eigen::Index n_assets) const {
  if (!(eps > 0.0)) throw std::invalid_argument("objective eps must be > 0");
  if (tx_cost_rate < 0.0)
    throw std::invalid_argument("transaction cost rate must be >= 0");
  if (k_min < 1 || k_min > k_max)
    throw std::invalid_argument("cardinality bounds invalid: k_min=" +
                                std::to_string(k_min) +
                                " k_max=" + std::to_string(k_max));
  if (n_assets > 0 && k_max > n_assets)
    throw std::invalid_argument("k_max=" + std::to_string(k_max) +
                                " exceeds universe size " +
                                std::to_string(n_assets));
  if (loss_w1 < 0 || loss_w2 < 0 || loss_w3 < 0 || loss_w4 < 0)
    throw std::invalid_argument("loss weights must be >= 0");
}

Moments estimate_moments(const Eigen::MatrixXd& returns) {
  const Eigen::Index t_count = returns.rows();
  if (t_count < 2)
    throw std::invalid_argument("estimate_moments needs T >= 2 rows, got " +
                                std::to_string(t_count));
  Moments m;
  m.mu = returns.colwise().mean();
  Eigen::MatrixXd centered = returns.rowwise() - m.mu.transpose();
  m.cov = centered.transpose() * centered / static_cast<double>(t_count - 1);
  m.sigma = m.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  return m;
}

Moments estimate_moments(const ReturnMatrix& rm) {
  return estimate_moments(rm.returns);
}

void validate_weights(const Eigen::VectorXd& w, double tol) {
  if (w.size() == 0) throw std::invalid_argument("empty weight vector");
  if ((w.array() < 0.0).any())
    throw std::invalid_argument("weights must be nonnegative");
  if (std::abs(w.sum() - 1.0) > tol)
    throw std::invalid_argument("weights must sum to 1, got " +
                                std::to_string(w.sum()));
}

std::pair<double, double> portfolio_moments(const Eigen::VectorXd& w,
                                            const Moments& m) {
  if (w.size() != m.size())
    throw std::invalid_argument("portfolio_moments: dimension mismatch");
  double mu_p = w.dot(m.mu);
  double var_p = w.dot(m.cov * w);
  if (var_p < 0.0) {
    if (var_p < -1e-12)
      throw std::domain_error("portfolio variance " + std::to_string(var_p) +
                              " below tolerance");
    var_p = 0.0;
  }
  return {mu_p, var_p};
}

double sharpe(const Eigen::VectorXd& w, const Moments& m,
              const ObjectiveConfig& cfg) {
  auto [mu_p, var_p] = portfolio_moments(w, m);
  return (mu_p - cfg.risk_free) / (std::sqrt(var_p) + cfg.eps);
}

Eigen::VectorXd sharpe_gradient(const Eigen::VectorXd& w, const Moments& m,
                                const ObjectiveConfig& cfg) {
  auto [mu_p, var_p] = portfolio_moments(w, m);
  double sigma_p = std::sqrt(var_p);
  double denom = sigma_p + cfg.eps;
  Eigen::VectorXd grad = m.mu / denom;
  if (sigma_p > 0.0) {
    Eigen::VectorXd dsigma = (m.cov * w) / sigma_p;
    grad -= (mu_p - cfg.risk_free) / (denom * denom) * dsigma;
  }
  return grad;
}

double transaction_cost(const Eigen::VectorXd& w,
                        const Eigen::VectorXd& w_prev, double tx_cost_rate) {
  if (w.size() != w_prev.size())
    throw std::invalid_argument("transaction_cost: dimension mismatch");
  return tx_cost_rate * (w - w_prev).cwiseAbs().sum();
}

int cardinality(const Eigen::VectorXd& w) {
  return static_cast<int>((w.array() > 0.0).count());
}

Eigen::VectorXd flush_small_weights(const Eigen::VectorXd& w, double eps) {
  return (w.array().abs() <= eps).select(0.0, w);
}

double cardinality_penalty(const Eigen::VectorXd& w, int k_min, int k_max) {
  int support = cardinality(w);
  double below = std::max(0, k_min - support);
  double above = std::max(0, support - k_max);
  return below * below + above * above;
}

double diversity_penalty(const Eigen::VectorXd& w) { return w.squaredNorm(); }

LossBreakdown composite_loss(const Eigen::VectorXd& w,
                             const Eigen::VectorXd& w_prev, const Moments& m,
                             const ObjectiveConfig& cfg) {
  LossBreakdown out;
  out.sharpe = sharpe(w, m, cfg);
  out.tx_cost = transaction_cost(w, w_prev, cfg.tx_cost_rate);
  out.cardinality_penalty = cardinality_penalty(w, cfg.k_min, cfg.k_max);
  out.diversity_penalty = diversity_penalty(w);
  out.total = -cfg.loss_w1 * out.sharpe + cfg.loss_w2 * out.tx_cost +
              cfg.loss_w3 * out.cardinality_penalty +
              cfg.loss_w4 * out.diversity_penalty;
  return out;
}

Eigen::VectorXd composite_loss_gradient(const Eigen::VectorXd& w,
                                        const Eigen::VectorXd& w_prev,
                                        const Moments& m,
                                        const ObjectiveConfig& cfg) {
  Eigen::VectorXd grad = -cfg.loss_w1 * sharpe_gradient(w, m, cfg);
  if (cfg.loss_w2 > 0.0) {
    Eigen::VectorXd sign =
        (w - w_prev).unaryExpr([](double d) { return d > 0.0   ? 1.0
                                                     : d < 0.0 ? -1.0
                                                               : 0.0; });
    grad += cfg.loss_w2 * cfg.tx_cost_rate * sign;
  }
  grad += cfg.loss_w4 * 2.0 * w;
  return grad;
}

}  // namespace spikefolio
