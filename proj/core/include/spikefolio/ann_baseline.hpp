#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "spikefolio/market_data.hpp"
#include "spikefolio/portfolio_math.hpp"

namespace spikefolio {

/// Feedforward baseline configuration (hidden size, epochs, Adam rate,
/// batch size, dropout).
struct MlpConfig {
  int hidden = 16;
  int epochs = 150;
  double learning_rate = 0.02;
  int batch = 32;
  double dropout = 0.2;
  int window = 60;  ///< bootstrap return-window length in days
  std::uint64_t seed = 42;

  void validate() const;
};

struct MlpParams {
  Eigen::MatrixXd w1;  ///< hidden x input
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;  ///< output x hidden
  Eigen::VectorXd b2;
};

/// Xavier-uniform initialisation, deterministic in the seed.
MlpParams init_mlp(int input_dim, int hidden, int output_dim,
                   std::uint64_t seed);

/// Per-asset features (mu_i, sigma_i, latest z-scored return) over a return
/// window, concatenated asset-major into a 3N vector.
Eigen::VectorXd build_features(const Eigen::MatrixXd& window_returns);

/// relu hidden layer, softmax output; always a valid weight vector.
Eigen::VectorXd mlp_forward(const MlpParams& params, const Eigen::VectorXd& x);

struct MlpGradients {
  double loss = 0.0;
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;
};

/// Loss and analytic parameter gradients of -Sharpe(mlp_forward(x)) under
/// the given moments. An all-ones dropout mask reproduces evaluation mode.
MlpGradients mlp_gradients(const MlpParams& params, const Eigen::VectorXd& x,
                           const Moments& m, const ObjectiveConfig& obj,
                           const Eigen::VectorXd& dropout_mask,
                           double dropout_rate);

struct AnnTrainResult {
  MlpParams params;
  std::vector<double> loss_history;
};

/**
 * @brief Adam on the negative-Sharpe loss over bootstrap-resampled return
 * windows, inverted dropout on the hidden layer during training only.
 */
AnnTrainResult train_ann(const ReturnMatrix& rm, const MlpConfig& cfg,
                         const ObjectiveConfig& obj);

/// Persist / restore MLP parameters (versioned text).
void save_mlp(const std::string& path, const MlpParams& params);
MlpParams load_mlp(const std::string& path);

}  // namespace spikefolio
