#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "spikefolio/market_data.hpp"

namespace spikefolio {

struct CorrelationMatrix {
  std::vector<std::string> tickers;
  Eigen::MatrixXd rho;  ///< symmetric, unit diagonal, entries in [-1, 1]
};

/// d_ij = 1 - |rho_ij|: assets moving together (or exactly opposite) are close.
struct DistanceMatrix {
  std::vector<std::string> tickers;
  Eigen::MatrixXd d;
};

struct MergeRecord {
  int left;     ///< cluster id absorbed
  int right;    ///< cluster id absorbed
  double cost;  ///< inter-cluster distance at merge time
};

struct ClusterAssignment {
  std::vector<std::string> tickers;
  std::vector<int> labels;  ///< per-ticker cluster index in [0, k)
  int k = 0;
  std::vector<MergeRecord> merge_history;  ///< full dendrogram, N-1 records
};

CorrelationMatrix correlation_matrix(const Eigen::MatrixXd& returns,
                                     const std::vector<std::string>& tickers);
CorrelationMatrix correlation_matrix(const ReturnMatrix& rm);

DistanceMatrix correlation_distance(const CorrelationMatrix& cm);

/**
 * @brief Agglomerative clustering with Ward's minimum-variance criterion,
 * applied to the given distance matrix via the Lance-Williams recurrence,
 * cut at k clusters.
 *
 * Deterministic: ties in the merge search break toward the smallest cluster
 * id pair. Labels are assigned by order of first member appearance.
 */
ClusterAssignment ward_cluster(const DistanceMatrix& dm, int k);

/// Mean silhouette score of a labelling under precomputed distances.
/// Singleton clusters contribute zero.
double mean_silhouette(const DistanceMatrix& dm,
                       const std::vector<int>& labels, int k);

struct SilhouetteTable {
  std::vector<int> k;
  std::vector<double> score;
};

/// Picks the k in [k_min, k_max] maximising mean silhouette (ties toward
/// smaller k) and returns the full score table for reporting.
std::pair<int, SilhouetteTable> select_cluster_count(const DistanceMatrix& dm,
                                                     int k_min, int k_max);

struct RepresentativeSelection {
  std::vector<int> asset_indices;       ///< one per non-degenerate cluster
  std::vector<std::string> tickers;
  std::vector<double> asset_sharpe;     ///< Sharpe of each selected asset
  std::vector<int> skipped_clusters;    ///< clusters whose assets all had zero variance
};

/// One ticker per cluster: highest per-asset Sharpe ((mean - rf)/(sd + eps)),
/// ties broken by lexicographically smaller ticker.
RepresentativeSelection select_representatives(const ClusterAssignment& ca,
                                               const ReturnMatrix& rm,
                                               double risk_free_per_day);

/// Per-asset Sharpe used for representative selection.
double asset_sharpe(const Eigen::VectorXd& returns, double risk_free_per_day);

}  // namespace spikefolio
