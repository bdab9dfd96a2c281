#include "spikefolio/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace spikefolio {

CorrelationMatrix correlation_matrix(const Eigen::MatrixXd& returns,
                                     const std::vector<std::string>& tickers) {
  const Eigen::Index t_count = returns.rows();
  const Eigen::Index n = returns.cols();
  if (t_count < 2)
    throw std::invalid_argument("correlation_matrix needs >= 2 rows");
  Eigen::VectorXd mean = returns.colwise().mean();
  Eigen::MatrixXd centered = returns.rowwise() - mean.transpose();
  Eigen::VectorXd norms = centered.colwise().norm();

  std::string degenerate;
  for (Eigen::Index c = 0; c < n; ++c)
    if (norms(c) == 0.0) degenerate += (degenerate.empty() ? "" : ",") + tickers[c];
  if (!degenerate.empty())
    throw std::invalid_argument("correlation_matrix: constant columns: " +
                                degenerate);

  CorrelationMatrix cm;
  cm.tickers = tickers;
  cm.rho = (centered.transpose() * centered).array() /
           (norms * norms.transpose()).array();
  // Clamp round-off excursions outside [-1, 1] and pin the diagonal.
  cm.rho = cm.rho.cwiseMin(1.0).cwiseMax(-1.0);
  cm.rho.diagonal().setOnes();
  return cm;
}

CorrelationMatrix correlation_matrix(const ReturnMatrix& rm) {
  return correlation_matrix(rm.returns, rm.tickers);
}

DistanceMatrix correlation_distance(const CorrelationMatrix& cm) {
  DistanceMatrix dm;
  dm.tickers = cm.tickers;
  dm.d = 1.0 - cm.rho.cwiseAbs().array();
  dm.d.diagonal().setZero();
  return dm;
}

ClusterAssignment ward_cluster(const DistanceMatrix& dm, int k) {
  const int n = static_cast<int>(dm.d.rows());
  if (n == 0) throw std::invalid_argument("ward_cluster: empty distance matrix");
  if (k < 1 || k > n)
    throw std::invalid_argument("ward_cluster: k=" + std::to_string(k) +
                                " out of [1, " + std::to_string(n) + "]");

  // Active-cluster bookkeeping over the Lance-Williams recurrence. Cluster
  // ids 0..n-1 are the leaves; merged clusters reuse the smaller id.
  Eigen::MatrixXd dist = dm.d;
  std::vector<bool> active(static_cast<std::size_t>(n), true);
  std::vector<double> size(static_cast<std::size_t>(n), 1.0);
  std::vector<std::vector<int>> members(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) members[static_cast<std::size_t>(i)] = {i};

  ClusterAssignment out;
  out.tickers = dm.tickers;
  out.k = k;
  out.labels.assign(static_cast<std::size_t>(n), -1);

  std::vector<std::vector<int>> cut_members;
  int remaining = n;
  if (remaining == k) cut_members = members;

  for (int step = 0; step < n - 1; ++step) {
    int best_i = -1, best_j = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (!active[static_cast<std::size_t>(i)]) continue;
      for (int j = i + 1; j < n; ++j) {
        if (!active[static_cast<std::size_t>(j)]) continue;
        if (dist(i, j) < best) {
          best = dist(i, j);
          best_i = i;
          best_j = j;
        }
      }
    }
    out.merge_history.push_back(MergeRecord{best_i, best_j, best});

    // Ward update: d(i+j, v)^2 = ((n_v+n_i) d_iv^2 + (n_v+n_j) d_jv^2
    //                             - n_v d_ij^2) / (n_i + n_j + n_v)
    double ni = size[static_cast<std::size_t>(best_i)];
    double nj = size[static_cast<std::size_t>(best_j)];
    double dij2 = best * best;
    for (int v = 0; v < n; ++v) {
      if (!active[static_cast<std::size_t>(v)] || v == best_i || v == best_j)
        continue;
      double nv = size[static_cast<std::size_t>(v)];
      double div2 = dist(best_i, v) * dist(best_i, v);
      double djv2 = dist(best_j, v) * dist(best_j, v);
      double merged2 =
          ((nv + ni) * div2 + (nv + nj) * djv2 - nv * dij2) / (ni + nj + nv);
      double merged = std::sqrt(std::max(0.0, merged2));
      dist(best_i, v) = merged;
      dist(v, best_i) = merged;
    }
    active[static_cast<std::size_t>(best_j)] = false;
    size[static_cast<std::size_t>(best_i)] = ni + nj;
    auto& mi = members[static_cast<std::size_t>(best_i)];
    auto& mj = members[static_cast<std::size_t>(best_j)];
    mi.insert(mi.end(), mj.begin(), mj.end());
    mj.clear();

    --remaining;
    if (remaining == k) {
      for (int i = 0; i < n; ++i)
        if (active[static_cast<std::size_t>(i)])
          cut_members.push_back(members[static_cast<std::size_t>(i)]);
    }
  }

  // Label clusters by their smallest member index so the assignment is
  // independent of merge bookkeeping order.
  std::sort(cut_members.begin(), cut_members.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              return *std::min_element(a.begin(), a.end()) <
                     *std::min_element(b.begin(), b.end());
            });
  for (std::size_t label = 0; label < cut_members.size(); ++label)
    for (int ix : cut_members[label])
      out.labels[static_cast<std::size_t>(ix)] = static_cast<int>(label);
  return out;
}

double mean_silhouette(const DistanceMatrix& dm, const std::vector<int>& labels,
                       int k) {
  const int n = static_cast<int>(dm.d.rows());
  if (static_cast<int>(labels.size()) != n)
    throw std::invalid_argument("mean_silhouette: label count mismatch");
  std::vector<int> cluster_size(static_cast<std::size_t>(k), 0);
  for (int label : labels) {
    if (label < 0 || label >= k)
      throw std::invalid_argument("mean_silhouette: label out of range");
    ++cluster_size[static_cast<std::size_t>(label)];
  }

  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    int li = labels[static_cast<std::size_t>(i)];
    if (cluster_size[static_cast<std::size_t>(li)] <= 1) continue;  // s(i) = 0
    std::vector<double> sum_to(static_cast<std::size_t>(k), 0.0);
    for (int j = 0; j < n; ++j)
      if (j != i) sum_to[static_cast<std::size_t>(labels[static_cast<std::size_t>(j)])] += dm.d(i, j);
    double a = sum_to[static_cast<std::size_t>(li)] /
               (cluster_size[static_cast<std::size_t>(li)] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c == li || cluster_size[static_cast<std::size_t>(c)] == 0) continue;
      b = std::min(b, sum_to[static_cast<std::size_t>(c)] /
                          cluster_size[static_cast<std::size_t>(c)]);
    }
    double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / n;
}

std::pair<int, SilhouetteTable> select_cluster_count(const DistanceMatrix& dm,
                                                     int k_min, int k_max) {
  const int n = static_cast<int>(dm.d.rows());
  if (k_min < 2 || k_min > k_max || k_max > n - 1)
    throw std::invalid_argument(
        "select_cluster_count: need 2 <= k_min <= k_max <= N-1 (k_min=" +
        std::to_string(k_min) + ", k_max=" + std::to_string(k_max) +
        ", N=" + std::to_string(n) + ")");
  SilhouetteTable table;
  int best_k = k_min;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int k = k_min; k <= k_max; ++k) {
    auto ca = ward_cluster(dm, k);
    double score = mean_silhouette(dm, ca.labels, k);
    table.k.push_back(k);
    table.score.push_back(score);
    if (score > best_score) {  // strict: ties stay at the smaller k
      best_score = score;
      best_k = k;
    }
  }
  return {best_k, table};
}

double asset_sharpe(const Eigen::VectorXd& returns, double risk_free_per_day) {
  const Eigen::Index t_count = returns.size();
  if (t_count < 2) throw std::invalid_argument("asset_sharpe needs >= 2 returns");
  double mean = returns.mean();
  double sd = std::sqrt((returns.array() - mean).square().sum() /
                        static_cast<double>(t_count - 1));
  return (mean - risk_free_per_day) / (sd + 1e-8);
}

RepresentativeSelection select_representatives(const ClusterAssignment& ca,
                                               const ReturnMatrix& rm,
                                               double risk_free_per_day) {
  if (ca.tickers != rm.tickers)
    throw std::invalid_argument(
        "select_representatives: assignment/returns universe mismatch");
  RepresentativeSelection out;
  for (int cluster = 0; cluster < ca.k; ++cluster) {
    int best_ix = -1;
    double best_sharpe = 0.0;
    bool any_nondegenerate = false;
    for (std::size_t i = 0; i < ca.labels.size(); ++i) {
      if (ca.labels[i] != cluster) continue;
      auto col = rm.returns.col(static_cast<Eigen::Index>(i));
      double sd = std::sqrt(
          (col.array() - col.mean()).square().sum() /
          static_cast<double>(col.size() - 1));
      if (sd == 0.0) continue;
      double s = asset_sharpe(col, risk_free_per_day);
      bool better =
          !any_nondegenerate || s > best_sharpe ||
          (s == best_sharpe && rm.tickers[i] < rm.tickers[static_cast<std::size_t>(best_ix)]);
      if (better) {
        best_sharpe = s;
        best_ix = static_cast<int>(i);
        any_nondegenerate = true;
      }
    }
    if (!any_nondegenerate) {
      out.skipped_clusters.push_back(cluster);
      continue;
    }
    out.asset_indices.push_back(best_ix);
    out.tickers.push_back(rm.tickers[static_cast<std::size_t>(best_ix)]);
    out.asset_sharpe.push_back(best_sharpe);
  }
  return out;
}

}  // namespace spikefolio
