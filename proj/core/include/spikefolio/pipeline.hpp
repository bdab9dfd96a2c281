#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "spikefolio/config.hpp"

namespace spikefolio {

/// A pipeline stage failure, carrying the stage name for CLI reporting.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& message)
      : std::runtime_error("stage " + stage + ": " + message),
        stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct IngestOutput {
  PriceMatrix imputed;
  ReturnMatrix returns;  ///< full-period log returns of the cleaned universe
  int initial_tickers = 0;
  int dropped_dates = 0;
  std::vector<std::string> dropped_tickers;
};

struct ClusterReportRow {
  std::string ticker;
  int cluster;
  bool is_representative;
  double asset_sharpe;
};

struct ClusterOutput {
  std::vector<int> representative_indices;  ///< columns of the cleaned universe
  std::vector<ClusterReportRow> rows;
  /// One silhouette table per market ("" key = joint clustering).
  std::vector<std::pair<std::string, SilhouetteTable>> silhouettes;
};

using MetricsMap = std::map<std::string, double>;

IngestOutput run_ingest(const Config& cfg);
ClusterOutput run_clustering(const Config& cfg, const ReturnMatrix& train_rm);

/// Executes ingest -> cluster -> train (SNN and optionally ANN) -> backtest
/// -> report, writing every artifact into out_dir. Deterministic given the
/// config seed. Throws StageError on failure.
MetricsMap run_pipeline(const Config& cfg, const std::string& out_dir);

enum class Stage { Ingest, Cluster, TrainSnn, TrainAnn, Backtest, Report };

/// Runs one CLI stage. Cheap upstream stages re-run in-process; Backtest
/// loads the persisted networks from out_dir; Report recomputes metrics from
/// the exported series.
MetricsMap run_stage(const Config& cfg, const std::string& out_dir,
                     Stage stage);

/// Shared metric computation so the in-memory pipeline and the report stage
/// agree exactly: equity includes the leading 1.0.
void series_metrics(const std::string& prefix,
                    const std::vector<double>& equity,
                    const std::vector<double>& rolling,
                    const std::vector<double>& turnover, int annualization,
                    double eps, MetricsMap& out);

void write_metrics_json(const std::string& path, const MetricsMap& metrics);
MetricsMap read_metrics_json(const std::string& path);

}  // namespace spikefolio
