#pragma once

#include <Eigen/Dense>
#include <vector>

namespace spikefolio {

/// Time x neuron spike record for one simulation run. Events are stored
/// sparsely in step order; counts cache the per-neuron column sums.
struct SpikeRaster {
  struct Event {
    int step;
    int neuron;
  };
  int steps = 0;
  int neurons = 0;
  double dt_ms = 0.1;
  std::vector<Event> events;
  Eigen::VectorXi counts;  ///< per-neuron totals, equals column sums

  long long total_spikes() const {
    return static_cast<long long>(events.size());
  }
};

}  // namespace spikefolio
