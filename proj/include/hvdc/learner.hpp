#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hvdc/cluster.hpp"
#include "hvdc/detectors.hpp"
#include "hvdc/types.hpp"

namespace hvdc::learn {

/// Row-stochastic fusion weights: w[c][n] is detector n's weight under
/// cluster label c+1. Every row sums to 1 and is entrywise >= 0.
struct WeightTable {
  std::vector<std::vector<double>> w;

  int clusters() const { return static_cast<int>(w.size()); }
  const std::vector<double>& row(int label) const { return w.at(label - 1); }
  /// Throws std::logic_error if a row is negative or does not sum to 1
  /// within 1e-12.
  void validate() const;
};

struct TripCommand {
  std::string breaker; // e.g. CB13
  double t = 0.0;
  int cluster = 0;
  double h = 0.0;
  std::vector<int> contributing; // detector decisions at trip time
};

std::string breaker_id(LineId line);

/// One training sample: the record's context features, ground truth, and
/// each detector's record-level decision (fired inside the decision
/// window: [arrival, arrival+10 ms] for fault records, anywhere for
/// fault-free records).
struct TrainingSample {
  cluster::FeatureVec features{};
  bool label = false;
  std::vector<int> fired;
};

struct TrainResult {
  WeightTable table;
  std::vector<std::string> warnings;
};

/// Single-round weighted-majority update: per cluster, each detector's
/// weight is its correct rate normalized across detectors. Empty clusters
/// and all-zero correct rates fall back to the uniform row 1/N.
TrainResult train_weights(const std::vector<TrainingSample>& samples,
                          const cluster::ClusterModel& model,
                          int num_detectors);

/// h = sum w[n] d[n]; trip iff h > 0.5 (strict).
std::pair<double, bool> fuse(const std::vector<double>& w_row,
                             const std::vector<int>& d);

/// Extracts the per-detector record-level decisions used for training.
TrainingSample make_training_sample(const WaveformRecord& rec,
                                    const std::vector<det::DetectorConfig>& cfg,
                                    double f_s = 50e3,
                                    double window_s = 10e-3);

/// Per-frame trip-log entry.
struct RelayLogRow {
  double t = 0.0;
  double h = 0.0;
  int cluster = 0;
  std::vector<int> d;
};

/// The online relay pipeline: per-unit conversion, cluster assignment,
/// detector pool, weighted fusion. The first trip latches permanently.
class Relay {
 public:
  Relay(const cluster::ClusterModel& model, const WeightTable& table,
        const std::vector<det::DetectorConfig>& configs,
        const std::array<double, 6>& bases, LineId line, double f_s = 50e3,
        double fusion_cutoff = 0.5);

  std::optional<TripCommand> step(const SensorFrame& frame);
  const std::optional<TripCommand>& trip() const { return trip_; }
  const RelayLogRow& last() const { return last_; }

 private:
  const cluster::ClusterModel& model_;
  const WeightTable& table_;
  det::DetectorPool pool_;
  std::array<double, 6> bases_;
  LineId line_;
  double cutoff_;
  std::optional<TripCommand> trip_;
  RelayLogRow last_;
};

/// Streams a whole record through a fresh relay; bases are measured from
/// the record's pre-fault window.
std::optional<TripCommand> run_relay(
    const WaveformRecord& rec, const cluster::ClusterModel& model,
    const WeightTable& table, const std::vector<det::DetectorConfig>& configs,
    double f_s = 50e3, double fusion_cutoff = 0.5);

} // namespace hvdc::learn
