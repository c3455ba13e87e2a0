#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hvdc/bundle.hpp"
#include "hvdc/noise.hpp"
#include "hvdc/types.hpp"

namespace hvdc::eval {

struct MetricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RocPoint {
  double scale = 1.0; // threshold scale (detectors) or fusion cutoff (hybrid)
  double tpr = 0.0;
  double fpr = 0.0;
};

struct RocCurve {
  std::string subject;
  std::vector<RocPoint> points; // sorted by fpr
  double auc = 0.0;
};

struct Latency {
  bool miss = false;
  bool false_start = false; // trip before wavefront arrival
  double seconds = 0.0;
};

/// Trip time minus arrival time. Throws MetricError on records without an
/// arrival time (latency is undefined for fault-free records).
Latency detection_latency(const WaveformRecord& rec,
                          const std::optional<learn::TripCommand>& trip);

/// Sweep grids: 41 log-spaced scales in [0.1, 10] for detectors, 41
/// uniform cutoffs in (0, 1) for the hybrid.
std::vector<double> detector_sweep_grid();
std::vector<double> hybrid_sweep_grid();

/// ROC for one pool detector (by index) under threshold scaling.
RocCurve roc_detector(const std::vector<WaveformRecord>& corpus,
                      const ModelBundle& bundle, int detector,
                      const std::vector<double>& scales = detector_sweep_grid(),
                      double f_s = 50e3);

/// ROC for the hybrid under fusion-cutoff sweeping.
RocCurve roc_hybrid(const std::vector<WaveformRecord>& corpus,
                    const ModelBundle& bundle,
                    const std::vector<double>& cutoffs = hybrid_sweep_grid(),
                    double f_s = 50e3);

struct CorpusReport {
  int records = 0;
  int fault_records = 0;
  int negative_records = 0; // normal + external
  std::map<std::string, std::pair<int, int>> per_kind; // kind -> (detected, total)
  int misses = 0;
  int false_alarms = 0; // tripped normal or external records
  double mean_latency_s = 0.0;
  double p95_latency_s = 0.0;

  double detection_rate(const std::string& kind) const;
  double false_alarm_rate() const;
  double miss_rate() const;
  std::vector<std::pair<std::string, double>> rows() const;
};

/// Runs the trained relay over every record and aggregates the metrics.
/// An empty corpus yields an empty report.
CorpusReport evaluate_corpus(const ModelBundle& bundle,
                             const std::vector<WaveformRecord>& corpus,
                             double f_s = 50e3);

void write_report_csv(const std::filesystem::path& path,
                      const CorpusReport& report);
void write_roc_csv(const std::filesystem::path& path, const RocCurve& curve);

} // namespace hvdc::eval
