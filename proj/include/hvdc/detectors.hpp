#pragma once

#include <array>
#include <string>
#include <vector>

#include "hvdc/types.hpp"

namespace hvdc::det {

enum class DetectorKind : int {
  current_threshold = 0,
  current_derivative,
  rocov,
  qcd,
};

std::string detector_kind_name(DetectorKind k);
DetectorKind detector_kind_from_name(const std::string& name);

struct DetectorConfig {
  DetectorKind kind = DetectorKind::current_threshold;
  double threshold = 1.25; // p.u. level, or p.u./ms for rate detectors
  int window = 3;          // moving-average length [samples]
  double cusum_drift = 0.005; // nu [p.u.], qcd only
  double cusum_h = 0.3;       // alarm level, qcd only
  double hold_time = 5e-3;    // decision latch [s]
  bool rocov_negative_only = false; // default: absolute rate

  static DetectorConfig defaults(DetectorKind kind);
  /// Multiplies the primary alarm level (threshold, or h for qcd) by s.
  DetectorConfig scaled(double s) const;
};

/// Defaults in Table-III column order.
std::vector<DetectorConfig> default_pool_configs();

class MovingAverage {
 public:
  explicit MovingAverage(int window);
  /// Mean of the most recent min(seen, window) samples.
  double push(double x);
  int seen() const { return seen_; }
  void reset();

 private:
  std::vector<double> buf_;
  int head_ = 0;
  int seen_ = 0;
  double sum_ = 0.0;
};

/// One streaming candidate detector; consumes per-unit frames and emits a
/// binary decision per frame. Both poles are OR-combined.
class Detector {
 public:
  Detector(const DetectorConfig& cfg, double f_s = 50e3);

  /// Latched decision for the frame at time t.
  int step(const std::array<double, 6>& pu, double t);
  /// Pre-latch decision of the last step.
  int last_raw() const { return last_raw_; }
  const DetectorConfig& config() const { return cfg_; }
  double cusum_stat(Pole p) const;
  void reset();

 private:
  int raw_decision(const std::array<double, 6>& pu);

  DetectorConfig cfg_;
  double f_s_;
  int premean_samples_;

  struct PoleState {
    MovingAverage ma;
    double prev_ma = 0.0;
    bool have_prev = false;
    double s_pos = 0.0, s_neg = 0.0; // cusum statistics
    double pre_sum = 0.0;
    int pre_count = 0;
    double mean = 0.0;
  };
  std::array<PoleState, 2> pole_;
  double latch_until_ = -1.0;
  bool latched_ = false;
  int last_raw_ = 0;
};

/// The N-detector pool; decision order (threshold, derivative, rocov, qcd).
class DetectorPool {
 public:
  explicit DetectorPool(std::vector<DetectorConfig> configs,
                        double f_s = 50e3);
  static DetectorPool with_defaults(double f_s = 50e3);

  Decision step(const std::array<double, 6>& pu, double t);
  int size() const { return static_cast<int>(detectors_.size()); }
  Detector& at(int n) { return detectors_.at(n); }
  void reset();

 private:
  std::vector<Detector> detectors_;
};

} // namespace hvdc::det
