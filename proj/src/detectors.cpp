#include "hvdc/detectors.hpp"

#include <cmath>
#include <stdexcept>

namespace hvdc::det {

std::string detector_kind_name(DetectorKind k) {
  switch (k) {
    case DetectorKind::current_threshold: return "current_threshold";
    case DetectorKind::current_derivative: return "current_derivative";
    case DetectorKind::rocov: return "rocov";
    case DetectorKind::qcd: return "qcd";
  }
  throw std::out_of_range("detector kind");
}

DetectorKind detector_kind_from_name(const std::string& name) {
  for (DetectorKind k :
       {DetectorKind::current_threshold, DetectorKind::current_derivative,
        DetectorKind::rocov, DetectorKind::qcd})
    if (detector_kind_name(k) == name) return k;
  throw std::invalid_argument("unknown detector kind: " + name);
}

DetectorConfig DetectorConfig::defaults(DetectorKind kind) {
  DetectorConfig c;
  c.kind = kind;
  switch (kind) {
    case DetectorKind::current_threshold:
      c.threshold = 1.25; // times nominal line current
      c.window = 1;
      break;
    case DetectorKind::current_derivative:
      // Fast but deliberately marginal: catches solid and moderate-impedance
      // faults, misses the weakest high-impedance tiers, and occasionally
      // raises false alarms beyond sigma ~ 0.005 p.u. noise.
      c.threshold = 0.5; // p.u./ms
      c.window = 3;
      break;
    case DetectorKind::rocov:
      c.threshold = 2.0; // p.u./ms
      c.window = 3;
      break;
    case DetectorKind::qcd:
      c.threshold = 0.0;
      c.window = 1;
      // Slow integrator: the allowance sits well above the sigma ~ 0.005
      // noise floor per sample yet accumulates the faint sustained voltage
      // dips of the weakest high-impedance faults within a few ms.
      c.cusum_drift = 0.003;
      c.cusum_h = 0.25;
      break;
  }
  return c;
}

DetectorConfig DetectorConfig::scaled(double s) const {
  DetectorConfig c = *this;
  if (kind == DetectorKind::qcd)
    c.cusum_h *= s;
  else
    c.threshold *= s;
  return c;
}

std::vector<DetectorConfig> default_pool_configs() {
  return {DetectorConfig::defaults(DetectorKind::current_threshold),
          DetectorConfig::defaults(DetectorKind::current_derivative),
          DetectorConfig::defaults(DetectorKind::rocov),
          DetectorConfig::defaults(DetectorKind::qcd)};
}

MovingAverage::MovingAverage(int window) : buf_(window, 0.0) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
}

double MovingAverage::push(double x) {
  const int w = static_cast<int>(buf_.size());
  if (seen_ >= w) sum_ -= buf_[head_];
  buf_[head_] = x;
  head_ = (head_ + 1) % w;
  if (seen_ < w) ++seen_;
  sum_ += x;
  return sum_ / seen_;
}

void MovingAverage::reset() {
  std::fill(buf_.begin(), buf_.end(), 0.0);
  head_ = seen_ = 0;
  sum_ = 0.0;
}

Detector::Detector(const DetectorConfig& cfg, double f_s)
    : cfg_(cfg),
      f_s_(f_s),
      premean_samples_(static_cast<int>(std::round(0.010 * f_s))),
      pole_{PoleState{MovingAverage(cfg.window)},
            PoleState{MovingAverage(cfg.window)}} {
  if (cfg.hold_time < 0.0) throw std::invalid_argument("hold_time must be >= 0");
}

double Detector::cusum_stat(Pole p) const {
  const auto& ps = pole_[idx(p)];
  return std::max(ps.s_pos, ps.s_neg);
}

int Detector::raw_decision(const std::array<double, 6>& pu) {
  const double dt_ms = 1e3 / f_s_;
  int fired = 0;
  for (int p = 0; p < 2; ++p) {
    PoleState& ps = pole_[p];
    switch (cfg_.kind) {
      case DetectorKind::current_threshold: {
        double x = pu[p == 0 ? kChanIPos : kChanINeg];
        if (std::abs(x) >= cfg_.threshold) fired = 1;
        break;
      }
      case DetectorKind::current_derivative:
      case DetectorKind::rocov: {
        int chan = cfg_.kind == DetectorKind::current_derivative
                       ? (p == 0 ? kChanIPos : kChanINeg)
                       : (p == 0 ? kChanVLinePos : kChanVLineNeg);
        double m = ps.ma.push(pu[chan]);
        if (ps.have_prev) {
          double rate = (m - ps.prev_ma) / dt_ms;
          bool hit = cfg_.rocov_negative_only && cfg_.kind == DetectorKind::rocov
                         ? rate <= -cfg_.threshold
                         : std::abs(rate) >= cfg_.threshold;
          if (hit) fired = 1;
        }
        ps.prev_ma = m;
        ps.have_prev = true;
        break;
      }
      case DetectorKind::qcd: {
        double x = pu[p == 0 ? kChanVLinePos : kChanVLineNeg];
        if (ps.pre_count < premean_samples_) {
          ps.pre_sum += x;
          ++ps.pre_count;
          ps.mean = ps.pre_sum / ps.pre_count;
          break; // statistic inactive during the pre-window
        }
        ps.s_pos = std::max(0.0, ps.s_pos + (ps.mean - x) - cfg_.cusum_drift);
        ps.s_neg = std::max(0.0, ps.s_neg + (x - ps.mean) - cfg_.cusum_drift);
        if (std::max(ps.s_pos, ps.s_neg) >= cfg_.cusum_h) fired = 1;
        break;
      }
    }
  }
  return fired;
}

int Detector::step(const std::array<double, 6>& pu, double t) {
  last_raw_ = raw_decision(pu);
  if (last_raw_) {
    latched_ = true;
    latch_until_ = t + cfg_.hold_time;
  } else if (latched_ && t > latch_until_) {
    latched_ = false;
  }
  return latched_ ? 1 : 0;
}

void Detector::reset() {
  for (auto& ps : pole_) {
    ps.ma.reset();
    ps.prev_ma = 0.0;
    ps.have_prev = false;
    ps.s_pos = ps.s_neg = 0.0;
    ps.pre_sum = 0.0;
    ps.pre_count = 0;
    ps.mean = 0.0;
  }
  latched_ = false;
  latch_until_ = -1.0;
  last_raw_ = 0;
}

DetectorPool::DetectorPool(std::vector<DetectorConfig> configs, double f_s) {
  detectors_.reserve(configs.size());
  for (const auto& c : configs) detectors_.emplace_back(c, f_s);
}

DetectorPool DetectorPool::with_defaults(double f_s) {
  return DetectorPool(default_pool_configs(), f_s);
}

Decision DetectorPool::step(const std::array<double, 6>& pu, double t) {
  Decision d;
  d.t = t;
  d.d.reserve(detectors_.size());
  for (auto& det : detectors_) d.d.push_back(det.step(pu, t));
  return d;
}

void DetectorPool::reset() {
  for (auto& det : detectors_) det.reset();
}

} // namespace hvdc::det
