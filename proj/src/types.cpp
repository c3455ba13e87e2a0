#include "hvdc/types.hpp"

#include <cmath>
#include <tuple>

namespace hvdc {

double line_length_km(LineId line) {
  switch (line) {
    case LineId::L12: return 100.0;
    case LineId::L34: return 100.0;
    case LineId::L13: return 200.0;
    case LineId::L14: return 200.0;
    case LineId::L24: return 150.0;
  }
  throw std::out_of_range("line id");
}

std::string line_name(LineId line) {
  switch (line) {
    case LineId::L12: return "Line12";
    case LineId::L13: return "Line13";
    case LineId::L14: return "Line14";
    case LineId::L24: return "Line24";
    case LineId::L34: return "Line34";
  }
  throw std::out_of_range("line id");
}

LineId line_from_name(const std::string& name) {
  for (LineId l : kAllLines)
    if (line_name(l) == name) return l;
  throw std::invalid_argument("unknown line: " + name);
}

std::pair<int, int> line_terminals(LineId line) {
  switch (line) {
    case LineId::L12: return {1, 2};
    case LineId::L13: return {1, 3};
    case LineId::L14: return {1, 4};
    case LineId::L24: return {2, 4};
    case LineId::L34: return {3, 4};
  }
  throw std::out_of_range("line id");
}

std::string fault_type_name(FaultType t) {
  switch (t) {
    case FaultType::none: return "none";
    case FaultType::p2p: return "P2P";
    case FaultType::p2g_low: return "P2G_low";
    case FaultType::p2g_high: return "P2G_high";
    case FaultType::external: return "external";
  }
  throw std::out_of_range("fault type");
}

FaultType fault_type_from_name(const std::string& name) {
  for (FaultType t : {FaultType::none, FaultType::p2p, FaultType::p2g_low,
                      FaultType::p2g_high, FaultType::external})
    if (fault_type_name(t) == name) return t;
  throw std::invalid_argument("unknown fault type: " + name);
}

bool operator<(const ScenarioSpec& a, const ScenarioSpec& b) {
  auto key = [](const ScenarioSpec& s) {
    return std::tuple(static_cast<int>(s.line), static_cast<int>(s.fault.type),
                      static_cast<int>(s.fault.remote_line),
                      static_cast<int>(s.fault.pole), s.location_km,
                      s.impedance_ohm, s.noise_sigma, s.load_scale, s.seed,
                      s.id);
  };
  return key(a) < key(b);
}

std::array<double, 6> to_per_unit(const SensorFrame& frame,
                                  const std::array<double, 6>& base) {
  std::array<double, 6> out{};
  for (int c = 0; c < kNumChannels; ++c) {
    if (!(base[c] > 0.0))
      throw std::invalid_argument("invalid normalization: base for channel " +
                                  std::string(kChannelNames[c]) +
                                  " must be strictly positive");
    out[c] = frame.channel(c) / base[c];
  }
  return out;
}

std::array<double, 6> measure_bases(const WaveformRecord& rec,
                                    double nominal_kv, double pre_window_s,
                                    double current_floor_kA) {
  std::array<double, 6> base{};
  base[kChanVLinePos] = base[kChanVLineNeg] = nominal_kv;
  // Reactor voltage is ~0 in steady state, so it shares the pole-voltage base.
  base[kChanVReactorPos] = base[kChanVReactorNeg] = nominal_kv;

  double t0 = rec.frames.empty() ? 0.0 : rec.frames.front().t;
  double sum[2] = {0.0, 0.0};
  int n = 0;
  for (const auto& f : rec.frames) {
    if (f.t - t0 > pre_window_s) break;
    sum[0] += std::abs(f.line_current[0]);
    sum[1] += std::abs(f.line_current[1]);
    ++n;
  }
  for (int p = 0; p < 2; ++p) {
    double mean = n > 0 ? sum[p] / n : 0.0;
    base[p == 0 ? kChanIPos : kChanINeg] = std::max(mean, current_floor_kA);
  }
  return base;
}

std::vector<std::string> validate_record(const WaveformRecord& rec,
                                         double f_s) {
  std::vector<std::string> issues;
  const double dt = 1.0 / f_s;
  const double tol = 1e-9; // 1 ns spacing tolerance

  for (std::size_t i = 0; i < rec.frames.size(); ++i) {
    const auto& f = rec.frames[i];
    if (f.t < 0.0) {
      issues.push_back("frame " + std::to_string(i) + ": negative time");
      break;
    }
    if (i > 0) {
      double gap = f.t - rec.frames[i - 1].t;
      if (gap <= 0.0) {
        issues.push_back("frame " + std::to_string(i) +
                         ": non-monotonic time");
        break;
      }
      if (std::abs(gap - dt) > tol) {
        issues.push_back("frame " + std::to_string(i) +
                         ": sample spacing deviates from 1/f_s by more than "
                         "1 ns");
        break;
      }
    }
  }
  for (std::size_t i = 0; i < rec.frames.size(); ++i) {
    const auto& f = rec.frames[i];
    bool finite = std::isfinite(f.t);
    for (int c = 0; c < kNumChannels; ++c) finite &= std::isfinite(f.channel(c));
    if (!finite) {
      issues.push_back("frame " + std::to_string(i) + ": non-finite channel");
      break;
    }
  }

  if (rec.spec.trip_label() != rec.label)
    issues.push_back("label inconsistency: " +
                     fault_type_name(rec.spec.fault.type) + " record labeled " +
                     (rec.label ? "trip" : "no-trip"));
  if (rec.spec.has_fault()) {
    if (!rec.arrival_time)
      issues.push_back("fault record without arrival_time");
    else if (*rec.arrival_time < rec.spec.t_fault)
      issues.push_back("arrival_time precedes t_fault");
  } else if (rec.arrival_time) {
    issues.push_back("fault-free record carries arrival_time");
  }
  if (rec.spec.has_fault() && rec.spec.fault.type != FaultType::external) {
    if (rec.spec.location_km < 0.0 ||
        rec.spec.location_km > line_length_km(rec.spec.line))
      issues.push_back("fault location outside line span");
  }
  if (rec.spec.impedance_ohm < 0.0)
    issues.push_back("negative fault impedance");
  if (rec.spec.t_fault >= rec.spec.duration && rec.spec.has_fault())
    issues.push_back("t_fault not before duration");
  return issues;
}

} // namespace hvdc
