#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hvdc {

enum class Pole : int { positive = 0, negative = 1 };

constexpr std::array<Pole, 2> kPoles{Pole::positive, Pole::negative};

inline int idx(Pole p) { return static_cast<int>(p); }

/// Global channel ordering shared by clustering, detectors and persistence:
/// (i+, i-, vl+, vl-, vr+, vr-).
enum Channel : int {
  kChanIPos = 0,
  kChanINeg = 1,
  kChanVLinePos = 2,
  kChanVLineNeg = 3,
  kChanVReactorPos = 4,
  kChanVReactorNeg = 5,
};
constexpr int kNumChannels = 6;

constexpr const char* kChannelNames[kNumChannels] = {
    "i_pos", "i_neg", "vl_pos", "vl_neg", "vr_pos", "vr_neg"};

/// One 50 kHz sample of the six per-line measurements at a terminal.
/// Currents in kA, voltages in kV, time in s.
struct SensorFrame {
  double t = 0.0;
  std::array<double, 2> line_current{};    // i^{lij}, per pole
  std::array<double, 2> line_voltage{};    // v^{lij}, beyond the reactor
  std::array<double, 2> reactor_voltage{}; // v^{ij}, across the reactor

  double channel(int c) const {
    switch (c) {
      case kChanIPos: return line_current[0];
      case kChanINeg: return line_current[1];
      case kChanVLinePos: return line_voltage[0];
      case kChanVLineNeg: return line_voltage[1];
      case kChanVReactorPos: return reactor_voltage[0];
      case kChanVReactorNeg: return reactor_voltage[1];
    }
    throw std::out_of_range("channel index");
  }
  double& channel(int c) {
    switch (c) {
      case kChanIPos: return line_current[0];
      case kChanINeg: return line_current[1];
      case kChanVLinePos: return line_voltage[0];
      case kChanVLineNeg: return line_voltage[1];
      case kChanVReactorPos: return reactor_voltage[0];
      case kChanVReactorNeg: return reactor_voltage[1];
    }
    throw std::out_of_range("channel index");
  }
};

enum class LineId : int { L12 = 0, L13 = 1, L14 = 2, L24 = 3, L34 = 4 };

constexpr std::array<LineId, 5> kAllLines{LineId::L12, LineId::L13, LineId::L14,
                                          LineId::L24, LineId::L34};

double line_length_km(LineId line);
std::string line_name(LineId line);
LineId line_from_name(const std::string& name);
/// The two terminals (1-based) of a line; the relay monitors the first.
std::pair<int, int> line_terminals(LineId line);

enum class FaultType : int { none = 0, p2p, p2g_low, p2g_high, external };

std::string fault_type_name(FaultType t);
FaultType fault_type_from_name(const std::string& name);

/// Fault descriptor. P2G variants carry the faulted pole; external carries
/// the remote line the fault actually sits on.
struct Fault {
  FaultType type = FaultType::none;
  Pole pole = Pole::positive;     // meaningful for p2g_low / p2g_high
  LineId remote_line = LineId::L12; // meaningful for external
};

/// Fully determines one simulation run.
struct ScenarioSpec {
  std::string id;          // corpus file stem; empty for ad-hoc runs
  LineId line = LineId::L13; // monitored line (relay at its first terminal)
  Fault fault{};
  double location_km = 0.0;   // from the monitoring terminal (or the remote
                              // line's first terminal for external faults)
  double impedance_ohm = 0.0;
  double t_fault = 0.02;
  double duration = 0.04;
  double noise_sigma = 0.0; // per-unit, per channel
  std::uint64_t seed = 0;
  double load_scale = 1.0; // scales the pre-fault power-flow injections

  /// True iff the relay on `line` must trip for this scenario.
  bool trip_label() const {
    return fault.type == FaultType::p2p || fault.type == FaultType::p2g_low ||
           fault.type == FaultType::p2g_high;
  }
  bool has_fault() const { return fault.type != FaultType::none; }
  /// The line the fault physically sits on.
  LineId faulted_line() const {
    return fault.type == FaultType::external ? fault.remote_line : line;
  }
};

/// Stable ordering for deterministic corpus merges.
bool operator<(const ScenarioSpec& a, const ScenarioSpec& b);

/// Time-indexed waveform with ground truth; the corpus unit.
struct WaveformRecord {
  ScenarioSpec spec;
  std::vector<SensorFrame> frames;
  bool label = false; // trip / no-trip for the monitored relay
  std::optional<double> arrival_time; // first-wavefront arrival [s]
};

/// Binary decision per detector at one frame time.
struct Decision {
  std::vector<int> d; // each in {0,1}
  double t = 0.0;
};

struct Normalization {
  std::array<double, 6> base{}; // same channel order as SensorFrame
};

/// normalization bases must be strictly positive.
std::array<double, 6> to_per_unit(const SensorFrame& frame,
                                  const std::array<double, 6>& base);

/// Per-record normalization per the default convention: voltage channels use
/// the nominal pole voltage, current channels the mean pre-fault magnitude
/// over `pre_window_s`, floored at `current_floor_kA`.
std::array<double, 6> measure_bases(const WaveformRecord& rec,
                                    double nominal_kv = 320.0,
                                    double pre_window_s = 0.010,
                                    double current_floor_kA = 0.05);

/// Lists every violated record invariant; empty iff well formed.
std::vector<std::string> validate_record(const WaveformRecord& rec,
                                         double f_s = 50e3);

} // namespace hvdc
