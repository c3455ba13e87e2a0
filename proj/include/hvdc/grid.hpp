#pragma once

#include <map>
#include <memory>
#include <vector>

#include "hvdc/network.hpp"
#include "hvdc/types.hpp"

namespace hvdc::sim {

/// Averaged dc-side converter model derived from arm parameters.
struct ConverterModel {
  double rated_mva = 900.0;
  double dc_kv = 320.0; // pole-to-ground
  double series_r_ohm = 0.0;
  double series_l_h = 0.0;
  double terminal_c_f = 0.0;

  static ConverterModel from_arm(double rated_mva, double c_arm_uf,
                                 double l_arm_mh, double r_arm_ohm) {
    ConverterModel m;
    m.rated_mva = rated_mva;
    m.series_r_ohm = 2.0 / 3.0 * r_arm_ohm;
    m.series_l_h = 2.0 / 3.0 * l_arm_mh * 1e-3;
    m.terminal_c_f = 6.0 * c_arm_uf * 1e-6;
    return m;
  }
};

struct CableModel {
  double section_km = 10.0;
  double r_ohm_per_km = 0.011;
  double l_h_per_km = 0.151e-3;
  double c_f_per_km = 0.146e-6;

  double wave_speed_km_s() const;
  double travel_time_s_per_km() const;
  /// Throws if the wave speed leaves the physical plausibility band
  /// [1.5e5, 2.5e5] km/s or section_km is not positive.
  void validate() const;
};

struct GridTopology {
  std::array<ConverterModel, 4> converters{
      ConverterModel::from_arm(900.0, 29.3, 84.8, 0.885),
      ConverterModel::from_arm(900.0, 29.3, 84.8, 0.885),
      ConverterModel::from_arm(900.0, 29.3, 84.8, 0.885),
      ConverterModel::from_arm(1200.0, 39.0, 63.6, 0.67)};
  double reactor_h = 0.050; // current-limiting reactor at every line end
  double grounding_ohm = 0.1;
  /// Pre-fault injections at terminals 2..4 [kA, positive pole]; terminal 1
  /// is the voltage master and absorbs the balance.
  std::array<double, 3> injections_ka{-0.3, -0.8, -0.5};
};

struct SimConfig {
  double dt_sim = 1e-6;
  double f_s = 50e3;

  void validate() const {
    if (!(dt_sim > 0.0) || dt_sim > 1.0 / (10.0 * f_s))
      throw std::invalid_argument("dt_sim must satisfy dt <= 1/(10 f_s)");
  }
};

struct FaultTap {
  int switch_id = -1; // P2P uses one switch per... see build notes
  std::vector<int> switch_ids;
};

/// The assembled network plus every named measurement point.
class GridNetwork {
 public:
  Network net;

  struct LineEnd {
    int reactor_ind[2];  // per pole, current = bus -> line
    int line_node[2];    // line-side node of the reactor
    int bus_node[2];
  };

  /// Sensor taps keyed by (terminal 1..4, line).
  std::map<std::pair<int, int>, LineEnd> ends;
  /// Section-boundary nodes per line per pole; index 0 = first terminal end.
  std::map<int, std::array<std::vector<int>, 2>> line_nodes;
  std::vector<int> fault_switches;
  int master_vsource[2] = {-1, -1};
  std::vector<int> injection_sources; // terminals 2..4, poles interleaved
  int sections_per_line[5] = {0, 0, 0, 0, 0};

  const LineEnd& end(int terminal, LineId line) const;
  SensorFrame sample(int terminal, LineId line, double t) const;
};

/// Builds the four-terminal meshed grid (lines 1-2, 1-3, 1-4, 2-4, 3-4)
/// as cascaded pi-sections. Throws on a section length that does not
/// divide a line length.
std::unique_ptr<GridNetwork> build_grid(const GridTopology& topology,
                                        const CableModel& cable,
                                        double load_scale = 1.0);

/// Arms a fault on `line` at the boundary node nearest `location_km`
/// (measured from the line's first terminal). Returns switch ids to close
/// at t_fault.
std::vector<int> add_fault(GridNetwork& grid, const GridTopology& topo,
                           const CableModel& cable, LineId line,
                           const Fault& fault, double location_km,
                           double impedance_ohm);

/// Shortest electrical distance [km] from a fault position to a terminal.
double path_distance_km(LineId faulted_line, double location_km, int terminal);

} // namespace hvdc::sim
