#include "hvdc/grid.hpp"

#include <algorithm>
#include <cmath>

namespace hvdc::sim {

double CableModel::wave_speed_km_s() const {
  return 1.0 / std::sqrt(l_h_per_km * c_f_per_km);
}

double CableModel::travel_time_s_per_km() const {
  return std::sqrt(l_h_per_km * c_f_per_km);
}

void CableModel::validate() const {
  if (!(section_km > 0.0))
    throw std::invalid_argument("section_km must be positive");
  double v = wave_speed_km_s();
  if (v < 1.5e5 || v > 2.5e5)
    throw std::invalid_argument(
        "cable wave speed " + std::to_string(v) +
        " km/s outside plausibility band [1.5e5, 2.5e5]");
}

const GridNetwork::LineEnd& GridNetwork::end(int terminal, LineId line) const {
  auto it = ends.find({terminal, static_cast<int>(line)});
  if (it == ends.end())
    throw std::invalid_argument("no sensor at terminal " +
                                std::to_string(terminal) + " / " +
                                line_name(line));
  return it->second;
}

SensorFrame GridNetwork::sample(int terminal, LineId line, double t) const {
  const LineEnd& le = end(terminal, line);
  SensorFrame f;
  f.t = t;
  for (int p = 0; p < 2; ++p) {
    // Pole-referenced convention: negative-pole channels are measured in
    // their own polarity, so nominal values read positive on both poles.
    double ref = p == 0 ? 1.0 : -1.0;
    double i_a = net.inductor_current(le.reactor_ind[p]);
    double vl_v = net.node_voltage(le.line_node[p]);
    double vr_v = net.inductor_voltage(le.reactor_ind[p]); // bus - line
    f.line_current[p] = ref * i_a / 1e3;  // A -> kA
    f.line_voltage[p] = ref * vl_v / 1e3; // V -> kV
    f.reactor_voltage[p] = ref * vr_v / 1e3;
  }
  return f;
}

static int sections_for(LineId line, const CableModel& cable) {
  double len = line_length_km(line);
  double n = len / cable.section_km;
  double ni = std::round(n);
  if (std::abs(n - ni) > 1e-9 || ni < 1)
    throw std::invalid_argument("section length " +
                                std::to_string(cable.section_km) +
                                " km does not divide " + line_name(line));
  return static_cast<int>(ni);
}

std::unique_ptr<GridNetwork> build_grid(const GridTopology& topo,
                                        const CableModel& cable,
                                        double load_scale) {
  cable.validate();
  auto grid = std::make_unique<GridNetwork>();
  Network& net = grid->net;

  int bus[4][2];
  for (int t = 0; t < 4; ++t)
    for (int p = 0; p < 2; ++p) bus[t][p] = net.add_node();

  // Converter 1 is the voltage master: ideal source behind its Thevenin
  // R-L, terminal capacitance at the bus. Converters 2..4 inject fixed
  // current scaled by load_scale.
  for (int p = 0; p < 2; ++p) {
    double sgn = p == 0 ? 1.0 : -1.0;
    const ConverterModel& cm = topo.converters[0];
    int src = net.add_node();
    int mid = net.add_node();
    grid->master_vsource[p] =
        net.add_voltage_source(src, -1, sgn * cm.dc_kv * 1e3);
    net.add_resistor(src, mid, cm.series_r_ohm);
    net.add_inductor(mid, bus[0][p], cm.series_l_h);
    net.add_capacitor(bus[0][p], -1, cm.terminal_c_f);
  }
  for (int t = 1; t < 4; ++t) {
    const ConverterModel& cm = topo.converters[t];
    for (int p = 0; p < 2; ++p) {
      double sgn = p == 0 ? 1.0 : -1.0;
      double inj_a = sgn * topo.injections_ka[t - 1] * 1e3 * load_scale;
      grid->injection_sources.push_back(
          net.add_current_source(bus[t][p], -1, inj_a));
      net.add_capacitor(bus[t][p], -1, cm.terminal_c_f);
    }
  }

  for (LineId line : kAllLines) {
    int li = static_cast<int>(line);
    auto [t1, t2] = line_terminals(line);
    int n = sections_for(line, cable);
    grid->sections_per_line[li] = n;

    double r_sec = cable.r_ohm_per_km * cable.section_km;
    double l_sec = cable.l_h_per_km * cable.section_km;
    double c_sec = cable.c_f_per_km * cable.section_km;

    std::array<std::vector<int>, 2> nodes;
    GridNetwork::LineEnd end1{}, end2{};
    for (int p = 0; p < 2; ++p) {
      auto& bn = nodes[p];
      bn.resize(n + 1);
      for (int k = 0; k <= n; ++k) bn[k] = net.add_node();

      end1.bus_node[p] = bus[t1 - 1][p];
      end1.line_node[p] = bn[0];
      end1.reactor_ind[p] =
          net.add_inductor(bus[t1 - 1][p], bn[0], topo.reactor_h);
      end2.bus_node[p] = bus[t2 - 1][p];
      end2.line_node[p] = bn[n];
      end2.reactor_ind[p] =
          net.add_inductor(bus[t2 - 1][p], bn[n], topo.reactor_h);

      for (int s = 0; s < n; ++s) {
        int j = net.add_node();
        net.add_resistor(bn[s], j, r_sec);
        net.add_inductor(j, bn[s + 1], l_sec);
      }
      for (int k = 0; k <= n; ++k) {
        double c = (k == 0 || k == n) ? c_sec / 2.0 : c_sec;
        net.add_capacitor(bn[k], -1, c);
      }
    }
    grid->line_nodes[li] = std::move(nodes);
    grid->ends[{t1, li}] = end1;
    grid->ends[{t2, li}] = end2;
  }
  return grid;
}

std::vector<int> add_fault(GridNetwork& grid, const GridTopology& topo,
                           const CableModel& cable, LineId line,
                           const Fault& fault, double location_km,
                           double impedance_ohm) {
  if (fault.type == FaultType::none) return {};
  LineId target = fault.type == FaultType::external ? fault.remote_line : line;
  int li = static_cast<int>(target);
  const auto& nodes = grid.line_nodes.at(li);
  int n = grid.sections_per_line[li];
  int k = static_cast<int>(std::round(location_km / cable.section_km));
  k = std::clamp(k, 0, n);

  std::vector<int> sw;
  if (fault.type == FaultType::p2p || fault.type == FaultType::external) {
    // External disturbances are applied as P2P on the remote line.
    double r = std::max(impedance_ohm, 1e-3);
    sw.push_back(grid.net.add_switch(nodes[0][k], nodes[1][k], r));
  } else {
    int p = idx(fault.pole);
    double r = std::max(impedance_ohm, 0.0) + topo.grounding_ohm;
    sw.push_back(grid.net.add_switch(nodes[p][k], -1, r));
  }
  for (int id : sw) grid.fault_switches.push_back(id);
  return sw;
}

double path_distance_km(LineId faulted_line, double location_km, int terminal) {
  double sp[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) sp[i][j] = i == j ? 0.0 : 1e18;
  for (LineId l : kAllLines) {
    auto [a, b] = line_terminals(l);
    double w = line_length_km(l);
    sp[a - 1][b - 1] = std::min(sp[a - 1][b - 1], w);
    sp[b - 1][a - 1] = sp[a - 1][b - 1];
  }
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        sp[i][j] = std::min(sp[i][j], sp[i][k] + sp[k][j]);

  auto [t1, t2] = line_terminals(faulted_line);
  double len = line_length_km(faulted_line);
  return std::min(location_km + sp[t1 - 1][terminal - 1],
                  (len - location_km) + sp[t2 - 1][terminal - 1]);
}

} // namespace hvdc::sim
