#include "hvdc/network.hpp"

#include <cmath>

namespace hvdc::sim {

namespace {
constexpr double kGmin = 1e-12;    // diagonal leak keeping the matrix regular
constexpr double kGShort = 1e6;    // inductor conductance in the dc solve
constexpr double kGLeakDc = 1e-12; // capacitor leak in the dc solve
constexpr double kGOff = 1e-9;     // open-switch leak
} // namespace

int Network::add_node() {
  dirty_ = true;
  return num_nodes_++;
}

int Network::add_resistor(int a, int b, double ohms) {
  if (!(ohms > 0.0)) throw std::invalid_argument("resistance must be > 0");
  resistors_.push_back({a, b, ohms});
  dirty_ = true;
  return static_cast<int>(resistors_.size()) - 1;
}

int Network::add_inductor(int a, int b, double henry) {
  if (!(henry > 0.0)) throw std::invalid_argument("inductance must be > 0");
  inductors_.push_back({a, b, henry});
  dirty_ = true;
  return static_cast<int>(inductors_.size()) - 1;
}

int Network::add_capacitor(int a, int b, double farad) {
  if (!(farad > 0.0)) throw std::invalid_argument("capacitance must be > 0");
  capacitors_.push_back({a, b, farad});
  dirty_ = true;
  return static_cast<int>(capacitors_.size()) - 1;
}

int Network::add_voltage_source(int a, int b, double volts) {
  vsources_.push_back({a, b, volts});
  dirty_ = true;
  return static_cast<int>(vsources_.size()) - 1;
}

int Network::add_current_source(int a, int b, double amps) {
  isources_.push_back({a, b, amps});
  return static_cast<int>(isources_.size()) - 1;
}

int Network::add_switch(int a, int b, double on_ohms, bool closed) {
  if (!(on_ohms > 0.0)) throw std::invalid_argument("on resistance must be > 0");
  switches_.push_back({a, b, on_ohms, closed});
  dirty_ = true;
  return static_cast<int>(switches_.size()) - 1;
}

void Network::set_switch(int id, bool closed) {
  if (switches_.at(id).closed != closed) {
    switches_[id].closed = closed;
    dirty_ = true;
  }
}

void Network::set_voltage(int id, double volts) { vsources_.at(id).value = volts; }
void Network::set_current(int id, double amps) { isources_.at(id).value = amps; }

void Network::stamp_conductance(std::vector<Eigen::Triplet<double>>& t, int a,
                                int b, double g) const {
  if (a >= 0) t.emplace_back(a, a, g);
  if (b >= 0) t.emplace_back(b, b, g);
  if (a >= 0 && b >= 0) {
    t.emplace_back(a, b, -g);
    t.emplace_back(b, a, -g);
  }
}

void Network::rebuild(double dt) {
  const int n = num_nodes_;
  const int m = static_cast<int>(vsources_.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(8 * (resistors_.size() + inductors_.size() + capacitors_.size() +
                    switches_.size()) +
               4 * m + n);

  for (int i = 0; i < n; ++i) trip.emplace_back(i, i, kGmin);
  for (const auto& r : resistors_) stamp_conductance(trip, r.a, r.b, 1.0 / r.value);
  for (const auto& s : switches_)
    stamp_conductance(trip, s.a, s.b, s.closed ? 1.0 / s.on_ohms : kGOff);
  for (const auto& l : inductors_)
    stamp_conductance(trip, l.a, l.b,
                      dt > 0.0 ? dt / (2.0 * l.value) : kGShort);
  for (const auto& c : capacitors_)
    stamp_conductance(trip, c.a, c.b,
                      dt > 0.0 ? 2.0 * c.value / dt : kGLeakDc);
  for (int k = 0; k < m; ++k) {
    const auto& vs = vsources_[k];
    if (vs.a >= 0) {
      trip.emplace_back(vs.a, n + k, 1.0);
      trip.emplace_back(n + k, vs.a, 1.0);
    }
    if (vs.b >= 0) {
      trip.emplace_back(vs.b, n + k, -1.0);
      trip.emplace_back(n + k, vs.b, -1.0);
    }
  }

  Eigen::SparseMatrix<double> A(n + m, n + m);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  lu_.compute(A);
  if (lu_.info() != Eigen::Success)
    throw std::runtime_error("network matrix factorization failed");
  built_dt_ = dt;
  dirty_ = false;
}

void Network::init_dc() {
  rebuild(0.0);
  const int n = num_nodes_;
  const int m = static_cast<int>(vsources_.size());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + m);
  for (const auto& is : isources_) {
    if (is.a >= 0) b[is.a] += is.value;
    if (is.b >= 0) b[is.b] -= is.value;
  }
  for (int k = 0; k < m; ++k) b[n + k] = vsources_[k].value;
  x_ = lu_.solve(b);
  if (lu_.info() != Eigen::Success)
    throw std::runtime_error("dc operating point solve failed");

  for (auto& l : inductors_) {
    l.i_prev = kGShort * (vn(x_, l.a) - vn(x_, l.b));
    l.v_prev = 0.0;
  }
  for (auto& c : capacitors_) {
    c.v_prev = vn(x_, c.a) - vn(x_, c.b);
    c.i_prev = 0.0;
  }
  dirty_ = true; // transient factorization still pending
}

void Network::step(double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (dirty_ || built_dt_ != dt) rebuild(dt);

  const int n = num_nodes_;
  const int m = static_cast<int>(vsources_.size());
  if (x_.size() != n + m) x_ = Eigen::VectorXd::Zero(n + m);

  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + m);
  for (const auto& l : inductors_) {
    double g = dt / (2.0 * l.value);
    double ih = l.i_prev + g * l.v_prev;
    if (l.a >= 0) b[l.a] -= ih;
    if (l.b >= 0) b[l.b] += ih;
  }
  for (const auto& c : capacitors_) {
    double g = 2.0 * c.value / dt;
    double ih = g * c.v_prev + c.i_prev;
    if (c.a >= 0) b[c.a] += ih;
    if (c.b >= 0) b[c.b] -= ih;
  }
  for (const auto& is : isources_) {
    if (is.a >= 0) b[is.a] += is.value;
    if (is.b >= 0) b[is.b] -= is.value;
  }
  for (int k = 0; k < m; ++k) b[n + k] = vsources_[k].value;

  x_ = lu_.solve(b);

  for (int i = 0; i < n; ++i)
    if (!std::isfinite(x_[i]))
      throw DivergenceError("numerical divergence at node " + std::to_string(i),
                            i);

  for (auto& l : inductors_) {
    double g = dt / (2.0 * l.value);
    double ih = l.i_prev + g * l.v_prev;
    double v = vn(x_, l.a) - vn(x_, l.b);
    l.i_prev = g * v + ih;
    l.v_prev = v;
  }
  for (auto& c : capacitors_) {
    double g = 2.0 * c.value / dt;
    double ih = g * c.v_prev + c.i_prev;
    double v = vn(x_, c.a) - vn(x_, c.b);
    c.i_prev = g * v - ih;
    c.v_prev = v;
  }
}

double Network::node_voltage(int n) const {
  if (n < 0) return 0.0;
  if (x_.size() <= n) return 0.0;
  return x_[n];
}

double Network::inductor_current(int id) const {
  return inductors_.at(id).i_prev;
}

double Network::inductor_voltage(int id) const {
  return inductors_.at(id).v_prev;
}

double Network::source_current(int id) const {
  if (x_.size() < num_nodes_ + static_cast<int>(vsources_.size())) return 0.0;
  return x_[num_nodes_ + id];
}

double Network::stored_energy() const {
  double e = 0.0;
  for (const auto& c : capacitors_) e += 0.5 * c.value * c.v_prev * c.v_prev;
  for (const auto& l : inductors_) e += 0.5 * l.value * l.i_prev * l.i_prev;
  return e;
}

} // namespace hvdc::sim
