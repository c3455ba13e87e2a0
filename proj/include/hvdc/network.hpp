#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace hvdc::sim {

struct DivergenceError : std::runtime_error {
  DivergenceError(const std::string& what, int node)
      : std::runtime_error(what), first_node(node) {}
  int first_node;
};

/// Linear dynamic network integrated with the trapezoidal rule via
/// companion models and modified nodal analysis. Ground is node -1.
class Network {
 public:
  int add_node();
  int node_count() const { return num_nodes_; }

  int add_resistor(int a, int b, double ohms);
  int add_inductor(int a, int b, double henry);
  int add_capacitor(int a, int b, double farad);
  /// Ideal source; positive terminal a. Returns source id.
  int add_voltage_source(int a, int b, double volts);
  /// Injects amps into node a and out of node b.
  int add_current_source(int a, int b, double amps);
  /// Series switch+resistor branch; open state uses a 1e-9 S leak.
  int add_switch(int a, int b, double on_ohms, bool closed = false);

  void set_switch(int id, bool closed);
  void set_voltage(int id, double volts);
  void set_current(int id, double amps);

  /// Solves the dc operating point (inductors shorted, capacitors open)
  /// and seeds all companion histories from it.
  void init_dc();

  /// One trapezoidal step of size dt.
  void step(double dt);

  double node_voltage(int n) const;
  double inductor_current(int id) const;
  double inductor_voltage(int id) const;
  double source_current(int voltage_source_id) const;
  /// Total stored energy across capacitors and inductors [J].
  double stored_energy() const;

 private:
  struct TwoTerminal {
    int a, b;
    double value;
    double v_prev = 0.0, i_prev = 0.0;
  };
  struct Switch {
    int a, b;
    double on_ohms;
    bool closed;
  };

  void rebuild(double dt);
  void stamp_conductance(std::vector<Eigen::Triplet<double>>& t, int a, int b,
                         double g) const;
  double vn(const Eigen::VectorXd& x, int n) const {
    return n < 0 ? 0.0 : x[n];
  }

  int num_nodes_ = 0;
  std::vector<TwoTerminal> resistors_, inductors_, capacitors_;
  std::vector<TwoTerminal> vsources_, isources_;
  std::vector<Switch> switches_;

  Eigen::VectorXd x_; // node voltages then vsource currents
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  double built_dt_ = -1.0;
  bool dirty_ = true;
};

} // namespace hvdc::sim
