#pragma once

#include "delaynet/kinetics.hpp"
#include "delaynet/network.hpp"

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace delaynet {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Piecewise cubic Hermite function of time. Each node stores the slope of
/// the piece on its left and on its right, so a derivative jump at a node
/// (the initial time, for instance) is represented exactly.
class HistorySegment {
 public:
  HistorySegment() = default;
  explicit HistorySegment(std::size_t n) : n_(n) {}

  /// psi(s) = x for s in [-tau_max, 0].
  static HistorySegment constant(const State& x, double tau_max);

  std::size_t n() const { return n_; }
  std::size_t size() const { return t_.size(); }
  double t_begin() const { return t_.front(); }
  double t_end() const { return t_.back(); }
  const std::vector<double>& times() const { return t_; }
  const State& node(std::size_t k) const { return x_[k]; }

  /// Appends a node; t must exceed the last node time.
  void append(double t, const State& x, const State& slope_left, const State& slope_right);
  /// Replaces the right slope of the last node.
  void set_last_right_slope(const State& slope);

  /// Dense value at t; throws std::out_of_range outside [t_begin, t_end].
  void eval(double t, double* out) const;
  State operator()(double t) const;

  /// Index k of the piece [t_k, t_{k+1}] containing t (last piece for t_end).
  std::size_t piece(double t) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> t_;
  std::vector<State> x_;
  std::vector<State> dl_;
  std::vector<State> dr_;
};

/// 16-point Gauss-Legendre over [a, b], applied piece by piece: calls
/// visit(weight, x(s)) at every node, so one pass can feed several integrands.
void integrate_path(const HistorySegment& path, double a, double b,
                    const std::function<void(double, const State&)>& visit);

struct Trajectory {
  HistorySegment path;   // history followed by the integrated solution
  double t0 = 0.0;
  double h = 0.0;
  double max_delay = 0.0;
  std::vector<double> step_error;  // max-norm |RK4 - midpoint| per step

  State at(double t) const { return path(t); }
  State final_state() const { return path.node(path.size() - 1); }
  double t_end() const { return path.t_end(); }
};

struct SimulationOptions {
  double negative_tolerance = 1e-9;
};

/// Method of steps with classical RK4 on a uniform grid starting at 0. The
/// last step is shortened when T is not a multiple of h.
Trajectory simulate(const DelayedNetwork& net, const HistorySegment& psi, double T, double h,
                    const SimulationOptions& options = {});
Trajectory simulate(const DelayedNetwork& net, const State& psi, double T, double h,
                    const SimulationOptions& options = {});

/// Independent runs, one per initial state, in parallel.
std::vector<Trajectory> simulate_many(const DelayedNetwork& net, const std::vector<State>& psis, double T, double h,
                                      const SimulationOptions& options = {});

/// Header `t,x_<species>...`; one row every `stride` time units starting at
/// the first history node (nodes only when stride <= 0).
void write_trajectory_csv(std::ostream& out, const DelayedNetwork& net, const Trajectory& traj, double stride);

}  // namespace delaynet
