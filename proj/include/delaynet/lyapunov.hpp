#pragma once

#include "delaynet/classifier.hpp"
#include "delaynet/ddesim.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace delaynet {

/// beta - z + z ln(z / beta). Throws std::invalid_argument unless z, beta > 0.
double h(double z, double beta);

struct PointTerm {
  std::size_t species = 0;
  double weight = 1.0;
  double center = 1.0;
};

/// weight * integral_{-delay}^{0} h(psi(s)^y; center) ds
struct IntegralTerm {
  Complex y;
  double delay = 0.0;
  double weight = 0.0;
  double center = 1.0;  // xbar^y
  std::string origin;   // "quasi" or "loop"
};

struct LyapunovFunctional {
  std::vector<PointTerm> point_terms;
  std::vector<IntegralTerm> integral_terms;
  State xbar;

  double max_delay() const;
};

/// Point weights l_j^{-1}; one integral term per delayed quasi rate (weight
/// k_bar) and per delayed loop (weight K l_j^{-1}, j in supp y). Throws
/// std::invalid_argument when cert is not accepted, xbar is not positive,
/// or xbar is not an equilibrium of the decomposed right-hand side.
LyapunovFunctional build_functional(const StabilityCertificate& cert, const State& xbar, double eq_tol = 1e-10);

/// V at the segment ending at time t (the history x_t(s) = path(t + s)).
/// Integral terms use 16-point Gauss-Legendre on each Hermite piece.
double evaluate(const LyapunovFunctional& V, const HistorySegment& path, double t);
double evaluate(const LyapunovFunctional& V, const Trajectory& traj, double t);

/// Closed form for the constant history psi == x.
double evaluate_constant(const LyapunovFunctional& V, const State& x);

/// (V(x_{t+delta}) - V(x_{t-delta})) / (2 delta); delta defaults to the
/// trajectory step. Throws std::out_of_range when a window leaves the domain.
double lie_derivative_estimate(const LyapunovFunctional& V, const Trajectory& traj, double t, double delta = 0.0);

struct VTrace {
  std::vector<double> t;
  std::vector<double> V;
  std::vector<double> dV;  // central-difference estimate, NaN at the ends

  double max_increment() const;  // largest V[i+1] - V[i]
};

/// Samples V every `stride` time units on [0, t_end] (parallel).
VTrace trace(const LyapunovFunctional& V, const Trajectory& traj, double stride);

void write_trace_csv(std::ostream& out, const VTrace& tr);

}  // namespace delaynet
