#include "delaynet/lyapunov.hpp"

#include "delaynet/threads.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

namespace delaynet {

double h(double z, double beta) {
  if (!(z > 0) || !(beta > 0)) {
    throw std::invalid_argument("h: arguments must be positive");
  }
  return beta - z + z * std::log(z / beta);
}

double LyapunovFunctional::max_delay() const {
  double out = 0.0;
  for (const auto& term : integral_terms) {
    out = std::max(out, term.delay);
  }
  return out;
}

LyapunovFunctional build_functional(const StabilityCertificate& cert, const State& xbar, double eq_tol) {
  if (!cert.accepted()) {
    throw std::invalid_argument("build_functional: certificate was rejected");
  }
  const auto& dec = cert.decomposition;
  const std::size_t n = dec.L.size();
  if (xbar.size() != n || std::any_of(xbar.begin(), xbar.end(), [](double v) { return !(v > 0); })) {
    throw std::invalid_argument("build_functional: xbar must be a positive n-vector");
  }
  std::map<double, State> lagged;
  for (const auto& q : dec.quasi_rates) {
    lagged[to_double(q.delay)] = xbar;
  }
  for (const auto& lt : dec.loop_terms) {
    lagged[to_double(lt.delay)] = xbar;
  }
  const State f = reconstruct_rhs(cert, xbar, lagged);
  for (double v : f) {
    if (std::abs(v) > eq_tol) {
      throw std::invalid_argument("build_functional: xbar is not an equilibrium (|f| = " + std::to_string(std::abs(v)) +
                                  ")");
    }
  }

  LyapunovFunctional V;
  V.xbar = xbar;
  const std::vector<double> L = to_double(dec.L);
  for (std::size_t j = 0; j < n; ++j) {
    V.point_terms.push_back({j, 1.0 / L[j], xbar[j]});
  }
  // merge identical (y, delay) contributions per origin
  std::map<std::pair<Complex, Rational>, Rational> quasi;
  std::map<std::pair<Complex, Rational>, Rational> loops;
  for (const auto& q : dec.quasi_rates) {
    if (q.delay > 0) {
      quasi[{q.reactant, q.delay}] += q.kbar;
    }
  }
  for (const auto& lt : dec.loop_terms) {
    if (lt.delay <= 0 || is_zero_complex(lt.y)) {
      continue;
    }
    std::optional<Rational> omega;
    for (std::size_t j = 0; j < lt.y.size(); ++j) {
      if (lt.y[j] == 0) {
        continue;
      }
      const Rational w = 1 / dec.L[j];
      if (omega && *omega != w) {
        throw std::invalid_argument("build_functional: loop on " + format_complex(cert.witness.target.species, lt.y) +
                                    " mixes species with different l_j");
      }
      omega = w;
    }
    loops[{lt.y, lt.delay}] += lt.K * *omega;
  }
  for (const auto& [source, origin] : {std::pair{&quasi, "quasi"}, std::pair{&loops, "loop"}}) {
    for (const auto& [key, weight] : *source) {
      if (weight > 0) {
        V.integral_terms.push_back(
            {key.first, to_double(key.second), to_double(weight), monomial(xbar, key.first), origin});
      }
    }
  }
  return V;
}

double evaluate_constant(const LyapunovFunctional& V, const State& x) {
  double out = 0.0;
  for (const auto& p : V.point_terms) {
    out += p.weight * h(x[p.species], p.center);
  }
  for (const auto& term : V.integral_terms) {
    out += term.weight * term.delay * h(monomial(x, term.y), term.center);
  }
  return out;
}

double evaluate(const LyapunovFunctional& V, const HistorySegment& path, double t) {
  const State x_now = path(t);
  double out = 0.0;
  for (const auto& p : V.point_terms) {
    out += p.weight * h(x_now[p.species], p.center);
  }
  // Terms sharing a delay share the state evaluations.
  std::map<double, std::vector<const IntegralTerm*>> by_delay;
  for (const auto& term : V.integral_terms) {
    by_delay[term.delay].push_back(&term);
  }
  for (const auto& [tau, terms] : by_delay) {
    if (t - tau < path.t_begin() - 1e-12) {
      throw std::out_of_range("evaluate: segment shorter than the largest delay");
    }
    integrate_path(path, std::max(t - tau, path.t_begin()), t, [&](double w, const State& x) {
      for (const auto* term : terms) {
        out += w * term->weight * h(monomial(x, term->y), term->center);
      }
    });
  }
  return out;
}

double evaluate(const LyapunovFunctional& V, const Trajectory& traj, double t) { return evaluate(V, traj.path, t); }

double lie_derivative_estimate(const LyapunovFunctional& V, const Trajectory& traj, double t, double delta) {
  if (delta <= 0) {
    delta = traj.h;
  }
  if (t - delta - V.max_delay() < traj.path.t_begin() - 1e-12 || t + delta > traj.path.t_end() + 1e-12) {
    throw std::out_of_range("lie_derivative_estimate: t=" + std::to_string(t) + " too close to the domain edge");
  }
  return (evaluate(V, traj, t + delta) - evaluate(V, traj, t - delta)) / (2 * delta);
}

double VTrace::max_increment() const {
  double out = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < V.size(); ++i) {
    out = std::max(out, V[i] - V[i - 1]);
  }
  return out;
}

VTrace trace(const LyapunovFunctional& V, const Trajectory& traj, double stride) {
  if (!(stride > 0)) {
    throw std::invalid_argument("trace: stride must be positive");
  }
  VTrace tr;
  const double t_end = traj.t_end();
  const auto count = static_cast<std::size_t>(std::floor(t_end / stride + 1e-9)) + 1;
  tr.t.resize(count);
  tr.V.resize(count);
  tr.dV.assign(count, std::numeric_limits<double>::quiet_NaN());
  parallel_for(count, [&](std::size_t i) {
    const double t = std::min(static_cast<double>(i) * stride, t_end);
    tr.t[i] = t;
    tr.V[i] = evaluate(V, traj, t);
    if (t - traj.h >= 0 && t + traj.h <= t_end) {
      tr.dV[i] = lie_derivative_estimate(V, traj, t);
    }
  });
  return tr;
}

void write_trace_csv(std::ostream& out, const VTrace& tr) {
  out << "t,V,dV\n";
  char buf[96];
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", tr.t[i], tr.V[i], tr.dV[i]);
    out << buf;
  }
}

}  // namespace delaynet
