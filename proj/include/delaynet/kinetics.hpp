#pragma once

#include "delaynet/linalg.hpp"
#include "delaynet/network.hpp"

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace delaynet {

using State = std::vector<double>;

/// x^y with 0^0 = 1.
double monomial(const double* x, const Complex& y);
double monomial(const State& x, const Complex& y);

/// Non-delayed mass-action right-hand side sum_i k_i x^{y_i} (y'_i - y_i).
State ode_rhs(const DelayedNetwork& net, const State& x);

/// Delayed right-hand side sum_i k_i [x(t - tau_i)^{y_i} y'_i - x(t)^{y_i} y_i].
/// x_delayed maps each distinct delay (as double) to the lagged state; a
/// zero delay may be omitted and then reads x_now. Throws
/// std::out_of_range on a missing delay.
State dde_rhs(const DelayedNetwork& net, const State& x_now, const std::map<double, State>& x_delayed);

using DelayKey = std::pair<Complex, Rational>;

struct AggregateTable {
  std::map<Complex, RationalVector> Z;       // sum_i k_i^(y) v_i
  std::map<DelayKey, RationalVector> Z_tau;  // restricted to delay tau
  std::map<Complex, RationalVector> Y;       // sum_i k_i^(y) y'_i
  std::map<DelayKey, RationalVector> Y_tau;
  std::map<Complex, Rational> k_sum;  // sum_i k_i^(y)
  std::map<DelayKey, Rational> k_sum_tau;

  /// Delays present for reactant y, ascending.
  std::vector<Rational> delays_of(const Complex& y) const;
};

AggregateTable aggregates(const DelayedNetwork& net);

/// Rank-one description of a set of vectors: each v_i = a_i w.
struct OneDimFrame {
  enum class Kind { one_dim, zero_span, higher };
  Kind kind = Kind::zero_span;
  RationalVector w;  // first nonzero component is 1
  RationalVector a;  // one coefficient per input vector
};

OneDimFrame one_dim_frame(const std::vector<RationalVector>& vectors, std::size_t n);

/// Frame of {y'_i - y : reactant of i is y}; a is indexed by position in
/// reactant_groups(net)[y].
OneDimFrame one_dim_frame(const DelayedNetwork& net, const Complex& y);

/// Largest per-complex imbalance |inflow - outflow| at x, relative to the
/// largest reaction flux (0 for a network without reactions).
double complex_balance_defect(const DelayedNetwork& net, const State& x);

/// Positive complex-balanced equilibrium by damped Gauss-Newton on the
/// balance equations in log coordinates, started from x0 (default all ones).
/// nullopt when no point with defect <= tol is reached.
std::optional<State> complex_balanced_equilibrium(const DelayedNetwork& net, double tol = 1e-12,
                                                  const std::optional<State>& x0 = std::nullopt);

/// Precompiled evaluator used by the integrator. Delayed states are passed
/// per distinct-delay slot (see delays()).
class RhsEvaluator {
 public:
  explicit RhsEvaluator(const DelayedNetwork& net);

  std::size_t n() const { return n_; }
  /// Distinct delays (ascending), the slot order for evaluate().
  const std::vector<double>& delays() const { return delays_; }
  double max_delay() const { return delays_.empty() ? 0.0 : delays_.back(); }

  /// out = f(x_now, x_lag[slot]); arrays of length n.
  void evaluate(const double* x_now, const std::vector<const double*>& x_lag, double* out) const;

 private:
  struct Term {
    std::size_t slot;
    double rate;
    std::vector<std::pair<std::size_t, int>> reactant;  // sparse y
    std::vector<std::pair<std::size_t, int>> product;   // sparse y'
  };
  static double sparse_monomial(const double* x, const std::vector<std::pair<std::size_t, int>>& y);

  std::size_t n_;
  std::vector<double> delays_;
  std::vector<Term> terms_;
};

}  // namespace delaynet
