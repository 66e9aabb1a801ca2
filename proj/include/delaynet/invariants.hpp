#pragma once

#include "delaynet/ddesim.hpp"
#include "delaynet/linalg.hpp"
#include "delaynet/network.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace delaynet {

/// delta_ji per (species j, source reaction i) and the (l y~')_j table per
/// reactant complex.
struct DeltaTable {
  std::map<std::pair<std::size_t, std::size_t>, Rational> delta;
  std::map<Complex, RationalVector> lbar;

  /// sum_j delta_ji for every source reaction.
  std::vector<Rational> reaction_sums(std::size_t r) const;
};

/// Requires single-species reactant complexes and a valid witness. Throws
/// std::domain_error when a source product needs a species that no target
/// reaction from the same reactant produces.
DeltaTable delta_coefficients(const DelayedNetwork& net, const ConjugacyWitness& witness);

/// w-weighted functional: x(t) + sum_i w_i k_i (int_{t - tau_i}^{t} x(s)^{y_i} ds) y_i.
/// g uses w = 1; g^n uses w_i = sum_j delta_ji.
State weighted_g(const DelayedNetwork& net, const std::vector<double>& w, const HistorySegment& path, double t);
State weighted_g_constant(const DelayedNetwork& net, const std::vector<double>& w, const State& x);

State g_eval(const DelayedNetwork& net, const HistorySegment& path, double t);
State gn_eval(const DelayedNetwork& net, const DeltaTable& table, const HistorySegment& path, double t);

enum class InvariantKind { scc, new_scc_de12, new_scc_de3 };

std::string invariant_kind_name(InvariantKind kind);

struct InvariantSetSpec {
  InvariantKind kind = InvariantKind::scc;
  RationalMatrix basis;
  std::optional<DeltaTable> delta;  // new_scc_de3 only
  /// Per-reaction weights fed to weighted_g (all ones unless de3). Kept
  /// separately so a perturbed table can be tested against the exact one.
  std::vector<double> weights;
  std::vector<double> levels;  // W_b, one per basis vector
};

/// Basis: S^perp (scc), S~^perp (de12) or (L S~)^perp (de3); levels from
/// the history path ending at time t.
InvariantSetSpec invariant_set(const DelayedNetwork& net, const ConjugacyWitness& witness, const HistorySegment& path,
                               double t, InvariantKind kind);
InvariantSetSpec invariant_set(const DelayedNetwork& net, const ConjugacyWitness& witness, const State& psi,
                               InvariantKind kind);

/// Functionals b^T G(path at t), one per basis vector.
std::vector<double> set_values(const DelayedNetwork& net, const InvariantSetSpec& spec, const HistorySegment& path,
                               double t);
std::vector<double> set_values_constant(const DelayedNetwork& net, const InvariantSetSpec& spec, const State& x);

/// tau~^(y): rate-weighted mean delay of reactant y over the target's
/// outflow. For y outside the target's reactants the denominator is the
/// source outflow (loop augmentation); with allow_loop = false that case
/// throws std::domain_error.
Rational quasi_delay(const DelayedNetwork& net, const ConjugacyWitness& witness, const Complex& y,
                     bool allow_loop = true);

/// x* = L z* with z* a complex-balanced equilibrium of the target.
/// Throws std::runtime_error when the balance solve fails.
State reference_equilibrium(const ConjugacyWitness& witness);

struct EquilibriumResult {
  State x;
  std::vector<double> coefficients;  // v = sum_i a_i u_i, u_i spanning S~^perp
  double residual = 0.0;             // max |b^T G(x) - W_b|
  int iterations = 0;
  bool converged = false;
};

/// Damped Newton on a -> (b^T G(x* e^{U a}) - W_b)_b, up to 100 iterations.
EquilibriumResult equilibrium_in_set(const DelayedNetwork& net, const ConjugacyWitness& witness,
                                     const InvariantSetSpec& spec, const std::vector<double>& start = {},
                                     double tol = 1e-10);

struct UniquenessProbe {
  std::vector<EquilibriumResult> runs;
  double max_pairwise = 0.0;
  bool all_converged = false;
};

/// Newton from `starts` random coefficient vectors in [-2, 2]^m (fixed seed).
UniquenessProbe uniqueness_probe(const DelayedNetwork& net, const ConjugacyWitness& witness,
                                 const InvariantSetSpec& spec, std::size_t starts = 20, std::uint64_t seed = 12345);

/// { diag(x*) e^v : v in span(basis) }.
class DegenerateSet {
 public:
  DegenerateSet(State x_star, RationalMatrix basis);
  std::size_t dimension() const { return basis_.size(); }
  State point(const std::vector<double>& coefficients) const;

 private:
  State x_star_;
  std::vector<std::vector<double>> basis_;
};

DegenerateSet degenerate_set(const State& x_star, const RationalMatrix& basis);

/// max over samples t in [0, t_end] (step `stride`) of |b^T G(x_t) - W_b|.
double conservation_check(const DelayedNetwork& net, const Trajectory& traj, const InvariantSetSpec& spec,
                          double stride);

/// For a one-vector spec: grid over the first n - 1 coordinates on
/// [lo, hi], last coordinate solved by bisection on the constant-history
/// functional. CSV columns x_<species>; grid points without a root are
/// skipped.
void write_level_grid_csv(std::ostream& out, const DelayedNetwork& net, const InvariantSetSpec& spec, double level,
                          double lo, double hi, std::size_t resolution);

}  // namespace delaynet
