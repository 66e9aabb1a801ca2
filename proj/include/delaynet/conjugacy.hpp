#pragma once

#include "delaynet/kinetics.hpp"
#include "delaynet/network.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace delaynet {

struct ConjugacyReport {
  enum class Kind { dynamically_equivalent, linearly_conjugate, neither };
  Kind kind = Kind::neither;
  /// Z^(y) - sum k_bar L (y~' - y) for every y in RC u RC~ (exact).
  std::map<Complex, RationalVector> residuals;
  double residual_max = 0.0;  // relative, see check_linear_conjugacy
  /// k_bar per target reaction index.
  std::vector<Rational> kbar;
};

struct ConjugacyOptions {
  double tol = 1e-9;
  /// Use the printed form without the L factor on the target side.
  bool literal_form = false;
};

/// k~_i * prod_j l_j^{-y~_ij} for every target reaction.
std::vector<Rational> scaled_rates(const ConjugacyWitness& witness);

ConjugacyReport check_dynamic_equivalence(const DelayedNetwork& source, const DelayedNetwork& target,
                                          double tol = 1e-9);

/// Per-reactant test of sum_i k_i (y'_i - y) = sum_i~ k_bar_i~ L (y~'_i~ - y).
/// Residual norms are taken relative to max(1, |Z^(y)|_inf).
ConjugacyReport check_linear_conjugacy(const DelayedNetwork& source, const ConjugacyWitness& witness,
                                       const ConjugacyOptions& options = {});

/// Independent route: max over sample states of
/// |f_M(x) - L f_M~(L^{-1} x)|_inf / max(1, |f_M(x)|_inf).
double rhs_conjugacy_defect(const DelayedNetwork& source, const ConjugacyWitness& witness,
                            const std::vector<State>& samples);

struct ConjugacySearch {
  bool feasible = false;
  bool heuristic = false;  // true when L was searched for
  ConjugacyWitness witness;
  double residual = 0.0;
  /// Infeasibility explanation; when L is fixed and the system has no
  /// nonnegative solution this holds a Farkas vector for the offending
  /// reactant complex.
  std::string reason;
  std::optional<Complex> failing_complex;
  RationalVector farkas;
};

/// target_structure supplies complexes and arrows; its rates are ignored.
/// With L_fixed the problem is an exact LP maximizing the smallest k_bar.
ConjugacySearch find_conjugacy(const DelayedNetwork& source, const DelayedNetwork& target_structure,
                               const std::optional<RationalVector>& L_fixed, double eps = 1e-12);

}  // namespace delaynet
