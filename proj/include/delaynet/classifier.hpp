#pragma once

#include "delaynet/conjugacy.hpp"
#include "delaynet/kinetics.hpp"
#include "delaynet/network.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace delaynet {

/// One delayed copy of a target reaction: k~^(y,tau) in target units and
/// the L-scaled k_bar = k~ prod l^{-y}. `source` names the source reaction
/// when the split was attributed reaction by reaction.
struct QuasiRate {
  std::size_t target = 0;
  Complex reactant;
  Rational delay;
  Rational rate;
  Rational kbar;
  std::optional<std::size_t> source;
};

/// K (x(t - tau)^y - x(t)^y) y.
struct LoopTerm {
  Complex y;
  Rational delay;
  Rational K;
};

/// delta_j^(y,tau) as used by the species-multiple route.
struct DeltaEntry {
  Complex y;
  Rational delay;
  std::size_t species = 0;
  Rational delta;
};

struct Decomposition {
  std::vector<QuasiRate> quasi_rates;
  std::vector<LoopTerm> loop_terms;
  RationalVector L;
  /// Network whose rates the quasi split sums to. Equals the witness target
  /// except when the sign-split route replaces it by a rescaled copy.
  DelayedNetwork quasi_target;
  std::vector<DeltaEntry> deltas;
  /// Reactant complex -> case label (e.g. "case_I").
  std::map<Complex, std::string> cases;
};

enum class Theorem { thm1, thm2_case1, thm2_case2, cor1_case1, cor1_case2, thm3, lcdcbmas, none };

std::string theorem_name(Theorem t);

struct StabilityCertificate {
  Theorem theorem = Theorem::none;
  Decomposition decomposition;
  ConjugacyWitness witness;
  std::vector<std::string> notes;
  std::vector<std::string> rejections;

  bool accepted() const { return theorem != Theorem::none; }
};

struct HfEntry {
  Complex y;
  Rational delay;
  RationalVector vbar;
  Rational norm;
  std::optional<Rational> min_target_norm;  // nullopt: no nonzero target vector
  bool ok = true;
};

struct HfReport {
  bool holds = true;
  std::vector<HfEntry> entries;
};

HfReport check_hf(const DelayedNetwork& source, const DelayedNetwork& target);

/// Sign-split coefficients for one reactant complex with a 1-d frame.
struct SignSplit {
  Rational Z_plus_target;   // sum over a~ > 0 of k~ a~
  Rational Z_minus_target;  // sum over a~ < 0 of k~ |a~|
  /// (delay, target index) -> c^(y,tau,+) or c^(y,tau,-)
  std::map<std::pair<Rational, std::size_t>, Rational> c;
};

/// zs: Z^(y,tau) per delay; a_target: a~ per target index (absent = not
/// from y). Throws std::domain_error when a needed side has no target.
SignSplit split_sign_coefficients(const std::map<Rational, Rational>& zs,
                                  const std::map<std::size_t, Rational>& a_target,
                                  const std::vector<Rational>& target_rates);

StabilityCertificate check_lcdcbmas(const DelayedNetwork& source, const ConjugacyWitness& witness);
StabilityCertificate check_thm1(const DelayedNetwork& source, const ConjugacyWitness& witness);
StabilityCertificate check_thm3(const DelayedNetwork& source, const ConjugacyWitness& witness);
StabilityCertificate check_cor1(const DelayedNetwork& source, const ConjugacyWitness& witness);
StabilityCertificate check_thm2(const DelayedNetwork& source, const ConjugacyWitness& witness);

/// Tries the routes in order lcdcbmas, thm1, thm3, cor1, thm2. Without a
/// witness only the identity-L routes can succeed and a target must be
/// supplied through the witness; with nullopt the source itself is tried.
StabilityCertificate classify(const DelayedNetwork& source, const std::optional<ConjugacyWitness>& witness);

/// Quasi terms plus loop terms evaluated at (x_now, lagged states).
State reconstruct_rhs(const StabilityCertificate& cert, const State& x_now,
                      const std::map<double, State>& x_delayed);

/// Exact comparison of the decomposition against the source right-hand
/// side, monomial by monomial (delayed and current copies kept apart;
/// a zero delay counts as current). Returns the mismatching keys.
std::vector<std::string> decomposition_mismatches(const StabilityCertificate& cert, const DelayedNetwork& source);

/// sum_tau k~^(y,tau) - k~ for every quasi-target reaction (exact).
std::vector<Rational> rate_split_defects(const StabilityCertificate& cert);

}  // namespace delaynet
