#include "delaynet/classifier.hpp"

#include "delaynet/simplex.hpp"
#include "delaynet/structure.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace delaynet {

std::string theorem_name(Theorem t) {
  switch (t) {
    case Theorem::thm1: return "thm1";
    case Theorem::thm2_case1: return "thm2_case1";
    case Theorem::thm2_case2: return "thm2_case2";
    case Theorem::cor1_case1: return "cor1_case1";
    case Theorem::cor1_case2: return "cor1_case2";
    case Theorem::thm3: return "thm3";
    case Theorem::lcdcbmas: return "lcdcbmas";
    case Theorem::none: return "none";
  }
  return "none";
}

namespace {

std::string label(const DelayedNetwork& net, const Complex& y) { return format_complex(net.species, y); }

std::string label(const DelayedNetwork& net, const Complex& y, const Rational& tau) {
  return "(" + format_complex(net.species, y) + ", tau=" + format_rational(tau) + ")";
}

Rational l_power(const RationalVector& L, const Complex& y) {
  Rational out = 1;
  for (std::size_t j = 0; j < y.size(); ++j) {
    for (int e = 0; e < y[j]; ++e) {
      out *= L[j];
    }
  }
  return out;
}

std::set<Complex> reactants_of(const DelayedNetwork& net) {
  std::set<Complex> out;
  for (const auto& rx : net.reactions) {
    out.insert(rx.reactant);
  }
  return out;
}

std::vector<std::size_t> targets_from(const DelayedNetwork& target, const Complex& y) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < target.r(); ++i) {
    if (target.reactions[i].reactant == y) {
      out.push_back(i);
    }
  }
  return out;
}

// Shared bookkeeping for every route.
struct Builder {
  const DelayedNetwork& source;
  const ConjugacyWitness& witness;
  StabilityCertificate cert;
  std::vector<Rational> kbar;
  AggregateTable agg;

  Builder(const DelayedNetwork& src, const ConjugacyWitness& w) : source(src), witness(w) {
    cert.witness = w;
    cert.decomposition.L = w.L;
    cert.decomposition.quasi_target = w.target;
  }

  void reject(const std::string& reason) { cert.rejections.push_back(reason); }
  bool rejected() const { return !cert.rejections.empty(); }

  // Validates inputs, conjugacy and complex balancing of the target.
  bool gate(bool identity_required) {
    auto diags = validate_network(source);
    for (const auto& d : validate_witness(witness, source)) {
      diags.push_back(d);
    }
    if (!diags.empty()) {
      for (const auto& d : diags) {
        reject("invalid input: " + d.reason);
      }
      return false;
    }
    if (identity_required && !witness.is_identity()) {
      reject("route requires dynamic equivalence (L = I)");
      return false;
    }
    const ConjugacyReport conj = check_linear_conjugacy(source, witness);
    if (conj.kind == ConjugacyReport::Kind::neither) {
      reject(witness.is_identity() ? "source is not dynamically equivalent to the target"
                                   : "source is not linearly conjugate to the target");
      return false;
    }
    if (is_wr_deficiency_zero(witness.target)) {
      cert.notes.push_back("target is weakly reversible with deficiency zero");
    } else if (complex_balanced_equilibrium(witness.target)) {
      cert.notes.push_back("target is complex balanced (numerical balance solve)");
    } else {
      reject("target is not complex balanced");
      return false;
    }
    kbar = scaled_rates(witness);
    agg = aggregates(source);
    return true;
  }

  void quasi(std::size_t target_index, const Complex& y, const Rational& tau, const Rational& kb,
             std::optional<std::size_t> src = std::nullopt) {
    if (kb == 0) {
      return;
    }
    cert.decomposition.quasi_rates.push_back({target_index, y, tau, kb * l_power(witness.L, y), kb, src});
  }

  void quasi_target_rate(std::size_t target_index, const Complex& y, const Rational& tau, const Rational& rate,
                         std::optional<std::size_t> src = std::nullopt) {
    if (rate == 0) {
      return;
    }
    cert.decomposition.quasi_rates.push_back({target_index, y, tau, rate, rate / l_power(witness.L, y), src});
  }

  void loop(const Complex& y, const Rational& tau, const Rational& K) {
    if (K != 0) {
      cert.decomposition.loop_terms.push_back({y, tau, K});
    }
  }

  // Target reactants absent from the source contribute zero net dynamics;
  // keep them undelayed at full rate.
  void place_unmatched_targets() {
    const auto src = reactants_of(source);
    for (std::size_t i = 0; i < witness.target.r(); ++i) {
      const auto& y = witness.target.reactions[i].reactant;
      if (!src.count(y)) {
        quasi(i, y, 0, kbar[i]);
        cert.decomposition.cases.emplace(y, "target_only");
      }
    }
  }

  StabilityCertificate finish(Theorem theorem) {
    if (rejected()) {
      cert.theorem = Theorem::none;
      cert.decomposition.quasi_rates.clear();
      cert.decomposition.loop_terms.clear();
      cert.decomposition.deltas.clear();
    } else {
      cert.theorem = theorem;
    }
    return cert;
  }
};

// Index of the only species in y, or nullopt when y is empty or mixed.
std::optional<std::size_t> single_species(const Complex& y) {
  std::optional<std::size_t> found;
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (y[j] != 0) {
      if (found) {
        return std::nullopt;
      }
      found = j;
    }
  }
  return found;
}

}  // namespace

HfReport check_hf(const DelayedNetwork& source, const DelayedNetwork& target) {
  HfReport report;
  std::map<DelayKey, std::pair<RationalVector, Rational>> sums;  // (sum k v over nonzero v, sum k)
  for (const auto& rx : source.reactions) {
    const RationalVector v = reaction_vector(rx);
    if (is_zero(v)) {
      continue;
    }
    auto& [acc, ks] = sums.try_emplace({rx.reactant, rx.delay}, RationalVector(source.n(), Rational(0)), Rational(0))
                          .first->second;
    for (std::size_t j = 0; j < v.size(); ++j) {
      acc[j] += rx.rate * v[j];
    }
    ks += rx.rate;
  }
  for (const auto& [key, value] : sums) {
    HfEntry e;
    e.y = key.first;
    e.delay = key.second;
    e.vbar = value.first;
    for (auto& q : e.vbar) {
      q /= value.second;
    }
    e.norm = norm1(e.vbar);
    for (const auto& rx : target.reactions) {
      if (rx.reactant != key.first) {
        continue;
      }
      const Rational tn = norm1(reaction_vector(rx));
      if (tn != 0 && (!e.min_target_norm || tn < *e.min_target_norm)) {
        e.min_target_norm = tn;
      }
    }
    e.ok = !e.min_target_norm || e.norm <= *e.min_target_norm;
    report.holds = report.holds && e.ok;
    report.entries.push_back(std::move(e));
  }
  return report;
}

SignSplit split_sign_coefficients(const std::map<Rational, Rational>& zs,
                                  const std::map<std::size_t, Rational>& a_target,
                                  const std::vector<Rational>& target_rates) {
  SignSplit s;
  for (const auto& [i, a] : a_target) {
    if (a > 0) {
      s.Z_plus_target += target_rates[i] * a;
    } else if (a < 0) {
      s.Z_minus_target += target_rates[i] * (-a);
    }
  }
  for (const auto& [tau, z] : zs) {
    if (z == 0) {
      continue;
    }
    const bool plus = z > 0;
    const Rational& side = plus ? s.Z_plus_target : s.Z_minus_target;
    if (side == 0) {
      throw std::domain_error(plus ? "no positive a~" : "no negative a~");
    }
    const Rational delta = abs(z) / side;
    for (const auto& [i, a] : a_target) {
      if ((plus && a > 0) || (!plus && a < 0)) {
        s.c[{tau, i}] = delta * target_rates[i];
      }
    }
  }
  return s;
}

StabilityCertificate check_lcdcbmas(const DelayedNetwork& source, const ConjugacyWitness& witness) {
  Builder b(source, witness);
  if (!b.gate(false)) {
    return b.finish(Theorem::none);
  }
  for (const auto& [y, ks] : b.agg.k_sum) {
    const auto delays = b.agg.delays_of(y);
    if (delays.size() != 1) {
      b.reject("mixed delays for " + label(source, y));
      continue;
    }
    const Rational& tau = delays.front();
    const auto targets = targets_from(witness.target, y);
    if (tau > 0) {
      Rational outflow = 0;
      for (auto i : targets) {
        outflow += b.kbar[i];
      }
      bool transportable = true;
      for (std::size_t j = 0; j < y.size(); ++j) {
        if (ks * y[j] != outflow * witness.L[j] * y[j]) {
          transportable = false;
        }
      }
      if (!transportable) {
        b.reject("outflow of " + label(source, y) + " differs from the target's; delay not transportable");
        continue;
      }
    }
    for (auto i : targets) {
      b.quasi(i, y, tau, b.kbar[i]);
    }
    b.cert.decomposition.cases[y] = "single_delay";
  }
  b.place_unmatched_targets();
  return b.finish(Theorem::lcdcbmas);
}

StabilityCertificate check_thm1(const DelayedNetwork& source, const ConjugacyWitness& witness) {
  Builder b(source, witness);
  if (!b.gate(true)) {
    return b.finish(Theorem::none);
  }
  for (const auto& [y, ks] : b.agg.k_sum) {
    const auto delays = b.agg.delays_of(y);
    if (delays.size() != 1) {
      b.reject("mixed delays for " + label(source, y));
      continue;
    }
    const Rational& tau = delays.front();
    Rational target_sum = 0;
    const auto targets = targets_from(witness.target, y);
    for (auto i : targets) {
      target_sum += witness.target.reactions[i].rate;
    }
    const Rational K = ks - target_sum;
    if (K < 0) {
      b.reject("K^(y) < 0 for " + label(source, y) + " (K = " + format_rational(K) + ")");
      continue;
    }
    for (auto i : targets) {
      b.quasi(i, y, tau, b.kbar[i]);
    }
    b.loop(y, tau, K);
    b.cert.decomposition.cases[y] = targets.empty() ? "loop_only" : "single_delay";
  }
  b.place_unmatched_targets();
  return b.finish(Theorem::thm1);
}

StabilityCertificate check_thm3(const DelayedNetwork& source, const ConjugacyWitness& witness) {
  Builder b(source, witness);
  // Source products may mix species; reactants and all target complexes may not.
  for (const auto& y : reactants_of(source)) {
    if (!single_species(y)) {
      b.reject("reactant complex " + label(source, y) + " is not a multiple of a single species");
    }
  }
  for (const auto& y : complexes(witness.target)) {
    if (!single_species(y)) {
      b.reject("target complex " + label(source, y) + " is not a multiple of a single species");
    }
  }
  if (b.rejected() || !b.gate(false)) {
    return b.finish(Theorem::none);
  }
  const auto& L = witness.L;
  for (const auto& [y, ks] : b.agg.k_sum) {
    const std::size_t j1 = *single_species(y);
    const Rational c = y[j1];
    const RationalVector& Y = b.agg.Y.at(y);
    const auto delays = b.agg.delays_of(y);
    const auto targets = targets_from(witness.target, y);

    if (targets.empty()) {
      // Every delayed copy is a loop y -> y.
      for (const auto& tau : delays) {
        const RationalVector& Yt = b.agg.Y_tau.at({y, tau});
        for (std::size_t j = 0; j < Yt.size(); ++j) {
          if (j != j1 && Yt[j] != 0) {
            b.reject("conjugacy defect: " + label(source, y) + " produces other species without a target");
          }
        }
        b.loop(y, tau, Yt[j1] / c);
      }
      b.cert.decomposition.cases[y] = "case_IV";
      continue;
    }

    Rational self_production = 0;  // sum over self-producing targets of k_bar l_j1 y~'_j1
    Rational outflow = 0;
    for (auto i : targets) {
      const auto& prod = witness.target.reactions[i].product;
      self_production += b.kbar[i] * L[j1] * prod[j1];
      outflow += b.kbar[i] * L[j1];
    }
    const Rational K = ks - outflow;
    std::string case_label;
    if (K >= 0) {
      case_label = self_production == 0 ? "case_I" : "case_II";
    } else {
      case_label = Y[j1] == 0 ? "case_II" : "case_III";
    }
    b.cert.decomposition.cases[y] = case_label;

    std::map<Rational, Rational> delta_j1;
    for (const auto& tau : delays) {
      const RationalVector& Yt = b.agg.Y_tau.at({y, tau});
      std::map<std::size_t, Rational> delta;
      for (std::size_t j = 0; j < Yt.size(); ++j) {
        if (j == j1 && K < 0) {
          delta[j] = Yt[j] / self_production;
        } else if (Y[j] != 0) {
          delta[j] = Yt[j] / Y[j];
        }
        if (delta.count(j)) {
          b.cert.decomposition.deltas.push_back({y, tau, j, delta[j]});
        }
      }
      delta_j1[tau] = delta.count(j1) ? delta[j1] : Rational(0);
      for (auto i : targets) {
        const auto j2 = *single_species(witness.target.reactions[i].product);
        if (!delta.count(j2)) {
          b.reject("conjugacy defect: target produces species " + source.species[j2] + " absent from Y^(y) of " +
                   label(source, y));
          continue;
        }
        b.quasi(i, y, tau, delta[j2] * b.kbar[i]);
      }
      if (K > 0) {
        b.loop(y, tau, delta_j1[tau] * K);
      }
    }
    if (K < 0) {
      Rational used = 0;
      for (const auto& [tau, d] : delta_j1) {
        used += d;
      }
      for (auto i : targets) {
        if (witness.target.reactions[i].product[j1] != 0) {
          b.quasi(i, y, 0, (1 - used) * b.kbar[i]);
        }
      }
    }
  }
  b.place_unmatched_targets();
  return b.finish(Theorem::thm3);
}

StabilityCertificate check_cor1(const DelayedNetwork& source, const ConjugacyWitness& witness) {
  Builder b(source, witness);
  if (!b.gate(true)) {
    return b.finish(Theorem::none);
  }
  const HfReport hf = check_hf(source, witness.target);
  for (const auto& e : hf.entries) {
    if (!e.ok) {
      b.reject("HF property fails at " + label(source, e.y, e.delay));
    }
  }
  if (b.rejected()) {
    return b.finish(Theorem::none);
  }
  const bool wr0 = is_wr_deficiency_zero(witness.target);
  const std::size_t n = source.n();

  for (const auto& [y, ks] : b.agg.k_sum) {
    const auto targets = targets_from(witness.target, y);
    RationalMatrix generators;
    for (auto i : targets) {
      generators.push_back(reaction_vector(witness.target.reactions[i]));
    }
    const bool independent = rank(generators, n) == generators.size();
    RationalMatrix A(n, RationalVector(targets.size(), Rational(0)));
    for (std::size_t k = 0; k < targets.size(); ++k) {
      for (std::size_t j = 0; j < n; ++j) {
        A[j][k] = generators[k][j];
      }
    }
    const RationalVector no_objective(targets.size(), Rational(0));
    const auto cone = [&](const RationalVector& z) -> std::optional<RationalVector> {
      if (targets.empty()) {
        return is_zero(z) ? std::optional<RationalVector>(RationalVector{}) : std::nullopt;
      }
      const LpResult lp = solve_lp(A, z, no_objective);
      if (lp.status != LpResult::Status::optimal) {
        return std::nullopt;
      }
      return lp.x;
    };

    std::vector<Rational> e_total(targets.size(), Rational(0));
    for (const auto& tau : b.agg.delays_of(y)) {
      // Reaction-by-reaction attribution when every source vector is in the
      // cone on its own; otherwise split the (y, tau) aggregate.
      std::vector<std::pair<std::size_t, RationalVector>> per_source;
      bool attributable = true;
      for (std::size_t i = 0; i < source.r() && attributable; ++i) {
        const auto& rx = source.reactions[i];
        if (rx.reactant != y || rx.delay != tau) {
          continue;
        }
        RationalVector z = reaction_vector(rx);
        for (auto& q : z) {
          q *= rx.rate;
        }
        if (auto e = cone(z)) {
          per_source.emplace_back(i, std::move(*e));
        } else {
          attributable = false;
        }
      }
      Rational used = 0;
      if (attributable) {
        for (const auto& [i, e] : per_source) {
          for (std::size_t k = 0; k < targets.size(); ++k) {
            b.quasi(targets[k], y, tau, e[k], i);
            e_total[k] += e[k];
            used += e[k];
          }
        }
      } else {
        const auto e = cone(b.agg.Z_tau.at({y, tau}));
        if (!e) {
          b.reject("cone membership infeasible at " + label(source, y, tau));
          continue;
        }
        for (std::size_t k = 0; k < targets.size(); ++k) {
          b.quasi(targets[k], y, tau, (*e)[k]);
          e_total[k] += (*e)[k];
          used += (*e)[k];
        }
      }
      const Rational K = b.agg.k_sum_tau.at({y, tau}) - used;
      if (K < 0) {
        b.reject("K^(y,tau) < 0 at " + label(source, y, tau));
      }
      b.loop(y, tau, K);
    }
    for (std::size_t k = 0; k < targets.size(); ++k) {
      if (e_total[k] != witness.target.reactions[targets[k]].rate) {
        b.reject(std::string("rate split not conserved for target reaction ") + std::to_string(targets[k]) +
                 (independent ? "" : " (target reaction vectors are dependent)"));
      }
    }
    b.cert.decomposition.cases[y] = independent ? "independent" : "dependent";
  }
  b.place_unmatched_targets();
  return b.finish(wr0 ? Theorem::cor1_case2 : Theorem::cor1_case1);
}

StabilityCertificate check_thm2(const DelayedNetwork& source, const ConjugacyWitness& witness) {
  Builder b(source, witness);
  if (!b.gate(true)) {
    return b.finish(Theorem::none);
  }
  const HfReport hf = check_hf(source, witness.target);
  for (const auto& e : hf.entries) {
    if (!e.ok) {
      b.reject("HF property fails at " + label(source, e.y, e.delay));
    }
  }
  if (b.rejected()) {
    return b.finish(Theorem::none);
  }
  const std::size_t n = source.n();
  std::vector<Rational> target_rates;
  for (const auto& rx : witness.target.reactions) {
    target_rates.push_back(rx.rate);
  }
  DelayedNetwork modified = witness.target;
  bool used_case2 = false;
  bool used_modified = false;

  for (const auto& [y, ks] : b.agg.k_sum) {
    const auto targets = targets_from(witness.target, y);
    std::vector<RationalVector> vectors;
    std::vector<std::size_t> source_idx;
    for (std::size_t i = 0; i < source.r(); ++i) {
      if (source.reactions[i].reactant == y) {
        vectors.push_back(reaction_vector(source.reactions[i]));
        source_idx.push_back(i);
      }
    }
    for (auto i : targets) {
      vectors.push_back(reaction_vector(witness.target.reactions[i]));
    }
    const OneDimFrame frame = one_dim_frame(vectors, n);
    if (frame.kind == OneDimFrame::Kind::higher) {
      b.reject("reaction vectors of " + label(source, y) + " do not span a 1-dimensional subspace");
      continue;
    }
    std::map<Rational, Rational> zs;
    for (std::size_t k = 0; k < source_idx.size(); ++k) {
      const auto& rx = source.reactions[source_idx[k]];
      zs[rx.delay] += rx.rate * frame.a[k];
    }
    std::map<std::size_t, Rational> a_target;
    for (std::size_t k = 0; k < targets.size(); ++k) {
      a_target[targets[k]] = frame.a[source_idx.size() + k];
    }
    Rational Z = 0;
    for (const auto& [tau, z] : zs) {
      Z += z;
    }
    const bool same_sign = std::all_of(zs.begin(), zs.end(), [&](const auto& kv) {
      return kv.second == 0 || (Z > 0 && kv.second > 0) || (Z < 0 && kv.second < 0);
    });

    if (same_sign) {
      b.cert.decomposition.cases[y] = "case_I";
      for (const auto& [tau, z] : zs) {
        Rational used = 0;
        if (Z != 0) {
          const Rational delta = z / Z;
          for (auto i : targets) {
            b.quasi(i, y, tau, delta * b.kbar[i]);
            used += delta * witness.target.reactions[i].rate;
          }
        }
        const Rational K = b.agg.k_sum_tau.at({y, tau}) - used;
        if (K < 0) {
          b.reject("K^(y,tau) < 0 at " + label(source, y, tau));
        }
        b.loop(y, tau, K);
      }
      if (Z == 0) {
        for (auto i : targets) {
          b.quasi(i, y, 0, b.kbar[i]);
        }
      }
      continue;
    }

    used_case2 = true;
    b.cert.decomposition.cases[y] = "case_II";
    SignSplit split;
    try {
      split = split_sign_coefficients(zs, a_target, target_rates);
    } catch (const std::domain_error& err) {
      b.reject(std::string(err.what()) + " for " + label(source, y) + "; mixed-sign Z^(y,tau) cannot be split");
      continue;
    }
    std::map<std::size_t, Rational> c_total;
    for (const auto& [tau, z] : zs) {
      Rational used = 0;
      for (const auto& [key, cval] : split.c) {
        if (key.first == tau) {
          b.quasi_target_rate(key.second, y, tau, cval);
          used += cval;
          c_total[key.second] += cval;
        }
      }
      const Rational K = b.agg.k_sum_tau.at({y, tau}) - used;
      if (K < 0) {
        b.reject("K_+-^(y,tau) < 0 at " + label(source, y, tau));
      }
      b.loop(y, tau, K);
    }
    bool remainder_nonnegative = true;
    for (const auto& [i, a] : a_target) {
      if (a != 0 && target_rates[i] - c_total[i] < 0) {
        remainder_nonnegative = false;
      }
    }
    for (const auto& [i, a] : a_target) {
      if (a == 0) {
        b.quasi(i, y, 0, b.kbar[i]);
      } else if (remainder_nonnegative) {
        b.quasi_target_rate(i, y, 0, target_rates[i] - c_total[i]);
      } else {
        modified.reactions[i].rate = c_total[i];
        used_modified = true;
      }
    }
    if (!remainder_nonnegative) {
      b.cert.decomposition.cases[y] = "case_II_modified";
    }
  }

  if (used_modified && !b.rejected()) {
    const auto xbar = complex_balanced_equilibrium(witness.target);
    if (!xbar || complex_balance_defect(modified, *xbar) > 1e-9) {
      b.reject("rescaled target is not complex balanced at the target's equilibrium");
    } else {
      b.cert.notes.push_back("sign split uses a rescaled target sharing the target's equilibria");
      b.cert.decomposition.quasi_target = modified;
    }
  }
  b.place_unmatched_targets();
  return b.finish(used_case2 ? Theorem::thm2_case2 : Theorem::thm2_case1);
}

StabilityCertificate classify(const DelayedNetwork& source, const std::optional<ConjugacyWitness>& witness) {
  const ConjugacyWitness w = witness ? *witness : identity_witness(source);
  StabilityCertificate last;
  std::vector<std::string> all_rejections;
  using Check = StabilityCertificate (*)(const DelayedNetwork&, const ConjugacyWitness&);
  const std::pair<const char*, Check> routes[] = {
      {"lcdcbmas", &check_lcdcbmas}, {"thm1", &check_thm1}, {"thm3", &check_thm3},
      {"cor1", &check_cor1},         {"thm2", &check_thm2},
  };
  for (const auto& [name, check] : routes) {
    StabilityCertificate cert = check(source, w);
    if (cert.accepted()) {
      for (const auto& r : all_rejections) {
        cert.notes.push_back("earlier route rejected: " + r);
      }
      return cert;
    }
    for (const auto& r : cert.rejections) {
      all_rejections.push_back(std::string(name) + ": " + r);
    }
    last = std::move(cert);
  }
  last.theorem = Theorem::none;
  last.rejections = all_rejections;
  return last;
}

State reconstruct_rhs(const StabilityCertificate& cert, const State& x_now, const std::map<double, State>& x_delayed) {
  const auto& dec = cert.decomposition;
  const std::vector<double> L = to_double(dec.L);
  const auto lagged = [&](const Rational& tau) -> const State& {
    const double t = to_double(tau);
    if (t == 0.0) {
      return x_now;
    }
    return x_delayed.at(t);
  };
  State out(x_now.size(), 0.0);
  for (const auto& q : dec.quasi_rates) {
    const auto& rx = dec.quasi_target.reactions[q.target];
    const double kb = to_double(q.kbar);
    const double produced = kb * monomial(lagged(q.delay), q.reactant);
    const double consumed = kb * monomial(x_now, q.reactant);
    for (std::size_t j = 0; j < out.size(); ++j) {
      out[j] += L[j] * (produced * rx.product[j] - consumed * q.reactant[j]);
    }
  }
  for (const auto& lt : dec.loop_terms) {
    const double K = to_double(lt.K);
    const double diff = monomial(lagged(lt.delay), lt.y) - monomial(x_now, lt.y);
    for (std::size_t j = 0; j < out.size(); ++j) {
      out[j] += K * diff * lt.y[j];
    }
  }
  return out;
}

std::vector<std::string> decomposition_mismatches(const StabilityCertificate& cert, const DelayedNetwork& source) {
  // key: (monomial, delay) with delay -1 meaning the current state
  using Key = std::pair<Complex, Rational>;
  std::map<Key, RationalVector> balance;
  const std::size_t n = source.n();
  const auto add = [&](const Complex& y, const Rational& tau, const Rational& factor, const RationalVector& v) {
    const Key key{y, tau > 0 ? tau : Rational(-1)};
    auto& acc = balance.try_emplace(key, RationalVector(n, Rational(0))).first->second;
    for (std::size_t j = 0; j < n; ++j) {
      acc[j] += factor * v[j];
    }
  };
  const auto& dec = cert.decomposition;
  for (const auto& rx : source.reactions) {
    add(rx.reactant, rx.delay, rx.rate, to_rational(rx.product));
    add(rx.reactant, 0, -rx.rate, to_rational(rx.reactant));
  }
  for (const auto& q : dec.quasi_rates) {
    const auto& rx = dec.quasi_target.reactions[q.target];
    RationalVector produced = to_rational(rx.product);
    RationalVector consumed = to_rational(q.reactant);
    for (std::size_t j = 0; j < n; ++j) {
      produced[j] *= dec.L[j];
      consumed[j] *= dec.L[j];
    }
    add(q.reactant, q.delay, -q.kbar, produced);
    add(q.reactant, 0, q.kbar, consumed);
  }
  for (const auto& lt : dec.loop_terms) {
    add(lt.y, lt.delay, -lt.K, to_rational(lt.y));
    add(lt.y, 0, lt.K, to_rational(lt.y));
  }
  std::vector<std::string> out;
  for (const auto& [key, v] : balance) {
    if (!is_zero(v)) {
      out.push_back("x^(" + format_complex(source.species, key.first) + ")" +
                    (key.second < 0 ? std::string(" at t") : " at t-" + format_rational(key.second)));
    }
  }
  return out;
}

std::vector<Rational> rate_split_defects(const StabilityCertificate& cert) {
  const auto& target = cert.decomposition.quasi_target;
  std::vector<Rational> out;
  for (const auto& rx : target.reactions) {
    out.push_back(-rx.rate);
  }
  for (const auto& q : cert.decomposition.quasi_rates) {
    out[q.target] += q.rate;
  }
  return out;
}

}  // namespace delaynet
