#include "delaynet/report.hpp"

#include <cmath>

namespace delaynet {

namespace {

Json number(double v) {
  if (!std::isfinite(v)) {
    return nullptr;
  }
  return v;
}

Json reaction_json(const Reaction& rx, const DelayedNetwork& net) {
  return Json{{"reactant", format_complex(net.species, rx.reactant)},
              {"product", format_complex(net.species, rx.product)},
              {"k", rational_json(rx.rate)},
              {"tau", rational_json(rx.delay)}};
}

std::string conjugacy_kind(ConjugacyReport::Kind kind) {
  switch (kind) {
    case ConjugacyReport::Kind::dynamically_equivalent: return "dynamically_equivalent";
    case ConjugacyReport::Kind::linearly_conjugate: return "linearly_conjugate";
    case ConjugacyReport::Kind::neither: return "neither";
  }
  return "neither";
}

}  // namespace

Json rational_json(const Rational& q) { return format_rational(q); }

Json rational_vector_json(const RationalVector& v) {
  Json out = Json::array();
  for (const auto& q : v) {
    out.push_back(rational_json(q));
  }
  return out;
}

Json matrix_json(const RationalMatrix& m) {
  Json out = Json::array();
  for (const auto& row : m) {
    out.push_back(rational_vector_json(row));
  }
  return out;
}

Json to_json(const DelayedNetwork& net) {
  Json reactions = Json::array();
  for (const auto& rx : net.reactions) {
    reactions.push_back(reaction_json(rx, net));
  }
  return Json{{"species", net.species}, {"reactions", reactions}};
}

Json to_json(const StructureReport& report, const DelayedNetwork& net) {
  Json cx = Json::array();
  for (const auto& y : report.complexes) {
    cx.push_back(format_complex(net.species, y));
  }
  return Json{{"complexes", cx},
              {"linkage_classes", report.linkage_class_count},
              {"weakly_reversible", report.weakly_reversible},
              {"deficiency", report.deficiency},
              {"stoichiometric_basis", matrix_json(report.stoich_basis)},
              {"orthogonal_basis", matrix_json(report.orth_basis)},
              {"kinetic_basis", matrix_json(report.kinetic_basis)}};
}

Json to_json(const ConjugacyReport& report, const DelayedNetwork& net) {
  Json residuals = Json::object();
  for (const auto& [y, v] : report.residuals) {
    residuals[format_complex(net.species, y)] = rational_vector_json(v);
  }
  return Json{{"kind", conjugacy_kind(report.kind)},
              {"residual_max", number(report.residual_max)},
              {"kbar", rational_vector_json(report.kbar)},
              {"residuals", residuals}};
}

Json to_json(const HfReport& report, const DelayedNetwork& net) {
  Json entries = Json::array();
  for (const auto& e : report.entries) {
    entries.push_back(Json{{"y", format_complex(net.species, e.y)},
                           {"tau", rational_json(e.delay)},
                           {"vbar", rational_vector_json(e.vbar)},
                           {"norm1", rational_json(e.norm)},
                           {"min_target_norm1", e.min_target_norm ? rational_json(*e.min_target_norm) : Json(nullptr)},
                           {"ok", e.ok}});
  }
  return Json{{"holds", report.holds}, {"entries", entries}};
}

Json to_json(const StabilityCertificate& cert, const DelayedNetwork& net) {
  const auto& dec = cert.decomposition;
  Json quasi = Json::array();
  for (const auto& q : dec.quasi_rates) {
    Json entry{{"target_reaction", q.target},
               {"reactant", format_complex(net.species, q.reactant)},
               {"tau", rational_json(q.delay)},
               {"k", rational_json(q.rate)},
               {"kbar", rational_json(q.kbar)}};
    if (q.source) {
      entry["source_reaction"] = *q.source;
    }
    quasi.push_back(entry);
  }
  Json loops = Json::array();
  for (const auto& lt : dec.loop_terms) {
    loops.push_back(
        Json{{"y", format_complex(net.species, lt.y)}, {"tau", rational_json(lt.delay)}, {"K", rational_json(lt.K)}});
  }
  Json deltas = Json::array();
  for (const auto& d : dec.deltas) {
    deltas.push_back(Json{{"y", format_complex(net.species, d.y)},
                          {"tau", rational_json(d.delay)},
                          {"species", net.species[d.species]},
                          {"delta", rational_json(d.delta)}});
  }
  Json cases = Json::object();
  for (const auto& [y, c] : dec.cases) {
    cases[format_complex(net.species, y)] = c;
  }
  Json out{{"theorem", theorem_name(cert.theorem)},
           {"L", rational_vector_json(dec.L.empty() ? cert.witness.L : dec.L)},
           {"target", to_json(cert.witness.target)}};
  if (cert.accepted()) {
    out["decomposition"] = Json{{"quasi_rates", quasi}, {"loop_terms", loops}, {"deltas", deltas}, {"cases", cases}};
    if (!(dec.quasi_target == cert.witness.target)) {
      out["decomposition"]["quasi_target"] = to_json(dec.quasi_target);
    }
  }
  out["notes"] = cert.notes;
  out["rejections"] = cert.rejections;
  return out;
}

Json to_json(const LyapunovFunctional& V, const DelayedNetwork& net) {
  Json points = Json::array();
  for (const auto& p : V.point_terms) {
    points.push_back(Json{{"species", net.species[p.species]}, {"weight", p.weight}, {"center", p.center}});
  }
  Json integrals = Json::array();
  for (const auto& term : V.integral_terms) {
    integrals.push_back(Json{{"y", format_complex(net.species, term.y)},
                             {"tau", term.delay},
                             {"weight", term.weight},
                             {"center", term.center},
                             {"origin", term.origin}});
  }
  return Json{{"xbar", V.xbar}, {"point_terms", points}, {"integral_terms", integrals}};
}

Json to_json(const InvariantSetSpec& spec, const DelayedNetwork& net) {
  Json out{{"kind", invariant_kind_name(spec.kind)}, {"basis", matrix_json(spec.basis)}, {"levels", spec.levels}};
  if (spec.delta) {
    Json delta = Json::array();
    for (const auto& [key, d] : spec.delta->delta) {
      delta.push_back(Json{{"species", net.species[key.first]}, {"reaction", key.second}, {"delta", rational_json(d)}});
    }
    Json lbar = Json::object();
    for (const auto& [y, v] : spec.delta->lbar) {
      lbar[format_complex(net.species, y)] = rational_vector_json(v);
    }
    out["delta"] = delta;
    out["lbar"] = lbar;
  }
  return out;
}

Json to_json(const EquilibriumResult& eq) {
  return Json{{"x", eq.x},
              {"coefficients", eq.coefficients},
              {"residual", number(eq.residual)},
              {"iterations", eq.iterations},
              {"converged", eq.converged}};
}

}  // namespace delaynet
