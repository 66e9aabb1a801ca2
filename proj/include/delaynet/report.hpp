#pragma once

#include "delaynet/classifier.hpp"
#include "delaynet/conjugacy.hpp"
#include "delaynet/invariants.hpp"
#include "delaynet/lyapunov.hpp"
#include "delaynet/structure.hpp"

#include "json.hpp"

namespace delaynet {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "delaynet/1";

/// Exact rationals are written as strings ("1/3", "0.5"); doubles as numbers.
Json rational_json(const Rational& q);
Json rational_vector_json(const RationalVector& v);
Json matrix_json(const RationalMatrix& m);

Json to_json(const DelayedNetwork& net);
Json to_json(const StructureReport& report, const DelayedNetwork& net);
Json to_json(const ConjugacyReport& report, const DelayedNetwork& net);
Json to_json(const HfReport& report, const DelayedNetwork& net);
Json to_json(const StabilityCertificate& cert, const DelayedNetwork& net);
Json to_json(const LyapunovFunctional& V, const DelayedNetwork& net);
Json to_json(const InvariantSetSpec& spec, const DelayedNetwork& net);
Json to_json(const EquilibriumResult& eq);

}  // namespace delaynet
