#pragma once

#include "delaynet/rational.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace delaynet {

/// Stoichiometric coefficients in species declaration order. The empty
/// complex is the all-zero vector.
using Complex = std::vector<int>;

struct Reaction {
  Complex reactant;
  Complex product;
  Rational rate;
  Rational delay;

  double rate_d() const { return to_double(rate); }
  double delay_d() const { return to_double(delay); }
  bool operator==(const Reaction&) const = default;
};

struct DelayedNetwork {
  std::vector<std::string> species;
  std::vector<Reaction> reactions;

  std::size_t n() const { return species.size(); }
  std::size_t r() const { return reactions.size(); }
  std::optional<std::size_t> species_index(std::string_view name) const;
  bool operator==(const DelayedNetwork&) const = default;
};

/// Target network (rates k~, delays ignored) plus the diagonal of L.
struct ConjugacyWitness {
  DelayedNetwork target;
  RationalVector L;

  bool is_identity() const;
};

class ParseError : public std::runtime_error {
 public:
  enum class Kind { syntax, unknown_species, duplicate_species, nonpositive_rate, negative_delay };

  ParseError(Kind kind, std::size_t line, std::size_t column, const std::string& message);

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  Kind kind_;
  std::size_t line_;
  std::size_t column_;
};

struct Diagnostic {
  std::optional<std::size_t> reaction;
  std::string reason;
};

DelayedNetwork parse_network(std::string_view text);
DelayedNetwork load_network(const std::string& path);
std::string serialize_network(const DelayedNetwork& net);

/// Witness text: optional `L v1 ... vn` line, then `target:` followed by the
/// target network. A target without its own species line inherits the
/// source species.
ConjugacyWitness parse_witness(std::string_view text, const DelayedNetwork& source);
ConjugacyWitness load_witness(const std::string& path, const DelayedNetwork& source);
std::string serialize_witness(const ConjugacyWitness& witness);

/// Identity witness wrapping a target network (dynamic equivalence).
ConjugacyWitness identity_witness(const DelayedNetwork& target);

std::vector<Diagnostic> validate_network(const DelayedNetwork& net);
std::vector<Diagnostic> validate_witness(const ConjugacyWitness& witness,
                                         const DelayedNetwork& source);

DelayedNetwork strip_delays(const DelayedNetwork& net);

/// Reactant complex -> indices of reactions that consume it (in order).
std::map<Complex, std::vector<std::size_t>> reactant_groups(const DelayedNetwork& net);

/// Distinct complexes in order of first appearance (reactant before product).
std::vector<Complex> complexes(const DelayedNetwork& net);

/// Distinct delays, ascending.
std::vector<Rational> distinct_delays(const DelayedNetwork& net);

RationalVector to_rational(const Complex& y);
/// y' - y as a rational vector.
RationalVector reaction_vector(const Reaction& reaction);
Complex zero_complex(std::size_t n);
bool is_zero_complex(const Complex& y);

std::string format_complex(const std::vector<std::string>& species, const Complex& y);
/// Parses a complex against a species list ("2A + B", "0").
Complex parse_complex(std::string_view text, const std::vector<std::string>& species);

}  // namespace delaynet
