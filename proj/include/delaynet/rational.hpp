#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace delaynet {

/// Exact rational scalar used for every structural computation
/// (ranks, bases, rate splits). Floating point only enters at simulation.
using Rational = boost::multiprecision::cpp_rational;
using RationalVector = std::vector<Rational>;

/// Parses a decimal literal ("0.5", "-1.25e-3", "7") or a fraction ("2/3")
/// exactly. Throws std::invalid_argument on anything else.
Rational parse_rational(std::string_view text);

/// Shortest exact textual form: a terminating decimal when one exists,
/// otherwise "p/q". parse_rational(format_rational(q)) == q.
std::string format_rational(const Rational& q);

double to_double(const Rational& q);
std::vector<double> to_double(const RationalVector& v);

/// Exact conversion of a finite double (every finite double is dyadic).
Rational from_double(double value);

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

Rational norm1(const RationalVector& v);
Rational dot(const RationalVector& a, const RationalVector& b);
bool is_zero(const RationalVector& v);

}  // namespace delaynet
