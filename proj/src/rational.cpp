#include "delaynet/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace delaynet {

namespace {

using boost::multiprecision::cpp_int;

cpp_int pow10(unsigned exponent) {
  cpp_int result = 1;
  for (unsigned i = 0; i < exponent; ++i) {
    result *= 10;
  }
  return result;
}

Rational parse_decimal(std::string_view text) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    negative = text[pos] == '-';
    ++pos;
  }
  cpp_int mantissa = 0;
  int scale = 0;
  bool any_digit = false;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
    mantissa = mantissa * 10 + (text[pos] - '0');
    any_digit = true;
    ++pos;
  }
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      mantissa = mantissa * 10 + (text[pos] - '0');
      --scale;
      any_digit = true;
      ++pos;
    }
  }
  if (!any_digit) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    bool exp_negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      exp_negative = text[pos] == '-';
      ++pos;
    }
    int exponent = 0;
    bool exp_digit = false;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      exponent = exponent * 10 + (text[pos] - '0');
      if (exponent > 4000) {
        throw std::invalid_argument("exponent out of range: '" + std::string(text) + "'");
      }
      exp_digit = true;
      ++pos;
    }
    if (!exp_digit) {
      throw std::invalid_argument("malformed exponent: '" + std::string(text) + "'");
    }
    scale += exp_negative ? -exponent : exponent;
  }
  if (pos != text.size()) {
    throw std::invalid_argument("trailing characters in number: '" + std::string(text) + "'");
  }
  Rational value = scale >= 0 ? Rational(mantissa * pow10(static_cast<unsigned>(scale)))
                              : Rational(mantissa, pow10(static_cast<unsigned>(-scale)));
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    return parse_decimal(text);
  }
  const Rational num = parse_decimal(text.substr(0, slash));
  const Rational den = parse_decimal(text.substr(slash + 1));
  if (den == 0) {
    throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
  }
  return num / den;
}

std::string format_rational(const Rational& q) {
  const cpp_int num = boost::multiprecision::numerator(q);
  const cpp_int den = boost::multiprecision::denominator(q);
  if (den == 1) {
    return num.str();
  }
  // Terminating decimal iff the reduced denominator is 2^a 5^b.
  cpp_int rest = den;
  unsigned twos = 0;
  unsigned fives = 0;
  while (rest % 2 == 0) {
    rest /= 2;
    ++twos;
  }
  while (rest % 5 == 0) {
    rest /= 5;
    ++fives;
  }
  if (rest != 1) {
    return num.str() + "/" + den.str();
  }
  const unsigned digits = std::max(twos, fives);
  const cpp_int scaled = num * pow10(digits) / den;
  const bool negative = scaled < 0;
  std::string body = (negative ? cpp_int(-scaled) : scaled).str();
  if (body.size() <= digits) {
    body.insert(0, digits - body.size() + 1, '0');
  }
  body.insert(body.size() - digits, ".");
  return negative ? "-" + body : body;
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

std::vector<double> to_double(const RationalVector& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& q : v) {
    out.push_back(to_double(q));
  }
  return out;
}

Rational from_double(double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("cannot convert non-finite value to rational");
  }
  int exponent = 0;
  const double mantissa = std::frexp(value, &exponent);
  // 2^53 * mantissa is an integer for IEEE doubles.
  const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  Rational result(scaled);
  exponent -= 53;
  const cpp_int two_pow = cpp_int(1) << std::abs(exponent);
  return exponent >= 0 ? Rational(result * two_pow) : Rational(result / two_pow);
}

Rational norm1(const RationalVector& v) {
  Rational total = 0;
  for (const auto& q : v) {
    total += abs(q);
  }
  return total;
}

Rational dot(const RationalVector& a, const RationalVector& b) {
  Rational total = 0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    total += a[i] * b[i];
  }
  return total;
}

bool is_zero(const RationalVector& v) {
  for (const auto& q : v) {
    if (q != 0) {
      return false;
    }
  }
  return true;
}

}  // namespace delaynet
