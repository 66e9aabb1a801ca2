#include "delaynet/linalg.hpp"

#include <boost/integer/common_factor.hpp>

namespace delaynet {

using boost::multiprecision::cpp_int;

Echelon rref(RationalMatrix rows, std::size_t cols) {
  Echelon out;
  std::size_t lead = 0;
  for (std::size_t col = 0; col < cols && lead < rows.size(); ++col) {
    std::size_t pivot = lead;
    while (pivot < rows.size() && rows[pivot][col] == 0) {
      ++pivot;
    }
    if (pivot == rows.size()) {
      continue;
    }
    std::swap(rows[lead], rows[pivot]);
    const Rational inv = 1 / rows[lead][col];
    for (auto& entry : rows[lead]) {
      entry *= inv;
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == lead || rows[r][col] == 0) {
        continue;
      }
      const Rational factor = rows[r][col];
      for (std::size_t c = col; c < cols; ++c) {
        rows[r][c] -= factor * rows[lead][c];
      }
    }
    out.pivots.push_back(col);
    ++lead;
  }
  rows.resize(lead);
  out.rows = std::move(rows);
  return out;
}

std::size_t rank(const RationalMatrix& rows, std::size_t cols) {
  return rref(rows, cols).rows.size();
}

RationalMatrix row_space_basis(const RationalMatrix& rows, std::size_t cols) {
  RationalMatrix basis;
  for (const auto& row : rref(rows, cols).rows) {
    basis.push_back(primitive(row));
  }
  return basis;
}

RationalMatrix orthogonal_complement(const RationalMatrix& rows, std::size_t cols) {
  const Echelon e = rref(rows, cols);
  std::vector<bool> is_pivot(cols, false);
  for (auto p : e.pivots) {
    is_pivot[p] = true;
  }
  RationalMatrix basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) {
      continue;
    }
    RationalVector v(cols, Rational(0));
    v[free] = 1;
    for (std::size_t r = 0; r < e.rows.size(); ++r) {
      v[e.pivots[r]] = -e.rows[r][free];
    }
    basis.push_back(primitive(v));
  }
  return basis;
}

std::optional<RationalVector> solve_combination(const RationalMatrix& generators,
                                                const RationalVector& target) {
  const std::size_t m = generators.size();
  const std::size_t n = target.size();
  // Augmented system: columns are generators, rows are coordinates.
  RationalMatrix aug(n, RationalVector(m + 1, Rational(0)));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      aug[j][i] = generators[i][j];
    }
    aug[j][m] = target[j];
  }
  const Echelon e = rref(std::move(aug), m + 1);
  RationalVector coeffs(m, Rational(0));
  for (std::size_t r = 0; r < e.rows.size(); ++r) {
    if (e.pivots[r] == m) {
      return std::nullopt;
    }
    coeffs[e.pivots[r]] = e.rows[r][m];
  }
  return coeffs;
}

bool in_span(const RationalMatrix& generators, const RationalVector& target) {
  return solve_combination(generators, target).has_value();
}

RationalVector primitive(const RationalVector& v, bool keep_sign) {
  cpp_int lcm_den = 1;
  for (const auto& q : v) {
    if (q != 0) {
      lcm_den = boost::integer::lcm(lcm_den, boost::multiprecision::denominator(q));
    }
  }
  cpp_int gcd_num = 0;
  for (const auto& q : v) {
    if (q != 0) {
      const cpp_int scaled = boost::multiprecision::numerator(q) * (lcm_den / boost::multiprecision::denominator(q));
      gcd_num = boost::integer::gcd(gcd_num, scaled < 0 ? cpp_int(-scaled) : scaled);
    }
  }
  if (gcd_num == 0) {
    return v;
  }
  Rational factor(lcm_den, gcd_num);
  if (!keep_sign) {
    for (const auto& q : v) {
      if (q != 0) {
        if (q < 0) {
          factor = -factor;
        }
        break;
      }
    }
  }
  RationalVector out;
  out.reserve(v.size());
  for (const auto& q : v) {
    out.push_back(q * factor);
  }
  return out;
}

}  // namespace delaynet
