#pragma once

#include "delaynet/rational.hpp"

#include <optional>
#include <vector>

namespace delaynet {

/// Row-major dense rational matrix. Small sizes only (n, r < 100).
using RationalMatrix = std::vector<RationalVector>;

struct Echelon {
  RationalMatrix rows;            // nonzero rows of the reduced row echelon form
  std::vector<std::size_t> pivots;  // pivot column per row
};

/// Reduced row echelon form of the given row list (exact).
Echelon rref(RationalMatrix rows, std::size_t cols);

std::size_t rank(const RationalMatrix& rows, std::size_t cols);

/// Basis of span(rows), taken from the RREF rows.
RationalMatrix row_space_basis(const RationalMatrix& rows, std::size_t cols);

/// Basis of {x : <row, x> = 0 for all rows}, i.e. the orthogonal complement
/// of span(rows). Vectors are scaled to integer entries.
RationalMatrix orthogonal_complement(const RationalMatrix& rows, std::size_t cols);

/// Coefficients c with sum_i c_i * generators[i] = target, or nullopt.
/// When generators are dependent, free coefficients are set to zero.
std::optional<RationalVector> solve_combination(const RationalMatrix& generators,
                                                const RationalVector& target);

bool in_span(const RationalMatrix& generators, const RationalVector& target);

/// Scales a vector by the lcm of denominators and gcd of numerators so the
/// entries become coprime integers; the first nonzero entry stays positive
/// unless keep_sign is set.
RationalVector primitive(const RationalVector& v, bool keep_sign = false);

}  // namespace delaynet
