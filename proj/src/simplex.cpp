#include "delaynet/simplex.hpp"

#include <stdexcept>

namespace delaynet {

namespace {

struct Tableau {
  RationalMatrix rows;  // each row: N coefficients then the rhs
  std::vector<std::size_t> basis;
  std::size_t cols = 0;

  void pivot(std::size_t r, std::size_t j) {
    const Rational inv = 1 / rows[r][j];
    for (auto& entry : rows[r]) {
      entry *= inv;
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][j] == 0) {
        continue;
      }
      const Rational factor = rows[i][j];
      for (std::size_t c = 0; c <= cols; ++c) {
        rows[i][c] -= factor * rows[r][c];
      }
    }
    basis[r] = j;
  }

  RationalVector reduced_profits(const RationalVector& cost) const {
    RationalVector d = cost;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const Rational& cb = cost[basis[r]];
      if (cb == 0) {
        continue;
      }
      for (std::size_t j = 0; j < cols; ++j) {
        d[j] -= cb * rows[r][j];
      }
    }
    return d;
  }

  // Returns false when unbounded.
  bool optimize(const RationalVector& cost, std::size_t allowed_cols) {
    for (;;) {
      const RationalVector d = reduced_profits(cost);
      std::size_t entering = allowed_cols;
      for (std::size_t j = 0; j < allowed_cols; ++j) {
        if (d[j] > 0) {
          entering = j;
          break;
        }
      }
      if (entering == allowed_cols) {
        return true;
      }
      std::size_t leaving = rows.size();
      Rational best_ratio;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r][entering] <= 0) {
          continue;
        }
        const Rational ratio = rows[r][cols] / rows[r][entering];
        if (leaving == rows.size() || ratio < best_ratio ||
            (ratio == best_ratio && basis[r] < basis[leaving])) {
          leaving = r;
          best_ratio = ratio;
        }
      }
      if (leaving == rows.size()) {
        return false;
      }
      pivot(leaving, entering);
    }
  }
};

}  // namespace

LpResult solve_lp(const RationalMatrix& A, const RationalVector& b, const RationalVector& c) {
  const std::size_t m = A.size();
  const std::size_t n = c.size();
  if (b.size() != m) {
    throw std::invalid_argument("solve_lp: rhs size mismatch");
  }
  for (const auto& row : A) {
    if (row.size() != n) {
      throw std::invalid_argument("solve_lp: row size mismatch");
    }
  }

  Tableau t;
  t.cols = n + m;
  std::vector<int> sign(m, 1);
  t.rows.assign(m, RationalVector(t.cols + 1, Rational(0)));
  t.basis.resize(m);
  for (std::size_t r = 0; r < m; ++r) {
    sign[r] = b[r] < 0 ? -1 : 1;
    for (std::size_t j = 0; j < n; ++j) {
      t.rows[r][j] = sign[r] * A[r][j];
    }
    t.rows[r][n + r] = 1;
    t.rows[r][t.cols] = sign[r] * b[r];
    t.basis[r] = n + r;
  }

  // Phase 1: maximize -sum(artificials).
  RationalVector phase1(t.cols, Rational(0));
  for (std::size_t r = 0; r < m; ++r) {
    phase1[n + r] = -1;
  }
  t.optimize(phase1, t.cols);

  LpResult result;
  Rational infeasibility = 0;
  for (std::size_t r = 0; r < m; ++r) {
    if (t.basis[r] >= n) {
      infeasibility += t.rows[r][t.cols];
    }
  }
  if (infeasibility > 0) {
    result.status = LpResult::Status::infeasible;
    const RationalVector d = t.reduced_profits(phase1);
    result.farkas.resize(m);
    for (std::size_t r = 0; r < m; ++r) {
      // d(artificial r) = -1 - y_r for the sign-adjusted system.
      result.farkas[r] = (-1 - d[n + r]) * sign[r];
    }
    return result;
  }

  // Drive zero-valued artificials out of the basis; drop redundant rows.
  for (std::size_t r = 0; r < t.rows.size();) {
    if (t.basis[r] < n) {
      ++r;
      continue;
    }
    std::size_t j = 0;
    while (j < n && t.rows[r][j] == 0) {
      ++j;
    }
    if (j < n) {
      t.pivot(r, j);
      ++r;
    } else {
      t.rows.erase(t.rows.begin() + static_cast<std::ptrdiff_t>(r));
      t.basis.erase(t.basis.begin() + static_cast<std::ptrdiff_t>(r));
    }
  }

  RationalVector phase2(t.cols, Rational(0));
  for (std::size_t j = 0; j < n; ++j) {
    phase2[j] = c[j];
  }
  if (!t.optimize(phase2, n)) {
    result.status = LpResult::Status::unbounded;
    return result;
  }
  result.status = LpResult::Status::optimal;
  result.x.assign(n, Rational(0));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    result.x[t.basis[r]] = t.rows[r][t.cols];
  }
  result.objective = dot(c, result.x);
  return result;
}

}  // namespace delaynet
