#include "delaynet/conjugacy.hpp"

#include "delaynet/simplex.hpp"
#include "delaynet/threads.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace delaynet {

namespace {

Rational power(const Rational& base, int exponent) {
  Rational result = 1;
  const Rational factor = exponent >= 0 ? base : Rational(1 / base);
  for (int e = 0; e < std::abs(exponent); ++e) {
    result *= factor;
  }
  return result;
}

void require_same_species(const DelayedNetwork& a, const DelayedNetwork& b) {
  if (a.species != b.species) {
    throw std::invalid_argument("source and target species lists differ");
  }
}

double inf_norm(const RationalVector& v) {
  double m = 0.0;
  for (const auto& q : v) {
    m = std::max(m, std::abs(to_double(q)));
  }
  return m;
}

std::set<Complex> reactant_union(const DelayedNetwork& a, const DelayedNetwork& b) {
  std::set<Complex> out;
  for (const auto& rx : a.reactions) {
    out.insert(rx.reactant);
  }
  for (const auto& rx : b.reactions) {
    out.insert(rx.reactant);
  }
  return out;
}

// Lawson-Hanson active set NNLS: min |A x - b|_2 subject to x >= 0.
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const Eigen::Index m = A.cols();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  std::vector<bool> passive(static_cast<std::size_t>(m), false);
  const double tol = 1e-13 * std::max(1.0, A.cwiseAbs().maxCoeff()) * std::max(1.0, b.cwiseAbs().maxCoeff());
  for (int outer = 0; outer < 3 * m + 10; ++outer) {
    const Eigen::VectorXd w = A.transpose() * (b - A * x);
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w(j) > best_w) {
        best_w = w(j);
        best = j;
      }
    }
    if (best < 0) {
      break;
    }
    passive[static_cast<std::size_t>(best)] = true;
    for (int inner = 0; inner < 3 * m + 10; ++inner) {
      std::vector<Eigen::Index> idx;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (passive[static_cast<std::size_t>(j)]) {
          idx.push_back(j);
        }
      }
      Eigen::MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(idx.size()));
      for (std::size_t k = 0; k < idx.size(); ++k) {
        Ap.col(static_cast<Eigen::Index>(k)) = A.col(idx[k]);
      }
      const Eigen::VectorXd zp = Ap.completeOrthogonalDecomposition().solve(b);
      Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
      for (std::size_t k = 0; k < idx.size(); ++k) {
        z(idx[k]) = zp(static_cast<Eigen::Index>(k));
      }
      bool all_positive = true;
      for (auto j : idx) {
        if (z(j) <= 0) {
          all_positive = false;
        }
      }
      if (all_positive) {
        x = z;
        break;
      }
      double alpha = 1.0;
      for (auto j : idx) {
        if (z(j) <= 0) {
          alpha = std::min(alpha, x(j) / (x(j) - z(j)));
        }
      }
      x += alpha * (z - x);
      for (auto j : idx) {
        if (x(j) <= 1e-15) {
          x(j) = 0.0;
          passive[static_cast<std::size_t>(j)] = false;
        }
      }
    }
  }
  return x;
}

struct Group {
  Complex y;
  std::vector<std::size_t> targets;  // target reaction indices with reactant y
  RationalVector Z;                  // source aggregate (zero if absent)
};

std::vector<Group> build_groups(const DelayedNetwork& source, const DelayedNetwork& target) {
  const AggregateTable agg = aggregates(source);
  std::vector<Group> groups;
  for (const auto& y : reactant_union(source, target)) {
    Group g;
    g.y = y;
    for (std::size_t i = 0; i < target.r(); ++i) {
      if (target.reactions[i].reactant == y) {
        g.targets.push_back(i);
      }
    }
    const auto it = agg.Z.find(y);
    g.Z = it != agg.Z.end() ? it->second : RationalVector(source.n(), Rational(0));
    groups.push_back(std::move(g));
  }
  return groups;
}

RationalVector scaled_vector(const RationalVector& v, const RationalVector& L) {
  RationalVector out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    out[j] = L[j] * v[j];
  }
  return out;
}

double search_residual(const std::vector<Group>& groups, const DelayedNetwork& target, const std::vector<double>& L) {
  double total = 0.0;
  for (const auto& g : groups) {
    const Eigen::Index n = static_cast<Eigen::Index>(L.size());
    Eigen::VectorXd b(n);
    double scale = 1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      b(j) = to_double(g.Z[static_cast<std::size_t>(j)]);
      scale = std::max(scale, std::abs(b(j)));
    }
    if (g.targets.empty()) {
      total += b.squaredNorm() / (scale * scale);
      continue;
    }
    Eigen::MatrixXd A(n, static_cast<Eigen::Index>(g.targets.size()));
    for (std::size_t k = 0; k < g.targets.size(); ++k) {
      const RationalVector v = reaction_vector(target.reactions[g.targets[k]]);
      for (Eigen::Index j = 0; j < n; ++j) {
        A(j, static_cast<Eigen::Index>(k)) = L[static_cast<std::size_t>(j)] * to_double(v[static_cast<std::size_t>(j)]);
      }
    }
    const Eigen::VectorXd x = nnls(A, b);
    total += (A * x - b).squaredNorm() / (scale * scale);
  }
  return total;
}

// Best rational approximation with bounded denominator (continued fractions).
Rational rationalize(double value, long max_den) {
  using boost::multiprecision::cpp_int;
  cpp_int p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double x = value;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_d = std::floor(x);
    const cpp_int a = static_cast<long long>(a_d);
    const cpp_int p2 = a * p1 + p0;
    const cpp_int q2 = a * q1 + q0;
    if (q2 > max_den) {
      break;
    }
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double frac = x - a_d;
    if (frac < 1e-14) {
      break;
    }
    x = 1.0 / frac;
  }
  return Rational(p1, q1);
}

ConjugacySearch solve_fixed_L(const DelayedNetwork& source, const DelayedNetwork& target_structure,
                              const RationalVector& L, double eps) {
  ConjugacySearch out;
  out.witness.target = target_structure;
  out.witness.L = L;
  const Rational eps_q = from_double(eps);
  for (const auto& g : build_groups(source, target_structure)) {
    const std::size_t n = source.n();
    const std::size_t m = g.targets.size();
    if (m == 0) {
      if (!is_zero(g.Z)) {
        out.reason = "reactant complex has a nonzero aggregate but no target reaction";
        out.failing_complex = g.y;
        out.farkas = g.Z;
        for (auto& q : out.farkas) {
          q = -q;
        }
        return out;
      }
      continue;
    }
    RationalMatrix A(n, RationalVector(m, Rational(0)));
    std::vector<RationalVector> columns;
    for (std::size_t k = 0; k < m; ++k) {
      columns.push_back(scaled_vector(reaction_vector(target_structure.reactions[g.targets[k]]), L));
      for (std::size_t j = 0; j < n; ++j) {
        A[j][k] = columns[k][j];
      }
    }
    const LpResult plain = solve_lp(A, g.Z, RationalVector(m, Rational(0)));
    if (plain.status == LpResult::Status::infeasible) {
      out.reason = "no nonnegative target rates reproduce the aggregate";
      out.failing_complex = g.y;
      out.farkas = plain.farkas;
      return out;
    }
    // maximize t subject to k_bar = s + t >= t, t + u = cap.
    Rational cap = 1;
    for (const auto& q : g.Z) {
      cap = std::max(cap, Rational(abs(q) + 1));
    }
    RationalMatrix B(n + 1, RationalVector(m + 2, Rational(0)));
    RationalVector rhs(n + 1, Rational(0));
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < m; ++k) {
        B[j][k] = columns[k][j];
        B[j][m] += columns[k][j];
      }
      rhs[j] = g.Z[j];
    }
    B[n][m] = 1;
    B[n][m + 1] = 1;
    rhs[n] = cap;
    RationalVector objective(m + 2, Rational(0));
    objective[m] = 1;
    const LpResult strict = solve_lp(B, rhs, objective);
    if (strict.status != LpResult::Status::optimal || strict.x[m] < eps_q) {
      out.reason = "target rates cannot all be strictly positive";
      out.failing_complex = g.y;
      return out;
    }
    for (std::size_t k = 0; k < m; ++k) {
      const Rational kbar = strict.x[k] + strict.x[m];
      Rational scale = 1;
      for (std::size_t j = 0; j < n; ++j) {
        scale *= power(L[j], g.y[j]);
      }
      out.witness.target.reactions[g.targets[k]].rate = kbar * scale;
    }
  }
  out.feasible = true;
  return out;
}

}  // namespace

std::vector<Rational> scaled_rates(const ConjugacyWitness& witness) {
  std::vector<Rational> out;
  out.reserve(witness.target.r());
  for (const auto& rx : witness.target.reactions) {
    Rational k = rx.rate;
    for (std::size_t j = 0; j < rx.reactant.size(); ++j) {
      k *= power(witness.L[j], -rx.reactant[j]);
    }
    out.push_back(k);
  }
  return out;
}

ConjugacyReport check_linear_conjugacy(const DelayedNetwork& source, const ConjugacyWitness& witness,
                                       const ConjugacyOptions& options) {
  require_same_species(source, witness.target);
  if (witness.L.size() != source.n()) {
    throw std::invalid_argument("L has wrong length");
  }
  for (const auto& l : witness.L) {
    if (l <= 0) {
      throw std::invalid_argument("L entries must be positive");
    }
  }
  ConjugacyReport report;
  report.kbar = scaled_rates(witness);
  const AggregateTable agg = aggregates(source);
  for (const auto& y : reactant_union(source, witness.target)) {
    const auto it = agg.Z.find(y);
    RationalVector residual = it != agg.Z.end() ? it->second : RationalVector(source.n(), Rational(0));
    const double scale = std::max(1.0, inf_norm(residual));
    for (std::size_t i = 0; i < witness.target.r(); ++i) {
      const auto& rx = witness.target.reactions[i];
      if (rx.reactant != y) {
        continue;
      }
      const RationalVector v = reaction_vector(rx);
      for (std::size_t j = 0; j < source.n(); ++j) {
        const Rational lj = options.literal_form ? Rational(1) : witness.L[j];
        residual[j] -= report.kbar[i] * lj * v[j];
      }
    }
    report.residual_max = std::max(report.residual_max, inf_norm(residual) / scale);
    report.residuals.emplace(y, std::move(residual));
  }
  if (report.residual_max <= options.tol) {
    report.kind = witness.is_identity() ? ConjugacyReport::Kind::dynamically_equivalent
                                        : ConjugacyReport::Kind::linearly_conjugate;
  }
  return report;
}

ConjugacyReport check_dynamic_equivalence(const DelayedNetwork& source, const DelayedNetwork& target, double tol) {
  ConjugacyOptions options;
  options.tol = tol;
  return check_linear_conjugacy(source, identity_witness(target), options);
}

double rhs_conjugacy_defect(const DelayedNetwork& source, const ConjugacyWitness& witness,
                            const std::vector<State>& samples) {
  require_same_species(source, witness.target);
  const std::vector<double> L = to_double(witness.L);
  double worst = 0.0;
  for (const auto& x : samples) {
    State z(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      z[j] = x[j] / L[j];
    }
    const State fm = ode_rhs(source, x);
    const State ft = ode_rhs(witness.target, z);
    double scale = 1.0;
    double defect = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      scale = std::max(scale, std::abs(fm[j]));
      defect = std::max(defect, std::abs(fm[j] - L[j] * ft[j]));
    }
    worst = std::max(worst, defect / scale);
  }
  return worst;
}

ConjugacySearch find_conjugacy(const DelayedNetwork& source, const DelayedNetwork& target_structure,
                               const std::optional<RationalVector>& L_fixed, double eps) {
  require_same_species(source, target_structure);
  if (L_fixed) {
    if (L_fixed->size() != source.n()) {
      throw std::invalid_argument("L has wrong length");
    }
    ConjugacySearch out = solve_fixed_L(source, target_structure, *L_fixed, eps);
    if (out.feasible) {
      out.residual = check_linear_conjugacy(source, out.witness).residual_max;
    }
    return out;
  }

  // Pattern search on log L with l_1 = 1; candidates evaluated in parallel.
  const std::size_t n = source.n();
  const std::vector<Group> groups = build_groups(source, target_structure);
  std::vector<double> logL(n, 0.0);
  const auto residual_at = [&](const std::vector<double>& lg) {
    std::vector<double> L(n);
    for (std::size_t j = 0; j < n; ++j) {
      L[j] = std::exp(lg[j]);
    }
    return search_residual(groups, target_structure, L);
  };
  double current = residual_at(logL);
  double step = 1.0;
  for (int iter = 0; iter < 4000 && step > 1e-12 && current > 1e-28; ++iter) {
    std::vector<std::vector<double>> candidates;
    for (std::size_t j = 1; j < n; ++j) {
      for (double sign : {-1.0, 1.0}) {
        auto c = logL;
        c[j] += sign * step;
        candidates.push_back(std::move(c));
      }
    }
    std::vector<double> values(candidates.size());
    parallel_for(candidates.size(), [&](std::size_t i) { values[i] = residual_at(candidates[i]); });
    std::size_t best = candidates.size();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (values[i] < current * (1 - 1e-12) &&
          (best == candidates.size() || values[i] < values[best] ||
           (values[i] == values[best] && candidates[i] < candidates[best]))) {
        best = i;
      }
    }
    if (best == candidates.size()) {
      step /= 2;
    } else {
      logL = candidates[best];
      current = values[best];
    }
  }

  ConjugacySearch out;
  for (long max_den : {100L, 10000L, 1000000L}) {
    RationalVector L(n);
    for (std::size_t j = 0; j < n; ++j) {
      L[j] = rationalize(std::exp(logL[j]), max_den);
    }
    out = solve_fixed_L(source, target_structure, L, eps);
    if (out.feasible) {
      break;
    }
  }
  out.heuristic = true;
  if (out.feasible) {
    out.residual = check_linear_conjugacy(source, out.witness).residual_max;
  } else {
    out.residual = current;
    if (out.reason.empty()) {
      out.reason = "search did not reach a conjugating L";
    }
  }
  return out;
}

}  // namespace delaynet
