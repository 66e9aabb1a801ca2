#include "delaynet/invariants.hpp"

#include "delaynet/conjugacy.hpp"
#include "delaynet/structure.hpp"
#include "delaynet/threads.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <stdexcept>

namespace delaynet {

std::vector<Rational> DeltaTable::reaction_sums(std::size_t r) const {
  std::vector<Rational> out(r, Rational(0));
  for (const auto& [key, d] : delta) {
    out[key.second] += d;
  }
  return out;
}

namespace {

std::size_t species_of(const Complex& y) {
  std::optional<std::size_t> found;
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (y[j] != 0) {
      if (found) {
        throw std::invalid_argument("reactant complex is not a multiple of a single species");
      }
      found = j;
    }
  }
  if (!found) {
    throw std::invalid_argument("reactant complex is empty");
  }
  return *found;
}

std::vector<std::vector<double>> to_double_matrix(const RationalMatrix& m) {
  std::vector<std::vector<double>> out;
  for (const auto& row : m) {
    out.push_back(to_double(row));
  }
  return out;
}

}  // namespace

DeltaTable delta_coefficients(const DelayedNetwork& net, const ConjugacyWitness& witness) {
  const auto kbar = scaled_rates(witness);
  const auto& L = witness.L;
  const std::size_t n = net.n();
  DeltaTable table;
  for (std::size_t i = 0; i < net.r(); ++i) {
    const auto& rx = net.reactions[i];
    const Complex& y = rx.reactant;
    const std::size_t j1 = species_of(y);
    auto [it, inserted] = table.lbar.try_emplace(y, RationalVector(n, Rational(0)));
    RationalVector& lbar = it->second;
    if (inserted) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j == j1) {
          lbar[j] = y[j1];
          continue;
        }
        Rational num = 0;
        Rational den = 0;
        for (std::size_t t = 0; t < witness.target.r(); ++t) {
          const auto& trx = witness.target.reactions[t];
          if (trx.reactant == y && trx.product[j] != 0) {
            num += kbar[t] * L[j] * trx.product[j];
            den += kbar[t];
          }
        }
        lbar[j] = den == 0 ? Rational(0) : num / (L[j1] * den);
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (rx.product[j] == 0) {
        continue;
      }
      if (lbar[j] == 0) {
        throw std::domain_error("conjugacy defect: reaction " + std::to_string(i) + " produces " + net.species[j] +
                                " but no target reaction from the same reactant does");
      }
      table.delta[{j, i}] = Rational(rx.product[j]) / lbar[j];
    }
  }
  return table;
}

State weighted_g(const DelayedNetwork& net, const std::vector<double>& w, const HistorySegment& path, double t) {
  State out = path(t);
  std::map<double, std::vector<std::size_t>> by_delay;
  for (std::size_t i = 0; i < net.r(); ++i) {
    if (net.reactions[i].delay > 0 && w[i] != 0) {
      by_delay[net.reactions[i].delay_d()].push_back(i);
    }
  }
  for (const auto& [tau, idx] : by_delay) {
    if (t - tau < path.t_begin() - 1e-12) {
      throw std::out_of_range("weighted_g: history shorter than the largest delay");
    }
    const auto& reactions = idx;
    integrate_path(path, std::max(t - tau, path.t_begin()), t, [&](double weight, const State& x) {
      for (std::size_t i : reactions) {
        const auto& rx = net.reactions[i];
        const double c = weight * w[i] * rx.rate_d() * monomial(x, rx.reactant);
        for (std::size_t j = 0; j < out.size(); ++j) {
          out[j] += c * rx.reactant[j];
        }
      }
    });
  }
  return out;
}

State weighted_g_constant(const DelayedNetwork& net, const std::vector<double>& w, const State& x) {
  State out = x;
  for (std::size_t i = 0; i < net.r(); ++i) {
    const auto& rx = net.reactions[i];
    const double c = w[i] * rx.rate_d() * rx.delay_d() * monomial(x, rx.reactant);
    for (std::size_t j = 0; j < out.size(); ++j) {
      out[j] += c * rx.reactant[j];
    }
  }
  return out;
}

State g_eval(const DelayedNetwork& net, const HistorySegment& path, double t) {
  return weighted_g(net, std::vector<double>(net.r(), 1.0), path, t);
}

State gn_eval(const DelayedNetwork& net, const DeltaTable& table, const HistorySegment& path, double t) {
  return weighted_g(net, to_double(table.reaction_sums(net.r())), path, t);
}

std::string invariant_kind_name(InvariantKind kind) {
  switch (kind) {
    case InvariantKind::scc: return "scc";
    case InvariantKind::new_scc_de12: return "new_scc_de12";
    case InvariantKind::new_scc_de3: return "new_scc_de3";
  }
  return "scc";
}

InvariantSetSpec invariant_set(const DelayedNetwork& net, const ConjugacyWitness& witness, const HistorySegment& path,
                               double t, InvariantKind kind) {
  InvariantSetSpec spec;
  spec.kind = kind;
  spec.weights.assign(net.r(), 1.0);
  switch (kind) {
    case InvariantKind::scc:
      spec.basis = orth_complement(net);
      break;
    case InvariantKind::new_scc_de12:
      spec.basis = orth_complement(witness.target);
      break;
    case InvariantKind::new_scc_de3: {
      RationalMatrix scaled = stoich_subspace(witness.target);
      for (auto& row : scaled) {
        for (std::size_t j = 0; j < row.size(); ++j) {
          row[j] *= witness.L[j];
        }
      }
      spec.basis = orthogonal_complement(scaled, net.n());
      spec.delta = delta_coefficients(net, witness);
      spec.weights = to_double(spec.delta->reaction_sums(net.r()));
      break;
    }
  }
  spec.levels = set_values(net, spec, path, t);
  return spec;
}

InvariantSetSpec invariant_set(const DelayedNetwork& net, const ConjugacyWitness& witness, const State& psi,
                               InvariantKind kind) {
  double tau_max = 0.0;
  for (const auto& rx : net.reactions) {
    tau_max = std::max(tau_max, rx.delay_d());
  }
  return invariant_set(net, witness, HistorySegment::constant(psi, tau_max), 0.0, kind);
}

namespace {

std::vector<double> project(const RationalMatrix& basis, const State& G) {
  std::vector<double> out;
  for (const auto& b : basis) {
    double acc = 0.0;
    for (std::size_t j = 0; j < G.size(); ++j) {
      acc += to_double(b[j]) * G[j];
    }
    out.push_back(acc);
  }
  return out;
}

}  // namespace

std::vector<double> set_values(const DelayedNetwork& net, const InvariantSetSpec& spec, const HistorySegment& path,
                               double t) {
  return project(spec.basis, weighted_g(net, spec.weights, path, t));
}

std::vector<double> set_values_constant(const DelayedNetwork& net, const InvariantSetSpec& spec, const State& x) {
  return project(spec.basis, weighted_g_constant(net, spec.weights, x));
}

Rational quasi_delay(const DelayedNetwork& net, const ConjugacyWitness& witness, const Complex& y, bool allow_loop) {
  const bool identity = witness.is_identity();
  Rational L_y = 1;
  Rational inv_sum = 0;  // sum over supp y of l_j^{-1}
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (y[j] != 0) {
      inv_sum += 1 / witness.L[j];
      for (int e = 0; e < y[j]; ++e) {
        L_y *= witness.L[j];
      }
    }
  }
  Rational num = 0;
  Rational outflow = 0;
  for (const auto& rx : net.reactions) {
    if (rx.reactant == y) {
      num += identity ? Rational(rx.rate * rx.delay) : Rational(rx.rate * inv_sum * L_y * rx.delay);
      outflow += rx.rate;
    }
  }
  Rational den = 0;
  for (const auto& rx : witness.target.reactions) {
    if (rx.reactant == y) {
      den += rx.rate;
    }
  }
  if (den == 0) {
    if (!allow_loop || outflow == 0) {
      throw std::domain_error("quasi_delay: " + format_complex(net.species, y) + " is not a target reactant");
    }
    den = outflow;
  }
  return num / den;
}

State reference_equilibrium(const ConjugacyWitness& witness) {
  const auto z = complex_balanced_equilibrium(witness.target);
  if (!z) {
    throw std::runtime_error("reference_equilibrium: complex-balance solve failed");
  }
  State x = *z;
  for (std::size_t j = 0; j < x.size(); ++j) {
    x[j] *= to_double(witness.L[j]);
  }
  return x;
}

EquilibriumResult equilibrium_in_set(const DelayedNetwork& net, const ConjugacyWitness& witness,
                                     const InvariantSetSpec& spec, const std::vector<double>& start, double tol) {
  const std::size_t n = net.n();
  const State x_star = reference_equilibrium(witness);
  const auto U = to_double_matrix(orth_complement(witness.target));
  const auto B = to_double_matrix(spec.basis);
  const std::size_t m = U.size();
  const auto rows = static_cast<Eigen::Index>(B.size());
  const auto cols = static_cast<Eigen::Index>(m);

  std::vector<double> c(net.r());  // w_i k_i tau_i
  for (std::size_t i = 0; i < net.r(); ++i) {
    c[i] = spec.weights[i] * net.reactions[i].rate_d() * net.reactions[i].delay_d();
  }
  double scale = 1.0;
  for (double W : spec.levels) {
    scale = std::max(scale, std::abs(W));
  }
  const auto point = [&](const Eigen::VectorXd& a) {
    State x = x_star;
    for (std::size_t j = 0; j < n; ++j) {
      double v = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        v += U[k][j] * a(static_cast<Eigen::Index>(k));
      }
      x[j] *= std::exp(v);
    }
    return x;
  };
  const auto residual = [&](const State& x) {
    const auto vals = set_values_constant(net, spec, x);
    Eigen::VectorXd r(rows);
    for (Eigen::Index b = 0; b < rows; ++b) {
      r(b) = vals[static_cast<std::size_t>(b)] - spec.levels[static_cast<std::size_t>(b)];
    }
    return r;
  };

  EquilibriumResult result;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(cols);
  for (std::size_t k = 0; k < std::min(m, start.size()); ++k) {
    a(static_cast<Eigen::Index>(k)) = start[k];
  }
  State x = point(a);
  Eigen::VectorXd r = residual(x);
  for (; result.iterations < 100; ++result.iterations) {
    if (rows == 0 || r.cwiseAbs().maxCoeff() <= tol * scale) {
      result.converged = true;
      break;
    }
    // dG/da = (diag(x) + sum_i c_i x^{y_i} y_i y_i^T) U
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
      M(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = x[j];
    }
    for (std::size_t i = 0; i < net.r(); ++i) {
      if (c[i] == 0) {
        continue;
      }
      const auto& y = net.reactions[i].reactant;
      const double f = c[i] * monomial(x, y);
      for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
          M(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) += f * y[p] * y[q];
        }
      }
    }
    Eigen::MatrixXd Bm(rows, static_cast<Eigen::Index>(n));
    Eigen::MatrixXd Um(static_cast<Eigen::Index>(n), cols);
    for (Eigen::Index b = 0; b < rows; ++b) {
      for (std::size_t j = 0; j < n; ++j) {
        Bm(b, static_cast<Eigen::Index>(j)) = B[static_cast<std::size_t>(b)][j];
      }
    }
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t j = 0; j < n; ++j) {
        Um(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = U[k][j];
      }
    }
    const Eigen::MatrixXd J = Bm * M * Um;
    const Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(-r);
    double alpha = 1.0;
    bool improved = false;
    for (int half = 0; half < 60; ++half) {
      const Eigen::VectorXd trial = a + alpha * step;
      const State xt = point(trial);
      const Eigen::VectorXd rt = residual(xt);
      if (rt.allFinite() && rt.norm() < r.norm()) {
        a = trial;
        x = xt;
        r = rt;
        improved = true;
        break;
      }
      alpha /= 2;
    }
    if (!improved) {
      break;
    }
  }
  if (!result.converged && (rows == 0 || r.cwiseAbs().maxCoeff() <= tol * scale)) {
    result.converged = true;
  }
  result.x = x;
  result.residual = rows == 0 ? 0.0 : r.cwiseAbs().maxCoeff();
  result.coefficients.assign(a.data(), a.data() + a.size());
  return result;
}

UniquenessProbe uniqueness_probe(const DelayedNetwork& net, const ConjugacyWitness& witness,
                                 const InvariantSetSpec& spec, std::size_t starts, std::uint64_t seed) {
  const std::size_t m = orth_complement(witness.target).size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  std::vector<std::vector<double>> initial(starts, std::vector<double>(m));
  for (auto& s : initial) {
    for (auto& v : s) {
      v = dist(rng);
    }
  }
  UniquenessProbe probe;
  probe.runs.resize(starts);
  parallel_for(starts, [&](std::size_t k) { probe.runs[k] = equilibrium_in_set(net, witness, spec, initial[k]); });
  probe.all_converged = std::all_of(probe.runs.begin(), probe.runs.end(), [](const auto& r) { return r.converged; });
  for (std::size_t p = 0; p < starts; ++p) {
    for (std::size_t q = p + 1; q < starts; ++q) {
      double d = 0.0;
      for (std::size_t j = 0; j < net.n(); ++j) {
        d = std::max(d, std::abs(probe.runs[p].x[j] - probe.runs[q].x[j]));
      }
      probe.max_pairwise = std::max(probe.max_pairwise, d);
    }
  }
  return probe;
}

DegenerateSet::DegenerateSet(State x_star, RationalMatrix basis)
    : x_star_(std::move(x_star)), basis_(to_double_matrix(basis)) {}

State DegenerateSet::point(const std::vector<double>& coefficients) const {
  if (coefficients.size() != basis_.size()) {
    throw std::invalid_argument("DegenerateSet::point: expected " + std::to_string(basis_.size()) + " coefficients");
  }
  State x = x_star_;
  for (std::size_t j = 0; j < x.size(); ++j) {
    double v = 0.0;
    for (std::size_t k = 0; k < basis_.size(); ++k) {
      v += coefficients[k] * basis_[k][j];
    }
    x[j] *= std::exp(v);
  }
  return x;
}

DegenerateSet degenerate_set(const State& x_star, const RationalMatrix& basis) { return DegenerateSet(x_star, basis); }

double conservation_check(const DelayedNetwork& net, const Trajectory& traj, const InvariantSetSpec& spec,
                          double stride) {
  if (!(stride > 0)) {
    throw std::invalid_argument("conservation_check: stride must be positive");
  }
  const double t_end = traj.t_end();
  const auto count = static_cast<std::size_t>(std::floor(t_end / stride + 1e-9)) + 1;
  std::vector<double> drift(count, 0.0);
  parallel_for(count, [&](std::size_t k) {
    const double t = std::min(static_cast<double>(k) * stride, t_end);
    const auto vals = set_values(net, spec, traj.path, t);
    for (std::size_t b = 0; b < vals.size(); ++b) {
      drift[k] = std::max(drift[k], std::abs(vals[b] - spec.levels[b]));
    }
  });
  return *std::max_element(drift.begin(), drift.end());
}

void write_level_grid_csv(std::ostream& out, const DelayedNetwork& net, const InvariantSetSpec& spec, double level,
                          double lo, double hi, std::size_t resolution) {
  if (spec.basis.size() != 1) {
    throw std::invalid_argument("write_level_grid_csv: spec must have exactly one basis vector");
  }
  const std::size_t n = net.n();
  const auto f = [&](const State& x) { return set_values_constant(net, spec, x)[0] - level; };
  for (std::size_t j = 0; j < n; ++j) {
    out << (j ? "," : "") << "x_" << net.species[j];
  }
  out << "\n";
  const std::size_t free = n - 1;
  std::size_t total = 1;
  for (std::size_t j = 0; j < free; ++j) {
    total *= resolution;
  }
  char buf[32];
  State x(n);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (std::size_t j = 0; j < free; ++j) {
      const std::size_t k = rest % resolution;
      rest /= resolution;
      x[j] = resolution > 1 ? lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(resolution - 1) : lo;
    }
    double a = 0.0;
    double b = std::max(hi, 1.0);
    x[n - 1] = a;
    const double fa = f(x);
    x[n - 1] = b;
    double fb = f(x);
    for (int grow = 0; grow < 40 && fa * fb > 0; ++grow) {
      b *= 2;
      x[n - 1] = b;
      fb = f(x);
    }
    if (fa * fb > 0) {
      continue;
    }
    const bool rising = fb > fa;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      x[n - 1] = mid;
      if ((f(x) < 0) == rising) {
        a = mid;
      } else {
        b = mid;
      }
    }
    x[n - 1] = 0.5 * (a + b);
    for (std::size_t j = 0; j < n; ++j) {
      std::snprintf(buf, sizeof buf, "%.10g", x[j]);
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
}

}  // namespace delaynet
