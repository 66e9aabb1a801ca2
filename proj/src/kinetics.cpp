#include "delaynet/kinetics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace delaynet {

namespace {

double ipow(double base, int exponent) {
  double result = 1.0;
  for (int e = 0; e < exponent; ++e) {
    result *= base;
  }
  return result;
}

void add_scaled(RationalVector& acc, const Rational& factor, const RationalVector& v) {
  if (acc.size() < v.size()) {
    acc.resize(v.size(), Rational(0));
  }
  for (std::size_t j = 0; j < v.size(); ++j) {
    acc[j] += factor * v[j];
  }
}

}  // namespace

double monomial(const double* x, const Complex& y) {
  double result = 1.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (y[j] != 0) {
      result *= ipow(x[j], y[j]);
    }
  }
  return result;
}

double monomial(const State& x, const Complex& y) { return monomial(x.data(), y); }

State ode_rhs(const DelayedNetwork& net, const State& x) {
  State out(net.n(), 0.0);
  for (const auto& rx : net.reactions) {
    const double rate = rx.rate_d() * monomial(x, rx.reactant);
    for (std::size_t j = 0; j < net.n(); ++j) {
      out[j] += rate * (rx.product[j] - rx.reactant[j]);
    }
  }
  return out;
}

State dde_rhs(const DelayedNetwork& net, const State& x_now, const std::map<double, State>& x_delayed) {
  State out(net.n(), 0.0);
  for (const auto& rx : net.reactions) {
    const double tau = rx.delay_d();
    const State* lagged = &x_now;
    if (const auto it = x_delayed.find(tau); it != x_delayed.end()) {
      lagged = &it->second;
    } else if (tau != 0.0) {
      throw std::out_of_range("dde_rhs: no delayed state for tau=" + format_rational(rx.delay));
    }
    const double produced = rx.rate_d() * monomial(*lagged, rx.reactant);
    const double consumed = rx.rate_d() * monomial(x_now, rx.reactant);
    for (std::size_t j = 0; j < net.n(); ++j) {
      out[j] += produced * rx.product[j] - consumed * rx.reactant[j];
    }
  }
  return out;
}

std::vector<Rational> AggregateTable::delays_of(const Complex& y) const {
  std::vector<Rational> out;
  for (auto it = k_sum_tau.lower_bound({y, Rational(-1)}); it != k_sum_tau.end() && it->first.first == y; ++it) {
    out.push_back(it->first.second);
  }
  return out;
}

AggregateTable aggregates(const DelayedNetwork& net) {
  AggregateTable t;
  const RationalVector zero(net.n(), Rational(0));
  for (const auto& rx : net.reactions) {
    const DelayKey key{rx.reactant, rx.delay};
    const RationalVector v = reaction_vector(rx);
    const RationalVector yp = to_rational(rx.product);
    for (auto* table : {&t.Z, &t.Y}) {
      table->try_emplace(rx.reactant, zero);
    }
    for (auto* table : {&t.Z_tau, &t.Y_tau}) {
      table->try_emplace(key, zero);
    }
    add_scaled(t.Z[rx.reactant], rx.rate, v);
    add_scaled(t.Z_tau[key], rx.rate, v);
    add_scaled(t.Y[rx.reactant], rx.rate, yp);
    add_scaled(t.Y_tau[key], rx.rate, yp);
    t.k_sum[rx.reactant] += rx.rate;
    t.k_sum_tau[key] += rx.rate;
  }
  return t;
}

OneDimFrame one_dim_frame(const std::vector<RationalVector>& vectors, std::size_t n) {
  OneDimFrame frame;
  frame.a.assign(vectors.size(), Rational(0));
  const std::size_t rk = rank(vectors, n);
  if (rk == 0) {
    frame.kind = OneDimFrame::Kind::zero_span;
    frame.w.assign(n, Rational(0));
    return frame;
  }
  if (rk > 1) {
    frame.kind = OneDimFrame::Kind::higher;
    return frame;
  }
  frame.kind = OneDimFrame::Kind::one_dim;
  const auto nonzero = std::find_if(vectors.begin(), vectors.end(), [](const RationalVector& v) { return !is_zero(v); });
  frame.w = *nonzero;
  const auto lead = std::find_if(frame.w.begin(), frame.w.end(), [](const Rational& q) { return q != 0; });
  const Rational scale = *lead;
  for (auto& q : frame.w) {
    q /= scale;
  }
  const std::size_t lead_index = static_cast<std::size_t>(lead - frame.w.begin());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    frame.a[i] = vectors[i][lead_index];
  }
  return frame;
}

OneDimFrame one_dim_frame(const DelayedNetwork& net, const Complex& y) {
  std::vector<RationalVector> vectors;
  for (const auto& rx : net.reactions) {
    if (rx.reactant == y) {
      vectors.push_back(reaction_vector(rx));
    }
  }
  return one_dim_frame(vectors, net.n());
}

RhsEvaluator::RhsEvaluator(const DelayedNetwork& net) : n_(net.n()) {
  for (const auto& tau : distinct_delays(net)) {
    delays_.push_back(to_double(tau));
  }
  for (const auto& rx : net.reactions) {
    Term term;
    term.slot = static_cast<std::size_t>(std::find(delays_.begin(), delays_.end(), rx.delay_d()) - delays_.begin());
    term.rate = rx.rate_d();
    for (std::size_t j = 0; j < n_; ++j) {
      if (rx.reactant[j] != 0) {
        term.reactant.emplace_back(j, rx.reactant[j]);
      }
      if (rx.product[j] != 0) {
        term.product.emplace_back(j, rx.product[j]);
      }
    }
    terms_.push_back(std::move(term));
  }
}

double RhsEvaluator::sparse_monomial(const double* x, const std::vector<std::pair<std::size_t, int>>& y) {
  double result = 1.0;
  for (const auto& [j, c] : y) {
    result *= ipow(x[j], c);
  }
  return result;
}

void RhsEvaluator::evaluate(const double* x_now, const std::vector<const double*>& x_lag, double* out) const {
  std::fill(out, out + n_, 0.0);
  for (const auto& term : terms_) {
    const double produced = term.rate * sparse_monomial(x_lag[term.slot], term.reactant);
    const double consumed = term.rate * sparse_monomial(x_now, term.reactant);
    for (const auto& [j, c] : term.product) {
      out[j] += produced * c;
    }
    for (const auto& [j, c] : term.reactant) {
      out[j] -= consumed * c;
    }
  }
}

namespace {

struct BalanceSystem {
  std::vector<Complex> nodes;
  // per reaction: source node, target node
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
};

BalanceSystem balance_system(const DelayedNetwork& net) {
  BalanceSystem sys;
  sys.nodes = complexes(net);
  const auto index = [&](const Complex& y) {
    return static_cast<std::size_t>(std::find(sys.nodes.begin(), sys.nodes.end(), y) - sys.nodes.begin());
  };
  for (const auto& rx : net.reactions) {
    sys.arcs.emplace_back(index(rx.reactant), index(rx.product));
  }
  return sys;
}

// Residual per complex (outflow - inflow) and the largest flux.
std::vector<double> balance_residual(const DelayedNetwork& net, const BalanceSystem& sys, const State& x,
                                     double& max_flux) {
  std::vector<double> r(sys.nodes.size(), 0.0);
  max_flux = 0.0;
  for (std::size_t i = 0; i < net.r(); ++i) {
    const double flux = net.reactions[i].rate_d() * monomial(x, net.reactions[i].reactant);
    max_flux = std::max(max_flux, flux);
    const auto [from, to] = sys.arcs[i];
    if (from != to) {
      r[from] += flux;
      r[to] -= flux;
    }
  }
  return r;
}

}  // namespace

double complex_balance_defect(const DelayedNetwork& net, const State& x) {
  const BalanceSystem sys = balance_system(net);
  double max_flux = 0.0;
  const auto r = balance_residual(net, sys, x, max_flux);
  double worst = 0.0;
  for (double v : r) {
    worst = std::max(worst, std::abs(v));
  }
  return max_flux > 0 ? worst / max_flux : 0.0;
}

std::optional<State> complex_balanced_equilibrium(const DelayedNetwork& net, double tol,
                                                  const std::optional<State>& x0) {
  const std::size_t n = net.n();
  const BalanceSystem sys = balance_system(net);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  if (x0) {
    for (std::size_t j = 0; j < n; ++j) {
      u(static_cast<Eigen::Index>(j)) = std::log((*x0)[j]);
    }
  }
  const auto state_of = [&](const Eigen::VectorXd& v) {
    State x(n);
    for (std::size_t j = 0; j < n; ++j) {
      x[j] = std::exp(v(static_cast<Eigen::Index>(j)));
    }
    return x;
  };
  const auto residual_norm = [&](const Eigen::VectorXd& v, Eigen::VectorXd* r_out, double* flux_out) {
    double max_flux = 0.0;
    const auto r = balance_residual(net, sys, state_of(v), max_flux);
    Eigen::VectorXd rv(static_cast<Eigen::Index>(r.size()));
    for (std::size_t c = 0; c < r.size(); ++c) {
      rv(static_cast<Eigen::Index>(c)) = r[c];
    }
    if (r_out) {
      *r_out = rv;
    }
    if (flux_out) {
      *flux_out = max_flux;
    }
    return rv.norm();
  };

  for (int iter = 0; iter < 200; ++iter) {
    Eigen::VectorXd r;
    double max_flux = 0.0;
    const double norm = residual_norm(u, &r, &max_flux);
    if (max_flux == 0.0 || r.cwiseAbs().maxCoeff() <= tol * max_flux) {
      return state_of(u);
    }
    // d flux_i / d u_j = flux_i * y_ij
    const State x = state_of(u);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sys.nodes.size()), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < net.r(); ++i) {
      const auto& rx = net.reactions[i];
      const double flux = rx.rate_d() * monomial(x, rx.reactant);
      const auto [from, to] = sys.arcs[i];
      if (from == to) {
        continue;
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (rx.reactant[j] == 0) {
          continue;
        }
        const double d = flux * rx.reactant[j];
        J(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(j)) += d;
        J(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(j)) -= d;
      }
    }
    const Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(-r);
    double alpha = 1.0;
    bool improved = false;
    for (int half = 0; half < 60; ++half) {
      const Eigen::VectorXd trial = u + alpha * step;
      if (residual_norm(trial, nullptr, nullptr) < norm) {
        u = trial;
        improved = true;
        break;
      }
      alpha /= 2;
    }
    if (!improved) {
      break;
    }
  }
  double max_flux = 0.0;
  Eigen::VectorXd r;
  residual_norm(u, &r, &max_flux);
  if (max_flux == 0.0 || r.cwiseAbs().maxCoeff() <= tol * max_flux) {
    return state_of(u);
  }
  return std::nullopt;
}

}  // namespace delaynet
