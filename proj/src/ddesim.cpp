#include "delaynet/ddesim.hpp"

#include "delaynet/threads.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>

namespace delaynet {

HistorySegment HistorySegment::constant(const State& x, double tau_max) {
  HistorySegment seg(x.size());
  const State zero(x.size(), 0.0);
  if (tau_max > 0) {
    seg.append(-tau_max, x, zero, zero);
  }
  seg.append(0.0, x, zero, zero);
  return seg;
}

void HistorySegment::append(double t, const State& x, const State& slope_left, const State& slope_right) {
  if (x.size() != n_ || slope_left.size() != n_ || slope_right.size() != n_) {
    throw std::invalid_argument("HistorySegment::append: dimension mismatch");
  }
  if (!t_.empty() && !(t > t_.back())) {
    throw std::invalid_argument("HistorySegment::append: times must increase");
  }
  t_.push_back(t);
  x_.push_back(x);
  dl_.push_back(slope_left);
  dr_.push_back(slope_right);
}

void HistorySegment::set_last_right_slope(const State& slope) { dr_.back() = slope; }

std::size_t HistorySegment::piece(double t) const {
  if (t_.empty() || t < t_.front() || t > t_.back()) {
    throw std::out_of_range("HistorySegment: t=" + std::to_string(t) + " outside [" +
                            (t_.empty() ? std::string("empty") : std::to_string(t_.front()) + ", " +
                                                                     std::to_string(t_.back())) +
                            "]");
  }
  if (t_.size() == 1) {
    return 0;
  }
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const auto k = static_cast<std::size_t>(it - t_.begin());
  return std::min(k == 0 ? 0 : k - 1, t_.size() - 2);
}

void HistorySegment::eval(double t, double* out) const {
  const std::size_t k = piece(t);
  if (t_.size() == 1 || t == t_[k]) {
    std::copy(x_[k].begin(), x_[k].end(), out);
    return;
  }
  const double w = t_[k + 1] - t_[k];
  const double s = (t - t_[k]) / w;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  const State& x0 = x_[k];
  const State& x1 = x_[k + 1];
  const State& d0 = dr_[k];
  const State& d1 = dl_[k + 1];
  for (std::size_t j = 0; j < n_; ++j) {
    out[j] = h00 * x0[j] + h10 * w * d0[j] + h01 * x1[j] + h11 * w * d1[j];
  }
}

State HistorySegment::operator()(double t) const {
  State out(n_);
  eval(t, out.data());
  return out;
}

void integrate_path(const HistorySegment& path, double a, double b,
                    const std::function<void(double, const State&)>& visit) {
  using Quad = boost::math::quadrature::gauss<double, 16>;
  const auto& nodes = Quad::abscissa();  // nonnegative half, N even
  const auto& weights = Quad::weights();
  if (!(b > a)) {
    return;
  }
  path.piece(b);  // range check; a is checked below
  const auto& times = path.times();
  State x(path.n());
  double lo = a;
  for (std::size_t k = path.piece(a); k + 1 < times.size() && lo < b; ++k) {
    const double hi = std::min(times[k + 1], b);
    if (hi > lo) {
      const double mid = (lo + hi) / 2;
      const double half = (hi - lo) / 2;
      for (std::size_t q = 0; q < nodes.size(); ++q) {
        for (const double sign : {-1.0, 1.0}) {
          path.eval(mid + sign * half * nodes[q], x.data());
          visit(half * weights[q], x);
        }
      }
    }
    lo = hi;
  }
}

namespace {

class Stepper {
 public:
  Stepper(const DelayedNetwork& net, const SimulationOptions& options)
      : rhs_(net), n_(net.n()), tol_(options.negative_tolerance), lag_(rhs_.delays().size(), State(net.n())),
        lag_ptr_(rhs_.delays().size()), clipped_(net.n()) {}

  const RhsEvaluator& rhs() const { return rhs_; }

  // out = f(x(t), x(t - tau) read from path); x is the state at time t.
  void eval(const HistorySegment& path, double t, const State& x, State& out) {
    clip(x, clipped_, t);
    const auto& delays = rhs_.delays();
    for (std::size_t s = 0; s < delays.size(); ++s) {
      if (delays[s] == 0.0) {
        lag_ptr_[s] = clipped_.data();
        continue;
      }
      path.eval(t - delays[s], lag_[s].data());
      clip(lag_[s], lag_[s], t - delays[s]);
      lag_ptr_[s] = lag_[s].data();
    }
    out.assign(n_, 0.0);
    rhs_.evaluate(clipped_.data(), lag_ptr_, out.data());
  }

  // Undershoots within tolerance read as 0; anything further aborts.
  void clip(const State& in, State& out, double t) const {
    out.resize(in.size());
    for (std::size_t j = 0; j < in.size(); ++j) {
      if (!std::isfinite(in[j])) {
        throw SimulationError("nonfinite state at t=" + std::to_string(t));
      }
      if (in[j] < -tol_) {
        throw SimulationError("negative state x_" + std::to_string(j) + "=" + std::to_string(in[j]) +
                              " at t=" + std::to_string(t));
      }
      out[j] = std::max(in[j], 0.0);
    }
  }

 private:
  RhsEvaluator rhs_;
  std::size_t n_;
  double tol_;
  std::vector<State> lag_;
  std::vector<const double*> lag_ptr_;
  State clipped_;
};

}  // namespace

Trajectory simulate(const DelayedNetwork& net, const HistorySegment& psi, double T, double h,
                    const SimulationOptions& options) {
  if (!(h > 0) || !(T >= 0) || !std::isfinite(T)) {
    throw std::invalid_argument("simulate: need h > 0 and finite T >= 0");
  }
  if (psi.n() != net.n() || psi.size() == 0) {
    throw std::invalid_argument("simulate: history dimension does not match the network");
  }
  Stepper stepper(net, options);
  const auto& delays = stepper.rhs().delays();
  const double tau_max = stepper.rhs().max_delay();
  const auto first_positive = std::find_if(delays.begin(), delays.end(), [](double d) { return d > 0; });
  if (first_positive != delays.end() && h > *first_positive / 10 * (1 + 1e-12)) {
    throw std::invalid_argument("simulate: step " + std::to_string(h) + " exceeds min delay / 10");
  }
  if (std::abs(psi.t_end()) > 1e-12 || psi.t_begin() > -tau_max + 1e-12) {
    throw std::invalid_argument("simulate: history must cover [-tau_max, 0]");
  }
  for (std::size_t k = 0; k < psi.size(); ++k) {
    for (double v : psi.node(k)) {
      if (!(v >= 0)) {
        throw std::invalid_argument("simulate: history must be nonnegative");
      }
    }
  }

  Trajectory traj;
  traj.path = psi;
  traj.h = h;
  traj.max_delay = tau_max;
  const std::size_t n = net.n();
  State x = psi.node(psi.size() - 1);
  State k1, k2, k3, k4, stage(n), slope;
  stepper.eval(traj.path, 0.0, x, slope);
  traj.path.set_last_right_slope(slope);

  const auto steps = static_cast<std::size_t>(std::ceil(T / h - 1e-9));
  double t = 0.0;
  for (std::size_t step = 1; step <= steps; ++step) {
    const double t_next = step == steps ? T : static_cast<double>(step) * h;
    const double dt = t_next - t;
    k1 = slope;
    for (std::size_t j = 0; j < n; ++j) stage[j] = x[j] + 0.5 * dt * k1[j];
    stepper.eval(traj.path, t + 0.5 * dt, stage, k2);
    for (std::size_t j = 0; j < n; ++j) stage[j] = x[j] + 0.5 * dt * k2[j];
    stepper.eval(traj.path, t + 0.5 * dt, stage, k3);
    for (std::size_t j = 0; j < n; ++j) stage[j] = x[j] + dt * k3[j];
    stepper.eval(traj.path, t_next, stage, k4);
    double err = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double incr = (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]) / 6;
      err = std::max(err, dt * std::abs(incr - k2[j]));
      x[j] += dt * incr;
    }
    State clipped;
    stepper.clip(x, clipped, t_next);
    x = std::move(clipped);
    // lags at t_next only reach back to t, so the slope is known before the node exists
    stepper.eval(traj.path, t_next, x, slope);
    traj.path.append(t_next, x, slope, slope);
    traj.step_error.push_back(err);
    t = t_next;
  }
  return traj;
}

Trajectory simulate(const DelayedNetwork& net, const State& psi, double T, double h,
                    const SimulationOptions& options) {
  double tau_max = 0.0;
  for (const auto& rx : net.reactions) {
    tau_max = std::max(tau_max, rx.delay_d());
  }
  return simulate(net, HistorySegment::constant(psi, tau_max), T, h, options);
}

std::vector<Trajectory> simulate_many(const DelayedNetwork& net, const std::vector<State>& psis, double T, double h,
                                      const SimulationOptions& options) {
  std::vector<std::optional<Trajectory>> slots(psis.size());
  parallel_for(psis.size(), [&](std::size_t i) { slots[i] = simulate(net, psis[i], T, h, options); });
  std::vector<Trajectory> out;
  out.reserve(slots.size());
  for (auto& s : slots) {
    out.push_back(std::move(*s));
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const DelayedNetwork& net, const Trajectory& traj, double stride) {
  out << "t";
  for (const auto& name : net.species) {
    out << ",x_" << name;
  }
  out << "\n";
  char buf[32];
  const auto row = [&](double t, const State& x) {
    std::snprintf(buf, sizeof buf, "%.12g", t);
    out << buf;
    for (double v : x) {
      std::snprintf(buf, sizeof buf, "%.12g", v);
      out << ',' << buf;
    }
    out << "\n";
  };
  const auto& path = traj.path;
  if (stride <= 0) {
    for (std::size_t k = 0; k < path.size(); ++k) {
      row(path.times()[k], path.node(k));
    }
    return;
  }
  const double t0 = path.t_begin();
  const double span = path.t_end() - t0;
  const auto count = static_cast<std::size_t>(std::floor(span / stride + 1e-9));
  for (std::size_t i = 0; i <= count; ++i) {
    const double t = std::min(t0 + static_cast<double>(i) * stride, path.t_end());
    row(t, path(t));
  }
}

}  // namespace delaynet
