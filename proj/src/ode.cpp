#include "rescascade/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rescascade {

namespace {

using C = std::complex<double>;

std::string time_str(double t) {
  std::ostringstream os;
  os.precision(17);
  os << t;
  return os.str();
}

std::vector<double> resolve_samples(double t0, double t1, const std::vector<double>& requested) {
  if (requested.empty()) return t1 > t0 ? std::vector<double>{t0, t1} : std::vector<double>{t0};
  std::vector<double> out;
  for (double t : requested) {
    if (!(t >= t0 && t <= t1)) throw std::invalid_argument("sample time " + time_str(t) + " outside the interval");
    if (!out.empty() && t < out.back()) throw std::invalid_argument("sample times must be nondecreasing");
    if (out.empty() || t > out.back()) out.push_back(t);
  }
  return out;
}

/// y_out = y + h * sum_k coeff[k] * stage[k]
void combine(std::span<const C> y, double h, std::initializer_list<std::pair<double, const OdeVector*>> parts,
             OdeVector& out) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    C acc{};
    for (const auto& [c, v] : parts) {
      if (c != 0.0) acc += c * (*v)[i];
    }
    out[i] = y[i] + h * acc;
  }
}

class Recorder {
 public:
  Recorder(Trajectory& traj, std::vector<double> samples) : traj_(traj), samples_(std::move(samples)) {}

  double next() const { return samples_[pos_]; }
  bool done() const { return pos_ >= samples_.size(); }
  void record_if_due(double t, const OdeVector& y) {
    if (!done() && t == samples_[pos_]) {
      traj_.times.push_back(t);
      traj_.states.push_back(y);
      ++pos_;
    }
  }
  void record_stop(double t, const OdeVector& y) {
    if (traj_.times.empty() || traj_.times.back() != t) {
      traj_.times.push_back(t);
      traj_.states.push_back(y);
    }
    traj_.stopped_at = t;
  }

 private:
  Trajectory& traj_;
  std::vector<double> samples_;
  std::size_t pos_ = 0;
};

void run_fixed(const OdeRhs& f, OdeVector y, double t0, const IntegratorOptions& opts,
               const OdeObserver& observer, Trajectory& traj, Recorder& rec) {
  double h = opts.h;
  if (!(h > 0.0)) throw std::invalid_argument("fixed step h must be positive");
  if (opts.omega_max > 0.0) h = std::min(h, 0.1 / opts.omega_max);
  traj.h = h;
  const std::size_t n = y.size();
  OdeVector k1(n), k2(n), k3(n), k4(n), tmp(n);
  double t = t0;
  if (observer && !observer(t, y)) {
    rec.record_if_due(t, y);
    rec.record_stop(t, y);
    return;
  }
  rec.record_if_due(t, y);
  while (!rec.done()) {
    const double target = rec.next();
    const double span = target - t;
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / h * (1.0 - 1e-12))));
    const double step = span / static_cast<double>(steps);
    const double seg_start = t;
    for (std::size_t s = 0; s < steps; ++s) {
      if (traj.accepted_steps >= opts.max_steps) {
        throw std::runtime_error("step limit reached at t = " + time_str(t));
      }
      const double ts = t;
      f(y, ts, k1);
      combine(y, step, {{0.5, &k1}}, tmp);
      f(tmp, ts + 0.5 * step, k2);
      combine(y, step, {{0.5, &k2}}, tmp);
      f(tmp, ts + 0.5 * step, k3);
      combine(y, step, {{1.0, &k3}}, tmp);
      f(tmp, ts + step, k4);
      combine(y, step, {{1.0 / 6.0, &k1}, {1.0 / 3.0, &k2}, {1.0 / 3.0, &k3}, {1.0 / 6.0, &k4}}, tmp);
      y.swap(tmp);
      t = s + 1 == steps ? target : seg_start + static_cast<double>(s + 1) * step;
      ++traj.accepted_steps;
      if (s + 1 == steps) rec.record_if_due(t, y);
      if (observer && !observer(t, y)) {
        rec.record_stop(t, y);
        return;
      }
    }
  }
}

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

void run_adaptive(const OdeRhs& f, OdeVector y, double t0, double t1, const IntegratorOptions& opts,
                  const OdeObserver& observer, Trajectory& traj, Recorder& rec) {
  if (!(opts.rtol > 0.0) || !(opts.atol >= 0.0)) throw std::invalid_argument("tolerances must be positive");
  const double span = t1 - t0;
  const std::size_t n = y.size();
  OdeVector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), ynew(n);
  double t = t0;
  double h = opts.h > 0.0 ? opts.h : span / 100.0;
  if (span > 0.0) h = std::min(h, span);
  if (observer && !observer(t, y)) {
    rec.record_if_due(t, y);
    rec.record_stop(t, y);
    return;
  }
  rec.record_if_due(t, y);
  if (rec.done()) return;
  f(y, t, k1);
  while (!rec.done()) {
    const double target = rec.next();
    if (traj.accepted_steps + traj.rejected_steps >= opts.max_steps) {
      throw std::runtime_error("step limit reached at t = " + time_str(t));
    }
    bool lands = false;
    double step = h;
    if (t + step >= target) {
      step = target - t;
      lands = true;
    }
    combine(y, step, {{a21, &k1}}, tmp);
    f(tmp, t + step / 5, k2);
    combine(y, step, {{a31, &k1}, {a32, &k2}}, tmp);
    f(tmp, t + 3 * step / 10, k3);
    combine(y, step, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, tmp);
    f(tmp, t + 4 * step / 5, k4);
    combine(y, step, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, tmp);
    f(tmp, t + 8 * step / 9, k5);
    combine(y, step, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, tmp);
    f(tmp, t + step, k6);
    combine(y, step, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}}, ynew);
    const double t_new = lands ? target : t + step;
    f(ynew, t_new, k7);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const C e = step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double ratio = std::abs(e) / sc;
      err = std::isfinite(ratio) ? std::max(err, ratio) : std::numeric_limits<double>::infinity();
    }
    const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    if (err <= 1.0) {
      y.swap(ynew);
      k1.swap(k7);
      t = t_new;
      ++traj.accepted_steps;
      traj.h = step;
      if (lands) rec.record_if_due(t, y);
      if (observer && !observer(t, y)) {
        rec.record_stop(t, y);
        return;
      }
      // A step shortened to land on a sample says nothing about the natural scale.
      h = lands ? std::max(h, step * factor) : step * factor;
      if (span > 0.0) h = std::min(h, span);
    } else {
      ++traj.rejected_steps;
      h = step * factor;
      if (h < 1e-14 * span) throw std::runtime_error("step size underflow at t = " + time_str(t));
    }
  }
}

}  // namespace

Trajectory integrate(const OdeRhs& rhs, const OdeVector& y0, double t0, double t1, const IntegratorOptions& opts,
                     const OdeObserver& observer) {
  if (!(t1 >= t0)) throw std::invalid_argument("integration requires t1 >= t0");
  Trajectory traj;
  traj.method = opts.method;
  traj.rtol = opts.rtol;
  traj.atol = opts.atol;
  Recorder rec(traj, resolve_samples(t0, t1, opts.sample_times));
  if (opts.method == StepMethod::FixedRk4) {
    run_fixed(rhs, y0, t0, opts, observer, traj, rec);
  } else {
    run_adaptive(rhs, y0, t0, t1, opts, observer, traj, rec);
  }
  return traj;
}

std::vector<double> uniform_samples(double t0, double t1, std::size_t count) {
  if (count < 2) throw std::invalid_argument("uniform_samples needs at least two points");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  out.back() = t1;
  return out;
}

std::vector<DriftRecord> drift_report(const Trajectory& traj,
                                      const std::vector<std::pair<std::string, OdeFunctional>>& functionals) {
  std::vector<DriftRecord> out;
  for (const auto& [name, fn] : functionals) {
    DriftRecord r;
    r.name = name;
    if (!traj.times.empty()) {
      r.initial = fn(traj.times.front(), traj.states.front());
      for (std::size_t i = 1; i < traj.times.size(); ++i) {
        r.max_abs_drift = std::max(r.max_abs_drift, std::abs(fn(traj.times[i], traj.states[i]) - r.initial));
      }
    }
    r.max_rel_drift = r.initial != 0.0 ? r.max_abs_drift / std::abs(r.initial) : r.max_abs_drift;
    out.push_back(r);
  }
  return out;
}

}  // namespace rescascade
