#pragma once

// Explicit Runge-Kutta integration of complex ODE systems y' = f(y, t).

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rescascade {

using OdeVector = std::vector<std::complex<double>>;

/// Writes f(y, t) into dy (same length as y). Must be pure.
using OdeRhs = std::function<void(std::span<const std::complex<double>> y, double t,
                                  std::span<std::complex<double>> dy)>;

/// Called after every accepted step and at every sample; return false to stop.
using OdeObserver = std::function<bool(double t, std::span<const std::complex<double>> y)>;

enum class StepMethod { FixedRk4, AdaptiveDp45 };

struct IntegratorOptions {
  StepMethod method = StepMethod::AdaptiveDp45;
  /// Fixed step; also the initial trial step for the adaptive method when > 0.
  double h = 1e-3;
  double rtol = 1e-10;
  double atol = 1e-12;
  /// Largest oscillation frequency of the system; fixed steps are capped so
  /// that h * omega_max <= 0.1.
  double omega_max = 0.0;
  /// Output times inside [t0, t1]. When empty, only t0 and t1 are recorded.
  std::vector<double> sample_times;
  std::size_t max_steps = 100'000'000;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<OdeVector> states;
  StepMethod method = StepMethod::AdaptiveDp45;
  double h = 0.0;  // effective fixed step, or last accepted adaptive step
  double rtol = 0.0;
  double atol = 0.0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  /// Set when the observer stopped the run; the last recorded state is the
  /// state at that time.
  std::optional<double> stopped_at;
};

/// Integrates from t0 to t1 >= t0. Sample times are hit exactly by
/// shortening steps. Throws std::runtime_error on adaptive step underflow
/// (h < 1e-14 * (t1 - t0)) or when max_steps is exceeded, naming the time.
Trajectory integrate(const OdeRhs& rhs, const OdeVector& y0, double t0, double t1, const IntegratorOptions& opts,
                     const OdeObserver& observer = {});

/// count >= 2 equally spaced times from t0 to t1 inclusive.
std::vector<double> uniform_samples(double t0, double t1, std::size_t count);

using OdeFunctional = std::function<double(double t, std::span<const std::complex<double>> y)>;

struct DriftRecord {
  std::string name;
  double initial = 0.0;
  double max_abs_drift = 0.0;
  /// max_abs_drift / |initial|; equals max_abs_drift when initial is 0.
  double max_rel_drift = 0.0;
};

std::vector<DriftRecord> drift_report(const Trajectory& traj,
                                      const std::vector<std::pair<std::string, OdeFunctional>>& functionals);

}  // namespace rescascade
