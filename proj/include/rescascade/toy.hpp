#pragma once

// The P-dimensional chain obtained by collapsing the resonant system onto
// generation-constant data, and a shooting search for cascade orbits.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rescascade/frequency_sets.hpp"
#include "rescascade/ode.hpp"
#include "rescascade/spectral.hpp"

namespace rescascade {

/// (b_1, ..., b_P) with implicit zero boundary values b_0 = b_{P+1} = 0.
using ToyState = std::vector<Complex>;

/// db_j/dt = i(-b_j|b_j|^2 + 2 b_{j+1}^2 conj(b_j) + 2 b_{j-1}^2 conj(b_j)).
ToyState toy_rhs(const ToyState& b);
void toy_rhs(std::span<const Complex> b, std::span<Complex> out);

double toy_mass(const ToyState& b);

/// b0 / lambda; the orbit from it at time lambda^2 t is the original orbit
/// at time t divided by lambda. Throws std::invalid_argument unless lambda > 0.
ToyState scale_initial(const ToyState& b0, double lambda);

/// Amplitude b_j at every frequency of generation j.
/// Throws std::invalid_argument when the generation counts differ.
SpectralState embed_toy(const GenerationalSet& g, const ToyState& b);

/// Integrates the toy system with the given options.
Trajectory integrate_toy(const ToyState& b0, double t1, const IntegratorOptions& opts,
                         const OdeObserver& observer = {});

struct CascadeSearchOptions {
  /// Threshold |b_target|^2 >= fraction * mass; defaults to 1 - eps.
  std::optional<double> target_fraction;
  double sample_dt = 0.01;
  double rtol = 1e-12;
  double atol = 1e-14;
};

struct CascadeOrbit {
  std::size_t P = 0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  std::size_t source = 1;  // 1-based generation indices
  std::size_t target = 1;
  double threshold_fraction = 0.0;
  ToyState b0;
  double T = 0.0;
  double target_share = 0.0;  // |b_target(T)|^2 / mass
  double mass_drift = 0.0;    // max relative drift on [0, T]
  double min_linf = 0.0;      // min and max of max_j |b_j| on [0, T]
  double max_linf = 0.0;
};

/// (source, target) generations: (3, P-2) for P >= 6, else (1, P).
std::pair<std::size_t, std::size_t> cascade_endpoints(std::size_t P);

/// Seeded shooting: b_source = sqrt(1 - eps^2) e^{i phi}, the remaining mass
/// eps^2 spread over the other generations with random weights and phases.
/// Returns the first sample time T <= t_max at which the target share reaches
/// the threshold, or nullopt. P = 1 returns T = 0.
std::optional<CascadeOrbit> find_cascade_orbit(std::size_t P, double eps, double t_max, std::uint64_t seed,
                                               const CascadeSearchOptions& opts = {});

/// Tries seeds first_seed, first_seed + 1, ... (count of them) in order and
/// returns the first success.
std::optional<CascadeOrbit> search_cascade_orbit(std::size_t P, double eps, double t_max, std::uint64_t first_seed,
                                                 std::size_t count, const CascadeSearchOptions& opts = {});

}  // namespace rescascade
