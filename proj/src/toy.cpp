#include "rescascade/toy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace rescascade {

void toy_rhs(std::span<const Complex> b, std::span<Complex> out) {
  const std::size_t P = b.size();
  if (out.size() != P) throw std::invalid_argument("toy_rhs output size mismatch");
  const Complex i_unit{0.0, 1.0};
  for (std::size_t j = 0; j < P; ++j) {
    const Complex prev = j == 0 ? Complex{} : b[j - 1];
    const Complex next = j + 1 == P ? Complex{} : b[j + 1];
    const Complex conj_b = std::conj(b[j]);
    out[j] = i_unit * (-b[j] * std::norm(b[j]) + 2.0 * next * next * conj_b + 2.0 * prev * prev * conj_b);
  }
}

ToyState toy_rhs(const ToyState& b) {
  ToyState out(b.size());
  toy_rhs(b, out);
  return out;
}

double toy_mass(const ToyState& b) {
  double m = 0.0;
  for (const auto& z : b) m += std::norm(z);
  return m;
}

ToyState scale_initial(const ToyState& b0, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("scaling factor must be positive");
  ToyState out(b0);
  for (auto& z : out) z /= lambda;
  return out;
}

SpectralState embed_toy(const GenerationalSet& g, const ToyState& b) {
  if (g.generation_count() != b.size()) {
    throw std::invalid_argument("toy state has " + std::to_string(b.size()) + " entries but the set has " +
                                std::to_string(g.generation_count()) + " generations");
  }
  SpectralState out;
  for (std::size_t j = 1; j <= b.size(); ++j) {
    for (const auto& n : g.generation(j)) out.set(n, b[j - 1]);
  }
  return out;
}

Trajectory integrate_toy(const ToyState& b0, double t1, const IntegratorOptions& opts, const OdeObserver& observer) {
  const OdeRhs f = [](std::span<const Complex> y, double, std::span<Complex> dy) { toy_rhs(y, dy); };
  return integrate(f, b0, 0.0, t1, opts, observer);
}

std::pair<std::size_t, std::size_t> cascade_endpoints(std::size_t P) {
  if (P >= 6) return {3, P - 2};
  return {1, P};
}

namespace {

/// Uniform double in [0, 1) from the top 53 bits; independent of the
/// standard library's distribution implementations.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::optional<CascadeOrbit> find_cascade_orbit(std::size_t P, double eps, double t_max, std::uint64_t seed,
                                               const CascadeSearchOptions& opts) {
  if (P < 1) throw std::invalid_argument("cascade search needs P >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
  if (!(t_max >= 0.0)) throw std::invalid_argument("t_max must be nonnegative");
  if (!(opts.sample_dt > 0.0)) throw std::invalid_argument("sample_dt must be positive");

  const auto [source, target] = cascade_endpoints(P);
  CascadeOrbit orbit;
  orbit.P = P;
  orbit.eps = eps;
  orbit.seed = seed;
  orbit.source = source;
  orbit.target = target;
  orbit.threshold_fraction = opts.target_fraction.value_or(1.0 - eps);

  std::mt19937_64 rng(seed);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  ToyState b0(P);
  if (P == 1) {
    b0[0] = std::polar(1.0, two_pi * unit(rng));
  } else {
    b0[source - 1] = std::polar(std::sqrt(1.0 - eps * eps), two_pi * unit(rng));
    std::vector<double> weights(P, 0.0);
    double total = 0.0;
    for (std::size_t j = 0; j < P; ++j) {
      if (j + 1 == source) continue;
      weights[j] = 1.0 - unit(rng);  // (0, 1]
      total += weights[j];
    }
    for (std::size_t j = 0; j < P; ++j) {
      if (j + 1 == source) continue;
      b0[j] = std::polar(eps * std::sqrt(weights[j] / total), two_pi * unit(rng));
    }
  }
  orbit.b0 = b0;

  const double m0 = toy_mass(b0);
  auto linf = [](std::span<const Complex> y) {
    double m = 0.0;
    for (const auto& z : y) m = std::max(m, std::abs(z));
    return m;
  };
  orbit.min_linf = orbit.max_linf = linf(b0);
  if (source == target) {
    orbit.target_share = std::norm(b0[target - 1]) / m0;
    return orbit;
  }

  IntegratorOptions io;
  io.method = StepMethod::AdaptiveDp45;
  io.rtol = opts.rtol;
  io.atol = opts.atol;
  io.h = std::min(opts.sample_dt, 1e-3);
  const auto count = static_cast<std::size_t>(std::ceil(t_max / opts.sample_dt)) + 1;
  io.sample_times = count >= 2 ? uniform_samples(0.0, t_max, count) : std::vector<double>{0.0};

  std::optional<double> hit;
  double share_at_hit = 0.0;
  double drift = 0.0, lo = orbit.min_linf, hi = orbit.max_linf;
  const auto observer = [&](double t, std::span<const Complex> y) {
    double m = 0.0;
    for (const auto& z : y) m += std::norm(z);
    drift = std::max(drift, std::abs(m - m0) / m0);
    const double l = linf(y);
    lo = std::min(lo, l);
    hi = std::max(hi, l);
    const double share = std::norm(y[target - 1]) / m;
    if (share >= orbit.threshold_fraction) {
      hit = t;
      share_at_hit = share;
      return false;
    }
    return true;
  };
  integrate_toy(b0, t_max, io, observer);
  if (!hit) return std::nullopt;
  orbit.T = *hit;
  orbit.target_share = share_at_hit;
  orbit.mass_drift = drift;
  orbit.min_linf = lo;
  orbit.max_linf = hi;
  return orbit;
}

std::optional<CascadeOrbit> search_cascade_orbit(std::size_t P, double eps, double t_max, std::uint64_t first_seed,
                                                 std::size_t count, const CascadeSearchOptions& opts) {
  for (std::size_t k = 0; k < count; ++k) {
    if (auto orbit = find_cascade_orbit(P, eps, t_max, first_seed + k, opts)) return orbit;
  }
  return std::nullopt;
}

}  // namespace rescascade
