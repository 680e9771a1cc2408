#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "rescascade/frequency_sets.hpp"
#include "rescascade/ode.hpp"
#include "rescascade/spectral.hpp"

using namespace rescascade;

namespace {

using C = std::complex<double>;
const auto R0 = ResonanceCutoff::bounded(0);

std::map<Frequency, C> as_map(const SpectralState& s) { return {s.modes().begin(), s.modes().end()}; }

SpectralState random_state(oracle::Rng& rng, const std::vector<Frequency>& support, double scale) {
  SpectralState s;
  for (const auto& n : support) s.set(n, rng.complex(scale));
  return s;
}

double max_diff(const SpectralState& a, const SpectralState& b) {
  double d = 0.0;
  for (const auto& [n, z] : a.modes()) d = std::max(d, std::abs(z - b.get(n)));
  for (const auto& [n, z] : b.modes()) d = std::max(d, std::abs(z - a.get(n)));
  return d;
}

std::vector<Frequency> square_box(std::int64_t m) {
  std::vector<Frequency> box;
  for (std::int64_t x = -m; x <= m; ++x)
    for (std::int64_t y = -m; y <= m; ++y) box.push_back({x, y});
  return box;
}

}  // namespace

TEST_CASE("SpectralState basics") {
  SpectralState s;
  CHECK(s.empty());
  s.set({1, 2}, {0, 0});
  s.set({3, 4}, {1, 0});
  CHECK(s.contains({1, 2}));
  CHECK(s.support() == std::vector<Frequency>{{3, 4}});
  CHECK(s.get({9, 9}) == C{});
}

TEST_CASE("rhs: single mode keeps only the self term") {
  const std::vector<Frequency> box{{0, 0}, {1, 0}, {2, 0}, {1, 1}};
  const SystemSpec spec(ResonanceCutoff::unbounded(), box);
  SpectralState s;
  const C A{0.6, -0.8};
  s.set({1, 0}, A);
  const auto d = spec.rhs(s, 0.37);
  CHECK(std::abs(d.get({1, 0}) - C(0, -1) * A * std::norm(A)) < 1e-15);
  for (const auto& n : box)
    if (n != Frequency{1, 0}) CHECK(d.get(n) == C{});
}

TEST_CASE("rhs: collinear three-mode state against the literal formula") {
  const std::vector<Frequency> box{{0, 0}, {1, 0}, {2, 0}};
  SpectralState s;
  for (const auto& n : box) s.set(n, {1, 0});
  const SystemSpec spec(ResonanceCutoff::unbounded(), box);
  const auto lib = spec.rhs(s, 0.0);
  const auto ref = oracle::rhs(as_map(s), std::nullopt, 0.0);
  for (const auto& n : box) CHECK(std::abs(lib.get(n) - ref.at(n)) < 1e-14);
}

TEST_CASE("rhs agrees with the literal formula on random boxes") {
  oracle::Rng rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const auto box = rng.support(12, 3);
    const auto state = random_state(rng, box, 1.0);
    const double t = rng.unit() * 5;
    for (const std::optional<oracle::i64> R : {std::optional<oracle::i64>{0}, {2}, {}}) {
      const auto cutoff = R ? ResonanceCutoff::bounded(*R) : ResonanceCutoff::unbounded();
      const SystemSpec spec(cutoff, box);
      const auto lib = spec.rhs(state, t);
      const auto ref = oracle::rhs(as_map(state), R, t);
      for (const auto& n : box) CHECK(std::abs(lib.get(n) - ref.at(n)) < 1e-12);
    }
  }
}

TEST_CASE("rhs: R = 0 is autonomous") {
  const auto g = seed_family_p2();
  const SystemSpec spec(R0, g.support());
  SpectralState s;
  for (const auto& n : g.support()) s.set(n, {0.5, 0.25});
  CHECK(max_diff(spec.rhs(s, 0.0), spec.rhs(s, 123.4)) == 0.0);
  CHECK(spec.max_abs_omega() == 0);
}

TEST_CASE("flatten rejects support outside the box") {
  const std::vector<Frequency> box{{0, 0}};
  const SystemSpec spec(R0, box);
  SpectralState s;
  s.set({1, 0}, {1, 0});
  CHECK_THROWS_AS(spec.flatten(s), std::invalid_argument);
  s.set({1, 0}, {0, 0});
  CHECK_NOTHROW(spec.flatten(s));
  CHECK(spec.index_of({0, 0}) == 0u);
  CHECK_FALSE(spec.index_of({5, 5}).has_value());
}

TEST_CASE("mass and to_physical") {
  CHECK(mass(SpectralState{}) == 0.0);
  SpectralState one;
  one.set({0, 0}, {0, 2});
  CHECK(mass(one) == 4.0);
  SpectralState quarter;
  for (const auto& n : seed_family_p2().support()) quarter.set(n, {0.5, 0});
  CHECK(mass(quarter) == 1.0);

  SpectralState plane;
  plane.set({1, 0}, {1, 0});
  CHECK(to_physical(plane, 0.0) == plane);
  CHECK(std::abs(to_physical(plane, std::numbers::pi).get({1, 0}) - C(-1, 0)) < 1e-15);

  oracle::Rng rng(2);
  const auto s = random_state(rng, rng.support(10, 5), 1.0);
  CHECK(mass(to_physical(s, 2.7)) == doctest::Approx(mass(s)).epsilon(1e-14));
}

TEST_CASE("hamiltonian: examples") {
  SpectralState plane;
  plane.set({1, 0}, {1, 0});
  CHECK(hamiltonian(plane, R0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(hamiltonian(plane, ResonanceCutoff::unbounded()) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(hamiltonian(SpectralState{}, R0) == 0.0);

  SpectralState two;
  two.set({1, 0}, {1, 0});
  two.set({-1, 0}, {1, 0});
  const C ref = oracle::hamiltonian(as_map(two), 0);
  CHECK(std::abs(ref.imag()) < 1e-15);
  CHECK(hamiltonian(two, R0) == doctest::Approx(ref.real()).epsilon(1e-14));
}

TEST_CASE("hamiltonian agrees with the four-loop sum on random states") {
  oracle::Rng rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    const auto state = random_state(rng, rng.support(9, 3), 1.0);
    for (const std::optional<oracle::i64> R : {std::optional<oracle::i64>{0}, {3}, {}}) {
      const auto cutoff = R ? ResonanceCutoff::bounded(*R) : ResonanceCutoff::unbounded();
      const C ref = oracle::hamiltonian(as_map(state), R);
      CHECK(hamiltonian(state, cutoff) == doctest::Approx(ref.real()).epsilon(1e-12));
    }
  }
}

TEST_CASE("resonant quartic form is twice the R = 0 quartic term") {
  SpectralState plane;
  plane.set({1, 0}, {1, 0});
  CHECK(resonant_quartic_form(plane) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(resonant_quartic_form(SpectralState{}) == 0.0);

  oracle::Rng rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const auto state = random_state(rng, rng.support(5, 3), 1.0);
    double kinetic = 0.0;
    for (const auto& [n, z] : state.modes()) kinetic += static_cast<double>(oracle::sq(n)) * std::norm(z);
    const double quartic_half = oracle::hamiltonian(as_map(state), 0).real() - kinetic;
    CHECK(resonant_quartic_form(state) == doctest::Approx(2.0 * quartic_half).epsilon(1e-12));
  }
}

TEST_CASE("sobolev and l1 norms") {
  SpectralState origin;
  origin.set({0, 0}, {1, 0});
  CHECK(sobolev_norm(origin, 3.3) == 1.0);
  SpectralState far;
  far.set({3, 4}, {2, 0});
  CHECK(sobolev_norm(far, 1.0) == doctest::Approx(2.0 * std::sqrt(26.0)).epsilon(1e-15));

  oracle::Rng rng(3);
  const auto s = random_state(rng, rng.support(10, 6), 1.0);
  CHECK(sobolev_norm(s, 0.0) == doctest::Approx(std::sqrt(mass(s))).epsilon(1e-14));

  CHECK(l1_norm(SpectralState{}) == 0.0);
  SpectralState z;
  z.set({1, 1}, {3, -4});
  CHECK(l1_norm(z) == doctest::Approx(5.0).epsilon(1e-15));
  const std::vector<Frequency> elsewhere{{0, 0}};
  CHECK(l1_norm(z, elsewhere) == 0.0);
}

TEST_CASE("galilean_shift") {
  oracle::Rng rng(4);
  const auto s = random_state(rng, rng.support(8, 4), 1.0);
  CHECK(max_diff(galilean_shift(s, {0, 0}, 1.3), s) == 0.0);

  SpectralState plane;
  plane.set({2, -1}, {0.3, 0.4});
  const auto moved = galilean_shift(plane, {1, 5}, 0.7);
  CHECK(moved.support() == std::vector<Frequency>{{3, 4}});
  CHECK(std::abs(moved.get({3, 4})) == doctest::Approx(0.5).epsilon(1e-15));
  // Phase 2 m.v + |v|^2 = 2(2 - 5) + 26 = 20 per unit time.
  CHECK(std::abs(moved.get({3, 4}) - C(0.3, 0.4) * std::polar(1.0, 20 * 0.7)) < 1e-14);
  CHECK(mass(galilean_shift(s, {-3, 2}, 9.1)) == doctest::Approx(mass(s)).epsilon(1e-14));
}

TEST_CASE("paste and restrict") {
  SpectralState a, b;
  a.set({0, 0}, {1, 0});
  b.set({5, 5}, {0, 2});
  const auto p = paste(a, b);
  CHECK(p.support() == std::vector<Frequency>{{0, 0}, {5, 5}});
  CHECK(paste(a, SpectralState{}) == a);
  CHECK(mass(p) == mass(a) + mass(b));
  CHECK_THROWS_AS(paste(a, a), std::invalid_argument);
  SpectralState zero_at_origin;
  zero_at_origin.set({0, 0}, {0, 0});
  CHECK(paste(a, zero_at_origin).get({0, 0}) == C(1, 0));

  const std::vector<Frequency> keep{{5, 5}};
  CHECK(restrict_state(p, keep) == b);
}

TEST_CASE("mass derivative vanishes for every cutoff") {
  oracle::Rng rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    const auto box = rng.support(15, 4);
    const auto state = random_state(rng, box, 1.0);
    const double t = 10 * rng.unit();
    for (const auto& cutoff : {R0, ResonanceCutoff::bounded(5), ResonanceCutoff::unbounded()}) {
      const SystemSpec spec(cutoff, box);
      const auto d = spec.rhs(state, t);
      double inner = 0.0;
      for (const auto& n : box) inner += std::real(std::conj(state.get(n)) * d.get(n));
      CHECK(std::abs(inner) / mass(state) < 1e-12);
    }
  }
}

TEST_CASE("rhs vanishes off an R-closed support") {
  const auto g = seed_family_p2();
  const auto box = square_box(2);
  const SystemSpec spec(ResonanceCutoff::bounded(0), box);
  oracle::Rng rng(6);
  const auto state = random_state(rng, g.support(), 1.0);
  const auto d = spec.rhs(state, 0.4);
  for (const auto& n : box)
    if (!g.generation_of(n)) CHECK(d.get(n) == C{});
}

TEST_CASE("conservation on [-2,2]^2 at R = 2") {
  const auto box = square_box(2);
  const auto cutoff = ResonanceCutoff::bounded(2);
  const SystemSpec spec(cutoff, box);
  oracle::Rng rng(7);
  const auto init = random_state(rng, box, 0.3);
  IntegratorOptions io;
  io.rtol = 1e-10;
  io.atol = 1e-13;
  io.sample_times = uniform_samples(0.0, 10.0, 51);
  const OdeRhs f = [&spec](std::span<const C> y, double t, std::span<C> dy) { spec.rhs(y, t, dy); };
  const auto traj = integrate(f, spec.flatten(init), 0.0, 10.0, io);
  const auto drift = drift_report(
      traj, {{"mass", [&](double, std::span<const C> y) { return mass(spec.unflatten(y)); }},
             {"H", [&](double t, std::span<const C> y) { return hamiltonian(to_physical(spec.unflatten(y), t), cutoff); }}});
  CHECK(drift[0].max_rel_drift < 1e-8);
  CHECK(drift[1].max_rel_drift < 1e-6);
}

TEST_CASE("pasting: rhs is additive across separated sets") {
  const std::vector<Frequency> s{{0, 0}};
  const auto placed = separate_from(seed_family_p2(), s, 1, 64, 8);
  REQUIRE(placed);
  const auto lam = placed->set.support();
  auto joint = lam;
  joint.push_back({0, 0});
  const auto cutoff = ResonanceCutoff::bounded(1);
  const SystemSpec joint_spec(cutoff, joint), lam_spec(cutoff, lam), s_spec(cutoff, s);
  oracle::Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_state(rng, lam, 1.0);
    const auto b = random_state(rng, s, 1.0);
    const double t = 3 * rng.unit();
    const auto together = joint_spec.rhs(paste(a, b), t);
    const auto apart = paste(lam_spec.rhs(a, t), s_spec.rhs(b, t));
    CHECK(max_diff(together, apart) == 0.0);
  }
}

TEST_CASE("generation-constant data stays generation-constant at R = 0") {
  const auto g = fixtures::three_generation_set();
  const SystemSpec spec(R0, g.support());
  SpectralState init;
  const C b[3] = {{0.9, 0.1}, {0.2, -0.3}, {0.05, 0.1}};
  for (std::size_t j = 1; j <= 3; ++j)
    for (const auto& n : g.generation(j)) init.set(n, b[j - 1]);
  IntegratorOptions io;
  io.sample_times = uniform_samples(0.0, 10.0, 101);
  const OdeRhs f = [&spec](std::span<const C> y, double t, std::span<C> dy) { spec.rhs(y, t, dy); };
  const auto traj = integrate(f, spec.flatten(init), 0.0, 10.0, io);
  double spread = 0.0;
  for (const auto& y : traj.states) {
    const auto st = spec.unflatten(y);
    for (std::size_t j = 1; j <= 3; ++j)
      for (const auto& n : g.generation(j)) spread = std::max(spread, std::abs(st.get(n) - st.get(g.generation(j)[0])));
  }
  CHECK(spread < 1e-9);
}
