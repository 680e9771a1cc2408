#include "rescascade/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace rescascade {

Complex SpectralState::get(const Frequency& n) const {
  const auto it = modes_.find(n);
  return it == modes_.end() ? Complex{} : it->second;
}

std::vector<Frequency> SpectralState::support() const {
  std::vector<Frequency> out;
  for (const auto& [n, a] : modes_) {
    if (a != Complex{}) out.push_back(n);
  }
  return out;
}

SystemSpec::SystemSpec(const ResonanceCutoff& cutoff, std::span<const Frequency> box)
    : cutoff_(cutoff), box_(canonical_set(box)) {
  if (box_.size() > std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument("box too large");
  std::map<std::int64_t, std::uint32_t> omega_index;
  term_start_.reserve(box_.size() + 1);
  term_start_.push_back(0);
  auto index = [this](const Frequency& n) { return static_cast<std::uint32_t>(*index_of(n)); };
  for (const auto& target : box_) {
    for (const auto& tr : enumerate_triples(target, box_, cutoff_)) {
      auto [it, inserted] = omega_index.try_emplace(tr.omega4, static_cast<std::uint32_t>(omegas_.size()));
      if (inserted) omegas_.push_back(tr.omega4);
      terms_.push_back({index(tr.n1), index(tr.n2), index(tr.n3), it->second});
      max_abs_omega_ = std::max(max_abs_omega_, tr.omega4 < 0 ? -tr.omega4 : tr.omega4);
    }
    term_start_.push_back(terms_.size());
  }
  if (max_abs_omega_ > (std::int64_t{1} << 53)) {
    throw std::overflow_error("retained omega4 values exceed exact double range");
  }
}

std::optional<std::size_t> SystemSpec::index_of(const Frequency& n) const {
  const auto it = std::lower_bound(box_.begin(), box_.end(), n);
  if (it == box_.end() || *it != n) return std::nullopt;
  return static_cast<std::size_t>(it - box_.begin());
}

std::size_t SystemSpec::triple_count() const { return terms_.size(); }

ComplexVector SystemSpec::flatten(const SpectralState& state) const {
  ComplexVector out(box_.size());
  for (const auto& [n, a] : state.modes()) {
    const auto i = index_of(n);
    if (!i) {
      if (a == Complex{}) continue;
      throw std::invalid_argument("state has support at " + n.str() + " outside the system box");
    }
    out[*i] = a;
  }
  return out;
}

SpectralState SystemSpec::unflatten(std::span<const Complex> values) const {
  if (values.size() != box_.size()) throw std::invalid_argument("flat vector does not match the box size");
  SpectralState s;
  for (std::size_t i = 0; i < box_.size(); ++i) s.set(box_[i], values[i]);
  return s;
}

void SystemSpec::rhs(std::span<const Complex> a, double t, std::span<Complex> out) const {
  if (a.size() != box_.size() || out.size() != box_.size()) {
    throw std::invalid_argument("flat vector does not match the box size");
  }
  ComplexVector phase(omegas_.size());
  for (std::size_t k = 0; k < omegas_.size(); ++k) {
    phase[k] = omegas_[k] == 0 ? Complex{1.0, 0.0} : std::polar(1.0, static_cast<double>(omegas_[k]) * t);
  }
  const Complex i_unit{0.0, 1.0};
  for (std::size_t n = 0; n < box_.size(); ++n) {
    Complex sum = -a[n] * std::norm(a[n]);
    for (std::size_t k = term_start_[n]; k < term_start_[n + 1]; ++k) {
      const Term& tm = terms_[k];
      sum += a[tm.i1] * std::conj(a[tm.i2]) * a[tm.i3] * phase[tm.phase];
    }
    out[n] = i_unit * sum;
  }
}

SpectralState SystemSpec::rhs(const SpectralState& state, double t) const {
  const auto a = flatten(state);
  ComplexVector d(a.size());
  rhs(a, t, d);
  return unflatten(d);
}

double mass(const SpectralState& state) {
  double m = 0.0;
  for (const auto& [n, a] : state.modes()) m += std::norm(a);
  return m;
}

SpectralState to_physical(const SpectralState& state, double t) {
  SpectralState out;
  for (const auto& [n, a] : state.modes()) {
    out.set(n, a * std::polar(1.0, static_cast<double>(norm2(n)) * t));
  }
  return out;
}

namespace {

/// Quartic sum over (n1, n2, n3) in the stored modes with n4 = n1 - n2 + n3
/// also stored and omega4 admitted. Returns (sum, sum of term moduli).
std::pair<Complex, double> quartic_sum(const SpectralState& u, const ResonanceCutoff& cutoff) {
  Complex sum{};
  double scale = 0.0;
  const auto& m = u.modes();
  for (const auto& [n1, u1] : m) {
    for (const auto& [n2, u2] : m) {
      for (const auto& [n3, u3] : m) {
        const Frequency n4 = n1 - n2 + n3;
        const auto it = m.find(n4);
        if (it == m.end()) continue;
        if (!cutoff.admits(omega4(n1, n2, n3, n4))) continue;
        const Complex term = u1 * std::conj(u2) * u3 * std::conj(it->second);
        sum += term;
        scale += std::abs(term);
      }
    }
  }
  return {sum, scale};
}

}  // namespace

double hamiltonian(const SpectralState& coeffs, const ResonanceCutoff& cutoff) {
  double kinetic = 0.0;
  for (const auto& [n, u] : coeffs.modes()) kinetic += static_cast<double>(norm2(n)) * std::norm(u);
  const auto [quartic, scale] = quartic_sum(coeffs, cutoff);
  if (std::abs(quartic.imag()) > 1e-12 * scale + std::numeric_limits<double>::min()) {
    throw std::logic_error("Hamiltonian quartic sum has imaginary part " + std::to_string(quartic.imag()));
  }
  return kinetic + 0.5 * quartic.real();
}

double resonant_quartic_form(const SpectralState& coeffs) {
  std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, Complex> groups;
  for (const auto& [n1, u1] : coeffs.modes()) {
    for (const auto& [n3, u3] : coeffs.modes()) {
      const Frequency n = n1 + n3;
      groups[{n.x, n.y, norm2(n1) + norm2(n3)}] += u1 * u3;
    }
  }
  double total = 0.0;
  for (const auto& [key, s] : groups) total += std::norm(s);
  return total;
}

double sobolev_norm(const SpectralState& state, double s) {
  double sum = 0.0;
  for (const auto& [n, a] : state.modes()) {
    sum += std::pow(1.0 + static_cast<double>(norm2(n)), s) * std::norm(a);
  }
  return std::sqrt(sum);
}

double l1_norm(const SpectralState& state, std::optional<std::span<const Frequency>> restrict_to) {
  double sum = 0.0;
  if (!restrict_to) {
    for (const auto& [n, a] : state.modes()) sum += std::abs(a);
    return sum;
  }
  for (const auto& n : canonical_set(*restrict_to)) sum += std::abs(state.get(n));
  return sum;
}

SpectralState galilean_shift(const SpectralState& coeffs, const Frequency& v, double t) {
  SpectralState out;
  const double global = static_cast<double>(norm2(v)) * t;
  for (const auto& [m, u] : coeffs.modes()) {
    out.set(m + v, u * std::polar(1.0, 2.0 * static_cast<double>(dot(m, v)) * t + global));
  }
  return out;
}

SpectralState paste(const SpectralState& a, const SpectralState& b) {
  SpectralState out = a;
  for (const auto& [n, z] : b.modes()) {
    const Complex existing = a.get(n);
    if (existing != Complex{} && z != Complex{}) {
      throw std::invalid_argument("states to be pasted overlap at " + n.str());
    }
    out.set(n, existing + z);
  }
  return out;
}

SpectralState restrict_state(const SpectralState& state, std::span<const Frequency> keep) {
  SpectralState out;
  for (const auto& n : canonical_set(keep)) {
    if (state.contains(n)) out.set(n, state.get(n));
  }
  return out;
}

}  // namespace rescascade
