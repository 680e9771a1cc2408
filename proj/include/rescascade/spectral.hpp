#pragma once

// Mode-amplitude states on Z^2 and the truncated cubic systems acting on them.

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "rescascade/resonance_lattice.hpp"

namespace rescascade {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Finitely supported map Frequency -> amplitude. Zero amplitudes may be
/// stored explicitly; they are not part of the support.
class SpectralState {
 public:
  SpectralState() = default;

  void set(const Frequency& n, Complex a) { modes_[n] = a; }
  /// 0 when n is not stored.
  Complex get(const Frequency& n) const;
  bool contains(const Frequency& n) const { return modes_.count(n) != 0; }

  const std::map<Frequency, Complex>& modes() const { return modes_; }
  /// Keys with nonzero amplitude, sorted.
  std::vector<Frequency> support() const;
  bool empty() const { return modes_.empty(); }

  friend bool operator==(const SpectralState&, const SpectralState&) = default;

 private:
  std::map<Frequency, Complex> modes_;
};

/// A cutoff together with the finite mode box the dynamics live on. The
/// interaction triples of every box mode are enumerated once, here.
class SystemSpec {
 public:
  SystemSpec(const ResonanceCutoff& cutoff, std::span<const Frequency> box);

  const ResonanceCutoff& cutoff() const { return cutoff_; }
  /// Sorted box; flat vectors use this order.
  const std::vector<Frequency>& box() const { return box_; }
  std::size_t dimension() const { return box_.size(); }
  /// Position of n in the box, if present.
  std::optional<std::size_t> index_of(const Frequency& n) const;
  /// Largest |omega4| among retained triples (0 for R = 0).
  std::int64_t max_abs_omega() const { return max_abs_omega_; }
  std::size_t triple_count() const;

  /// Flat box-ordered amplitudes. Throws std::invalid_argument when the
  /// state has support outside the box.
  ComplexVector flatten(const SpectralState& state) const;
  /// Every box mode, zeros included.
  SpectralState unflatten(std::span<const Complex> values) const;

  /// da_n/dt = i(-a_n|a_n|^2 + sum_{triples} a_{n1} conj(a_{n2}) a_{n3} e^{i omega4 t}).
  void rhs(std::span<const Complex> a, double t, std::span<Complex> out) const;
  SpectralState rhs(const SpectralState& state, double t) const;

 private:
  struct Term {
    std::uint32_t i1, i2, i3;
    std::uint32_t phase;  // index into omegas_
  };

  ResonanceCutoff cutoff_;
  std::vector<Frequency> box_;
  std::vector<std::int64_t> omegas_;    // distinct retained omega4 values
  std::vector<std::size_t> term_start_;  // CSR offsets into terms_, size box+1
  std::vector<Term> terms_;
  std::int64_t max_abs_omega_ = 0;
};

double mass(const SpectralState& state);

/// Physical coefficients a_n e^{i|n|^2 t}; the global gauge rotation is omitted.
SpectralState to_physical(const SpectralState& state, double t);

/// sum |n|^2 |u_n|^2 + 1/2 sum_{n1-n2+n3-n4=0, |omega4| admitted} u1 conj(u2) u3 conj(u4).
/// Throws std::logic_error if the quartic sum has a non-negligible imaginary part.
double hamiltonian(const SpectralState& coeffs, const ResonanceCutoff& cutoff);

/// sum_{n,k} |sum_{n1+n3=n, |n1|^2+|n3|^2=k} u_{n1} u_{n3}|^2, which equals
/// twice the quartic part of hamiltonian() at R = 0.
double resonant_quartic_form(const SpectralState& coeffs);

/// (sum <n>^{2s} |a_n|^2)^{1/2} with <n> = (1+|n|^2)^{1/2}.
double sobolev_norm(const SpectralState& state, double s);

/// sum |a_n| over the state, or over the modes listed in `restrict_to`.
double l1_norm(const SpectralState& state, std::optional<std::span<const Frequency>> restrict_to = std::nullopt);

/// u_new(m + v) = u(m) e^{i(2 m.v + |v|^2) t}.
SpectralState galilean_shift(const SpectralState& coeffs, const Frequency& v, double t);

/// Pointwise sum of states with disjoint supports. Throws
/// std::invalid_argument if some frequency is nonzero in both.
SpectralState paste(const SpectralState& a, const SpectralState& b);

/// Keeps only the modes listed in `keep`.
SpectralState restrict_state(const SpectralState& state, std::span<const Frequency> keep);

}  // namespace rescascade
