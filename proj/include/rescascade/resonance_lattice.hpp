#pragma once

// Exact integer geometry of four-wave interactions on Z^2.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rescascade {

/// A lattice frequency n in Z^2.
struct Frequency {
  std::int64_t x = 0;
  std::int64_t y = 0;

  friend constexpr auto operator<=>(const Frequency&, const Frequency&) = default;

  constexpr Frequency operator+(const Frequency& o) const { return {x + o.x, y + o.y}; }
  constexpr Frequency operator-(const Frequency& o) const { return {x - o.x, y - o.y}; }
  constexpr Frequency operator-() const { return {-x, -y}; }

  std::string str() const;
};

/// Largest coordinate magnitude accepted by the checked arithmetic below.
inline constexpr std::int64_t kMaxCoordinate = std::int64_t{1} << 30;

/// |n|^2, exact. Throws std::overflow_error outside the supported range.
std::int64_t norm2(const Frequency& n);

std::int64_t dot(const Frequency& a, const Frequency& b);

/// The truncation level R of the nonlinearity: either a nonnegative integer
/// or unbounded (the full polynomial cubic).
class ResonanceCutoff {
 public:
  static ResonanceCutoff unbounded() { return ResonanceCutoff{}; }
  static ResonanceCutoff bounded(std::int64_t r);

  bool is_unbounded() const { return !value_; }
  /// Only meaningful when bounded.
  std::int64_t value() const { return value_.value_or(-1); }
  bool admits(std::int64_t omega) const;

  std::string str() const;

  friend bool operator==(const ResonanceCutoff&, const ResonanceCutoff&) = default;

 private:
  ResonanceCutoff() = default;
  std::optional<std::int64_t> value_;
};

/// |n1|^2 - |n2|^2 + |n3|^2 - |n4|^2. Throws std::overflow_error if the
/// result does not fit in 64 bits.
std::int64_t omega4(const Frequency& n1, const Frequency& n2, const Frequency& n3,
                    const Frequency& n4);

/// Fourth vertex n1 - n2 + n3 of the parallelogram with n2 opposite to it.
Frequency complete_parallelogram(const Frequency& n1, const Frequency& n2, const Frequency& n3);

/// omega4(n1, n2, n3, n1 - n2 + n3). Zero iff the parallelogram is a
/// (possibly degenerate) rectangle.
std::int64_t rectangle_defect(const Frequency& n1, const Frequency& n2, const Frequency& n3);

struct InteractionTriple {
  Frequency n1, n2, n3;
  Frequency target;
  std::int64_t omega4 = 0;

  friend bool operator==(const InteractionTriple&, const InteractionTriple&) = default;
};

/// Sorted, duplicate-free copy of a frequency list.
std::vector<Frequency> canonical_set(std::span<const Frequency> s);

/// All ordered (n1, n2, n3) in support^3 with n1 - n2 + n3 = target,
/// n1 != target, n3 != target and |omega4| admitted by the cutoff.
/// Ordered lexicographically by (n1, n3).
std::vector<InteractionTriple> enumerate_triples(const Frequency& target,
                                                 std::span<const Frequency> support,
                                                 const ResonanceCutoff& cutoff);

/// Cyclic vertex order (a, b, c, d): a and c are opposite, a is the smallest
/// vertex and b < d.
using Rectangle = std::array<Frequency, 4>;

/// Every rectangle with four distinct vertices in s, each reported once,
/// sorted.
std::vector<Rectangle> find_rectangles(std::span<const Frequency> s);

/// A parallelogram (n1, n2, n3, fourth) with n2 opposite the fourth vertex.
struct ParallelogramWitness {
  Frequency n1, n2, n3;
  Frequency fourth;
  std::int64_t omega4 = 0;

  friend bool operator==(const ParallelogramWitness&, const ParallelogramWitness&) = default;
};

/// First triple (lexicographic scan over s^3, n1 != n2 != n3) whose fourth
/// vertex is missing from s while |omega4| is admitted by the cutoff.
/// Collapsed parallelograms (n1 == n3) are included. nullopt means closed.
std::optional<ParallelogramWitness> check_r_closure(std::span<const Frequency> s,
                                                    const ResonanceCutoff& cutoff);

/// Parallelograms with two vertices in one set and one in the other whose
/// |omega4| is admitted by the cutoff (both orientations, both directions).
/// Empty result means the sets can be pasted. Throws std::invalid_argument if
/// the sets intersect.
std::vector<ParallelogramWitness> find_connecting_parallelograms(std::span<const Frequency> s1,
                                                                 std::span<const Frequency> s2,
                                                                 const ResonanceCutoff& cutoff);

}  // namespace rescascade
