#include "rescascade/resonance_lattice.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

namespace rescascade {

namespace {

using Wide = __int128;

constexpr std::int64_t kMaxWideInput = std::int64_t{1} << 62;

Wide wide_norm2(const Frequency& n) {
  if (n.x > kMaxWideInput || n.x < -kMaxWideInput || n.y > kMaxWideInput ||
      n.y < -kMaxWideInput) {
    throw std::overflow_error("frequency " + n.str() + " out of supported range");
  }
  return Wide{n.x} * n.x + Wide{n.y} * n.y;
}

std::int64_t narrow(Wide v, const char* what) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw std::overflow_error(std::string(what) + " exceeds 64-bit range");
  }
  return static_cast<std::int64_t>(v);
}

bool contains(std::span<const Frequency> sorted, const Frequency& n) {
  return std::binary_search(sorted.begin(), sorted.end(), n);
}

}  // namespace

std::string Frequency::str() const {
  return "(" + std::to_string(x) + "," + std::to_string(y) + ")";
}

std::int64_t norm2(const Frequency& n) { return narrow(wide_norm2(n), "|n|^2"); }

std::int64_t dot(const Frequency& a, const Frequency& b) {
  return narrow(Wide{a.x} * b.x + Wide{a.y} * b.y, "dot product");
}

ResonanceCutoff ResonanceCutoff::bounded(std::int64_t r) {
  if (r < 0) throw std::invalid_argument("resonance cutoff must be nonnegative");
  ResonanceCutoff c;
  c.value_ = r;
  return c;
}

bool ResonanceCutoff::admits(std::int64_t omega) const {
  if (!value_) return true;
  // |omega| <= R without overflowing on INT64_MIN.
  return omega <= *value_ && omega >= -*value_;
}

std::string ResonanceCutoff::str() const {
  return value_ ? std::to_string(*value_) : std::string("inf");
}

std::int64_t omega4(const Frequency& n1, const Frequency& n2, const Frequency& n3,
                    const Frequency& n4) {
  return narrow(wide_norm2(n1) - wide_norm2(n2) + wide_norm2(n3) - wide_norm2(n4), "omega4");
}

Frequency complete_parallelogram(const Frequency& n1, const Frequency& n2, const Frequency& n3) {
  return n1 - n2 + n3;
}

std::int64_t rectangle_defect(const Frequency& n1, const Frequency& n2, const Frequency& n3) {
  return omega4(n1, n2, n3, complete_parallelogram(n1, n2, n3));
}

std::vector<Frequency> canonical_set(std::span<const Frequency> s) {
  std::vector<Frequency> out(s.begin(), s.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<InteractionTriple> enumerate_triples(const Frequency& target,
                                                 std::span<const Frequency> support,
                                                 const ResonanceCutoff& cutoff) {
  const auto sorted = canonical_set(support);
  std::vector<InteractionTriple> out;
  for (const auto& n1 : sorted) {
    if (n1 == target) continue;
    for (const auto& n3 : sorted) {
      if (n3 == target) continue;
      const Frequency n2 = n1 + n3 - target;
      if (!contains(sorted, n2)) continue;
      const auto w = omega4(n1, n2, n3, target);
      if (cutoff.admits(w)) out.push_back({n1, n2, n3, target, w});
    }
  }
  return out;
}

std::vector<Rectangle> find_rectangles(std::span<const Frequency> s) {
  const auto pts = canonical_set(s);
  // A parallelogram is a rectangle iff its diagonals have equal length, so
  // group point pairs by (midpoint*2, squared length).
  std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, std::vector<std::pair<Frequency, Frequency>>>
      diagonals;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Frequency sum = pts[i] + pts[j];
      diagonals[{sum.x, sum.y, norm2(pts[i] - pts[j])}].emplace_back(pts[i], pts[j]);
    }
  }
  std::vector<Rectangle> out;
  for (const auto& [key, pairs] : diagonals) {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      for (std::size_t j = i + 1; j < pairs.size(); ++j) {
        // Distinct pairs sharing a midpoint are disjoint.
        auto [a, c] = pairs[i];
        auto [b, d] = pairs[j];
        std::array<Frequency, 4> v{a, c, b, d};
        const auto lo = *std::min_element(v.begin(), v.end());
        if (lo == b || lo == d) {
          std::swap(a, b);
          std::swap(c, d);
        }
        if (lo == c) std::swap(a, c);
        if (d < b) std::swap(b, d);
        out.push_back({a, b, c, d});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<ParallelogramWitness> check_r_closure(std::span<const Frequency> s,
                                                    const ResonanceCutoff& cutoff) {
  const auto pts = canonical_set(s);
  for (const auto& n1 : pts) {
    for (const auto& n2 : pts) {
      if (n2 == n1) continue;
      for (const auto& n3 : pts) {
        if (n3 == n2) continue;
        const Frequency n4 = complete_parallelogram(n1, n2, n3);
        if (contains(pts, n4)) continue;
        const auto w = omega4(n1, n2, n3, n4);
        if (cutoff.admits(w)) return ParallelogramWitness{n1, n2, n3, n4, w};
      }
    }
  }
  return std::nullopt;
}

namespace {

void scan_connecting(const std::vector<Frequency>& pairs_from, const std::vector<Frequency>& apex_from,
                     const ResonanceCutoff& cutoff, std::vector<ParallelogramWitness>& out) {
  for (std::size_t i = 0; i < pairs_from.size(); ++i) {
    for (std::size_t j = 0; j < pairs_from.size(); ++j) {
      if (i == j) continue;
      const auto& n1 = pairs_from[i];
      const auto& n2 = pairs_from[j];
      for (const auto& k : apex_from) {
        // n2 opposite the fourth vertex.
        {
          const Frequency n = n1 - n2 + k;
          const auto w = omega4(n1, n2, k, n);
          if (cutoff.admits(w)) out.push_back({n1, n2, k, n, w});
        }
        // k opposite the fourth vertex; symmetric in (n1, n2), so once per pair.
        if (i < j) {
          const Frequency n = n1 - k + n2;
          const auto w = omega4(n1, k, n2, n);
          if (cutoff.admits(w)) out.push_back({n1, k, n2, n, w});
        }
      }
    }
  }
}

}  // namespace

std::vector<ParallelogramWitness> find_connecting_parallelograms(std::span<const Frequency> s1,
                                                                 std::span<const Frequency> s2,
                                                                 const ResonanceCutoff& cutoff) {
  const auto a = canonical_set(s1);
  const auto b = canonical_set(s2);
  for (const auto& n : a) {
    if (contains(b, n)) {
      throw std::invalid_argument("sets to be pasted share the frequency " + n.str());
    }
  }
  std::vector<ParallelogramWitness> out;
  scan_connecting(a, b, cutoff, out);
  scan_connecting(b, a, cutoff, out);
  return out;
}

}  // namespace rescascade
