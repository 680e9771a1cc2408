#pragma once

// Independent brute-force reference implementations and seeded random
// generators for the unit and acceptance tests. Nothing here calls the
// library's enumeration code; only the value types are shared.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include "rescascade/resonance_lattice.hpp"

namespace oracle {

using rescascade::Frequency;
using C = std::complex<double>;
using i64 = long long;

inline i64 sq(const Frequency& n) { return static_cast<i64>(n.x) * n.x + static_cast<i64>(n.y) * n.y; }

inline i64 w4(const Frequency& a, const Frequency& b, const Frequency& c, const Frequency& d) {
  return sq(a) - sq(b) + sq(c) - sq(d);
}

inline bool admitted(i64 w, std::optional<i64> R) { return !R || (w <= *R && w >= -*R); }

struct Triple {
  Frequency n1, n2, n3;
  i64 omega;
  bool operator==(const Triple&) const = default;
};

/// Every ordered (n1, n2, n3) over the support cube.
inline std::vector<Triple> triples(const Frequency& target, const std::vector<Frequency>& support,
                                   std::optional<i64> R) {
  std::set<Frequency> s(support.begin(), support.end());
  std::vector<Triple> out;
  for (const auto& n1 : s) {
    for (const auto& n2 : s) {
      for (const auto& n3 : s) {
        if (n1.x - n2.x + n3.x != target.x || n1.y - n2.y + n3.y != target.y) continue;
        if (n1 == target || n3 == target) continue;
        const i64 w = w4(n1, n2, n3, target);
        if (admitted(w, R)) out.push_back({n1, n2, n3, w});
      }
    }
  }
  return out;
}

/// Literal transcription of da_n/dt = i(-a_n|a_n|^2 + sum a1 conj(a2) a3 e^{i w t}).
inline std::map<Frequency, C> rhs(const std::map<Frequency, C>& a, std::optional<i64> R, double t) {
  std::map<Frequency, C> out;
  for (const auto& [n, an] : a) {
    C sum = -an * std::norm(an);
    for (const auto& [n1, a1] : a) {
      for (const auto& [n2, a2] : a) {
        for (const auto& [n3, a3] : a) {
          if (n1.x - n2.x + n3.x != n.x || n1.y - n2.y + n3.y != n.y) continue;
          if (n1 == n || n3 == n) continue;
          const i64 w = w4(n1, n2, n3, n);
          if (!admitted(w, R)) continue;
          sum += a1 * std::conj(a2) * a3 * std::exp(C(0.0, static_cast<double>(w) * t));
        }
      }
    }
    out[n] = C(0.0, 1.0) * sum;
  }
  return out;
}

/// sum |n|^2|u|^2 + 1/2 sum over all zero-sum quadruples (four nested loops).
inline C hamiltonian(const std::map<Frequency, C>& u, std::optional<i64> R) {
  C quartic{};
  double kinetic = 0.0;
  for (const auto& [n, z] : u) kinetic += static_cast<double>(sq(n)) * std::norm(z);
  for (const auto& [n1, u1] : u) {
    for (const auto& [n2, u2] : u) {
      for (const auto& [n3, u3] : u) {
        for (const auto& [n4, u4] : u) {
          if (n1.x - n2.x + n3.x - n4.x != 0 || n1.y - n2.y + n3.y - n4.y != 0) continue;
          if (!admitted(w4(n1, n2, n3, n4), R)) continue;
          quartic += u1 * std::conj(u2) * u3 * std::conj(u4);
        }
      }
    }
  }
  return kinetic + 0.5 * quartic;
}

/// Rectangles as sorted vertex 4-sets, from all 4-subsets and all cyclic orders.
inline std::set<std::array<Frequency, 4>> rectangles(const std::vector<Frequency>& pts_in) {
  std::vector<Frequency> pts(pts_in);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::set<std::array<Frequency, 4>> out;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        for (std::size_t l = k + 1; l < n; ++l) {
          std::array<Frequency, 4> v{pts[i], pts[j], pts[k], pts[l]};
          std::array<int, 4> perm{0, 1, 2, 3};
          bool rect = false;
          do {
            const auto &a = v[perm[0]], &b = v[perm[1]], &c = v[perm[2]], &d = v[perm[3]];
            const bool para = a.x + c.x == b.x + d.x && a.y + c.y == b.y + d.y;
            const bool right = (a.x - b.x) * (c.x - b.x) + (a.y - b.y) * (c.y - b.y) == 0;
            rect = rect || (para && right);
          } while (!rect && std::next_permutation(perm.begin(), perm.end()));
          if (rect) out.insert(v);
        }
  return out;
}

/// True when s contains the fourth vertex of every admitted parallelogram
/// (n1 != n2, n3 != n2).
inline bool r_closed(const std::vector<Frequency>& s_in, std::optional<i64> R) {
  std::set<Frequency> s(s_in.begin(), s_in.end());
  for (const auto& a : s)
    for (const auto& b : s)
      for (const auto& c : s) {
        if (a == b || c == b) continue;
        const Frequency d{a.x - b.x + c.x, a.y - b.y + c.y};
        if (!s.count(d) && admitted(w4(a, b, c, d), R)) return false;
      }
  return true;
}

/// Number of connecting parallelograms: two vertices in one set, one in the other.
inline std::size_t connecting_count(const std::vector<Frequency>& s1, const std::vector<Frequency>& s2,
                                    std::optional<i64> R) {
  std::size_t count = 0;
  auto scan = [&](const std::vector<Frequency>& p, const std::vector<Frequency>& q) {
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = 0; j < p.size(); ++j) {
        if (i == j) continue;
        for (const auto& k : q) {
          const auto &a = p[i], &b = p[j];
          if (admitted(w4(a, b, k, Frequency{a.x - b.x + k.x, a.y - b.y + k.y}), R)) ++count;
          if (i < j && admitted(w4(a, k, b, Frequency{a.x - k.x + b.x, a.y - k.y + b.y}), R)) ++count;
        }
      }
  };
  scan(s1, s2);
  scan(s2, s1);
  return count;
}

/// Seeded generator producing platform-independent values.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  Frequency frequency(std::int64_t box) { return {range(-box, box), range(-box, box)}; }
  std::vector<Frequency> support(std::size_t max_count, std::int64_t box) {
    const auto count = static_cast<std::size_t>(range(1, static_cast<std::int64_t>(max_count)));
    std::set<Frequency> s;
    while (s.size() < count) s.insert(frequency(box));
    return {s.begin(), s.end()};
  }
  C complex(double scale) { return {scale * (2 * unit() - 1), scale * (2 * unit() - 1)}; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace oracle
