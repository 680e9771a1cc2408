#include "rescascade/frequency_sets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace rescascade {

GenerationalSet::GenerationalSet(std::vector<std::vector<Frequency>> generations)
    : generations_(std::move(generations)) {
  if (generations_.empty()) throw std::invalid_argument("a generational set needs at least one generation");
  std::set<Frequency> seen;
  for (auto& gen : generations_) {
    std::sort(gen.begin(), gen.end());
    for (const auto& n : gen) {
      if (!seen.insert(n).second) {
        throw std::invalid_argument("frequency " + n.str() + " appears more than once in the generational set");
      }
    }
  }
}

const std::vector<Frequency>& GenerationalSet::generation(std::size_t j) const {
  if (j == 0 || j > generations_.size()) {
    throw std::out_of_range("generation index " + std::to_string(j) + " out of range");
  }
  return generations_[j - 1];
}

std::vector<Frequency> GenerationalSet::support() const {
  std::vector<Frequency> all;
  for (const auto& gen : generations_) all.insert(all.end(), gen.begin(), gen.end());
  std::sort(all.begin(), all.end());
  return all;
}

std::size_t GenerationalSet::size() const {
  std::size_t n = 0;
  for (const auto& gen : generations_) n += gen.size();
  return n;
}

std::size_t GenerationalSet::generation_of(const Frequency& n) const {
  for (std::size_t j = 0; j < generations_.size(); ++j) {
    if (std::binary_search(generations_[j].begin(), generations_[j].end(), n)) return j + 1;
  }
  return 0;
}

namespace {

bool is_rectangle(const Frequency& p1, const Frequency& p2, const Frequency& c1, const Frequency& c2) {
  return p1 + p2 == c1 + c2 && norm2(p1 - p2) == norm2(c1 - c2);
}

}  // namespace

std::vector<NuclearFamily> find_nuclear_families(const GenerationalSet& g) {
  std::vector<NuclearFamily> out;
  for (std::size_t j = 1; j < g.generation_count(); ++j) {
    const auto& parents = g.generation(j);
    const auto& children = g.generation(j + 1);
    for (std::size_t a = 0; a < parents.size(); ++a) {
      for (std::size_t b = a + 1; b < parents.size(); ++b) {
        for (std::size_t c = 0; c < children.size(); ++c) {
          for (std::size_t d = c + 1; d < children.size(); ++d) {
            if (is_rectangle(parents[a], parents[b], children[c], children[d])) {
              out.push_back({parents[a], parents[b], children[c], children[d], j});
            }
          }
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const NuclearFamily& x, const NuclearFamily& y) {
    return std::tie(x.generation, x.parent1, x.parent2, x.child1, x.child2) <
           std::tie(y.generation, y.parent1, y.parent2, y.child1, y.child2);
  });
  return out;
}

std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
  }
  return "unknown";
}

bool PropertyReport::all_pass() const {
  for (const auto& [key, check] : entries()) {
    if (!check->passed()) return false;
  }
  return true;
}

std::vector<std::pair<std::string_view, const PropertyCheck*>> PropertyReport::entries() const {
  return {{"r_closure", &r_closure},
          {"spouse_children", &spouse_children},
          {"parents_siblings", &parents_siblings},
          {"non_degeneracy", &non_degeneracy},
          {"faithfulness", &faithfulness},
          {"rectangular_structure", &rectangular_structure},
          {"no_zero_rectangle", &no_zero_rectangle},
          {"pasting", &pasting}};
}

std::vector<std::string> PropertyReport::failures() const {
  std::vector<std::string> out;
  for (const auto& [key, check] : entries()) {
    if (!check->passed()) out.emplace_back(key);
  }
  return out;
}

namespace {

PropertyCheck pass(std::string detail = {}) { return {CheckStatus::Pass, {}, std::move(detail)}; }

PropertyCheck fail(std::vector<Frequency> witness, std::string detail) {
  return {CheckStatus::Fail, std::move(witness), std::move(detail)};
}

PropertyCheck from_parallelogram(const ParallelogramWitness& w, const std::string& what) {
  return fail({w.n1, w.n2, w.n3, w.fourth}, what + " (omega4 = " + std::to_string(w.omega4) + ")");
}

PropertyCheck check_membership(const GenerationalSet& g, const std::vector<NuclearFamily>& families,
                               bool as_parent) {
  const std::size_t P = g.generation_count();
  const std::size_t first = as_parent ? 1 : 2;
  const std::size_t last = as_parent ? P - 1 : P;
  for (std::size_t j = first; j <= last; ++j) {
    for (const auto& n : g.generation(j)) {
      std::size_t count = 0;
      std::vector<Frequency> witness{n};
      for (const auto& f : families) {
        const bool hit = as_parent ? (f.generation == j && (f.parent1 == n || f.parent2 == n))
                                   : (f.generation + 1 == j && (f.child1 == n || f.child2 == n));
        if (!hit) continue;
        ++count;
        witness.insert(witness.end(), {f.parent1, f.child1, f.parent2, f.child2});
      }
      if (count != 1) {
        return fail(std::move(witness), n.str() + (as_parent ? " is a parent in " : " is a child in ") +
                                            std::to_string(count) + " nuclear families");
      }
    }
  }
  return pass();
}

PropertyCheck check_non_degeneracy(const GenerationalSet& g, const std::vector<NuclearFamily>& families) {
  const std::size_t P = g.generation_count();
  if (P < 3) return pass("vacuous for fewer than three generations");
  for (std::size_t j = 2; j < P; ++j) {
    for (const auto& n : g.generation(j)) {
      std::optional<Frequency> spouse, sibling;
      for (const auto& f : families) {
        if (!spouse && f.generation == j && (f.parent1 == n || f.parent2 == n)) {
          spouse = f.parent1 == n ? f.parent2 : f.parent1;
        }
        if (!sibling && f.generation + 1 == j && (f.child1 == n || f.child2 == n)) {
          sibling = f.child1 == n ? f.child2 : f.child1;
        }
      }
      if (spouse && sibling && *spouse == *sibling) {
        return fail({n, *spouse}, "spouse of " + n.str() + " is also its sibling " + spouse->str());
      }
    }
  }
  return pass();
}

PropertyCheck check_faithfulness(const std::vector<Frequency>& support,
                                 const std::vector<NuclearFamily>& families) {
  std::set<Rectangle> family_rects;
  for (const auto& f : families) {
    const std::array<Frequency, 4> pts{f.parent1, f.child1, f.parent2, f.child2};
    for (const auto& r : find_rectangles(pts)) family_rects.insert(r);
  }
  for (const auto& r : find_rectangles(support)) {
    if (!family_rects.count(r)) {
      return fail({r[0], r[1], r[2], r[3]}, "rectangle outside the nuclear families");
    }
  }
  return pass();
}

PropertyCheck check_rectangular_structure(const std::vector<Frequency>& pts, const ResonanceCutoff& cutoff) {
  for (const auto& n1 : pts) {
    for (const auto& n2 : pts) {
      if (n2 == n1) continue;
      for (const auto& n3 : pts) {
        if (n3 == n2) continue;
        const Frequency n4 = complete_parallelogram(n1, n2, n3);
        if (!std::binary_search(pts.begin(), pts.end(), n4)) continue;
        const auto w = omega4(n1, n2, n3, n4);
        if (w != 0 && cutoff.admits(w)) {
          return from_parallelogram({n1, n2, n3, n4, w}, "internal parallelogram within the cutoff is not a rectangle");
        }
      }
    }
  }
  return pass();
}

}  // namespace

PropertyReport verify_properties(const GenerationalSet& g, const ResonanceCutoff& cutoff,
                                 std::optional<std::span<const Frequency>> forbidden_partner, double s) {
  if (g.generation_count() < 2) {
    throw std::invalid_argument("property verification needs at least two generations");
  }
  PropertyReport report;
  const auto support = g.support();
  const auto families = find_nuclear_families(g);

  if (auto w = check_r_closure(support, cutoff)) {
    report.r_closure = from_parallelogram(*w, "fourth vertex " + w->fourth.str() + " missing");
  } else {
    report.r_closure = pass();
  }
  report.spouse_children = check_membership(g, families, true);
  report.parents_siblings = check_membership(g, families, false);
  report.non_degeneracy = check_non_degeneracy(g, families);
  report.faithfulness = check_faithfulness(support, families);
  report.rectangular_structure = check_rectangular_structure(support, cutoff);

  if (forbidden_partner) {
    const auto partner = canonical_set(*forbidden_partner);
    const Frequency origin{0, 0};
    if (std::binary_search(partner.begin(), partner.end(), origin)) {
      if (std::binary_search(support.begin(), support.end(), origin)) {
        report.no_zero_rectangle = fail({origin}, "the set contains the origin");
      } else {
        const std::array<Frequency, 1> zero{origin};
        const auto hits = find_connecting_parallelograms(support, zero, ResonanceCutoff::bounded(0));
        report.no_zero_rectangle =
            hits.empty() ? pass() : from_parallelogram(hits.front(), "two frequencies form a rectangle with 0");
      }
    }
    std::vector<Frequency> overlap;
    std::set_intersection(support.begin(), support.end(), partner.begin(), partner.end(),
                          std::back_inserter(overlap));
    if (!overlap.empty()) {
      report.pasting = fail(overlap, "set and partner overlap");
    } else {
      const auto hits = find_connecting_parallelograms(support, partner, cutoff);
      report.pasting = hits.empty() ? pass()
                                    : from_parallelogram(hits.front(), "connected to the partner by a parallelogram");
    }
  }

  if (g.generation_count() >= 6) report.norm_explosion_ratio = norm_explosion_ratio(g, s);
  return report;
}

double norm_explosion_ratio(const GenerationalSet& g, double s) {
  const std::size_t P = g.generation_count();
  if (P < 6) throw std::invalid_argument("norm explosion ratio needs at least six generations");
  auto weight = [s](const std::vector<Frequency>& gen) {
    double sum = 0.0;
    for (const auto& n : gen) sum += std::pow(static_cast<double>(norm2(n)), s);
    return sum;
  };
  const double low = weight(g.generation(3));
  if (low == 0.0) throw std::invalid_argument("generation 3 has zero weight");
  return weight(g.generation(P - 2)) / low;
}

GenerationalSet seed_family_p2() {
  return GenerationalSet({{{0, 0}, {2, 0}}, {{1, -1}, {1, 1}}});
}

namespace {

/// Unordered children pairs (c1 < c2) completing the parents p1, p2 to a
/// rectangle, other than the parents' own diagonal, inside the box.
std::vector<std::pair<Frequency, Frequency>> children_candidates(const Frequency& p1, const Frequency& p2,
                                                                 std::int64_t box) {
  const Frequency sum = p1 + p2;
  const Frequency diff = p1 - p2;
  const std::int64_t len2 = norm2(diff);
  const auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(len2))) + 1;
  std::vector<std::pair<Frequency, Frequency>> out;
  for (std::int64_t dx = -r; dx <= r; ++dx) {
    const std::int64_t rest = len2 - dx * dx;
    if (rest < 0) continue;
    auto dy = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(rest))));
    if (dy * dy != rest) continue;
    const std::vector<std::int64_t> ys = dy == 0 ? std::vector<std::int64_t>{0} : std::vector<std::int64_t>{dy, -dy};
    for (const std::int64_t sy : ys) {
      const Frequency d{dx, sy};
      if (d == diff || d == -diff) continue;
      if (((sum.x - d.x) % 2) != 0 || ((sum.y - d.y) % 2) != 0) continue;
      const Frequency c1{(sum.x + d.x) / 2, (sum.y + d.y) / 2};
      const Frequency c2{(sum.x - d.x) / 2, (sum.y - d.y) / 2};
      if (!(c1 < c2)) continue;
      auto inside = [box](const Frequency& c) {
        return c.x >= -box && c.x <= box && c.y >= -box && c.y <= box;
      };
      if (inside(c1) && inside(c2)) out.emplace_back(c1, c2);
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    auto key = [](const auto& p) {
      return std::max({std::abs(p.first.x), std::abs(p.first.y), std::abs(p.second.x), std::abs(p.second.y)});
    };
    return std::make_pair(key(a), a) < std::make_pair(key(b), b);
  });
  return out;
}

bool right_angle(const Frequency& a, const Frequency& b, const Frequency& c) {
  return dot(a - b, c - b) == 0 || dot(b - a, c - a) == 0 || dot(a - c, b - c) == 0;
}

class Lambda0Search {
 public:
  Lambda0Search(int P, int box, std::uint64_t max_nodes)
      : P_(static_cast<std::size_t>(P)), box_(box), gen_size_(std::size_t{1} << (P - 1)), max_nodes_(max_nodes) {
    for (std::int64_t x = -box; x <= box; ++x) {
      for (std::int64_t y = -box; y <= box; ++y) order_.push_back({x, y});
    }
    std::stable_sort(order_.begin(), order_.end(), [](const Frequency& a, const Frequency& b) {
      return std::max(std::abs(a.x), std::abs(a.y)) < std::max(std::abs(b.x), std::abs(b.y));
    });
    gens_.resize(P_);
  }

  Lambda0SearchResult run() {
    Lambda0SearchResult res;
    if (place_first_generation(0)) res.set = GenerationalSet(gens_);
    res.nodes = nodes_;
    res.budget_exhausted = exhausted_;
    return res;
  }

 private:
  struct Family {
    std::array<Frequency, 4> v;  // p1, c1, p2, c2
  };

  bool budget_left() {
    if (max_nodes_ != 0 && nodes_ >= max_nodes_) {
      exhausted_ = true;
      return false;
    }
    ++nodes_;
    return true;
  }

  bool in_one_family(const Frequency& a, const Frequency& b, const Frequency& c) const {
    for (const auto& f : families_) {
      auto has = [&f](const Frequency& n) { return std::find(f.v.begin(), f.v.end(), n) != f.v.end(); };
      if (has(a) && has(b) && has(c)) return true;
    }
    return false;
  }

  /// Every right-angled triple touching a fresh point must lie inside a
  /// single nuclear family; otherwise closure or faithfulness breaks.
  bool consistent(std::span<const Frequency> fresh) const {
    for (const auto& q : fresh) {
      for (std::size_t i = 0; i < points_.size(); ++i) {
        if (points_[i] == q) continue;
        for (std::size_t k = i + 1; k < points_.size(); ++k) {
          if (points_[k] == q) continue;
          if (right_angle(q, points_[i], points_[k]) && !in_one_family(q, points_[i], points_[k])) return false;
        }
      }
    }
    return true;
  }

  bool add_family(const Frequency& p1, const Frequency& p2, const Frequency& c1, const Frequency& c2,
                  bool parents_new) {
    if (used_.count(c1) || used_.count(c2)) return false;
    families_.push_back({{p1, c1, p2, c2}});
    std::vector<Frequency> fresh{c1, c2};
    if (parents_new) fresh.insert(fresh.end(), {p1, p2});
    for (const auto& n : fresh) {
      points_.push_back(n);
      used_.insert(n);
    }
    if (consistent(fresh)) return true;
    remove_family(parents_new);
    return false;
  }

  void remove_family(bool parents_new) {
    const std::size_t fresh = parents_new ? 4 : 2;
    for (std::size_t i = 0; i < fresh; ++i) {
      used_.erase(points_.back());
      points_.pop_back();
    }
    families_.pop_back();
  }

  bool place_first_generation(std::size_t start) {
    if (gens_[0].size() == gen_size_) return descend(2);
    for (std::size_t i = start; i < order_.size(); ++i) {
      const auto& p1 = order_[i];
      if (used_.count(p1)) continue;
      for (std::size_t k = i + 1; k < order_.size(); ++k) {
        const auto& p2 = order_[k];
        if (used_.count(p2)) continue;
        for (const auto& [c1, c2] : children_candidates(p1, p2, box_)) {
          if (!budget_left()) return false;
          if (!add_family(p1, p2, c1, c2, true)) continue;
          gens_[0].insert(gens_[0].end(), {p1, p2});
          gens_[1].insert(gens_[1].end(), {c1, c2});
          if (place_first_generation(i + 1)) return true;
          gens_[0].resize(gens_[0].size() - 2);
          gens_[1].resize(gens_[1].size() - 2);
          remove_family(true);
          if (exhausted_) return false;
        }
      }
    }
    return false;
  }

  /// Generation j is complete; pair it into couples and place their children.
  bool descend(std::size_t j) {
    if (j == P_) {
      GenerationalSet candidate(gens_);
      return verify_properties(candidate, ResonanceCutoff::bounded(0)).all_pass();
    }
    std::vector<bool> matched(gens_[j - 1].size(), false);
    return match(j, matched);
  }

  bool match(std::size_t j, std::vector<bool>& matched) {
    const auto& gen = gens_[j - 1];
    const auto first = std::find(matched.begin(), matched.end(), false);
    if (first == matched.end()) return descend(j + 1);
    const auto u = static_cast<std::size_t>(first - matched.begin());
    matched[u] = true;
    // Siblings were appended in pairs (2m, 2m+1).
    const std::size_t sibling = u ^ 1U;
    for (std::size_t w = u + 1; w < gen.size(); ++w) {
      if (matched[w] || w == sibling) continue;
      matched[w] = true;
      const auto p1 = std::min(gen[u], gen[w]);
      const auto p2 = std::max(gen[u], gen[w]);
      for (const auto& [c1, c2] : children_candidates(p1, p2, box_)) {
        if (!budget_left()) break;
        if (!add_family(p1, p2, c1, c2, false)) continue;
        gens_[j].insert(gens_[j].end(), {c1, c2});
        if (match(j, matched)) return true;
        gens_[j].resize(gens_[j].size() - 2);
        remove_family(false);
      }
      matched[w] = false;
      if (exhausted_) break;
    }
    matched[u] = false;
    return false;
  }

  std::size_t P_;
  std::int64_t box_;
  std::size_t gen_size_;
  std::uint64_t max_nodes_;
  std::uint64_t nodes_ = 0;
  bool exhausted_ = false;
  std::vector<Frequency> order_;
  std::vector<std::vector<Frequency>> gens_;
  std::vector<Family> families_;
  std::vector<Frequency> points_;
  std::set<Frequency> used_;
};

}  // namespace

Lambda0SearchResult build_lambda0(int P, int box, const Lambda0SearchOptions& opts) {
  if (P < 2 || P > 4) throw std::invalid_argument("build_lambda0 supports 2 <= P <= 4");
  if (box < 0 || box > 64) throw std::invalid_argument("build_lambda0 supports 0 <= box <= 64");
  return Lambda0Search(P, box, opts.max_nodes).run();
}

GenerationalSet affine_place(const GenerationalSet& g, std::int64_t N, const Frequency& v) {
  if (N < 1) throw std::invalid_argument("dilation factor N must be positive");
  auto coord = [](std::int64_t N, std::int64_t c, std::int64_t shift) {
    const __int128 r = static_cast<__int128>(N) * c - shift;
    if (r > kMaxCoordinate || r < -kMaxCoordinate) {
      throw std::overflow_error("placed frequency exceeds the supported coordinate range");
    }
    return static_cast<std::int64_t>(r);
  };
  std::vector<std::vector<Frequency>> gens;
  for (const auto& gen : g.generations()) {
    auto& out = gens.emplace_back();
    for (const auto& n : gen) out.push_back({coord(N, n.x, v.x), coord(N, n.y, v.y)});
  }
  return GenerationalSet(std::move(gens));
}

Frequency choose_v0(const GenerationalSet& g, std::span<const Frequency> s) {
  if (g.size() == 0) throw std::invalid_argument("choose_v0 needs a nonempty set");
  std::set<Frequency> diffs;
  auto collect = [&diffs](const std::vector<Frequency>& pts) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t k = i + 1; k < pts.size(); ++k) diffs.insert(pts[k] - pts[i]);
    }
  };
  collect(g.support());
  collect(canonical_set(s));
  for (std::int64_t r = 1;; ++r) {
    for (std::int64_t x = -r; x <= r; ++x) {
      for (std::int64_t y = -r; y <= r; ++y) {
        if (std::max(std::abs(x), std::abs(y)) != r) continue;
        const Frequency v{x, y};
        const bool ok = std::none_of(diffs.begin(), diffs.end(), [&v](const Frequency& d) { return dot(v, d) == 0; });
        if (ok) return v;
      }
    }
  }
}

std::optional<Placement> separate_from(const GenerationalSet& g0, std::span<const Frequency> s, std::int64_t R,
                                       std::int64_t N, std::int64_t L) {
  if (R < 0) throw std::invalid_argument("R must be nonnegative");
  if (L < 1) throw std::invalid_argument("L must be positive");
  if (N <= R) throw std::invalid_argument("placement requires N > R");
  const auto cutoff = ResonanceCutoff::bounded(R);
  if (auto w = check_r_closure(s, cutoff)) {
    throw std::invalid_argument("partner set is not R-closed: fourth vertex " + w->fourth.str() + " missing");
  }
  if (!verify_properties(g0, ResonanceCutoff::bounded(0)).all_pass()) {
    throw std::invalid_argument("base set g0 does not pass the property report at R = 0");
  }
  const Frequency v0 = choose_v0(affine_place(g0, N, {0, 0}), s);
  const std::int64_t v0_sup = std::max(std::abs(v0.x), std::abs(v0.y));
  if (2 * L * R * v0_sup > N) {
    throw std::invalid_argument("placement requires 2 L R |v0|_inf <= N (got " + std::to_string(2 * L * R * v0_sup) +
                                " > " + std::to_string(N) + ")");
  }
  const auto partner = canonical_set(s);
  for (std::int64_t l = L; l <= 2 * L; ++l) {
    const Frequency v{l * R * v0.x, l * R * v0.y};
    auto placed = affine_place(g0, N, v);
    const auto support = placed.support();
    const bool overlaps = std::any_of(support.begin(), support.end(), [&partner](const Frequency& n) {
      return std::binary_search(partner.begin(), partner.end(), n);
    });
    if (overlaps) continue;
    if (!find_connecting_parallelograms(support, partner, cutoff).empty()) continue;
    if (!verify_properties(placed, cutoff, std::span<const Frequency>(partner)).all_pass()) continue;
    return Placement{std::move(placed), v0, l, v};
  }
  return std::nullopt;
}

}  // namespace rescascade
