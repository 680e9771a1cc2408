#pragma once

// Generational frequency sets Lambda_1 u ... u Lambda_P, their nuclear-family
// structure, and the placement search that separates them from a given set.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rescascade/resonance_lattice.hpp"

namespace rescascade {

/// Disjoint generations of frequencies. Generation indices are 1-based.
class GenerationalSet {
 public:
  GenerationalSet() = default;
  /// Throws std::invalid_argument on repeated frequencies or an empty list.
  explicit GenerationalSet(std::vector<std::vector<Frequency>> generations);

  std::size_t generation_count() const { return generations_.size(); }
  const std::vector<Frequency>& generation(std::size_t j) const;
  const std::vector<std::vector<Frequency>>& generations() const { return generations_; }

  /// All frequencies, sorted.
  std::vector<Frequency> support() const;
  std::size_t size() const;
  /// 1-based generation of n, or 0 if n is not in the set.
  std::size_t generation_of(const Frequency& n) const;

  friend bool operator==(const GenerationalSet&, const GenerationalSet&) = default;

 private:
  std::vector<std::vector<Frequency>> generations_;
};

/// Rectangle (parent1, child1, parent2, child2): parents in Lambda_j, children
/// in Lambda_{j+1}, with parent1 < parent2 and child1 < child2.
struct NuclearFamily {
  Frequency parent1, parent2;
  Frequency child1, child2;
  std::size_t generation = 0;

  friend auto operator<=>(const NuclearFamily&, const NuclearFamily&) = default;
};

std::vector<NuclearFamily> find_nuclear_families(const GenerationalSet& g);

enum class CheckStatus { Pass, Fail, Skipped };

std::string_view to_string(CheckStatus s);

struct PropertyCheck {
  CheckStatus status = CheckStatus::Skipped;
  /// Frequencies involved in the first violation; nonempty whenever failed.
  std::vector<Frequency> witness;
  std::string detail;

  bool passed() const { return status != CheckStatus::Fail; }
};

struct PropertyReport {
  PropertyCheck r_closure;
  PropertyCheck spouse_children;
  PropertyCheck parents_siblings;
  PropertyCheck non_degeneracy;
  PropertyCheck faithfulness;
  PropertyCheck rectangular_structure;
  /// Only evaluated when the partner set contains the origin.
  PropertyCheck no_zero_rectangle;
  /// Only evaluated when a partner set is given.
  PropertyCheck pasting;
  std::optional<double> norm_explosion_ratio;

  bool all_pass() const;
  /// (key, check) in a fixed order; keys are the JSON field names.
  std::vector<std::pair<std::string_view, const PropertyCheck*>> entries() const;
  /// Keys of failed checks.
  std::vector<std::string> failures() const;
};

/// Exhaustive check of the closure, genealogy, faithfulness and separation
/// properties. Requires at least two generations. The norm-explosion ratio is
/// filled in (with exponent `s`) when P >= 6.
PropertyReport verify_properties(const GenerationalSet& g, const ResonanceCutoff& cutoff,
                                 std::optional<std::span<const Frequency>> forbidden_partner = std::nullopt,
                                 double s = 1.0);

/// sum_{Lambda_{P-2}} |n|^{2s} / sum_{Lambda_3} |n|^{2s}. Requires P >= 6.
double norm_explosion_ratio(const GenerationalSet& g, double s);

/// Lambda_1 = {(0,0),(2,0)}, Lambda_2 = {(1,-1),(1,1)}.
GenerationalSet seed_family_p2();

struct Lambda0SearchOptions {
  /// Abandon the search after this many placement attempts; 0 = unlimited.
  std::uint64_t max_nodes = 0;
};

struct Lambda0SearchResult {
  std::optional<GenerationalSet> set;
  std::uint64_t nodes = 0;
  bool budget_exhausted = false;
};

/// Backtracking search in [-box, box]^2 for a P-generation set with 2^{P-1}
/// frequencies per generation passing verify_properties at R = 0.
/// Requires 2 <= P <= 4 and 0 <= box <= 64.
Lambda0SearchResult build_lambda0(int P, int box, const Lambda0SearchOptions& opts = {});

/// n -> N n - v on every frequency, keeping generation labels.
GenerationalSet affine_place(const GenerationalSet& g, std::int64_t N, const Frequency& v);

/// Smallest nonzero v0 (max-norm shells, lexicographic within a shell) not
/// orthogonal to any difference of two points of g, nor of two points of s.
Frequency choose_v0(const GenerationalSet& g, std::span<const Frequency> s);

struct Placement {
  GenerationalSet set;
  Frequency v0;
  std::int64_t l = 0;
  Frequency translation;  // the v with set = N g0 - v
};

/// Places N g0 - l R v0 for l = L..2L and returns the first placement that is
/// not connected to s by any parallelogram with |omega4| <= R and passes the
/// full property report with s as partner. nullopt if no l works.
/// Precondition failures throw std::invalid_argument.
std::optional<Placement> separate_from(const GenerationalSet& g0, std::span<const Frequency> s,
                                       std::int64_t R, std::int64_t N, std::int64_t L);

}  // namespace rescascade
