#pragma once

// Named generational sets used by the unit and acceptance suites.

#include <optional>
#include <string>
#include <vector>

#include "rescascade/frequency_sets.hpp"

namespace fixtures {

using rescascade::Frequency;
using rescascade::GenerationalSet;
using rescascade::ResonanceCutoff;

/// A single corruption of a valid set, the property it is meant to break,
/// and the properties that necessarily break with it.
struct Mutation {
  std::string name;
  GenerationalSet set;
  ResonanceCutoff cutoff;
  std::optional<std::vector<Frequency>> partner;
  std::string intended;
  std::vector<std::string> collateral;
};

/// The first P = 3 set found by the box-8 search.
inline GenerationalSet three_generation_set() {
  auto found = rescascade::build_lambda0(3, 8);
  return *found.set;
}

inline std::vector<Mutation> six_mutations() {
  std::vector<Mutation> out;
  const auto r0 = ResonanceCutoff::bounded(0);

  // (1,1) joins the parents: no family survives, and the square is no longer one.
  out.push_back({"moved vertex",
                 GenerationalSet({{{0, 0}, {1, 1}, {2, 0}}, {{1, -1}}}),
                 r0,
                 std::nullopt,
                 "parents_siblings",
                 {"spouse_children", "faithfulness"}});

  // A far child with no parents; it closes no right angle with the square.
  out.push_back({"extra vertex",
                 GenerationalSet({{{0, 0}, {2, 0}}, {{1, -1}, {1, 1}, {10, 3}}}),
                 r0,
                 std::nullopt,
                 "parents_siblings",
                 {}});

  // Removing a child leaves its parents childless, its sibling parentless
  // and the square open.
  out.push_back({"deleted vertex",
                 GenerationalSet({{{0, 0}, {2, 0}}, {{1, 1}}}),
                 r0,
                 std::nullopt,
                 "spouse_children",
                 {"parents_siblings", "r_closure"}});

  // Generations 2 and 3 collapsed into one: the family between them is no
  // longer a nuclear family, and the former third generation has no parents.
  {
    const auto g = three_generation_set();
    auto merged = g.generation(2);
    merged.insert(merged.end(), g.generation(3).begin(), g.generation(3).end());
    out.push_back({"merged generations",
                   GenerationalSet({g.generation(1), merged}),
                   r0,
                   std::nullopt,
                   "faithfulness",
                   {"parents_siblings"}});
  }

  // Seed shifted by (1,1): 0, (1,1), (2,0), (1,-1) is a rectangle. Against the
  // partner {0} at R = 0 the pasting scan sees the same parallelogram.
  out.push_back({"zero-rectangle injection",
                 GenerationalSet({{{1, 1}, {3, 1}}, {{2, 0}, {2, 2}}}),
                 r0,
                 std::vector<Frequency>{{0, 0}},
                 "no_zero_rectangle",
                 {"pasting"}});

  // Rectangle-closed but not closed at R = 4: the collapsed parallelogram
  // (0,0), (1,-1), (0,0) needs (-1,1), with omega4 = -4.
  out.push_back({"R-closure break",
                 rescascade::seed_family_p2(),
                 ResonanceCutoff::bounded(4),
                 std::nullopt,
                 "r_closure",
                 {}});
  return out;
}

}  // namespace fixtures
