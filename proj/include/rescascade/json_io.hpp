#pragma once

// JSON encodings of the library's value types. Decoders throw
// std::invalid_argument with a message naming the offending field.

#include <json.hpp>

#include "rescascade/frequency_sets.hpp"
#include "rescascade/resonance_lattice.hpp"
#include "rescascade/spectral.hpp"
#include "rescascade/toy.hpp"

namespace rescascade {

using Json = nlohmann::json;

Json to_json(const Frequency& n);                    // [x, y]
Frequency frequency_from_json(const Json& j);
Json frequencies_to_json(std::span<const Frequency> pts);
std::vector<Frequency> frequencies_from_json(const Json& j);

/// Nonnegative integer, or the strings "inf" / "unbounded".
ResonanceCutoff cutoff_from_json(const Json& j);
Json to_json(const ResonanceCutoff& c);

/// {"generations": [[[x, y], ...], ...]}
Json to_json(const GenerationalSet& g);
GenerationalSet genset_from_json(const Json& j);

/// {"modes": [{"n": [x, y], "re": r, "im": i}, ...]}
Json to_json(const SpectralState& s);
SpectralState state_from_json(const Json& j);

/// {"b": [{"re": r, "im": i}, ...]}
Json toy_to_json(const ToyState& b);
ToyState toy_from_json(const Json& j);

/// {"triple": [n1, n2, n3], "fourth_vertex": n4, "omega4": w}
Json to_json(const ParallelogramWitness& w);
Json to_json(const PropertyReport& r);
Json to_json(const CascadeOrbit& o);

}  // namespace rescascade
