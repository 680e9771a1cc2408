#include "rescascade/json_io.hpp"

#include <stdexcept>

namespace rescascade {

namespace {

std::int64_t as_int(const Json& j, const char* what) {
  if (!j.is_number_integer()) throw std::invalid_argument(std::string(what) + " must be an integer");
  return j.get<std::int64_t>();
}

double as_double(const Json& j, const char* what) {
  if (!j.is_number()) throw std::invalid_argument(std::string(what) + " must be a number");
  return j.get<double>();
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

Json complex_to_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Complex complex_from_json(const Json& j) {
  return {as_double(field(j, "re"), "re"), as_double(field(j, "im"), "im")};
}

}  // namespace

Json to_json(const Frequency& n) { return Json::array({n.x, n.y}); }

Frequency frequency_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("a frequency must be a pair [x, y]");
  const Frequency n{as_int(j[0], "frequency x"), as_int(j[1], "frequency y")};
  if (n.x > kMaxCoordinate || n.x < -kMaxCoordinate || n.y > kMaxCoordinate || n.y < -kMaxCoordinate) {
    throw std::invalid_argument("frequency " + n.str() + " outside the supported coordinate range");
  }
  return n;
}

Json frequencies_to_json(std::span<const Frequency> pts) {
  Json out = Json::array();
  for (const auto& n : pts) out.push_back(to_json(n));
  return out;
}

std::vector<Frequency> frequencies_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("a frequency list must be an array");
  std::vector<Frequency> out;
  for (const auto& e : j) out.push_back(frequency_from_json(e));
  return out;
}

ResonanceCutoff cutoff_from_json(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "unbounded") return ResonanceCutoff::unbounded();
    throw std::invalid_argument("cutoff string must be \"inf\" or \"unbounded\"");
  }
  const auto r = as_int(j, "cutoff R");
  if (r < 0) throw std::invalid_argument("cutoff R must be nonnegative");
  return ResonanceCutoff::bounded(r);
}

Json to_json(const ResonanceCutoff& c) {
  if (c.is_unbounded()) return "inf";
  return c.value();
}

Json to_json(const GenerationalSet& g) {
  Json gens = Json::array();
  for (const auto& gen : g.generations()) gens.push_back(frequencies_to_json(gen));
  return Json{{"generations", gens}};
}

GenerationalSet genset_from_json(const Json& j) {
  const auto& gens = field(j, "generations");
  if (!gens.is_array()) throw std::invalid_argument("\"generations\" must be an array");
  std::vector<std::vector<Frequency>> out;
  for (const auto& g : gens) out.push_back(frequencies_from_json(g));
  return GenerationalSet(std::move(out));
}

Json to_json(const SpectralState& s) {
  Json modes = Json::array();
  for (const auto& [n, a] : s.modes()) {
    modes.push_back(Json{{"n", to_json(n)}, {"re", a.real()}, {"im", a.imag()}});
  }
  return Json{{"modes", modes}};
}

SpectralState state_from_json(const Json& j) {
  const auto& modes = field(j, "modes");
  if (!modes.is_array()) throw std::invalid_argument("\"modes\" must be an array");
  SpectralState s;
  for (const auto& m : modes) {
    const auto n = frequency_from_json(field(m, "n"));
    if (s.contains(n)) throw std::invalid_argument("mode " + n.str() + " listed twice");
    s.set(n, complex_from_json(m));
  }
  return s;
}

Json toy_to_json(const ToyState& b) {
  Json arr = Json::array();
  for (const auto& z : b) arr.push_back(complex_to_json(z));
  return Json{{"b", arr}};
}

ToyState toy_from_json(const Json& j) {
  const auto& arr = field(j, "b");
  if (!arr.is_array() || arr.empty()) throw std::invalid_argument("\"b\" must be a nonempty array");
  ToyState b;
  for (const auto& z : arr) b.push_back(complex_from_json(z));
  return b;
}

Json to_json(const ParallelogramWitness& w) {
  return Json{{"triple", Json::array({to_json(w.n1), to_json(w.n2), to_json(w.n3)})},
              {"fourth_vertex", to_json(w.fourth)},
              {"omega4", w.omega4}};
}

Json to_json(const PropertyReport& r) {
  Json props = Json::object();
  for (const auto& [key, check] : r.entries()) {
    props[std::string(key)] = Json{{"status", std::string(to_string(check->status))},
                                   {"witness", frequencies_to_json(check->witness)},
                                   {"detail", check->detail}};
  }
  Json out{{"properties", props}, {"all_pass", r.all_pass()}};
  out["norm_explosion_ratio"] = r.norm_explosion_ratio ? Json(*r.norm_explosion_ratio) : Json(nullptr);
  return out;
}

Json to_json(const CascadeOrbit& o) {
  return Json{{"P", o.P},
              {"eps", o.eps},
              {"seed", o.seed},
              {"source_generation", o.source},
              {"target_generation", o.target},
              {"threshold_fraction", o.threshold_fraction},
              {"b0", toy_to_json(o.b0)},
              {"T", o.T},
              {"target_share", o.target_share},
              {"mass_drift", o.mass_drift},
              {"min_linf", o.min_linf},
              {"max_linf", o.max_linf}};
}

}  // namespace rescascade
