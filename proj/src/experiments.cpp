#include "rescascade/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace rescascade {

namespace fs = std::filesystem;

namespace {

/// Typed access to one JSON object with a fixed set of accepted keys.
class Config {
 public:
  Config(const Json& j, std::string section, std::initializer_list<const char*> allowed)
      : j_(j), section_(std::move(section)) {
    if (j_.is_null()) return;
    if (!j_.is_object()) throw std::invalid_argument(section_ + " must be a JSON object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j_.items()) {
      if (!ok.count(key)) throw std::invalid_argument("unknown key \"" + key + "\" in " + section_);
    }
  }

  bool has(const char* key) const { return j_.is_object() && j_.contains(key) && !j_.at(key).is_null(); }
  const Json& raw(const char* key) const {
    if (!has(key)) throw std::invalid_argument("missing key \"" + std::string(key) + "\" in " + section_);
    return j_.at(key);
  }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_number()) throw std::invalid_argument(where(key) + " must be a number");
    const double v = j_.at(key).get<double>();
    if (!std::isfinite(v)) throw std::invalid_argument(where(key) + " must be finite");
    return v;
  }

  std::int64_t integer(const char* key, std::int64_t fallback) const {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_number_integer()) throw std::invalid_argument(where(key) + " must be an integer");
    return j_.at(key).get<std::int64_t>();
  }

  std::string text(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_string()) throw std::invalid_argument(where(key) + " must be a string");
    return j_.at(key).get<std::string>();
  }

  std::string where(const char* key) const { return "\"" + std::string(key) + "\" in " + section_; }

 private:
  const Json& j_;
  std::string section_;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json verdict(const std::string& name, bool pass, Json value, Json threshold, const std::string& comparison) {
  return Json{{"name", name}, {"pass", pass}, {"value", std::move(value)}, {"threshold", std::move(threshold)},
              {"comparison", comparison}};
}

bool all_verdicts_pass(const Json& verdicts) {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Json& v) { return v.at("pass").get<bool>(); });
}

void write_file(const fs::path& out_dir, const std::string& name, const std::string& content,
                std::vector<fs::path>& outputs) {
  if (out_dir.empty()) return;
  fs::create_directories(out_dir);
  const fs::path p = out_dir / name;
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + p.string() + " for writing");
  os << content;
  if (!os) throw std::runtime_error("failed writing " + p.string());
  outputs.push_back(p);
}

void write_report(const fs::path& out_dir, ExperimentResult& res) {
  res.report["pass"] = res.pass;
  write_file(out_dir, "report.json", res.report.dump(2) + "\n", res.outputs);
}

Json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot read " + path);
  try {
    return Json::parse(is);
  } catch (const Json::exception& e) {
    throw std::invalid_argument("invalid JSON in " + path + ": " + e.what());
  }
}

/// Inline {"generations": ...}, {"file": path}, "seed", {"builder": "seed"}
/// or {"builder": "lambda0", "P": .., "box": .., "max_nodes": ..}.
GenerationalSet load_set(const Json& src) {
  if (src.is_string()) {
    if (src.get<std::string>() == "seed") return seed_family_p2();
    throw std::invalid_argument("unknown set name \"" + src.get<std::string>() + "\"");
  }
  if (src.is_object() && src.contains("generations")) return genset_from_json(src);
  Config c(src, "set source", {"file", "builder", "P", "box", "max_nodes"});
  if (c.has("file")) return genset_from_json(read_json_file(c.text("file", "")));
  const auto builder = c.text("builder", "");
  if (builder == "seed") return seed_family_p2();
  if (builder == "lambda0") {
    const auto P = c.integer("P", 3);
    const auto box = c.integer("box", 16);
    Lambda0SearchOptions opts;
    opts.max_nodes = static_cast<std::uint64_t>(std::max<std::int64_t>(0, c.integer("max_nodes", 0)));
    auto res = build_lambda0(static_cast<int>(P), static_cast<int>(box), opts);
    if (!res.set) throw std::invalid_argument("lambda0 builder found no set for the given P and box");
    return *res.set;
  }
  throw std::invalid_argument("set source needs \"generations\", \"file\" or \"builder\"");
}

IntegratorOptions integrator_from(const Json& j, const IntegratorOptions& defaults) {
  IntegratorOptions o = defaults;
  Config c(j, "integrator", {"method", "h", "rtol", "atol", "max_steps"});
  const auto method = c.text("method", o.method == StepMethod::FixedRk4 ? "rk4" : "dp45");
  if (method == "rk4") {
    o.method = StepMethod::FixedRk4;
  } else if (method == "dp45") {
    o.method = StepMethod::AdaptiveDp45;
  } else {
    throw std::invalid_argument("integrator method must be \"rk4\" or \"dp45\"");
  }
  o.h = c.number("h", o.h);
  o.rtol = c.number("rtol", o.rtol);
  o.atol = c.number("atol", o.atol);
  o.max_steps = static_cast<std::size_t>(c.integer("max_steps", static_cast<std::int64_t>(o.max_steps)));
  if (!(o.h > 0.0) || !(o.rtol > 0.0) || !(o.atol >= 0.0)) {
    throw std::invalid_argument("integrator step and tolerances must be positive");
  }
  return o;
}

std::size_t sample_count(const Config& c, std::int64_t fallback) {
  const auto n = c.integer("samples", fallback);
  if (n < 2) throw std::invalid_argument(c.where("samples") + " must be at least 2");
  return static_cast<std::size_t>(n);
}

double positive(const Config& c, const char* key, double fallback) {
  const double v = c.number(key, fallback);
  if (!(v > 0.0)) throw std::invalid_argument(c.where(key) + " must be positive");
  return v;
}

double nonnegative(const Config& c, const char* key, double fallback) {
  const double v = c.number(key, fallback);
  if (!(v >= 0.0)) throw std::invalid_argument(c.where(key) + " must be nonnegative");
  return v;
}

std::int64_t bounded_cutoff_value(const Config& c, const char* key, std::int64_t fallback) {
  if (!c.has(key)) return fallback;
  const auto cut = cutoff_from_json(c.raw(key));
  if (cut.is_unbounded()) throw std::invalid_argument(c.where(key) + " must be a finite integer here");
  return cut.value();
}

double weight_sum(std::span<const Frequency> pts, double s) {
  double w = 0.0;
  for (const auto& n : pts) w += std::pow(1.0 + static_cast<double>(norm2(n)), s);
  return w;
}

}  // namespace

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope fit needs two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("slope fit needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw std::invalid_argument("slope fit needs distinct x values");
  return (n * sxy - sx * sy) / den;
}

ExperimentResult run_verify(const Json& cfg, const fs::path& out_dir) {
  Config c(cfg, "verify-set config", {"set", "R", "partner", "s", "seed"});
  const auto g = load_set(c.raw("set"));
  const auto cutoff = c.has("R") ? cutoff_from_json(c.raw("R")) : ResonanceCutoff::bounded(0);
  std::optional<std::vector<Frequency>> partner;
  if (c.has("partner")) partner = frequencies_from_json(c.raw("partner"));
  const double s = c.number("s", 1.0);
  if (g.generation_count() < 2) throw std::invalid_argument("verification needs at least two generations");
  const auto report = partner ? verify_properties(g, cutoff, std::span<const Frequency>(*partner), s)
                              : verify_properties(g, cutoff, std::nullopt, s);
  ExperimentResult res;
  res.report = Json{{"kind", "verify-set"},
                    {"input", cfg},
                    {"set", to_json(g)},
                    {"cutoff", to_json(cutoff)},
                    {"nuclear_families", find_nuclear_families(g).size()},
                    {"report", to_json(report)}};
  const auto failures = report.failures();
  res.report["verdicts"] = Json::array(
      {verdict("all_properties", report.all_pass(), Json(failures.size()), 0, "failed properties ==")});
  res.pass = report.all_pass();
  write_report(out_dir, res);
  return res;
}

ExperimentResult run_build_lambda(const Json& cfg, const fs::path& out_dir) {
  Config c(cfg, "build-lambda config", {"P", "box", "max_nodes", "seed"});
  const auto P = c.integer("P", 3);
  const auto box = c.integer("box", 16);
  if (P < 2 || P > 4 || box < 0 || box > 64) {
    throw std::invalid_argument("build-lambda requires 2 <= P <= 4 and 0 <= box <= 64");
  }
  Lambda0SearchOptions opts;
  const auto max_nodes = c.integer("max_nodes", 0);
  if (max_nodes < 0) throw std::invalid_argument(c.where("max_nodes") + " must be nonnegative");
  opts.max_nodes = static_cast<std::uint64_t>(max_nodes);
  const auto found = build_lambda0(static_cast<int>(P), static_cast<int>(box), opts);
  ExperimentResult res;
  res.report = Json{{"kind", "build-lambda"},
                    {"input", cfg},
                    {"found", found.set.has_value()},
                    {"nodes", found.nodes},
                    {"budget_exhausted", found.budget_exhausted},
                    {"set", found.set ? to_json(*found.set) : Json(nullptr)}};
  if (found.set) {
    res.report["report"] = to_json(verify_properties(*found.set, ResonanceCutoff::bounded(0)));
    write_file(out_dir, "set.json", to_json(*found.set).dump(2) + "\n", res.outputs);
  }
  res.report["verdicts"] = Json::array({verdict("set_found", found.set.has_value(), found.set.has_value(), true, "==")});
  res.pass = found.set.has_value();
  write_report(out_dir, res);
  return res;
}

ExperimentResult run_toy(const Json& cfg, const fs::path& out_dir) {
  Config c(cfg, "toy-cascade config",
           {"P", "eps", "t_max", "seed", "seeds", "target_fraction", "sample_dt", "rtol", "atol", "mass_tolerance"});
  const auto P = c.integer("P", 2);
  if (P < 1) throw std::invalid_argument(c.where("P") + " must be at least 1");
  const double eps = c.number("eps", 0.1);
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument(c.where("eps") + " must lie in (0, 1)");
  const double t_max = nonnegative(c, "t_max", 200.0);
  const auto seed = c.integer("seed", 1);
  const auto seeds = c.integer("seeds", 1);
  if (seed < 0 || seeds < 1) throw std::invalid_argument("seed must be nonnegative and seeds positive");
  CascadeSearchOptions opts;
  if (c.has("target_fraction")) {
    const double f = c.number("target_fraction", 0.0);
    if (!(f > 0.0 && f <= 1.0)) throw std::invalid_argument(c.where("target_fraction") + " must lie in (0, 1]");
    opts.target_fraction = f;
  }
  opts.sample_dt = positive(c, "sample_dt", opts.sample_dt);
  opts.rtol = positive(c, "rtol", opts.rtol);
  opts.atol = nonnegative(c, "atol", opts.atol);
  const double mass_tol = positive(c, "mass_tolerance", 1e-10);

  const auto orbit = search_cascade_orbit(static_cast<std::size_t>(P), eps, t_max, static_cast<std::uint64_t>(seed),
                                          static_cast<std::size_t>(seeds), opts);
  ExperimentResult res;
  res.report = Json{{"kind", "toy-cascade"}, {"input", cfg}, {"found", orbit.has_value()}};
  Json verdicts = Json::array();
  verdicts.push_back(verdict("cascade_found", orbit.has_value(), orbit ? Json(orbit->T) : Json(nullptr), t_max,
                             "T <="));
  if (orbit) {
    res.report["orbit"] = to_json(*orbit);
    verdicts.push_back(verdict("mass_drift", orbit->mass_drift <= mass_tol, orbit->mass_drift, mass_tol, "<="));
    IntegratorOptions io;
    io.rtol = opts.rtol;
    io.atol = opts.atol;
    io.h = std::min(opts.sample_dt, 1e-3);
    if (orbit->T > 0.0) {
      auto times = uniform_samples(0.0, orbit->T, static_cast<std::size_t>(std::ceil(orbit->T / opts.sample_dt)) + 1);
      io.sample_times = std::move(times);
    }
    const auto traj = integrate_toy(orbit->b0, orbit->T, io);
    std::ostringstream csv;
    csv << "t,mass";
    for (std::int64_t j = 1; j <= P; ++j) csv << ",b" << j << "_abs2";
    csv << "\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      csv << num(traj.times[k]) << "," << num(toy_mass(traj.states[k]));
      for (const auto& z : traj.states[k]) csv << "," << num(std::norm(z));
      csv << "\n";
    }
    write_file(out_dir, "toy_trajectory.csv", csv.str(), res.outputs);
  }
  res.report["verdicts"] = verdicts;
  res.pass = all_verdicts_pass(verdicts);
  write_report(out_dir, res);
  return res;
}

ExperimentResult run_simulate(const Json& cfg, const fs::path& out_dir) {
  Config c(cfg, "simulate config",
           {"R", "box", "box_radius", "state", "state_file", "T", "samples", "integrator", "mass_tolerance",
            "hamiltonian_tolerance", "seed"});
  const auto cutoff = c.has("R") ? cutoff_from_json(c.raw("R")) : ResonanceCutoff::bounded(0);
  SpectralState state;
  if (c.has("state")) {
    state = state_from_json(c.raw("state"));
  } else if (c.has("state_file")) {
    state = state_from_json(read_json_file(c.text("state_file", "")));
  }
  std::vector<Frequency> box;
  if (c.has("box")) {
    box = frequencies_from_json(c.raw("box"));
  } else if (c.has("box_radius")) {
    const auto m = c.integer("box_radius", 0);
    if (m < 0 || m > 64) throw std::invalid_argument(c.where("box_radius") + " must lie in [0, 64]");
    for (std::int64_t x = -m; x <= m; ++x) {
      for (std::int64_t y = -m; y <= m; ++y) box.push_back({x, y});
    }
  } else {
    for (const auto& [n, a] : state.modes()) box.push_back(n);
  }
  const double T = nonnegative(c, "T", 10.0);
  IntegratorOptions defaults;
  defaults.rtol = 1e-10;
  defaults.atol = 1e-13;
  auto io = integrator_from(c.has("integrator") ? c.raw("integrator") : Json(), defaults);
  const SystemSpec spec(cutoff, box);
  io.omega_max = static_cast<double>(spec.max_abs_omega());
  if (T > 0.0) io.sample_times = uniform_samples(0.0, T, sample_count(c, 101));
  const double mass_tol = positive(c, "mass_tolerance", 1e-8);
  const double ham_tol = positive(c, "hamiltonian_tolerance", 1e-6);

  const auto y0 = spec.flatten(state);
  const OdeRhs f = [&spec](std::span<const Complex> y, double t, std::span<Complex> dy) { spec.rhs(y, t, dy); };
  const auto traj = integrate(f, y0, 0.0, T, io);

  const OdeFunctional mass_fn = [&spec](double, std::span<const Complex> y) { return mass(spec.unflatten(y)); };
  const OdeFunctional ham_fn = [&spec, &cutoff](double t, std::span<const Complex> y) {
    return hamiltonian(to_physical(spec.unflatten(y), t), cutoff);
  };
  const auto drifts = drift_report(traj, {{"mass", mass_fn}, {"hamiltonian", ham_fn}});

  std::ostringstream csv;
  csv << "t";
  for (const auto& n : spec.box()) csv << ",re_" << n.x << "_" << n.y << ",im_" << n.x << "_" << n.y;
  csv << ",mass,hamiltonian\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    csv << num(traj.times[k]);
    for (const auto& z : traj.states[k]) csv << "," << num(z.real()) << "," << num(z.imag());
    csv << "," << num(mass_fn(traj.times[k], traj.states[k])) << "," << num(ham_fn(traj.times[k], traj.states[k]))
        << "\n";
  }
  ExperimentResult res;
  write_file(out_dir, "trajectory.csv", csv.str(), res.outputs);
  Json drift_json = Json::array();
  for (const auto& d : drifts) {
    drift_json.push_back(Json{{"name", d.name},
                              {"initial", d.initial},
                              {"max_abs_drift", d.max_abs_drift},
                              {"max_rel_drift", d.max_rel_drift}});
  }
  res.report = Json{{"kind", "simulate"},
                    {"input", cfg},
                    {"box_size", spec.dimension()},
                    {"triples", spec.triple_count()},
                    {"max_abs_omega", spec.max_abs_omega()},
                    {"accepted_steps", traj.accepted_steps},
                    {"rejected_steps", traj.rejected_steps},
                    {"final_state", to_json(spec.unflatten(traj.states.back()))},
                    {"drift", drift_json}};
  const Json verdicts = Json::array(
      {verdict("mass_drift", drifts[0].max_rel_drift <= mass_tol, drifts[0].max_rel_drift, mass_tol, "<="),
       verdict("hamiltonian_drift", drifts[1].max_rel_drift <= ham_tol, drifts[1].max_rel_drift, ham_tol, "<=")});
  res.report["verdicts"] = verdicts;
  res.pass = all_verdicts_pass(verdicts);
  write_report(out_dir, res);
  return res;
}

ExperimentResult run_norm_growth(const Json& cfg, const fs::path& out_dir) {
  Config c(cfg, "norm-growth config",
           {"set", "placed_set", "N", "L", "R", "s", "partner", "partner_state", "delta", "lambda_factor", "eps",
            "toy_t_max", "seed", "seeds", "target_fraction", "t_margin", "samples", "h_toy", "growth_tolerance",
            "growth_target", "pasting_tolerance", "max_steps"});
  const double s = c.number("s", 2.0);
  if (!(s > 0.0) || s == 1.0) throw std::invalid_argument(c.where("s") + " must be positive and different from 1");
  const auto R = bounded_cutoff_value(c, "R", 0);
  const auto cutoff = ResonanceCutoff::bounded(R);
  const double delta = positive(c, "delta", 0.1);
  const double lambda_factor = positive(c, "lambda_factor", 1.0);
  const double eps = c.number("eps", 0.1);
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument(c.where("eps") + " must lie in (0, 1)");
  const double toy_t_max = nonnegative(c, "toy_t_max", 200.0);
  const auto seed = c.integer("seed", 1);
  const auto seeds = c.integer("seeds", 32);
  if (seed < 0 || seeds < 1) throw std::invalid_argument("seed must be nonnegative and seeds positive");
  const double t_margin = c.number("t_margin", 1.25);
  if (!(t_margin >= 1.0)) throw std::invalid_argument(c.where("t_margin") + " must be at least 1");
  const auto samples = sample_count(c, 2001);
  const double h_toy = positive(c, "h_toy", 0.01);
  const double growth_tol = positive(c, "growth_tolerance", 0.15);
  const double pasting_tol = positive(c, "pasting_tolerance", 1e-9);
  const auto max_steps = c.integer("max_steps", 20'000'000);

  SpectralState base;
  if (c.has("partner_state")) base = state_from_json(c.raw("partner_state"));
  std::vector<Frequency> partner;
  if (c.has("partner")) partner = canonical_set(frequencies_from_json(c.raw("partner")));
  for (const auto& n : base.support()) {
    if (!std::binary_search(partner.begin(), partner.end(), n)) {
      throw std::invalid_argument("partner_state has support at " + n.str() + " outside \"partner\"");
    }
  }

  std::optional<Placement> placement;
  GenerationalSet lambda_set;
  if (c.has("placed_set")) {
    lambda_set = load_set(c.raw("placed_set"));
  } else {
    const auto g0 = c.has("set") ? load_set(c.raw("set")) : seed_family_p2();
    const auto N = c.integer("N", 32);
    const auto L = c.integer("L", 8);
    placement = separate_from(g0, partner, R, N, L);
    if (!placement) {
      throw VerificationError("no placement separates the set from the partner",
                              Json{{"N", N}, {"L", L}, {"R", R}});
    }
    lambda_set = placement->set;
  }
  const auto props = partner.empty() ? verify_properties(lambda_set, cutoff, std::nullopt, s)
                                     : verify_properties(lambda_set, cutoff, std::span<const Frequency>(partner), s);
  if (!props.all_pass()) throw VerificationError("placed set fails the property checks", to_json(props));
  const std::size_t P = lambda_set.generation_count();

  ExperimentResult res;
  res.report = Json{{"kind", "norm-growth"}, {"input", cfg}, {"set", to_json(lambda_set)}, {"report", to_json(props)}};
  if (placement) {
    res.report["placement"] = Json{{"v0", to_json(placement->v0)},
                                   {"l", placement->l},
                                   {"translation", to_json(placement->translation)}};
  }
  CascadeSearchOptions toy_opts;
  if (c.has("target_fraction")) toy_opts.target_fraction = c.number("target_fraction", 1.0 - eps);
  const auto orbit = search_cascade_orbit(P, eps, toy_t_max, static_cast<std::uint64_t>(seed),
                                          static_cast<std::size_t>(seeds), toy_opts);
  Json verdicts = Json::array();
  verdicts.push_back(
      verdict("toy_orbit_found", orbit.has_value(), orbit ? Json(orbit->T) : Json(nullptr), toy_t_max, "T <="));
  if (!orbit) {
    res.report["verdicts"] = verdicts;
    res.pass = false;
    write_report(out_dir, res);
    return res;
  }
  res.report["toy_orbit"] = to_json(*orbit);

  const double hs_unit = sobolev_norm(embed_toy(lambda_set, orbit->b0), s);
  const double lambda = hs_unit / delta * lambda_factor;
  const auto lambda_state = embed_toy(lambda_set, scale_initial(orbit->b0, lambda));
  const auto joint0 = paste(lambda_state, base);

  const auto lambda_support = lambda_set.support();
  std::vector<Frequency> joint_box = lambda_support;
  joint_box.insert(joint_box.end(), partner.begin(), partner.end());
  const SystemSpec joint_spec(cutoff, joint_box);
  const SystemSpec lambda_spec(cutoff, lambda_support);
  const SystemSpec partner_spec(cutoff, partner);

  const double t_end = t_margin * lambda * lambda * orbit->T;
  double base_peak = 0.0;
  for (const auto& [n, a] : base.modes()) base_peak = std::max(base_peak, std::norm(a));
  IntegratorOptions io;
  io.method = StepMethod::FixedRk4;
  io.h = lambda * lambda * h_toy;
  if (base_peak > 0.0) io.h = std::min(io.h, h_toy / base_peak);
  io.omega_max = static_cast<double>(joint_spec.max_abs_omega());
  io.max_steps = static_cast<std::size_t>(std::max<std::int64_t>(1, max_steps));
  if (t_end > 0.0) io.sample_times = uniform_samples(0.0, t_end, samples);

  auto run = [&io, t_end](const SystemSpec& spec, const SpectralState& init) {
    const OdeRhs f = [&spec](std::span<const Complex> y, double t, std::span<Complex> dy) { spec.rhs(y, t, dy); };
    return integrate(f, spec.flatten(init), 0.0, t_end, io);
  };
  const auto joint = run(joint_spec, joint0);
  const auto alone = run(lambda_spec, lambda_state);
  const auto partner_alone = run(partner_spec, base);

  // Pasting residual: joint evolution against the sum of the separate ones.
  double residual = 0.0;
  for (std::size_t k = 0; k < joint.times.size(); ++k) {
    const auto js = joint_spec.unflatten(joint.states[k]);
    const auto sum = paste(lambda_spec.unflatten(alone.states[k]), partner_spec.unflatten(partner_alone.states[k]));
    for (const auto& [n, a] : js.modes()) residual = std::max(residual, std::abs(a - sum.get(n)));
  }

  const auto [source_gen, target_gen] = cascade_endpoints(P);
  std::ostringstream csv;
  csv << "t,mass,hamiltonian,hs_norm";
  for (std::size_t j = 1; j <= P; ++j) csv << ",gen_" << j;
  csv << "\n";
  std::optional<std::size_t> cascade_index;
  double mass0 = 0.0, ham0 = 0.0, mass_drift = 0.0, ham_drift = 0.0;
  std::vector<double> hs(joint.times.size());
  for (std::size_t k = 0; k < joint.times.size(); ++k) {
    const double t = joint.times[k];
    const auto st = joint_spec.unflatten(joint.states[k]);
    const double m = mass(st);
    const double h = hamiltonian(to_physical(st, t), cutoff);
    hs[k] = sobolev_norm(st, s);
    if (k == 0) {
      mass0 = m;
      ham0 = h;
    }
    mass_drift = std::max(mass_drift, std::abs(m - mass0) / mass0);
    ham_drift = std::max(ham_drift, std::abs(h - ham0) / std::abs(ham0));
    double lambda_mass = 0.0;
    std::vector<double> gen_mass(P, 0.0);
    for (std::size_t j = 1; j <= P; ++j) {
      for (const auto& n : lambda_set.generation(j)) gen_mass[j - 1] += std::norm(st.get(n));
      lambda_mass += gen_mass[j - 1];
    }
    csv << num(t) << "," << num(m) << "," << num(h) << "," << num(hs[k]);
    for (const double gm : gen_mass) csv << "," << num(gm / lambda_mass);
    csv << "\n";
    if (!cascade_index && gen_mass[target_gen - 1] / lambda_mass >= orbit->threshold_fraction) cascade_index = k;
  }
  write_file(out_dir, "e1_timeseries.csv", csv.str(), res.outputs);

  const double expected_ratio = std::sqrt(weight_sum(lambda_set.generation(target_gen), s) /
                                          weight_sum(lambda_set.generation(source_gen), s));
  const double initial_distance = sobolev_norm(lambda_state, s);
  res.report["lambda"] = lambda;
  res.report["t_end"] = t_end;
  res.report["hs_initial"] = hs.front();
  res.report["expected_ratio"] = expected_ratio;
  res.report["mass_drift"] = mass_drift;
  res.report["hamiltonian_drift"] = ham_drift;
  res.report["pasting_residual"] = residual;
  res.report["initial_distance"] = initial_distance;
  res.report["fixed_step"] = joint.h;

  verdicts.push_back(verdict("initial_distance", initial_distance <= delta * (1.0 + 1e-12), initial_distance,
                             delta, "<="));
  verdicts.push_back(verdict("cascade_reached", cascade_index.has_value(),
                             cascade_index ? Json(joint.times[*cascade_index]) : Json(nullptr), t_end, "t <="));
  if (cascade_index) {
    const double tc = joint.times[*cascade_index];
    const double growth = hs[*cascade_index] / hs.front();
    res.report["cascade_time"] = tc;
    res.report["cascade_time_rescaled"] = tc / (lambda * lambda);
    res.report["hs_at_cascade"] = hs[*cascade_index];
    res.report["growth_factor"] = growth;
    const double rel = std::abs(growth / expected_ratio - 1.0);
    verdicts.push_back(verdict("growth_matches_ratio", rel <= growth_tol, rel, growth_tol, "|growth/ratio - 1| <="));
    if (c.has("growth_target")) {
      const double K = c.number("growth_target", 1.0);
      verdicts.push_back(verdict("growth_target", growth >= K, growth, K, ">="));
    }
  }
  verdicts.push_back(verdict("pasting_residual", residual <= pasting_tol, residual, pasting_tol, "<="));
  res.report["verdicts"] = verdicts;
  res.pass = all_verdicts_pass(verdicts);
  write_report(out_dir, res);
  return res;
}

namespace {

struct ScanPoint {
  std::int64_t N = 0;
  double deviation = 0.0;
  double background_defect = 0.0;
  double leakage = 0.0;
  std::size_t box_size = 0;
  std::size_t steps = 0;
};

/// One round of parallelogram completion of `pts`.
std::vector<Frequency> complete_once(const std::vector<Frequency>& pts) {
  std::vector<Frequency> out = pts;
  for (const auto& a : pts) {
    for (const auto& b : pts) {
      for (const auto& d : pts) out.push_back(a - b + d);
    }
  }
  return canonical_set(out);
}

/// max |sum over box triples landing on m| for m outside the box: the
/// derivative the truncation throws away.
double leakage(const std::vector<Frequency>& box, std::span<const Complex> a, double t) {
  std::map<Frequency, Complex> outside;
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (a[i] == Complex{}) continue;
    for (std::size_t k = 0; k < box.size(); ++k) {
      if (a[k] == Complex{}) continue;
      for (std::size_t j = 0; j < box.size(); ++j) {
        if (a[j] == Complex{}) continue;
        const Frequency m = box[i] - box[j] + box[k];
        if (std::binary_search(box.begin(), box.end(), m)) continue;
        const auto w = omega4(box[i], box[j], box[k], m);
        outside[m] += a[i] * std::conj(a[j]) * a[k] * std::polar(1.0, static_cast<double>(w) * t);
      }
    }
  }
  double worst = 0.0;
  for (const auto& [m, z] : outside) worst = std::max(worst, std::abs(z));
  return worst;
}

}  // namespace

ExperimentResult run_stability_scan(const Json& cfg, const fs::path& out_dir) {
  Config c(cfg, "stability-scan config",
           {"set", "translation", "N_list", "A", "ctilde_l1", "T", "seed", "rtol", "atol", "completion_rounds",
            "samples", "slope_min", "slope_max", "mass_factor", "max_steps"});
  const auto g = c.has("set") ? load_set(c.raw("set")) : seed_family_p2();
  const Frequency shift = c.has("translation") ? frequency_from_json(c.raw("translation")) : Frequency{1, 0};
  std::vector<std::int64_t> n_list{16, 32, 64};
  if (c.has("N_list")) {
    n_list.clear();
    const auto& arr = c.raw("N_list");
    if (!arr.is_array() || arr.empty()) throw std::invalid_argument(c.where("N_list") + " must be a nonempty array");
    for (const auto& v : arr) {
      if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
        throw std::invalid_argument(c.where("N_list") + " entries must be positive integers");
      }
      n_list.push_back(v.get<std::int64_t>());
    }
  }
  const double A = nonnegative(c, "A", 1.0);
  const double l1_size = nonnegative(c, "ctilde_l1", 0.1);
  const double T = nonnegative(c, "T", 5.0);
  const auto seed = c.integer("seed", 1);
  const auto rounds = c.integer("completion_rounds", 0);
  if (rounds < 0 || rounds > 1) throw std::invalid_argument(c.where("completion_rounds") + " must be 0 or 1");
  const double slope_min = c.number("slope_min", -2.6);
  const double slope_max = c.number("slope_max", -1.4);
  const double mass_factor = positive(c, "mass_factor", 10.0);
  IntegratorOptions io;
  io.method = StepMethod::AdaptiveDp45;
  io.rtol = positive(c, "rtol", 1e-10);
  io.atol = nonnegative(c, "atol", 1e-13);
  io.h = 1e-4;
  io.max_steps = static_cast<std::size_t>(std::max<std::int64_t>(1, c.integer("max_steps", 200'000'000)));
  const auto samples = sample_count(c, 201);

  // Generation-constant perturbation with seeded phases and total l1 size.
  std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
  std::vector<double> phases(g.generation_count());
  for (auto& ph : phases) ph = 2.0 * std::numbers::pi * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  const double per_mode = g.size() == 0 ? 0.0 : l1_size / static_cast<double>(g.size());

  ExperimentResult res;
  res.report = Json{{"kind", "stability-scan"}, {"input", cfg}};
  Json points = Json::array();
  std::vector<ScanPoint> scan;
  std::ostringstream summary;
  summary << "N,deviation,background_mass_defect,leakage\n";
  for (const auto N : n_list) {
    const auto lam = affine_place(g, N, Frequency{-N * shift.x, -N * shift.y});
    const auto support = lam.support();
    const Frequency origin{0, 0};
    if (std::binary_search(support.begin(), support.end(), origin)) {
      throw VerificationError("placed set contains the origin", Json{{"N", N}, {"set", to_json(lam)}});
    }
    const std::array<Frequency, 1> zero{origin};
    const auto hits = find_connecting_parallelograms(support, zero, ResonanceCutoff::bounded(0));
    if (!hits.empty()) {
      throw VerificationError("placed set forms a rectangle with the origin",
                              Json{{"N", N}, {"witness", to_json(hits.front())}});
    }
    const auto props = verify_properties(lam, ResonanceCutoff::bounded(0));
    if (!props.all_pass()) throw VerificationError("placed set fails the property checks", to_json(props));

    std::vector<Frequency> box = support;
    for (const auto& n : support) box.push_back(-n);
    box.push_back(origin);
    box = canonical_set(box);
    if (rounds == 1) box = complete_once(box);
    const SystemSpec full(ResonanceCutoff::unbounded(), box);
    const SystemSpec resonant(ResonanceCutoff::bounded(0), support);

    SpectralState tilde;
    for (std::size_t j = 1; j <= lam.generation_count(); ++j) {
      for (const auto& n : lam.generation(j)) tilde.set(n, std::polar(per_mode, phases[j - 1]));
    }
    SpectralState start = tilde;
    start.set(origin, Complex{A, 0.0});
    const auto c0 = full.flatten(start);
    const auto r0 = resonant.flatten(tilde);
    const std::size_t nf = c0.size(), nr = r0.size();
    OdeVector y0(c0);
    y0.insert(y0.end(), r0.begin(), r0.end());
    std::vector<std::size_t> map_full(nr);
    for (std::size_t i = 0; i < nr; ++i) map_full[i] = *full.index_of(resonant.box()[i]);
    const std::size_t zero_index = *full.index_of(origin);

    const OdeRhs f = [&full, &resonant, nf](std::span<const Complex> y, double t, std::span<Complex> dy) {
      full.rhs(y.subspan(0, nf), t, dy.subspan(0, nf));
      resonant.rhs(y.subspan(nf), t, dy.subspan(nf));
    };
    ScanPoint pt;
    pt.N = N;
    pt.box_size = box.size();
    auto deviation = [&](std::span<const Complex> y) {
      double d = 0.0;
      for (std::size_t i = 0; i < nr; ++i) d += std::abs(y[map_full[i]] - y[nf + i]);
      return d;
    };
    const OdeObserver obs = [&](double, std::span<const Complex> y) {
      pt.deviation = std::max(pt.deviation, deviation(y));
      pt.background_defect = std::max(pt.background_defect, std::abs(A * A - std::norm(y[zero_index])));
      return true;
    };
    IntegratorOptions run_opts = io;
    if (T > 0.0) run_opts.sample_times = uniform_samples(0.0, T, samples);
    const auto traj = integrate(f, y0, 0.0, T, run_opts, obs);
    pt.steps = traj.accepted_steps;

    std::ostringstream series;
    series << "t,deviation,background_mass_defect,leakage\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      const auto& y = traj.states[k];
      const double leak = leakage(full.box(), std::span<const Complex>(y).subspan(0, nf), traj.times[k]);
      pt.leakage = std::max(pt.leakage, leak);
      series << num(traj.times[k]) << "," << num(deviation(y)) << ","
             << num(std::abs(A * A - std::norm(y[zero_index]))) << "," << num(leak) << "\n";
    }
    write_file(out_dir, "stability_N" + std::to_string(N) + ".csv", series.str(), res.outputs);
    summary << N << "," << num(pt.deviation) << "," << num(pt.background_defect) << "," << num(pt.leakage) << "\n";
    points.push_back(Json{{"N", N},
                          {"set", to_json(lam)},
                          {"box_size", pt.box_size},
                          {"accepted_steps", pt.steps},
                          {"deviation", pt.deviation},
                          {"background_mass_defect", pt.background_defect},
                          {"leakage", pt.leakage}});
    scan.push_back(pt);
  }
  write_file(out_dir, "stability_scaling.csv", summary.str(), res.outputs);
  res.report["points"] = points;

  Json verdicts = Json::array();
  std::vector<double> xs, ys;
  for (const auto& p : scan) {
    xs.push_back(static_cast<double>(p.N));
    ys.push_back(p.deviation);
  }
  const bool fittable = scan.size() >= 2 && std::all_of(ys.begin(), ys.end(), [](double v) { return v > 0.0; });
  if (fittable) {
    const double slope = fit_loglog_slope(xs, ys);
    res.report["slope"] = slope;
    double log_c = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) log_c += std::log(ys[i]) - slope * std::log(xs[i]);
    res.report["fitted_constant"] = std::exp(log_c / static_cast<double>(xs.size()));
    verdicts.push_back(verdict("slope_in_range", slope >= slope_min && slope <= slope_max, slope,
                               Json::array({slope_min, slope_max}), "in"));
  } else {
    res.report["slope"] = nullptr;
    verdicts.push_back(verdict("slope_in_range", false, nullptr, Json::array({slope_min, slope_max}), "in"));
  }
  double worst_bg = 0.0;
  for (const auto& p : scan) worst_bg = std::max(worst_bg, p.background_defect);
  const double bg_bound = mass_factor * l1_size * l1_size;
  verdicts.push_back(verdict("background_mass", worst_bg <= bg_bound, worst_bg, bg_bound, "<="));
  res.report["verdicts"] = verdicts;
  res.pass = all_verdicts_pass(verdicts);
  write_report(out_dir, res);
  return res;
}

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"verify-set", "build-lambda", "toy-cascade",
                                              "simulate",   "norm-growth",  "stability-scan"};
  return kinds;
}

ExperimentResult run_experiment(std::string_view kind, const Json& cfg, const fs::path& out_dir) {
  try {
    if (kind == "verify-set") return run_verify(cfg, out_dir);
    if (kind == "build-lambda") return run_build_lambda(cfg, out_dir);
    if (kind == "toy-cascade") return run_toy(cfg, out_dir);
    if (kind == "simulate") return run_simulate(cfg, out_dir);
    if (kind == "norm-growth") return run_norm_growth(cfg, out_dir);
    if (kind == "stability-scan") return run_stability_scan(cfg, out_dir);
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed config: ") + e.what());
  }
  throw std::invalid_argument("unknown experiment kind \"" + std::string(kind) + "\"");
}

}  // namespace rescascade
