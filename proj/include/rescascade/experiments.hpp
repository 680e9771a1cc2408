#pragma once

// Config-driven experiment runners. Each takes a JSON config, writes its
// files into out_dir (nothing is written when out_dir is empty) and returns
// a JSON report with verdicts.
//
// Errors: std::invalid_argument for malformed configs, VerificationError when
// an input set fails the property checks it must satisfy.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rescascade/json_io.hpp"

namespace rescascade {

class VerificationError : public std::runtime_error {
 public:
  VerificationError(const std::string& what, Json report) : std::runtime_error(what), report_(std::move(report)) {}
  const Json& report() const { return report_; }

 private:
  Json report_;
};

struct ExperimentResult {
  Json report;
  bool pass = false;
  std::vector<std::filesystem::path> outputs;
};

ExperimentResult run_verify(const Json& cfg, const std::filesystem::path& out_dir);
ExperimentResult run_build_lambda(const Json& cfg, const std::filesystem::path& out_dir);
ExperimentResult run_toy(const Json& cfg, const std::filesystem::path& out_dir);
ExperimentResult run_simulate(const Json& cfg, const std::filesystem::path& out_dir);
/// Cascade-driven h^s growth on a placed generational set (E1).
ExperimentResult run_norm_growth(const Json& cfg, const std::filesystem::path& out_dir);
/// Plane-wave stability deviation versus the dilation N (E3).
ExperimentResult run_stability_scan(const Json& cfg, const std::filesystem::path& out_dir);

/// Dispatches on the subcommand name: verify-set, build-lambda, toy-cascade,
/// simulate, norm-growth, stability-scan. Throws std::invalid_argument for
/// unknown kinds.
ExperimentResult run_experiment(std::string_view kind, const Json& cfg, const std::filesystem::path& out_dir);

const std::vector<std::string>& experiment_kinds();

/// Least-squares slope of log(y) against log(x). Requires two or more
/// positive points.
double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace rescascade
