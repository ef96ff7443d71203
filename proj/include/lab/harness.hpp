#pragma once

// Experiment orchestration: JSON configs, LHS/RHS runs, verdicts and run artifacts.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lab/ensembles.hpp"
#include "lab/intlin.hpp"
#include "lab/rhs.hpp"
#include "lab/transforms.hpp"
#include "lab/weights.hpp"

namespace lab::harness {

enum class Kind { Siegel, Rogers, Dual, Fbeta, Weights, Moments, Selftest };

const char* to_string(Kind k);
Kind kind_from_string(const std::string& s);  // ConfigError on unknown names

struct TolerancePolicy {
  double sigmas = 3.0;
  double stderr_floor = 1e-12;
};

struct ExperimentConfig {
  Kind kind = Kind::Siegel;
  int n = 2;
  transforms::TestFunction rho;
  ensembles::EnsembleSpec ensemble;
  rhs::Truncation trunc;
  bool primitive = false;  // rogers: primitive tuples instead of all tuples
  intlin::IntMat beta;     // fbeta, weights
  std::vector<double> V, W;  // moments
  std::uint64_t seed = 1;
  TolerancePolicy tolerance;
  std::string output_dir = "runs";
  int threads = 0;
  nlohmann::json source;  // resolved config, echoed into every report
};

// Parses and validates; every problem is a ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& file);
nlohmann::json resolved_json(const ExperimentConfig& c);

enum class Verdict { Pass, Fail, Inconclusive };
const char* to_string(Verdict v);

struct Comparison {
  double z = 0;
  Verdict verdict = Verdict::Fail;
};

// Pass iff |mean - value| <= sigmas * stderr + tail. A pass that holds only through the
// tail, with stderr above the floor, is inconclusive.
Comparison compare(const transforms::Estimate& lhs, const weights::TruncatedValue& rhs,
                   const TolerancePolicy& tol = {});

struct Manifest {
  std::uint64_t seed = 0;
  std::string code_version;
  std::string timestamp;
  nlohmann::json config;
};

struct RunReport {
  Kind kind = Kind::Siegel;
  nlohmann::json config;
  transforms::Estimate lhs;
  weights::TruncatedValue rhs;
  Comparison cmp;
  double wall_seconds = 0;
  Manifest manifest;
  std::vector<double> member_values;
  std::vector<double> member_weights;  // empty unless the ensemble is weighted
  nlohmann::json details;              // kind-specific extras
};

RunReport run_experiment(const ExperimentConfig& config);

nlohmann::json report_json(const RunReport& r);

// Writes report.json, members.csv, manifest.json (and member_weights.csv when weighted)
// under output_dir/run-<timestamp>-<seed>/ and returns that directory.
std::filesystem::path write_artifacts(const RunReport& r, const std::filesystem::path& output_dir);

// Re-runs the configuration stored in a manifest.json.
RunReport replay(const std::filesystem::path& manifest_file);

struct SelftestResult {
  int checks = 0;
  int passed = 0;
  std::vector<std::string> failures;
};
// Oracle checks over the exact modules: integer linear algebra, weights, rhs closed forms.
SelftestResult run_selftest();

std::string code_version();

}  // namespace lab::harness
