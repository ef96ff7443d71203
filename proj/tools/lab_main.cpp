// lab: run one experiment from a JSON config and write its artifacts.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "lab/error.hpp"
#include "lab/harness.hpp"

namespace {

using lab::harness::Kind;
using nlohmann::json;

int exit_code(const lab::harness::RunReport& r, bool strict) {
  return strict && r.cmp.verdict == lab::harness::Verdict::Fail ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lattice mean value laboratory"};
  app.require_subcommand(1);

  std::string config_file, out_dir, emit = "text";
  std::uint64_t seed = 0;
  bool strict = false;

  for (const char* name : {"siegel", "rogers", "dual", "fbeta", "weights", "moments", "selftest"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run a ") + name + " experiment");
    auto* cfg = sub->add_option("--config", config_file, "JSON config file")->check(CLI::ExistingFile);
    if (std::string(name) != "selftest") cfg->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_flag("--strict", strict, "exit 1 when the verdict is fail");
    sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
    sub->add_option("--emit", emit, "summary printed to stdout")->check(CLI::IsMember({"text", "csv", "json"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string kind = app.get_subcommands().front()->get_name();
  try {
    json j = json::object();
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      try {
        j = json::parse(in, nullptr, true, true);
      } catch (const json::exception& e) {
        lab::fail(lab::ErrorKind::ConfigError, std::string("malformed config: ") + e.what());
      }
    }
    if (!j.is_object()) lab::fail(lab::ErrorKind::ConfigError, "config must be a JSON object");
    if (j.contains("kind") && j["kind"] != kind)
      lab::fail(lab::ErrorKind::ConfigError, "config kind does not match the subcommand");
    j["kind"] = kind;
    if (app.get_subcommands().front()->count("--seed")) j["seed"] = seed;
    if (!out_dir.empty()) j["output_dir"] = out_dir;

    const lab::harness::ExperimentConfig cfg = lab::harness::parse_config(j);
    const lab::harness::RunReport r = lab::harness::run_experiment(cfg);
    const auto dir = lab::harness::write_artifacts(r, cfg.output_dir);

    if (emit == "json") {
      std::cout << lab::harness::report_json(r).dump(2) << "\n";
    } else if (emit == "csv") {
      std::cout << "kind,lhs_mean,lhs_std_error,count,rhs_value,rhs_tail,z_score,verdict,run_dir\n";
      std::cout.precision(17);
      std::cout << kind << ',' << r.lhs.mean << ',' << r.lhs.std_error << ',' << r.lhs.count << ',' << r.rhs.value << ','
                << r.rhs.tail_bound << ',' << r.cmp.z << ',' << to_string(r.cmp.verdict) << ',' << dir.string() << "\n";
    } else {
      std::cout.precision(10);
      std::cout << kind << ": lhs " << r.lhs.mean << " +- " << r.lhs.std_error << " (" << r.lhs.count << ")  rhs "
                << r.rhs.value << " (tail " << r.rhs.tail_bound << ")  z " << r.cmp.z << "  "
                << to_string(r.cmp.verdict) << "\n";
      if (r.kind == Kind::Selftest)
        for (const auto& f : r.details["failures"]) std::cout << "  failed: " << f.get<std::string>() << "\n";
      std::cout << "artifacts: " << dir.string() << "\n";
    }
    return exit_code(r, strict);
  } catch (const lab::Error& e) {
    std::cerr << "lab: " << lab::to_string(e.kind()) << ": " << e.what() << "\n";
    return e.kind() == lab::ErrorKind::ConfigError ? 2 : 1;
  }
}
