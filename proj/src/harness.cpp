#include "lab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include "lab/error.hpp"
#include "lab/geom.hpp"

#ifndef LAB_VERSION
#define LAB_VERSION "0.0.0"
#endif

namespace lab::harness {

using nlohmann::json;
using transforms::RadialProfile;

namespace {

[[noreturn]] void config_error(const std::string& msg) { fail(ErrorKind::ConfigError, msg); }

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(std::string("field '") + key + "': " + e.what());
  }
}

RadialProfile parse_slot(const json& s, int n) {
  if (!s.is_object()) config_error("test function slots must be objects");
  const std::string type = get_or<std::string>(s, "type", "");
  try {
    if (type == "gaussian") return RadialProfile::gaussian(get_or<double>(s, "t", 1.0));
    if (type == "ball") {
      const bool excl = get_or<bool>(s, "exclude_origin", true);
      if (s.contains("radius")) {
        const double R = get_or<double>(s, "radius", 0.0);
        if (!(R > 0)) config_error("ball radius must be positive");
        return RadialProfile::ball(geom::ball_volume(n) * std::pow(R, n), excl);
      }
      return RadialProfile::ball(get_or<double>(s, "volume", 0.0), excl);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    config_error(e.what());
  }
  config_error("unknown slot type '" + type + "'");
}

json slot_json(const RadialProfile& f) {
  if (f.kind == RadialProfile::Kind::Gaussian) return {{"type", "gaussian"}, {"t", f.t}};
  return {{"type", "ball"}, {"volume", f.volume}, {"exclude_origin", f.exclude_origin}};
}

intlin::IntMat parse_matrix(const json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty())
    config_error(std::string(what) + " must be a nonempty list of rows");
  const std::size_t r = j.size(), c = j[0].size();
  intlin::IntMat m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (!j[i].is_array() || j[i].size() != c) config_error(std::string(what) + " rows must have equal length");
    for (std::size_t k = 0; k < c; ++k) {
      if (!j[i][k].is_number_integer()) config_error(std::string(what) + " entries must be integers");
      m(i, k) = j[i][k].get<long>();
    }
  }
  return m;
}

json matrix_json(const intlin::IntMat& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(m.at_ll(i, k));
    rows.push_back(row);
  }
  return rows;
}

ensembles::EnsembleSpec parse_ensemble(const json& e, int n, std::uint64_t seed) {
  if (!e.is_object()) config_error("ensemble must be an object");
  const std::string type = get_or<std::string>(e, "type", "");
  if (type == "x2") {
    if (n != 2) config_error("the x2 ensemble needs n = 2");
    const long long s = get_or<long long>(e, "samples", 0);
    if (s < 1) config_error("x2 samples must be positive");
    return ensembles::X2Exact{s, seed};
  }
  if (type == "hecke") {
    ensembles::Hecke h;
    h.n = n;
    h.p = get_or<long long>(e, "p", 0);
    h.seed = seed;
    if (!ensembles::is_prime(h.p)) config_error("hecke p must be prime");
    const std::string mode = get_or<std::string>(e, "mode", "full");
    if (mode == "full")
      h.mode = ensembles::HeckeMode::Full;
    else if (mode == "sampled")
      h.mode = ensembles::HeckeMode::Sampled;
    else if (mode == "orbits")
      h.mode = ensembles::HeckeMode::Orbits;
    else
      config_error("hecke mode must be full, sampled or orbits");
    h.count = get_or<long long>(e, "count", 0);
    if (h.mode == ensembles::HeckeMode::Sampled && h.count < 1) config_error("sampled hecke needs count >= 1");
    if (h.mode != ensembles::HeckeMode::Sampled) {
      try {
        ensembles::projective_count(n, h.p);
      } catch (const Error& err) {
        config_error(err.what());
      }
    }
    return h;
  }
  if (type == "fixed") {
    const json& bases = e.contains("bases") ? e.at("bases") : json();
    if (!bases.is_array() || bases.empty()) config_error("fixed ensemble needs a nonempty 'bases' list");
    ensembles::Fixed f;
    for (const auto& b : bases) {
      if (!b.is_array() || static_cast<int>(b.size()) != n) config_error("each basis must have n rows");
      geom::RealMat m(n, n);
      for (int i = 0; i < n; ++i) {
        if (!b[i].is_array() || static_cast<int>(b[i].size()) != n) config_error("each basis must be n x n");
        for (int k = 0; k < n; ++k) {
          if (!b[i][k].is_number()) config_error("basis entries must be numbers");
          m(i, k) = b[i][k].get<double>();
        }
      }
      try {
        f.lattices.push_back(geom::Lattice::from_basis(m));
      } catch (const Error& err) {
        config_error(err.what());
      }
    }
    return f;
  }
  config_error("ensemble type must be x2, hecke or fixed");
}

json ensemble_json(const ensembles::EnsembleSpec& s) {
  return std::visit(
      [](const auto& e) -> json {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, ensembles::X2Exact>) {
          return {{"type", "x2"}, {"samples", e.samples}};
        } else if constexpr (std::is_same_v<T, ensembles::Hecke>) {
          const char* mode = e.mode == ensembles::HeckeMode::Full      ? "full"
                             : e.mode == ensembles::HeckeMode::Sampled ? "sampled"
                                                                       : "orbits";
          json j{{"type", "hecke"}, {"p", e.p}, {"mode", mode}};
          if (e.mode == ensembles::HeckeMode::Sampled) j["count"] = e.count;
          return j;
        } else {
          json bases = json::array();
          for (const auto& L : e.lattices) {
            json b = json::array();
            for (int i = 0; i < L.dim(); ++i) {
              json row = json::array();
              for (int k = 0; k < L.dim(); ++k) row.push_back(L.basis(i, k));
              b.push_back(row);
            }
            bases.push_back(b);
          }
          return {{"type", "fixed"}, {"bases", bases}};
        }
      },
      s);
}

bool needs_ensemble(Kind k) { return k != Kind::Weights && k != Kind::Selftest; }

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
  return os.str();
}

double product_of_counts(const transforms::Counts& c) {
  double s = 1.0;
  for (long long v : c.N) s *= static_cast<double>(v);
  for (long long v : c.Ndual) s *= static_cast<double>(v);
  return s;
}

intlin::IntMat identity(std::size_t m) {
  intlin::IntMat I(m, m);
  for (std::size_t i = 0; i < m; ++i) I(i, i) = 1;
  return I;
}

intlin::IntMat transpose(const intlin::IntMat& a) {
  intlin::IntMat t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

}  // namespace

const char* to_string(Kind k) {
  switch (k) {
    case Kind::Siegel: return "siegel";
    case Kind::Rogers: return "rogers";
    case Kind::Dual: return "dual";
    case Kind::Fbeta: return "fbeta";
    case Kind::Weights: return "weights";
    case Kind::Moments: return "moments";
    case Kind::Selftest: return "selftest";
  }
  return "?";
}

Kind kind_from_string(const std::string& s) {
  for (Kind k : {Kind::Siegel, Kind::Rogers, Kind::Dual, Kind::Fbeta, Kind::Weights, Kind::Moments, Kind::Selftest})
    if (s == to_string(k)) return k;
  config_error("unknown experiment kind '" + s + "'");
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string code_version() { return LAB_VERSION; }

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) config_error("config must be a JSON object");
  ExperimentConfig c;
  c.kind = kind_from_string(get_or<std::string>(j, "kind", ""));
  c.seed = get_or<std::uint64_t>(j, "seed", 1);
  c.output_dir = get_or<std::string>(j, "output_dir", "runs");
  c.threads = get_or<int>(j, "threads", 0);
  if (c.threads < 0) config_error("threads must be nonnegative");
  if (j.contains("tolerance")) {
    const json& t = j.at("tolerance");
    c.tolerance.sigmas = get_or<double>(t, "sigmas", 3.0);
    c.tolerance.stderr_floor = get_or<double>(t, "stderr_floor", 1e-12);
    if (!(c.tolerance.sigmas > 0) || !(c.tolerance.stderr_floor > 0)) config_error("tolerance values must be positive");
  }
  if (c.kind == Kind::Selftest) {
    c.source = resolved_json(c);
    return c;
  }

  c.n = get_or<int>(j, "n", 0);
  if (c.n < 2) config_error("n must be at least 2");
  if (j.contains("truncation")) {
    const json& t = j.at("truncation");
    c.trunc.H = get_or<long>(t, "H", c.trunc.H);
    c.trunc.Dmax = get_or<long>(t, "Dmax", c.trunc.Dmax);
    c.trunc.beta_bound = get_or<long>(t, "beta_bound", c.trunc.beta_bound);
    if (c.trunc.H < 1 || c.trunc.Dmax < 1 || c.trunc.beta_bound < 0) config_error("truncation counts must be positive");
  }
  if (j.contains("test_function")) {
    const json& tf = j.at("test_function");
    for (const char* side : {"primal", "dual"}) {
      if (!tf.contains(side)) continue;
      if (!tf.at(side).is_array()) config_error(std::string(side) + " slots must be a list");
      auto& dst = std::string(side) == "primal" ? c.rho.primal : c.rho.dual;
      for (const auto& s : tf.at(side)) dst.push_back(parse_slot(s, c.n));
    }
  }
  c.primitive = get_or<bool>(j, "primitive", false);
  if (j.contains("beta")) c.beta = parse_matrix(j.at("beta"), "beta");
  c.V = get_or<std::vector<double>>(j, "V", {});
  c.W = get_or<std::vector<double>>(j, "W", {});

  const int k1 = static_cast<int>(c.rho.primal.size()), k2 = static_cast<int>(c.rho.dual.size());
  switch (c.kind) {
    case Kind::Siegel:
      if (k1 != 1 || k2 != 0) config_error("siegel needs one primal slot and no dual slots");
      break;
    case Kind::Rogers:
      if (k1 < 1 || k2 != 0) config_error("rogers needs primal slots only");
      if (k1 >= c.n) config_error("rogers needs k < n");
      break;
    case Kind::Dual:
      if (k1 + k2 < 1) config_error("dual needs at least one slot");
      if (c.n <= k1 + k2) config_error("dual needs n > k1 + k2");
      break;
    case Kind::Fbeta:
      if (c.beta.rows() == 0) config_error("fbeta needs beta");
      if (static_cast<int>(c.beta.rows()) != k1 || static_cast<int>(c.beta.cols()) != k2)
        config_error("beta must be k1 x k2");
      if (k1 + k2 >= c.n) config_error("fbeta needs m1 + m2 < n");
      break;
    case Kind::Weights:
      if (c.beta.rows() == 0) config_error("weights needs beta");
      if (static_cast<int>(c.beta.rows() + c.beta.cols()) >= c.n) config_error("weights needs m1 + m2 < n");
      break;
    case Kind::Moments:
      if (c.V.empty() && c.W.empty()) config_error("moments needs V or W");
      if (!std::is_sorted(c.V.begin(), c.V.end()) || !std::is_sorted(c.W.begin(), c.W.end()))
        config_error("V and W must be sorted nondecreasing");
      for (double v : c.V)
        if (!(v > 0)) config_error("volumes must be positive");
      for (double v : c.W)
        if (!(v > 0)) config_error("volumes must be positive");
      break;
    case Kind::Selftest:
      break;
  }
  if (needs_ensemble(c.kind)) {
    if (!j.contains("ensemble")) config_error("missing ensemble");
    c.ensemble = parse_ensemble(j.at("ensemble"), c.n, c.seed);
  }
  c.source = resolved_json(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) config_error("cannot read config " + file.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    config_error(std::string("malformed config: ") + e.what());
  }
  return parse_config(j);
}

json resolved_json(const ExperimentConfig& c) {
  json j{{"kind", to_string(c.kind)},
         {"seed", c.seed},
         {"output_dir", c.output_dir},
         {"threads", c.threads},
         {"tolerance", {{"sigmas", c.tolerance.sigmas}, {"stderr_floor", c.tolerance.stderr_floor}}}};
  if (c.kind == Kind::Selftest) return j;
  j["n"] = c.n;
  json p = json::array(), d = json::array();
  for (const auto& f : c.rho.primal) p.push_back(slot_json(f));
  for (const auto& f : c.rho.dual) d.push_back(slot_json(f));
  j["test_function"] = {{"primal", p}, {"dual", d}};
  j["truncation"] = {{"H", c.trunc.H}, {"Dmax", c.trunc.Dmax}, {"beta_bound", c.trunc.beta_bound}};
  j["primitive"] = c.primitive;
  if (c.beta.rows() > 0) j["beta"] = matrix_json(c.beta);
  j["V"] = c.V;
  j["W"] = c.W;
  if (needs_ensemble(c.kind)) j["ensemble"] = ensemble_json(c.ensemble);
  return j;
}

Comparison compare(const transforms::Estimate& lhs, const weights::TruncatedValue& rhs, const TolerancePolicy& tol) {
  Comparison c;
  const double se = lhs.std_error;
  c.z = (lhs.mean - rhs.value - rhs.tail_bound / 2) / std::max(se, tol.stderr_floor);
  const double delta = std::fabs(lhs.mean - rhs.value);
  if (!(delta <= tol.sigmas * se + rhs.tail_bound))
    c.verdict = Verdict::Fail;
  else if (delta > tol.sigmas * se && se > tol.stderr_floor)
    c.verdict = Verdict::Inconclusive;
  else
    c.verdict = Verdict::Pass;
  return c;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport r;
  r.kind = cfg.kind;
  r.config = cfg.source.is_null() ? resolved_json(cfg) : cfg.source;
  r.manifest.seed = cfg.seed;
  r.manifest.code_version = code_version();
  r.manifest.timestamp = utc_timestamp();
  r.manifest.config = r.config;
  const int n = cfg.n;

  auto run_ensemble = [&](const transforms::Statistic& stat) {
    ensembles::Ensemble ens(cfg.ensemble);
    transforms::EstimateOptions opts;
    opts.threads = cfg.threads;
    opts.keep_values = true;
    transforms::MultiEstimate m = transforms::ensemble_estimate_multi(
        ens, 1, [&](const geom::Lattice& L, double* out) { out[0] = stat(L); }, opts);
    r.lhs = m.components[0];
    r.member_values = std::move(m.values);
    r.member_weights = std::move(m.weights);
    r.details["ensemble"] = ens.describe();
  };

  try {
    switch (cfg.kind) {
      case Kind::Siegel: {
        const RadialProfile f = cfg.rho.primal[0];
        r.rhs.value = rhs::siegel_rhs(f, n);
        run_ensemble([&](const geom::Lattice& L) { return transforms::siegel_sum(L, f); });
        break;
      }
      case Kind::Rogers: {
        const int k = static_cast<int>(cfg.rho.primal.size());
        if (cfg.primitive) {
          r.rhs.value = rhs::primitive_rhs(cfg.rho.primal, n);
          run_ensemble([&](const geom::Lattice& L) { return transforms::primitive_tuple_sum(L, k, cfg.rho); });
        } else {
          r.rhs = rhs::rogers_rhs(cfg.rho.primal, n, cfg.trunc.H);
          run_ensemble([&](const geom::Lattice& L) { return transforms::product_multisum(L, cfg.rho); });
        }
        break;
      }
      case Kind::Dual: {
        rhs::RhsBreakdown b = rhs::dual_rhs(cfg.rho, n, cfg.trunc);
        r.rhs.value = b.total;
        r.rhs.tail_bound = b.tail;
        r.rhs.cutoff = cfg.trunc.Dmax;
        r.rhs.heuristic = b.heuristic;
        double paired = 0;
        for (const auto& t : b.terms) paired += t.weight * t.integral;
        r.details["rhs_terms"] = b.terms.size();
        r.details["rhs_paired_sum"] = paired;
        r.details["rhs_boundary_terms"] = b.boundary_terms;
        r.details["rhs_constant_term"] = b.constant_term;
        run_ensemble([&](const geom::Lattice& L) { return transforms::product_multisum(L, cfg.rho); });
        break;
      }
      case Kind::Fbeta: {
        const std::size_t m1 = cfg.beta.rows(), m2 = cfg.beta.cols();
        weights::TruncatedValue eta = rhs::eta_integral(cfg.beta, identity(m1), identity(m2), cfg.rho, n);
        const double zp = weights::zeta_product(n - static_cast<int>(m1) + 1, n);
        r.rhs.value = eta.value / zp;
        r.rhs.tail_bound = eta.tail_bound / zp;
        r.rhs.heuristic = eta.heuristic;
        r.details["eta"] = eta.value;
        r.details["zeta_product"] = zp;
        run_ensemble([&](const geom::Lattice& L) { return transforms::f_beta_sum(L, cfg.beta, cfg.rho); });
        break;
      }
      case Kind::Moments: {
        r.rhs.value = rhs::moment_rhs(cfg.V, cfg.W);
        r.details["rhs_is_limit"] = true;
        run_ensemble([&](const geom::Lattice& L) { return product_of_counts(transforms::count_statistic(L, cfg.V, cfg.W)); });
        break;
      }
      case Kind::Weights: {
        // W(beta^T) against W(beta): brackets of the two truncations must overlap.
        weights::TruncatedValue a = weights::weight_W(cfg.beta, n, cfg.trunc.Dmax);
        weights::TruncatedValue b = weights::weight_W(transpose(cfg.beta), n, cfg.trunc.Dmax);
        r.rhs = a;
        r.lhs.mean = b.value;
        r.lhs.count = 1;
        r.lhs.seed = cfg.seed;
        r.member_values = {b.value};
        r.details["W_beta"] = {{"value", a.value}, {"tail", a.tail_bound}, {"heuristic", a.heuristic}};
        r.details["W_beta_transpose"] = {{"value", b.value}, {"tail", b.tail_bound}, {"heuristic", b.heuristic}};
        const std::size_t m1 = cfg.beta.rows(), m2 = cfg.beta.cols();
        const double lower = 1.0 / weights::zeta_product(n - static_cast<int>(m1) + 1, n);
        double upper = 1.0;
        for (std::size_t j = 1; j <= m1; ++j) upper *= weights::zeta_val(n - static_cast<int>(m2 + j) + 1);
        upper *= lower;
        r.details["trivial_bounds"] = {lower, upper};
        r.details["brackets_overlap"] = b.value <= a.value + a.tail_bound && a.value <= b.value + b.tail_bound;
        break;
      }
      case Kind::Selftest: {
        SelftestResult s = run_selftest();
        r.lhs.mean = s.passed;
        r.lhs.count = s.checks;
        r.lhs.seed = cfg.seed;
        r.rhs.value = s.checks;
        r.member_values.assign(s.checks, 1.0);
        r.details["checks"] = s.checks;
        r.details["passed"] = s.passed;
        r.details["failures"] = s.failures;
        break;
      }
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::DomainError) config_error(e.what());
    throw;
  }
  r.cmp = compare(r.lhs, r.rhs, cfg.tolerance);
  if (cfg.kind == Kind::Selftest)
    r.cmp.verdict = r.lhs.mean == r.rhs.value ? Verdict::Pass : Verdict::Fail;
  if (cfg.kind == Kind::Weights) r.cmp.verdict = r.details["brackets_overlap"].get<bool>() ? Verdict::Pass : Verdict::Fail;
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

json report_json(const RunReport& r) {
  json lhs{{"mean", r.lhs.mean}, {"std_error", r.lhs.std_error}, {"count", r.lhs.count}, {"seed", r.lhs.seed}};
  json rhs{{"value", r.rhs.value}, {"tail", r.rhs.tail_bound}, {"cutoff", r.rhs.cutoff}, {"heuristic", r.rhs.heuristic}};
  return json{{"kind", to_string(r.kind)},
              {"config", r.config},
              {"lhs", lhs},
              {"rhs", rhs},
              {"z_score", r.cmp.z},
              {"verdict", to_string(r.cmp.verdict)},
              {"wall_seconds", r.wall_seconds},
              {"manifest",
               {{"seed", r.manifest.seed}, {"code_version", r.manifest.code_version}, {"timestamp", r.manifest.timestamp}}},
              {"details", r.details}};
}

std::filesystem::path write_artifacts(const RunReport& r, const std::filesystem::path& output_dir) {
  namespace fs = std::filesystem;
  const std::string base = "run-" + r.manifest.timestamp + "-" + std::to_string(r.manifest.seed);
  fs::path dir = output_dir / base;
  for (int i = 2; fs::exists(dir); ++i) dir = output_dir / (base + "-" + std::to_string(i));
  fs::create_directories(dir);

  auto write = [&](const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    if (!out) fail(ErrorKind::NumericalFailure, "cannot write " + p.string());
    out << text;
  };
  write(dir / "report.json", report_json(r).dump(2) + "\n");
  json manifest{{"seed", r.manifest.seed},
                {"code_version", r.manifest.code_version},
                {"timestamp", r.manifest.timestamp},
                {"config", r.manifest.config}};
  write(dir / "manifest.json", manifest.dump(2) + "\n");

  std::ostringstream csv;
  csv << std::setprecision(17) << "member_index,statistic_value\n";
  for (std::size_t i = 0; i < r.member_values.size(); ++i) csv << i << ',' << r.member_values[i] << '\n';
  write(dir / "members.csv", csv.str());
  if (!r.member_weights.empty()) {
    std::ostringstream w;
    w << std::setprecision(17) << "member_index,weight\n";
    for (std::size_t i = 0; i < r.member_weights.size(); ++i) w << i << ',' << r.member_weights[i] << '\n';
    write(dir / "member_weights.csv", w.str());
  }
  return dir;
}

RunReport replay(const std::filesystem::path& manifest_file) {
  std::ifstream in(manifest_file);
  if (!in) config_error("cannot read manifest " + manifest_file.string());
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    config_error(std::string("malformed manifest: ") + e.what());
  }
  if (!m.contains("config")) config_error("manifest has no config");
  return run_experiment(parse_config(m.at("config")));
}

SelftestResult run_selftest() {
  SelftestResult s;
  auto check = [&](bool ok, const std::string& what) {
    ++s.checks;
    if (ok)
      ++s.passed;
    else
      s.failures.push_back(what);
  };
  auto guarded = [&](const std::string& what, const std::function<bool()>& f) {
    try {
      check(f(), what);
    } catch (const std::exception& e) {
      check(false, what + ": " + e.what());
    }
  };

  // Smith and Hermite forms on every 2x2 matrix with entries in [-2, 2].
  guarded("smith/hermite 2x2 box", [] {
    for (int code = 0; code < 625; ++code) {
      int c = code;
      intlin::IntMat a(2, 2);
      for (int i = 0; i < 4; ++i, c /= 5) a(i / 2, i % 2) = c % 5 - 2;
      const intlin::SmithData sd = intlin::smith(a);
      if (sd.U * sd.D * sd.V != a) return false;
      const mpz_class d = intlin::det(a);
      if (abs(d) != sd.divisors[0] * sd.divisors[1]) return false;
      mpz_class g = 0;
      for (int i = 0; i < 4; ++i) g = gcd(g, a(i / 2, i % 2));
      if (sd.divisors[0] != g) return false;
      const intlin::HermiteData h = intlin::row_hermite(a);
      if (h.gamma * a != h.H) return false;
      if (abs(intlin::det(h.gamma)) != 1) return false;
      if (intlin::row_hermite(h.H).H != h.H) return false;
    }
    return true;
  });

  // Congruence counts against exhaustion.
  guarded("congruence_count small grid", [] {
    for (long q = 1; q <= 4; ++q)
      for (int code = 0; code < 49; ++code) {
        const long t0 = code % 7 - 3, t1 = code / 7 - 3;
        intlin::IntMat theta{{t0}, {t1}};
        long brute = 0;
        for (long a = 0; a < q; ++a)
          for (long b = 0; b < q; ++b)
            if (((t0 * a + t1 * b) % q + q) % q == 0) ++brute;
        if (intlin::congruence_count(theta, q) != brute) return false;
      }
    return true;
  });

  guarded("primitivity of 2x1 columns matches gcd", [] {
    for (long a = -4; a <= 4; ++a)
      for (long b = -4; b <= 4; ++b) {
        if (!a && !b) continue;
        if (intlin::is_primitive(intlin::IntMat{{a}, {b}}) != (std::gcd(a, b) == 1)) return false;
      }
    return true;
  });

  guarded("zeta closed forms", [] {
    return std::fabs(weights::zeta_val(2) - M_PI * M_PI / 6) < 1e-14 &&
           std::fabs(weights::zeta_val(4) - std::pow(M_PI, 4) / 90) < 1e-14;
  });

  guarded("W(1) = 1/zeta(n)", [] {
    for (int n = 4; n <= 8; ++n)
      if (std::fabs(weights::weight_W(intlin::IntMat{{1}}, n, 100).value - 1 / weights::zeta_val(n)) > 1e-14)
        return false;
    return true;
  });

  guarded("W(0) brackets zeta(n-1)/zeta(n)", [] {
    const weights::TruncatedValue w = weights::weight_W(intlin::IntMat{{0}}, 5, 2000);
    const double exact = weights::zeta_val(4) / weights::zeta_val(5);
    return w.value <= exact + 1e-14 && exact <= w.value + w.tail_bound + 1e-14;
  });

  guarded("linearized congruence identity", [] {
    for (long q = 1; q <= 4; ++q)
      for (long t = 0; t <= 3; ++t)
        if (!weights::linalg_identity_check(intlin::IntMat{{t}}, q, 5, 2000).holds) return false;
    return true;
  });

  guarded("Siegel right-hand sides", [] {
    return rhs::siegel_rhs(RadialProfile::gaussian(1), 3) == 2 && rhs::siegel_rhs(RadialProfile::gaussian(4), 2) == 5 &&
           rhs::siegel_rhs(RadialProfile::ball(3), 4) == 3;
  });

  guarded("eta Bessel form at n = 3", [] {
    transforms::TestFunction rho{{RadialProfile::gaussian(1)}, {RadialProfile::gaussian(1)}};
    const double v = rhs::eta_integral(intlin::IntMat{{1}}, intlin::IntMat{{1}}, intlin::IntMat{{1}}, rho, 3).value;
    return std::fabs(v - 4 * M_PI * std::cyl_bessel_k(1.0, 2 * M_PI)) < 1e-9 * v;
  });

  guarded("set partitions are counted by Bell numbers", [] {
    const long bell[] = {1, 1, 2, 5, 15, 52};
    for (int k = 0; k <= 5; ++k)
      if (static_cast<long>(rhs::set_partitions(k).size()) != bell[k]) return false;
    return true;
  });

  guarded("c_const(3;1,1) = 2 pi^2", [] { return std::fabs(rhs::c_const(3, 1, 1) - 2 * M_PI * M_PI) < 1e-12; });

  guarded("theta inversion on Z^3", [] {
    const geom::Lattice L = geom::Lattice::from_basis(geom::RealMat::Identity(3, 3));
    const double a = transforms::siegel_sum(L, RadialProfile::gaussian(2.0));
    const double b = std::pow(2.0, 1.5) * transforms::siegel_sum(geom::dual(L), RadialProfile::gaussian(0.5));
    return std::fabs(a - b) < 1e-10 * a;
  });
  return s;
}

}  // namespace lab::harness
