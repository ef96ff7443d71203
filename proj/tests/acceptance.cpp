// Acceptance runs: one PASS/FAIL line per criterion, each with its time budget.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lab/ensembles.hpp"
#include "lab/error.hpp"
#include "lab/geom.hpp"
#include "lab/harness.hpp"
#include "lab/intlin.hpp"
#include "lab/rhs.hpp"
#include "lab/transforms.hpp"
#include "lab/weights.hpp"
#include "oracles.hpp"

using namespace lab;
using intlin::IntMat;
using transforms::RadialProfile;
using transforms::TestFunction;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

IntMat to_int(const oracle::Mat& m) {
  IntMat r(m.size(), m[0].size());
  for (std::size_t i = 0; i < r.rows(); ++i)
    for (std::size_t j = 0; j < r.cols(); ++j) r(i, j) = static_cast<long>(m[i][j]);
  return r;
}

IntMat transpose(const IntMat& a) {
  IntMat t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

IntMat ident(int m) { return IntMat::identity(m); }



// All r x c matrices with entries in [-h, h].
void for_box(std::size_t r, std::size_t c, long long h, const std::function<void(const oracle::Mat&)>& f) {
  oracle::Mat m(r, std::vector<long long>(c, -h));
  for (;;) {
    f(m);
    std::size_t i = 0;
    for (; i < r * c; ++i) {
      long long& v = m[i / c][i % c];
      if (v < h) {
        ++v;
        break;
      }
      v = -h;
    }
    if (i == r * c) return;
  }
}

oracle::Mat random_box(std::mt19937_64& rng, std::size_t r, std::size_t c, long long h) {
  std::uniform_int_distribution<long long> e(-h, h);
  oracle::Mat m(r, std::vector<long long>(c));
  for (auto& row : m)
    for (auto& v : row) v = e(rng);
  return m;
}

// Row-echelon shape with positive pivots and entries above pivots reduced, checked directly.
bool hermite_shape(const IntMat& H) {
  long last = -1;
  bool zero_seen = false;
  for (std::size_t i = 0; i < H.rows(); ++i) {
    long piv = -1;
    for (std::size_t j = 0; j < H.cols(); ++j)
      if (H(i, j) != 0) {
        piv = static_cast<long>(j);
        break;
      }
    if (piv < 0) {
      zero_seen = true;
      continue;
    }
    if (zero_seen || piv <= last || H(i, piv) <= 0) return false;
    for (std::size_t k = 0; k < i; ++k)
      if (H(k, piv) < 0 || H(k, piv) >= H(i, piv)) return false;
    last = piv;
  }
  return true;
}

// ---------------------------------------------------------------------------
// 1. Exact kernels against brute force.
Outcome a1_exact_kernels() {
  std::mt19937_64 rng(101);
  long checked = 0, bad = 0;
  auto check_matrix = [&](const oracle::Mat& a) {
    const std::size_t r = a.size(), c = a[0].size();
    const IntMat A = to_int(a);
    // Smith form.
    intlin::SmithData s = intlin::smith(A);
    const auto expect = oracle::elementary_divisors(a);
    bool ok = s.U * s.D * s.V == A && abs(intlin::det(s.U)) == 1 && abs(intlin::det(s.V)) == 1;
    for (std::size_t i = 0; ok && i < expect.size(); ++i) ok = s.divisors[i] == static_cast<long>(expect[i]);
    // Hermite form, and its independence of the row basis.
    intlin::HermiteData h = intlin::row_hermite(A);
    ok = ok && h.gamma * A == h.H && abs(intlin::det(h.gamma)) == 1 && hermite_shape(h.H);
    const IntMat g = to_int(oracle::random_unimodular(rng, r, 6));
    ok = ok && intlin::row_hermite(g * A).H == h.H;
    // Primitivity and orbit canonical forms for tall matrices.
    if (c <= r) {
      const bool full = oracle::rank_ll(a) == c;
      bool prim = full;
      for (long long d : expect) prim = prim && d == 1;
      ok = ok && intlin::is_primitive(A) == prim;
      if (full) {
        intlin::OrbitCanonical oc = intlin::orbit_canonical_A(A);
        const IntMat gc = to_int(oracle::random_unimodular(rng, c, 6));
        ok = ok && A * oc.gamma == oc.C && intlin::orbit_canonical_A(A * gc).C == oc.C;
        if (prim) ok = ok && intlin::is_canonical_A(oc.C) && intlin::is_canonical_A(A) == (A == oc.C);
      }
    }
    // Congruence counts for every modulus up to 6.
    for (long long q = 1; q <= 6; ++q)
      ok = ok && intlin::congruence_count(A, static_cast<long>(q)) == static_cast<long>(oracle::congruence_count(a, q));
    ++checked;
    if (!ok) ++bad;
  };
  // Exhaustive for up to four entries, sampled for the larger shapes.
  for (std::size_t r = 1; r <= 3; ++r)
    for (std::size_t c = 1; c <= 3; ++c) {
      if (r * c <= 4)
        for_box(r, c, 4, check_matrix);
      else
        for (int t = 0; t < 3000; ++t) check_matrix(random_box(rng, r, c, 4));
    }
  return {bad == 0, std::to_string(checked - bad) + "/" + std::to_string(checked) + " matrices agree"};
}

// 2. Congruence-sum identity on the full grid.
Outcome a2_linalg() {
  long total = 0, holds = 0;
  for (int n : {7, 9})
    for (std::size_t r = 1; r <= 2; ++r)
      for (std::size_t c = 1; c <= 2; ++c)
        for_box(r, c, 3, [&](const oracle::Mat& t) {
          for (long q = 1; q <= 4; ++q) {
            weights::LinalgCheck k = weights::linalg_identity_check(to_int(t), q, n, r == 1 ? 2000 : 150);
            ++total;
            if (k.holds) ++holds;
          }
        });
  return {holds == total, std::to_string(holds) + "/" + std::to_string(total) + " (theta, q, n) hold within tail"};
}

// 3. |det J| q^{m1} = N for random (B1, B2, alpha).
Outcome a3_b3() {
  std::mt19937_64 rng(303);
  int good = 0, done = 0;
  while (done < 200) {
    const int k1 = 1 + rng() % 2, m1 = 1 + rng() % k1, k2 = 1 + rng() % 3, m2 = 1 + rng() % k2;
    auto A1 = intlin::enumerate_A(k1, m1, 2);
    auto A2 = intlin::enumerate_A(k2, m2, 2);
    const IntMat& b1 = A1[rng() % A1.size()];
    const IntMat& b2 = A2[rng() % A2.size()];
    intlin::RatMat alpha(m2, m1);
    std::vector<std::vector<long>> num(m2, std::vector<long>(m1)), den = num;
    for (int i = 0; i < m2; ++i)
      for (int j = 0; j < m1; ++j) {
        num[i][j] = static_cast<long>(rng() % 9) - 4;
        den[i][j] = 1 + static_cast<long>(rng() % 4);
        alpha(i, j) = mpq_class(num[i][j], den[i][j]);
        alpha(i, j).canonicalize();
      }
    intlin::B3Result r = intlin::b3_construct(b1, b2, alpha);
    // Oracle: xi = alpha^T B2^T B2 in exact fractions, q = lcm of denominators, N by exhaustion.
    std::vector<std::vector<long>> G(m2, std::vector<long>(m2, 0));
    for (int a = 0; a < m2; ++a)
      for (int b = 0; b < m2; ++b)
        for (int t = 0; t < k2; ++t) G[a][b] += static_cast<long>(b2.at_ll(t, a) * b2.at_ll(t, b));
    std::vector<std::vector<mpq_class>> X(m1, std::vector<mpq_class>(m2, 0));
    for (int i = 0; i < m1; ++i)
      for (int j = 0; j < m2; ++j)
        for (int t = 0; t < m2; ++t) {
          mpq_class a(num[t][i], den[t][i]);
          a.canonicalize();
          X[i][j] += a * G[t][j];
        }
    long q = 1;
    for (auto& row : X)
      for (auto& v : row) {
        v.canonicalize();
        q = std::lcm(q, v.get_den().get_si());
      }
    oracle::Mat theta(m1, std::vector<long long>(m2));
    for (int i = 0; i < m1; ++i)
      for (int j = 0; j < m2; ++j) {
        mpq_class v = X[i][j] * q;
        theta[i][j] = v.get_num().get_si();
      }
    const long N = static_cast<long>(oracle::congruence_count(theta, q));
    mpz_class qm = 1;
    for (int i = 0; i < m1; ++i) qm *= q;
    const mpq_class lhs = abs(intlin::det(r.J)) * mpq_class(qm);
    if (lhs == N) ++good;
    ++done;
  }
  return {good == 200, std::to_string(good) + "/200 identities exact"};
}

// 4. Siegel at n = 2 over exact Haar samples.
Outcome a4_siegel() {
  json j = json::parse(R"({"kind": "siegel", "n": 2, "seed": 4,
    "test_function": {"primal": [{"type": "gaussian", "t": 1}]},
    "ensemble": {"type": "x2", "samples": 100000}})");
  harness::RunReport r = harness::run_experiment(harness::parse_config(j));
  const double d = std::fabs(r.lhs.mean - 2.0);
  const bool pass = d <= 3 * r.lhs.std_error && r.lhs.std_error < 0.01;
  std::ostringstream os;
  os.precision(6);
  os << "mean " << r.lhs.mean << " +- " << r.lhs.std_error << " vs 2, |z| " << d / r.lhs.std_error;
  return {pass, os.str()};
}

// 5. Primitive vectors at n = 2.
Outcome a5_primitive() {
  json j = json::parse(R"({"kind": "rogers", "n": 2, "seed": 5, "primitive": true,
    "test_function": {"primal": [{"type": "gaussian", "t": 1}]},
    "ensemble": {"type": "x2", "samples": 100000}})");
  harness::RunReport r = harness::run_experiment(harness::parse_config(j));
  const double target = 1 / oracle::zeta(2);
  const double d = std::fabs(r.lhs.mean - target);
  std::ostringstream os;
  os.precision(6);
  os << "mean " << r.lhs.mean << " +- " << r.lhs.std_error << " vs 1/zeta(2) = " << target;
  return {d <= 3 * r.lhs.std_error && std::fabs(r.rhs.value - target) < 1e-12, os.str()};
}

// 6. Rogers k = 2 at n = 4 along Hecke points.
Outcome a6_rogers() {
  // Reference: 2 + (1/2) sum over primitive (a,b) of (a^2+b^2)^{-2} = 2 + 2 zeta(2) G / zeta(4).
  const double catalan = 0.915965594177219015;
  const double closed = 2 + 2 * oracle::zeta(2) * catalan / oracle::zeta(4);
  double prim = 0;
  for (long a = -300; a <= 300; ++a)
    for (long b = -300; b <= 300; ++b)
      if ((a || b) && std::gcd(a, b) == 1) prim += std::pow(static_cast<double>(a * a + b * b), -2);
  if (std::fabs(2 + 0.5 * prim - closed) > 5e-5) return {false, "Epstein oracle disagrees with closed form"};
  TestFunction rho{{RadialProfile::gaussian(1), RadialProfile::gaussian(1)}, {}};
  weights::TruncatedValue rr = rhs::rogers_rhs(rho.primal, 4, 256);
  if (std::fabs(rr.value - closed) > rr.tail_bound + 1e-9) return {false, "rogers_rhs outside its tail"};

  std::vector<double> errs;
  std::ostringstream os;
  os.precision(6);
  os << "rhs " << rr.value << "; ";
  for (long long p : {101LL, 211LL, 401LL}) {
    ensembles::Ensemble ens(ensembles::Hecke{4, p, ensembles::HeckeMode::Orbits, 0, 6});
    transforms::Estimate e =
        transforms::ensemble_estimate(ens, [&](const geom::Lattice& L) { return transforms::product_multisum(L, rho); });
    errs.push_back(std::fabs(e.mean / rr.value - 1));
    os << "p=" << p << ": " << e.mean << " (" << fmt("%.3f", 100 * errs.back()) << "%) ";
  }
  const bool pass = errs[1] < errs[0] && errs[2] < errs[1] && errs[2] < 0.02;
  return {pass, os.str()};
}

// 7. Theta_L Theta_L* at n = 3 against the assembled dual-pair sum.
Outcome a7_dual() {
  TestFunction rho{{RadialProfile::gaussian(1)}, {RadialProfile::gaussian(1)}};
  rhs::RhsBreakdown b = rhs::dual_rhs(rho, 3, rhs::Truncation{4, 200000, 64});
  // Bessel series oracle with W(0) = zeta(2)/zeta(3), W(b) = sigma_{-2}(b)/zeta(3).
  double ref = 2 * oracle::zeta(2) / oracle::zeta(3) + 3;
  for (long k = 1; k <= 20; ++k) {
    double sig = 0;
    for (long d = 1; d <= k; ++d)
      if (k % d == 0) sig += 1.0 / (d * d);
    ref += 2 * sig / oracle::zeta(3) * 4 * M_PI * k * std::cyl_bessel_k(1.0, 2 * M_PI * k);
  }
  if (std::fabs(b.total - ref) > b.tail + 1e-9) return {false, "dual_rhs disagrees with the Bessel oracle"};
  std::vector<double> errs;
  std::ostringstream os;
  os.precision(6);
  os << "rhs " << b.total << "; ";
  for (long long p : {5003LL, 10007LL, 20011LL}) {
    ensembles::Ensemble ens(ensembles::Hecke{3, p, ensembles::HeckeMode::Orbits, 0, 7});
    transforms::Estimate e =
        transforms::ensemble_estimate(ens, [&](const geom::Lattice& L) { return transforms::product_multisum(L, rho); });
    errs.push_back(std::fabs(e.mean / b.total - 1));
    os << "p=" << p << ": " << e.mean << " (" << fmt("%.3f", 100 * errs.back()) << "%) ";
  }
  const bool pass = errs[1] < errs[0] && errs[2] < errs[1] && errs[2] < 0.02;
  return {pass, os.str()};
}

// 8. Hecke-averaged F_beta over eta_beta equals 1/zeta(4).
Outcome a8_fbeta() {
  const int n = 4;
  TestFunction rho{{RadialProfile::gaussian(1)}, {RadialProfile::gaussian(1)}};
  const double target = 1 / oracle::zeta(4);
  bool pass = true;
  std::ostringstream os;
  os.precision(5);
  for (long b : {0L, 1L}) {
    const IntMat beta{{b}};
    const double eta = rhs::eta_integral(beta, ident(1), ident(1), rho, n).value;
    // beta = 0 pairs orthogonal vectors and has by far the larger spread.
    ensembles::Ensemble ens(ensembles::Hecke{n, 1000003, ensembles::HeckeMode::Sampled, b == 0 ? 120000 : 8000,
                                             static_cast<std::uint64_t>(80 + b)});
    transforms::Estimate e = transforms::ensemble_estimate(
        ens, [&](const geom::Lattice& L) { return transforms::f_beta_sum(L, beta, rho); });
    const double ratio = e.mean / eta;
    const double err = std::fabs(ratio / target - 1);
    pass = pass && err < 0.03;
    os << "beta=" << b << ": ratio " << ratio << " +- " << e.std_error / eta << " vs " << target << " ("
       << fmt("%.2f", 100 * err) << "%) ";
  }
  return {pass, os.str()};
}

// 9. Weight bounds, unimodular invariance and transpose symmetry.
Outcome a9_weights() {
  std::mt19937_64 rng(909);
  int bad = 0, total = 0;
  // Trivial bounds.
  for (int t = 0; t < 50; ++t) {
    const int m1 = 1 + t % 2, m2 = 1 + (t / 2) % 2, n = t % 4 < 2 ? 8 : 10;
    const IntMat beta = to_int(random_box(rng, m1, m2, 3));
    weights::TruncatedValue w = weights::weight_W(beta, n, m1 == 1 ? 2000 : 150);
    double lo = 1, hi = 1;
    for (int j = 1; j <= m1; ++j) {
      lo /= oracle::zeta(n - j + 1);
      hi *= oracle::zeta(n - m2 - j + 1) / oracle::zeta(n - j + 1);
    }
    ++total;
    if (!(w.value <= hi * (1 + 1e-12) && w.value + w.tail_bound >= lo * (1 - 1e-12))) ++bad;
  }
  // Invariance under unimodular changes: exact equality at equal Dmax.
  for (int t = 0; t < 100; ++t) {
    const int m1 = 1 + t % 2, m2 = 1 + (t / 2) % 2;
    const oracle::Mat b = random_box(rng, m1, m2, 3);
    const oracle::Mat moved =
        oracle::mul(oracle::mul(oracle::random_unimodular(rng, m1, 6), b), oracle::random_unimodular(rng, m2, 6));
    const int n = m1 + m2 + 3;
    ++total;
    if (weights::weight_W(to_int(b), n, 120).value != weights::weight_W(to_int(moved), n, 120).value) ++bad;
  }
  // W(beta^T) and W(beta) brackets overlap.
  for (int m1 = 1; m1 <= 2; ++m1)
    for (int m2 = 1; m2 <= 2; ++m2) {
      if (m1 == m2 && m1 == 1) continue;
      const int n = m1 + m2 + 2;
      for_box(m1, m2, 3, [&](const oracle::Mat& b) {
        const IntMat B = to_int(b);
        const long D = 60;
        weights::TruncatedValue x = weights::weight_W(B, n, D), y = weights::weight_W(transpose(B), n, D);
        ++total;
        if (!(x.value <= y.value + y.tail_bound && y.value <= x.value + x.tail_bound)) ++bad;
      });
    }
  return {bad == 0, std::to_string(total - bad) + "/" + std::to_string(total) + " checks"};
}

// 10. eta_beta properties.
Outcome a10_eta() {
  int bad = 0, total = 0;
  std::ostringstream os, failed;
  auto G = [](double t) { return RadialProfile::gaussian(t); };
  std::mt19937_64 rng(1010);
  std::uniform_int_distribution<long> e(-2, 2);
  // Transposition symmetry.
  for (int n : {5, 6})
    for (int m1 = 1; m1 <= 2; ++m1)
      for (int m2 = 1; m2 <= 2; ++m2) {
        if (m1 + m2 >= n) continue;
        IntMat beta(m1, m2);
        for (int i = 0; i < m1; ++i)
          for (int j = 0; j < m2; ++j) beta(i, j) = e(rng);
        beta(0, 0) = 1;
        const IntMat B1 = m1 == 1 ? IntMat{{1}, {2}} : IntMat{{1, 0}, {1, 1}};
        const IntMat B2 = m2 == 1 ? IntMat{{1}} : IntMat{{1, 1}, {0, 1}};
        std::vector<RadialProfile> p(B1.rows(), G(0.8)), d(B2.rows(), G(1.3));
        auto a = rhs::eta_integral(beta, B1, B2, TestFunction{p, d}, n);
        auto b = rhs::eta_integral(transpose(beta), B2, B1, TestFunction{d, p}, n);
        ++total;
        if (std::fabs(a.value - b.value) > a.tail_bound + b.tail_bound + 1e-9 * std::fabs(a.value)) {
          ++bad;
          failed << " transpose(n=" << n << ",m1=" << m1 << ",m2=" << m2 << ")";
        }
      }
  // Scaling law for diagonal T1, T2.
  struct Case {
    int n;
    IntMat beta, T1, T2;
  };
  for (const Case& c : std::vector<Case>{{5, IntMat{{1}}, IntMat{{2}}, IntMat{{3}}},
                                         {6, IntMat{{1, 2}}, IntMat{{3}}, IntMat{{1, 0}, {0, 2}}},
                                         {5, IntMat{{1}, {1}}, IntMat{{1, 0}, {0, 2}}, IntMat{{2}}},
                                         {6, IntMat{{1, 0}, {1, 1}}, IntMat{{2, 0}, {0, 1}}, IntMat{{1, 0}, {0, 3}}}}) {
    const int m1 = c.beta.rows(), m2 = c.beta.cols();
    TestFunction rho{std::vector<RadialProfile>(m1, G(1.1)), std::vector<RadialProfile>(m2, G(0.9))};
    auto lhs = rhs::eta_integral(c.beta, transpose(c.T1), transpose(c.T2), rho, c.n);
    auto r = rhs::eta_integral(transpose(c.T1) * c.beta * c.T2, ident(m1), ident(m2), rho, c.n);
    const double d1 = std::fabs(intlin::det(c.T1).get_d()), d2 = std::fabs(intlin::det(c.T2).get_d());
    const double scaled = std::pow(d1, m2 - c.n) * std::pow(d2, m1 - c.n) * r.value;
    ++total;
    if (std::fabs(lhs.value / scaled - 1) > 1e-6) {
      ++bad;
      failed << " scaling(n=" << c.n << ",m1=" << m1 << ",m2=" << m2 << ": " << lhs.value / scaled - 1 << ")";
    }
  }
  // beta = 0: the B2 dependence is exactly det(Q2)^{-(n-m1)/2}.
  for (int m1 = 1; m1 <= 2; ++m1) {
    const int n = 5;
    TestFunction rho{std::vector<RadialProfile>(m1, G(1)), {G(1)}};
    auto a = rhs::eta_integral(IntMat(m1, 1), ident(m1), IntMat{{1}}, rho, n);
    auto b = rhs::eta_integral(IntMat(m1, 1), ident(m1), IntMat{{2}}, rho, n);
    ++total;
    if (std::fabs(b.value / (a.value * std::pow(4.0, -0.5 * (n - m1))) - 1) > 1e-12 || a.heuristic) {
      ++bad;
      failed << " beta0(m1=" << m1 << ")";
    }
  }
  // Ball asymptotics at n = 5, beta = 1, by Monte Carlo with a quadrature cross-check.
  const int n = 5;
  const double c = rhs::c_const(n, 1, 1);
  std::vector<double> devs;
  for (double R : {4.0, 8.0, 16.0}) {
    auto [mc, se] = rhs::eta_ball_pair_mc(1, R, n, 1000000, 55);
    const double q = rhs::eta_ball_pair(1, R, n);
    ++total;
    if (std::fabs(mc - q) > 4 * se) {
      ++bad;
      failed << " mc(R=" << R << ": " << (mc - q) / se << " se)";
    }
    devs.push_back(std::fabs(q / std::pow(R, 2 * n - 2) / c - 1));
    os << "R=" << R << " dev " << fmt("%.4f", devs.back()) << " ";
  }
  ++total;
  if (!(devs[1] < devs[0] && devs[2] < devs[1] && devs[2] < 0.05)) {
    ++bad;
    failed << " trend";
  }
  os << "; " << total - bad << "/" << total << " checks";
  if (bad) os << ", failed:" << failed.str();
  return {bad == 0, os.str()};
}

// 11. Theta inversion on random lattices.
Outcome a11_theta() {
  std::mt19937_64 rng(1111);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.5, 2.0);
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + t % 4;
    geom::RealMat B(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) B(i, j) = g(rng);
    B /= std::pow(std::fabs(B.determinant()), 1.0 / n);
    const geom::Lattice L = geom::Lattice::from_basis(B);
    const double s = u(rng);
    const double a = transforms::siegel_sum(L, RadialProfile::gaussian(s));
    const double b = std::pow(s, 0.5 * n) * transforms::siegel_sum(geom::dual(L), RadialProfile::gaussian(1 / s));
    worst = std::max(worst, std::fabs(a / b - 1));
  }
  return {worst < 1e-8, "max relative error " + fmt("%.2e", worst)};
}

// 12. Moments of the counting variables along dimension.
Outcome a12_moments() {
  const long long p = (1LL << 48) - 59;
  const std::vector<double> target{1, 1, 3};
  std::vector<std::vector<double>> dev(3), se(3);
  std::ostringstream os;
  os.precision(4);
  for (int n : {8, 10, 12}) {
    ensembles::Ensemble ens(ensembles::Hecke{n, p, ensembles::HeckeMode::Sampled, 40000, 1200u + n});
    transforms::MultiEstimate m = transforms::ensemble_estimate_multi(ens, 3, [](const geom::Lattice& L, double* out) {
      transforms::Counts c = transforms::count_statistic(L, {1.0}, {1.0});
      const double N1 = static_cast<double>(c.N[0]), M1 = static_cast<double>(c.Ndual[0]);
      out[0] = N1;
      out[1] = N1 * M1;
      out[2] = N1 * N1;
    });
    // Exact finite-n value of E[N1 N1~] from the dual-pair sum, for context.
    const RadialProfile unit = RadialProfile::ball(1.0);
    const double exact_mixed = rhs::dual_rhs(TestFunction{{unit}, {unit}}, n).total;
    os << "n=" << n << " (exact E[N1N1~] " << exact_mixed << "):";
    for (int k = 0; k < 3; ++k) {
      dev[k].push_back(std::fabs(m.components[k].mean - target[k]) / target[k]);
      se[k].push_back(m.components[k].std_error / target[k]);
      os << " " << m.components[k].mean << "+-" << m.components[k].std_error;
    }
    os << "  ";
  }
  bool pass = true;
  for (int k = 0; k < 3; ++k) {
    for (int i = 1; i < 3; ++i)
      pass = pass && dev[k][i] <= dev[k][i - 1] + 3 * std::hypot(se[k][i], se[k][i - 1]);
    pass = pass && dev[k][2] < 0.10;
  }
  return {pass, os.str()};
}

// 13. Counting limit on Z^4.
Outcome a13_counting() {
  std::vector<double> dev;
  std::ostringstream os;
  bool agree = true;
  for (double R : {10.0, 20.0, 40.0}) {
    const long long c = geom::count_slice_points({1, 0, 0, 0}, 0, R);
    // Direct count of nonzero w in Z^3 with |w| < R.
    long long brute = 0;
    const long r = static_cast<long>(R);
    for (long a = -r; a <= r; ++a)
      for (long b = -r; b <= r; ++b)
        for (long d = -r; d <= r; ++d)
          if ((a || b || d) && a * a + b * b + d * d < R * R) ++brute;
    agree = agree && brute == c;
    dev.push_back(std::fabs(c / std::pow(R, 3) / oracle::ball_volume(3) - 1));
    os << "R=" << R << " dev " << fmt("%.4f", dev.back()) << " ";
  }
  return {agree && dev[1] < dev[0] && dev[2] < dev[1] && dev[2] < 0.05, os.str()};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "exact kernels vs brute force", 30, a1_exact_kernels},
      {2, "congruence-sum identity grid", 60, a2_linalg},
      {3, "b3 determinant identity", 10, a3_b3},
      {4, "Siegel formula n=2", 60, a4_siegel},
      {5, "primitive vectors n=2", 60, a5_primitive},
      {6, "Rogers k=2 n=4 Hecke trend", 600, a6_rogers},
      {7, "dual pair n=3 Hecke trend", 900, a7_dual},
      {8, "F_beta / eta = 1/zeta(4)", 600, a8_fbeta},
      {9, "weight suite", 60, a9_weights},
      {10, "eta property suite", 600, a10_eta},
      {11, "theta inversion", 30, a11_theta},
      {12, "moment trend n=8,10,12", 1200, a12_moments},
      {13, "counting limit on Z^4", 60, a13_counting},
  };
  std::set<int> chosen;
  for (int i = 1; i < argc; ++i) chosen.insert(std::stoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!chosen.empty() && !chosen.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs <= c.budget_s;
    if (!pass) ++failed;
    std::printf("A%-2d %s  %-32s %8.2f s (budget %g s)  %s%s\n", c.id, pass ? "PASS" : "FAIL", c.name, secs, c.budget_s,
                o.detail.c_str(), o.pass && !pass ? "  [over time budget]" : "");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
