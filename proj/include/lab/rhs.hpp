#pragma once

// Right-hand sides of the mean value formulas: Siegel, Rogers, primitive tuples, the
// eta_beta integrals, the assembled dual-pair formula and the limiting moments.

#include <cstdint>
#include <vector>

#include "lab/intlin.hpp"
#include "lab/transforms.hpp"
#include "lab/weights.hpp"

namespace lab::rhs {

using transforms::RadialProfile;
using transforms::TestFunction;
using weights::TruncatedValue;

double siegel_rhs(const RadialProfile& f, int n);

// Integral over R^{n x m} of prod_j f_j(x b_j), b_j the rows of B (k x m, rank m).
// Gaussian slots are closed form; m = 1 with balls uses radial quadrature; m >= 2 with
// balls is Monte Carlo and flagged heuristic.
TruncatedValue tuple_integral(const std::vector<RadialProfile>& slots, const intlin::IntMat& B, int n);

// Sum over m = 1..k and canonical B of height <= H, evaluated at H and 2H; the value is
// the 2H sum and the tail is the observed increment.
TruncatedValue rogers_rhs(const std::vector<RadialProfile>& slots, int n, long H);

double primitive_rhs(const std::vector<RadialProfile>& slots, int n);

struct EtaOptions {
  double tol = 1e-10;                // quadrature tolerance (relative)
  int qmc_log2_points = 20;          // total randomized QMC points for m1 >= 2
  int qmc_shifts = 16;               // independent random shifts
  std::uint64_t seed = 0x5eed;       // shift stream
};

// Integral of rho(x B1^T, y B2^T) over S(beta) against eta_beta. beta is m1 x m2,
// B1 is k1 x m1 and B2 is k2 x m2.
TruncatedValue eta_integral(const intlin::IntMat& beta, const intlin::IntMat& B1, const intlin::IntMat& B2,
                            const TestFunction& rho, int n, const EtaOptions& opts = {});

// eta_beta of the product of open balls of radius R on each side, m1 = m2 = 1, B = (1).
double eta_ball_pair(long long beta, double R, int n);
// Monte Carlo version with closed-form slices over y; returns {mean, stderr}.
std::pair<double, double> eta_ball_pair_mc(long long beta, double R, int n, long samples, std::uint64_t seed);

struct Truncation {
  long H = 4;
  long Dmax = 2000;
  long beta_bound = 64;
};

struct RhsTerm {
  int m1 = 0, m2 = 0;
  intlin::IntMat B1, B2, beta;
  double weight = 0;
  double integral = 0;
};

struct RhsBreakdown {
  double total = 0;
  double tail = 0;
  bool heuristic = false;
  std::vector<RhsTerm> terms;
  std::vector<double> boundary_terms;  // primal-only sums, then dual-only sums
  double constant_term = 0;
};

RhsBreakdown dual_rhs(const TestFunction& rho, int n, const Truncation& trunc = {});

std::vector<std::vector<std::vector<int>>> set_partitions(int k);
double moment_rhs(const std::vector<double>& V, const std::vector<double>& W);

double c_const(int n, int m1, int m2);

// Multivariate gamma function Gamma_m(a), via logs.
double log_multigamma(int m, double a);

}  // namespace lab::rhs
