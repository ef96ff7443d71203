#pragma once

// The weight W(beta), zeta values and the congruence-sum identity, each with a
// truncation tail.

#include <gmpxx.h>

#include "lab/intlin.hpp"

namespace lab::weights {

// Exact quantity lies in [value, value + tail_bound] for nonnegative series.
struct TruncatedValue {
  double value = 0.0;
  double tail_bound = 0.0;
  long cutoff = 0;
  bool heuristic = false;  // tail is an empirical estimate, not a bound
};

double zeta_val(int s, double eps = 1e-15);
// prod_{j=lo}^{hi} zeta(j); 1 when lo > hi.
double zeta_product(int lo, int hi);

TruncatedValue weight_W(const intlin::IntMat& beta, int n, long dmax);

struct LinalgCheck {
  TruncatedValue lhs;
  mpq_class rhs;
  mpz_class N;
  bool holds = false;  // |lhs.value - rhs| <= lhs.tail_bound
};

LinalgCheck linalg_identity_check(const intlin::IntMat& theta, const mpz_class& q, int n, long dmax);

// Number of A in W_{m1} with det A = d, d = 1..dmax, satisfying the membership test
// for beta (index 0 unused). Exposed for exactness tests.
std::vector<unsigned long long> weight_counts(const intlin::IntMat& beta, long dmax);

}  // namespace lab::weights
