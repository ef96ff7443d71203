#include "lab/weights.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <shared_mutex>

#include "lab/error.hpp"

namespace lab::weights {

namespace {

// B_2, B_4, ..., B_20
constexpr long double kBernoulli[] = {1.0L / 6,           -1.0L / 30,         1.0L / 42,      -1.0L / 30,
                                      5.0L / 66,          -691.0L / 2730,     7.0L / 6,       -3617.0L / 510,
                                      43867.0L / 798,     -174611.0L / 330};

double zeta_em(int s, double eps) {
  // Direct sum up to N-1, then Euler-Maclaurin. For real s the remainder after the
  // j-th correction is bounded by the next correction term.
  const int N = 16;
  long double sum = 0;
  for (int k = N - 1; k >= 1; --k) sum += std::pow(static_cast<long double>(k), -static_cast<long double>(s));
  const long double Nl = N;
  sum += std::pow(Nl, 1.0L - s) / (s - 1) + 0.5L * std::pow(Nl, -static_cast<long double>(s));
  long double rising = s;  // s (s+1) ... (s+2j-2)
  long double fact = 2;    // (2j)!
  long double npow = std::pow(Nl, -static_cast<long double>(s) - 1);
  for (int j = 1; j <= 10; ++j) {
    long double term = kBernoulli[j - 1] / fact * rising * npow;
    sum += term;
    rising *= static_cast<long double>(s + 2 * j - 1) * (s + 2 * j);
    fact *= static_cast<long double>(2 * j + 1) * (2 * j + 2);
    npow /= Nl * Nl;
    if (j < 10) {
      long double next = std::fabs(kBernoulli[j] / fact * rising * npow);
      if (next < eps * 0.5L) return static_cast<double>(sum);
    }
  }
  fail(ErrorKind::ToleranceNotMet, "zeta series did not reach tolerance");
}

struct ZetaCache {
  std::shared_mutex mu;
  std::map<std::pair<int, double>, double> values;
};

ZetaCache& zeta_cache() {
  static ZetaCache c;
  return c;
}

// Bound on sum_{A in W_m1, det A > D} (det A)^{-e}: for any integer s' with
// e - s' - m1 + 1 >= 2 it is at most D^{-s'} prod_{j=1}^{m1} zeta(e - s' - j + 1).
// The smallest such bound over s' is returned; infinity if none applies.
double shell_tail(int m1, int e, long dmax) {
  double best = HUGE_VAL;
  for (int sp = 1; e - sp - m1 + 1 >= 2; ++sp) {
    double b = std::pow(static_cast<double>(dmax), -sp);
    for (int j = 1; j <= m1; ++j) b *= zeta_val(e - sp - j + 1);
    best = std::min(best, b);
  }
  return best;
}

}  // namespace

double zeta_val(int s, double eps) {
  if (s < 2) fail(ErrorKind::DomainError, "zeta_val needs s >= 2");
  if (!(eps > 0)) fail(ErrorKind::DomainError, "zeta_val needs eps > 0");
  if (s > 60) return 1.0 + std::pow(2.0, -s);  // 3^{-s} and beyond are below double resolution
  auto key = std::make_pair(s, eps);
  ZetaCache& c = zeta_cache();
  {
    std::shared_lock lock(c.mu);
    auto it = c.values.find(key);
    if (it != c.values.end()) return it->second;
  }
  double v = zeta_em(s, eps);
  std::unique_lock lock(c.mu);
  return c.values.emplace(key, v).first->second;
}

double zeta_product(int lo, int hi) {
  double p = 1.0;
  for (int j = lo; j <= hi; ++j) p *= zeta_val(j);
  return p;
}

std::vector<unsigned long long> weight_counts(const intlin::IntMat& beta, long dmax) {
  if (dmax < 1) fail(ErrorKind::DomainError, "Dmax must be >= 1");
  const int m1 = static_cast<int>(beta.rows());
  const int m2 = static_cast<int>(beta.cols());
  std::vector<long long> b(m1 * m2);
  for (int i = 0; i < m1; ++i)
    for (int j = 0; j < m2; ++j) b[i * m2 + j] = beta.at_ll(i, j);

  std::vector<unsigned long long> counts(dmax + 1, 0);
  // Columns of A are chosen left to right; column i fixes row i of A^T, so the i-th
  // coordinate z_i of every beta column in the row lattice of A follows by forward
  // substitution and must be an integer.
  std::vector<long long> a(m1 * m1, 0);
  std::vector<long long> z(m1 * m2, 0);
  std::function<void(int, long)> column = [&](int i, long prod) {
    if (i == m1) {
      ++counts[prod];
      return;
    }
    for (long d = 1; prod * d <= dmax; ++d) {
      a[i * m1 + i] = d;
      // Off-diagonal entries a_{j i}, j < i, each in [0, d).
      std::function<void(int)> off = [&](int j) {
        if (j == i) {
          for (int c = 0; c < m2; ++c) {
            long long r = b[i * m2 + c];
            for (int t = 0; t < i; ++t) r -= a[t * m1 + i] * z[t * m2 + c];
            if (r % d != 0) return;
            z[i * m2 + c] = r / d;
          }
          column(i + 1, prod * d);
          return;
        }
        for (long v = 0; v < d; ++v) {
          a[j * m1 + i] = v;
          off(j + 1);
        }
        a[j * m1 + i] = 0;
      };
      off(0);
    }
  };
  column(0, 1);
  return counts;
}

TruncatedValue weight_W(const intlin::IntMat& beta, int n, long dmax) {
  const int m1 = static_cast<int>(beta.rows());
  const int m2 = static_cast<int>(beta.cols());
  if (m1 < 1 || m2 < 1) fail(ErrorKind::DomainError, "beta must be nonempty");
  if (n <= m1 + m2) fail(ErrorKind::DomainError, "W(beta) diverges for n <= m1 + m2");
  auto counts = weight_counts(beta, dmax);

  long double s = 0;
  for (long d = dmax; d >= 1; --d)
    if (counts[d]) s += static_cast<long double>(counts[d]) * std::pow(static_cast<long double>(d), m2 - n);
  const double norm = zeta_product(n - m1 + 1, n);
  TruncatedValue tv;
  tv.cutoff = dmax;
  tv.value = static_cast<double>(s / norm);
  const double rounding = 1e-14 * tv.value;

  if (beta.is_zero()) {
    // Full sum is prod_{j=1}^{m1} zeta(n - m2 - j + 1).
    double full = 1.0;
    for (int j = 1; j <= m1; ++j) full *= zeta_val(n - m2 - j + 1);
    tv.tail_bound = std::max(0.0, full / norm - tv.value) + rounding;
    return tv;
  }
  intlin::SmithData sd = intlin::smith(beta);
  bool full_rank = true;
  mpz_class index = 1;
  for (int i = 0; i < m1; ++i) {
    if (i >= static_cast<int>(sd.divisors.size()) || sd.divisors[i] == 0) {
      full_rank = false;
      break;
    }
    index *= sd.divisors[i];
  }
  if (full_rank && index <= dmax) {
    // det A divides the index of the lattice spanned by the beta columns.
    tv.tail_bound = rounding;
    return tv;
  }
  if (n >= m1 + m2 + 2) {
    tv.tail_bound = shell_tail(m1, n - m2, dmax) / norm + rounding;
    return tv;
  }
  tv.heuristic = true;
  double last = counts[dmax] * std::pow(static_cast<double>(dmax), m2 - n) / norm;
  tv.tail_bound = 10.0 * last + rounding;
  return tv;
}

LinalgCheck linalg_identity_check(const intlin::IntMat& theta, const mpz_class& q, int n, long dmax) {
  if (q < 1) fail(ErrorKind::DomainError, "q must be >= 1");
  const int m1 = static_cast<int>(theta.rows());
  const int m2 = static_cast<int>(theta.cols());
  if (n <= m1 + 1) fail(ErrorKind::DomainError, "identity needs n > m1 + 1");
  if (dmax < 1) fail(ErrorKind::DomainError, "Dmax must be >= 1");
  if (!q.fits_slong_p()) fail(ErrorKind::DomainError, "q too large");
  const long long qq = q.get_si();
  std::vector<long long> th(m1 * m2);
  for (int i = 0; i < m1; ++i)
    for (int j = 0; j < m2; ++j) th[i * m2 + j] = ((theta.at_ll(i, j) % qq) + qq) % qq;

  std::vector<unsigned long long> counts(dmax + 1, 0);
  std::vector<long long> a(m1 * m1, 0);
  // Rows bottom-up: row i needs a_jj for j > i, and (A theta)_i = 0 mod q involves row i only.
  std::function<void(int, long)> row = [&](int i, long prod) {
    if (i < 0) {
      ++counts[prod];
      return;
    }
    for (long d = 1; prod * d <= dmax; ++d) {
      a[i * m1 + i] = d;
      std::function<void(int)> off = [&](int j) {
        if (j == m1) {
          for (int c = 0; c < m2; ++c) {
            long long s = 0;
            for (int t = i; t < m1; ++t) s = (s + (a[i * m1 + t] % qq) * th[t * m2 + c]) % qq;
            if (s != 0) return;
          }
          row(i - 1, prod * d);
          return;
        }
        for (long v = 0; v < a[j * m1 + j]; ++v) {
          a[i * m1 + j] = v;
          off(j + 1);
        }
        a[i * m1 + j] = 0;
      };
      off(i + 1);
    }
  };
  row(m1 - 1, 1);

  long double s = 0;
  for (long d = dmax; d >= 1; --d)
    if (counts[d]) s += static_cast<long double>(counts[d]) * std::pow(static_cast<long double>(d), -n);
  const double norm = zeta_product(n - m1 + 1, n);
  LinalgCheck out;
  out.lhs.cutoff = dmax;
  out.lhs.value = static_cast<double>(s / norm);
  out.lhs.tail_bound = shell_tail(m1, n, dmax) / norm + 1e-14 * out.lhs.value;
  out.N = intlin::congruence_count(theta, q);
  mpq_class ratio(out.N, q);
  ratio.canonicalize();
  mpq_class r = 1;
  for (int i = 1; i < m1; ++i) ratio /= q;
  for (int i = 0; i < n; ++i) r *= ratio;
  out.rhs = r;
  out.holds = std::fabs(out.lhs.value - r.get_d()) <= out.lhs.tail_bound;
  return out;
}

}  // namespace lab::weights
