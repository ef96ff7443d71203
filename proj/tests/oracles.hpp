#pragma once

// Brute-force reference implementations used only by the tests. They share no
// code with the library: plain machine integers, exhaustive search, direct sums.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using Mat = std::vector<std::vector<long long>>;

inline long long det_ll(Mat m) {
  // Cofactor expansion; only used for n <= 4.
  std::size_t n = m.size();
  if (n == 0) return 1;
  if (n == 1) return m[0][0];
  long long d = 0;
  for (std::size_t c = 0; c < n; ++c) {
    Mat sub;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<long long> row;
      for (std::size_t j = 0; j < n; ++j)
        if (j != c) row.push_back(m[i][j]);
      sub.push_back(row);
    }
    long long term = m[0][c] * det_ll(sub);
    d += (c % 2 == 0) ? term : -term;
  }
  return d;
}

inline void subsets(std::size_t n, std::size_t k, std::vector<std::vector<std::size_t>>& out) {
  std::vector<std::size_t> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (cur.size() == k) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = start; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
}

// gcd of all t x t minors for t = 1..min(r,c).
inline std::vector<long long> determinantal_divisors(const Mat& a) {
  std::size_t r = a.size(), c = a.empty() ? 0 : a[0].size();
  std::vector<long long> out;
  for (std::size_t t = 1; t <= std::min(r, c); ++t) {
    std::vector<std::vector<std::size_t>> rs, cs;
    subsets(r, t, rs);
    subsets(c, t, cs);
    long long g = 0;
    for (auto& ri : rs)
      for (auto& ci : cs) {
        Mat sub(t, std::vector<long long>(t));
        for (std::size_t i = 0; i < t; ++i)
          for (std::size_t j = 0; j < t; ++j) sub[i][j] = a[ri[i]][ci[j]];
        g = std::gcd(g, std::llabs(det_ll(sub)));
      }
    out.push_back(g);
  }
  return out;
}

// Elementary divisors from determinantal divisors; zero once the rank is exhausted.
inline std::vector<long long> elementary_divisors(const Mat& a) {
  auto d = determinantal_divisors(a);
  std::vector<long long> e;
  long long prev = 1;
  for (long long v : d) {
    if (v == 0 || prev == 0) {
      e.push_back(0);
      prev = 0;
      continue;
    }
    e.push_back(v / prev);
    prev = v;
  }
  return e;
}

inline std::size_t rank_ll(const Mat& a) {
  auto d = determinantal_divisors(a);
  std::size_t r = 0;
  while (r < d.size() && d[r] != 0) ++r;
  return r;
}

// #{a in (Z/q)^{m1} : theta^T a = 0 mod q} by exhaustion.
inline long long congruence_count(const Mat& theta, long long q) {
  std::size_t m1 = theta.size(), m2 = theta.empty() ? 0 : theta[0].size();
  std::vector<long long> a(m1, 0);
  long long count = 0;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == m1) {
      for (std::size_t j = 0; j < m2; ++j) {
        long long s = 0;
        for (std::size_t t = 0; t < m1; ++t) s += theta[t][j] * a[t];
        if (((s % q) + q) % q != 0) return;
      }
      ++count;
      return;
    }
    for (long long v = 0; v < q; ++v) {
      a[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
  return count;
}

// All n x n integer matrices with entries in [-h, h] and determinant +-1.
inline std::vector<Mat> unimodular_box(std::size_t n, long long h) {
  std::vector<Mat> out;
  Mat m(n, std::vector<long long>(n));
  std::function<void(std::size_t)> rec = [&](std::size_t idx) {
    if (idx == n * n) {
      long long d = det_ll(m);
      if (d == 1 || d == -1) out.push_back(m);
      return;
    }
    for (long long v = -h; v <= h; ++v) {
      m[idx / n][idx % n] = v;
      rec(idx + 1);
    }
  };
  rec(0);
  return out;
}

inline Mat mul(const Mat& a, const Mat& b) {
  Mat c(a.size(), std::vector<long long>(b[0].size(), 0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t l = 0; l < b.size(); ++l)
      for (std::size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][l] * b[l][j];
  return c;
}

inline Mat transpose(const Mat& a) {
  Mat t(a[0].size(), std::vector<long long>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
  return t;
}

// Random unimodular matrix from shears and sign flips, independent of the library.
inline Mat random_unimodular(std::mt19937_64& rng, std::size_t n, int steps) {
  Mat m(n, std::vector<long long>(n, 0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  if (n == 1) {
    if (rng() & 1) m[0][0] = -1;
    return m;
  }
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_int_distribution<int> coef(-2, 2);
  for (int s = 0; s < steps; ++s) {
    std::size_t i = pick(rng), j = pick(rng);
    if (i == j) {
      for (auto& v : m[i]) v = -v;
      continue;
    }
    int c = coef(rng);
    for (std::size_t t = 0; t < n; ++t) m[i][t] += c * m[j][t];
  }
  return m;
}

// Riemann zeta by direct summation with an Euler-Maclaurin tail, long double.
inline double zeta(int s) {
  long double sum = 0;
  const int N = 2000;
  for (int k = 1; k < N; ++k) sum += std::pow((long double)k, -(long double)s);
  long double Nl = N;
  sum += std::pow(Nl, 1.0L - s) / (s - 1) + 0.5L * std::pow(Nl, -(long double)s) +
         s * std::pow(Nl, -(long double)s - 1) / 12.0L;
  return static_cast<double>(sum);
}

inline double ball_volume(int n) { return std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0 + 1.0); }

// One-dimensional theta sum sum_k exp(-pi k^2 / t).
inline double theta1(double t) {
  double s = 0;
  for (int k = -60; k <= 60; ++k) s += std::exp(-M_PI * k * k / t);
  return s;
}

}  // namespace oracle
