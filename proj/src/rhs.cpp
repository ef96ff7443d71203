#include "lab/rhs.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/sobol.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "lab/error.hpp"
#include "lab/geom.hpp"

namespace lab::rhs {

using Kind = RadialProfile::Kind;
using Mat = Eigen::MatrixXd;

namespace {

Mat to_real(const intlin::IntMat& a) {
  Mat m(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j).get_d();
  return m;
}

bool all_gaussian(const std::vector<RadialProfile>& s) {
  return std::all_of(s.begin(), s.end(), [](const RadialProfile& f) { return f.kind == Kind::Gaussian; });
}

// B^T diag(1/t_j) B for Gaussian slots.
Mat gaussian_form(const std::vector<RadialProfile>& slots, const Mat& B) {
  Eigen::VectorXd w(slots.size());
  for (std::size_t j = 0; j < slots.size(); ++j) w(j) = 1.0 / slots[j].t;
  return B.transpose() * w.asDiagonal() * B;
}

// int_0^a r^{n-1} exp(-pi q r^2) dr, a may be infinite.
double radial_gauss_moment(int n, double q, double a) {
  const double s = 0.5 * n;
  const double full = std::tgamma(s) / (2.0 * std::pow(M_PI * q, s));
  if (!std::isfinite(a)) return full;
  return full * boost::math::gamma_p(s, M_PI * q * a * a);
}

template <class F>
double adaptive(F f, double a, double b, double tol, double* err) {
  double e = 0;
  double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, tol, &e);
  *err = e;
  return v;
}

}  // namespace

double siegel_rhs(const RadialProfile& f, int n) {
  if (n < 1) fail(ErrorKind::DomainError, "n must be positive");
  return f.integral(n) + f.at_origin();
}

TruncatedValue tuple_integral(const std::vector<RadialProfile>& slots, const intlin::IntMat& Bi, int n) {
  const int k = static_cast<int>(slots.size());
  const int m = static_cast<int>(Bi.cols());
  if (static_cast<int>(Bi.rows()) != k) fail(ErrorKind::DomainError, "B must have one row per slot");
  if (m < 1) fail(ErrorKind::DomainError, "tuple integral needs m >= 1");
  const Mat B = to_real(Bi);
  TruncatedValue out;
  if (all_gaussian(slots)) {
    const double d = gaussian_form(slots, B).determinant();
    if (!(d > 0)) fail(ErrorKind::RankDeficient, "B must have full column rank");
    out.value = std::pow(d, -0.5 * n);
    return out;
  }
  // Zero rows see the origin only.
  double factor = 1.0;
  std::vector<int> active;
  for (int j = 0; j < k; ++j) {
    if (B.row(j).isZero())
      factor *= slots[j].at_origin();
    else
      active.push_back(j);
  }
  if (factor == 0) return out;

  if (m == 1) {
    // Product of radial functions of |b_j| r: balls cap the radius, Gaussians combine.
    double rmax = std::numeric_limits<double>::infinity(), q = 0;
    for (int j : active) {
      const double b = std::fabs(B(j, 0));
      if (slots[j].kind == Kind::Ball)
        rmax = std::min(rmax, slots[j].radius(n) / b);
      else
        q += b * b / slots[j].t;
    }
    const double vn = geom::ball_volume(n);
    if (q == 0)
      out.value = factor * vn * std::pow(rmax, n);
    else
      out.value = factor * n * vn * radial_gauss_moment(n, q, rmax);
    return out;
  }

  // m >= 2 with balls: Monte Carlo over columns drawn uniformly from bounding balls.
  std::vector<int> balls;
  for (int j : active)
    if (slots[j].kind == Kind::Ball) balls.push_back(j);
  Mat Bb(balls.size(), m);
  for (std::size_t i = 0; i < balls.size(); ++i) Bb.row(i) = B.row(balls[i]);
  Eigen::FullPivLU<Mat> lu(Bb);
  if (static_cast<int>(lu.rank()) < m) fail(ErrorKind::DomainError, "ball rows must span to bound the support");
  const Mat pinv = Bb.completeOrthogonalDecomposition().pseudoInverse();  // m x |balls|
  std::vector<double> rad(m, 0.0);
  for (int l = 0; l < m; ++l)
    for (std::size_t i = 0; i < balls.size(); ++i) rad[l] += std::fabs(pinv(l, i)) * slots[balls[i]].radius(n);
  const double vn = geom::ball_volume(n);
  double box = 1.0;
  for (int l = 0; l < m; ++l) box *= vn * std::pow(rad[l], n);

  std::mt19937_64 rng(0xba11);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const long N = 1L << 20;
  double s = 0, s2 = 0;
  Mat x(n, m);
  for (long it = 0; it < N; ++it) {
    for (int l = 0; l < m; ++l) {
      Eigen::VectorXd v(n);
      for (int i = 0; i < n; ++i) v(i) = g(rng);
      v *= rad[l] * std::pow(u(rng), 1.0 / n) / v.norm();
      x.col(l) = v;
    }
    double val = 1.0;
    for (int j : active) {
      const double r2 = (x * B.row(j).transpose()).squaredNorm();
      val *= slots[j].kind == Kind::Ball ? (r2 < std::pow(slots[j].radius(n), 2) ? 1.0 : 0.0)
                                         : std::exp(-M_PI * r2 / slots[j].t);
      if (val == 0) break;
    }
    s += val;
    s2 += val * val;
  }
  const double mean = s / N, sd = std::sqrt(std::max(0.0, s2 / N - mean * mean));
  out.value = factor * box * mean;
  out.tail_bound = 3.0 * factor * box * sd / std::sqrt(static_cast<double>(N));
  out.heuristic = true;
  return out;
}

TruncatedValue rogers_rhs(const std::vector<RadialProfile>& slots, int n, long H) {
  const int k = static_cast<int>(slots.size());
  if (k < 1) fail(ErrorKind::DomainError, "need at least one slot");
  if (k >= n) fail(ErrorKind::DomainError, "Rogers formula needs k < n");
  if (H < 1) fail(ErrorKind::DomainError, "height must be positive");
  double origin = 1.0;
  for (const auto& f : slots) origin *= f.at_origin();
  auto sum = [&](long h, double& mc_tail, bool& heur) {
    double s = origin;
    for (int m = 1; m <= k; ++m) {
      intlin::for_each_A(k, m, h, [&](const std::vector<long long>& e) {
        intlin::IntMat B(k, m);
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < m; ++j) B(i, j) = static_cast<long>(e[i * m + j]);
        TruncatedValue t = tuple_integral(slots, B, n);
        s += t.value;
        mc_tail += t.tail_bound;
        heur = heur || t.heuristic;
      });
    }
    return s;
  };
  TruncatedValue out;
  double tail1 = 0, tail2 = 0;
  bool heur = false;
  const double s1 = sum(H, tail1, heur);
  const double s2 = k == 1 ? s1 : sum(2 * H, tail2, heur);
  out.value = s2;
  out.tail_bound = std::fabs(s2 - s1) + (k == 1 ? tail1 : tail2);
  out.cutoff = 2 * H;
  out.heuristic = heur || k >= 2;
  return out;
}

double primitive_rhs(const std::vector<RadialProfile>& slots, int n) {
  const int k = static_cast<int>(slots.size());
  if (k < 1 || k >= n) fail(ErrorKind::DomainError, "primitive formula needs 1 <= k < n");
  double s = 1.0;
  for (const auto& f : slots) s *= f.integral(n);
  return s / weights::zeta_product(n - k + 1, n);
}

double log_multigamma(int m, double a) {
  double s = 0.25 * m * (m - 1) * std::log(M_PI);
  for (int j = 1; j <= m; ++j) s += std::lgamma(a + 0.5 * (1 - j));
  return s;
}

namespace {

TruncatedValue eta_m1_one(const intlin::IntMat& beta, const Mat& B1, const Mat& B2, const TestFunction& rho, int n,
                          const EtaOptions& opts) {
  const int m2 = static_cast<int>(beta.cols());
  const int k1 = static_cast<int>(rho.primal.size()), k2 = static_cast<int>(rho.dual.size());
  Eigen::RowVectorXd b(m2);
  for (int j = 0; j < m2; ++j) b(j) = beta(0, j).get_d();

  // Primal side: product over slots of f_j(|b1_j| r).
  double rmax = std::numeric_limits<double>::infinity();
  double origin_factor = 1.0;
  for (int j = 0; j < k1; ++j) {
    const double c = std::fabs(B1(j, 0));
    if (c == 0)
      origin_factor *= rho.primal[j].at_origin();
    else if (rho.primal[j].kind == Kind::Ball)
      rmax = std::min(rmax, rho.primal[j].radius(n) / c);
  }
  TruncatedValue out;
  if (origin_factor == 0) return out;
  auto primal = [&](double r) {
    double v = origin_factor;
    for (int j = 0; j < k1; ++j) {
      const double c = std::fabs(B1(j, 0));
      if (c != 0 && rho.primal[j].kind == Kind::Gaussian) v *= std::exp(-M_PI * c * c * r * r / rho.primal[j].t);
    }
    return v;
  };

  // Dual side: the fiber integral over {y : x . y = beta} as a function of r = |x|.
  double rmin = 0;
  std::function<double(double)> fiber;
  if (all_gaussian(rho.dual)) {
    const Mat Q2 = gaussian_form(rho.dual, B2);
    const double d2 = Q2.determinant();
    if (!(d2 > 0)) fail(ErrorKind::RankDeficient, "B2 must have full column rank");
    const double c = (b * Q2 * b.transpose())(0, 0);
    const double pre = std::pow(d2, -0.5 * (n - 1));
    fiber = [=](double r) { return c == 0 ? pre : pre * std::exp(-M_PI * c / (r * r)); };
  } else {
    if (k2 != m2) fail(ErrorKind::DomainError, "ball dual slots need square B2");
    const double det = B2.determinant();
    if (std::fabs(det) < 0.5) fail(ErrorKind::RankDeficient, "B2 must be invertible");
    const Eigen::VectorXd gam = B2 * b.transpose();
    const double pre = std::pow(std::fabs(det), -(n - 1.0));
    const double vn1 = geom::ball_volume(n - 1);
    std::vector<double> R(k2, 0.0);
    for (int j = 0; j < k2; ++j)
      if (rho.dual[j].kind == Kind::Ball) {
        R[j] = rho.dual[j].radius(n);
        rmin = std::max(rmin, std::fabs(gam(j)) / R[j]);
      }
    fiber = [=, &rho](double r) {
      double v = pre;
      for (int j = 0; j < k2; ++j) {
        const double g2 = gam(j) * gam(j) / (r * r);
        if (rho.dual[j].kind == Kind::Gaussian) {
          const double s = rho.dual[j].t;
          v *= std::pow(s, 0.5 * (n - 1)) * std::exp(-M_PI * g2 / s);
        } else {
          const double h = R[j] * R[j] - g2;
          if (h <= 0) return 0.0;
          v *= vn1 * std::pow(h, 0.5 * (n - 1));
        }
      }
      return v;
    };
  }
  if (rmin >= rmax) return out;

  const double cn = n * geom::ball_volume(n);
  auto integrand = [&](double r) {
    if (r <= 0) return 0.0;
    const double f = fiber(r);
    if (f == 0) return 0.0;
    return std::pow(r, n - 1 - m2) * primal(r) * f;
  };
  double err = 0, value = 0;
  if (std::isfinite(rmax)) {
    value = adaptive(integrand, rmin, rmax, opts.tol, &err);
  } else {
    // Split at a scale where the Gaussian decay has set in.
    double q = 0;
    for (int j = 0; j < k1; ++j) {
      const double c = std::fabs(B1(j, 0));
      if (rho.primal[j].kind == Kind::Gaussian) q += c * c / rho.primal[j].t;
    }
    if (!(q > 0)) fail(ErrorKind::DomainError, "primal slots do not decay");
    const double mid = std::max(rmin, 0.0) + 1.0 / std::sqrt(q);
    double e1 = 0, e2 = 0;
    value = adaptive(integrand, rmin, mid, opts.tol, &e1) +
            adaptive(integrand, mid, std::numeric_limits<double>::infinity(), opts.tol, &e2);
    err = e1 + e2;
  }
  value *= cn;
  err *= cn;
  if (err > std::max(opts.tol * std::fabs(value), 1e-300) && err > 1e-14 * std::fabs(value) + 1e-300)
    throw ToleranceError("radial quadrature missed its tolerance", value, err);
  out.value = value;
  out.tail_bound = err;
  return out;
}

TruncatedValue eta_wishart(const intlin::IntMat& beta, const Mat& B1, const Mat& B2, const TestFunction& rho, int n,
                           const EtaOptions& opts) {
  const int m1 = static_cast<int>(beta.rows()), m2 = static_cast<int>(beta.cols());
  if (!all_gaussian(rho.primal) || !all_gaussian(rho.dual))
    fail(ErrorKind::DomainError, "eta for m1 >= 2 supports Gaussian slots only");
  const Mat Q1 = gaussian_form(rho.primal, B1), Q2 = gaussian_form(rho.dual, B2);
  const double d1 = Q1.determinant(), d2 = Q2.determinant();
  if (!(d1 > 0) || !(d2 > 0)) fail(ErrorKind::RankDeficient, "B1 and B2 must have full column rank");
  const Mat b = to_real(beta);
  const Mat C = b * Q2 * b.transpose();
  const double nu = n - m2;
  // Value at beta = 0, i.e. the Wishart normalization.
  const double log_i0 = 0.5 * n * m1 * std::log(M_PI) - log_multigamma(m1, 0.5 * n) + log_multigamma(m1, 0.5 * nu) -
                        0.5 * m1 * nu * std::log(M_PI) - 0.5 * nu * std::log(d1);
  const double pre = std::pow(d2, -0.5 * (n - m1)) * std::exp(log_i0);
  TruncatedValue out;
  if (C.isZero()) {
    out.value = pre;
    return out;
  }
  // E exp(-pi Tr(C G^{-1})) for G ~ Wishart(nu, (2 pi Q1)^{-1}), Bartlett coordinates
  // driven by randomly shifted Sobol points. Sampling from Wishart(nu, s Sigma) and
  // reweighting by the density ratio keeps the estimate unbiased for any s > 0; s > 1
  // moves points into the region that carries the integral when C is large.
  const Mat L = (2 * M_PI * Q1).inverse().llt().matrixL();
  const int dim = m1 * (m1 + 1) / 2;
  const int S = std::max(2, opts.qmc_shifts);
  const long N = std::max(1L, (1L << opts.qmc_log2_points) / S);
  boost::random::sobol sob(dim);
  std::vector<double> pts(static_cast<std::size_t>(N) * dim);
  for (auto& p : pts) p = std::ldexp(static_cast<double>(sob()), -64);
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::vector<double>> shifts(S, std::vector<double>(dim));
  for (auto& sh : shifts)
    for (auto& v : sh) v = unif(rng);

  // Weighted integrand at unit-cube point u (already shifted) under scale s.
  auto term = [&](const double* u_in, const double* shift, double s, Mat& A, Mat& G) {
    int c = 0;
    double frob = 0;
    for (int r = 0; r < m1; ++r)
      for (int q = 0; q <= r; ++q, ++c) {
        double u = u_in[c] + (shift ? shift[c] : 0.0);
        if (u >= 1) u -= 1;
        u = std::clamp(u, 1e-16, 1 - 1e-16);
        if (q == r)
          A(r, r) = std::sqrt(2.0 * boost::math::gamma_p_inv(0.5 * (nu - r), u));
        else
          A(r, q) = -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
        frob += A(r, q) * A(r, q);
      }
    G = L * A * A.transpose() * L.transpose();
    const double logw = 0.5 * nu * m1 * std::log(s) - 0.5 * (s - 1) * frob;
    return std::exp(logw - M_PI / s * G.llt().solve(C).trace());
  };

  // Pilot: pick s from a fixed grid by the smallest relative second moment.
  double scale = 1;
  {
    const long np = std::min<long>(N, 4096);
    Mat A = Mat::Zero(m1, m1), G(m1, m1);
    double best = HUGE_VAL;
    for (double s : {1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 48.0, 64.0}) {
      double m = 0, m2v = 0;
      for (long i = 0; i < np; ++i) {
        const double v = term(&pts[i * dim], shifts[0].data(), s, A, G);
        m += v;
        m2v += v * v;
      }
      if (!(m > 0)) continue;
      const double rel = (m2v / np) / ((m / np) * (m / np));
      if (rel < best) {
        best = rel;
        scale = s;
      }
    }
  }

  std::vector<double> means(S, 0.0);
  auto run_shift = [&](int sidx) {
    Mat A = Mat::Zero(m1, m1), G(m1, m1);
    double acc = 0;
    for (long i = 0; i < N; ++i) acc += term(&pts[i * dim], shifts[sidx].data(), scale, A, G);
    means[sidx] = acc / N;
  };
  // Shifts are independent; each writes its own slot, so the result does not depend on scheduling.
  const int workers = std::min(S, transforms::worker_count());
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int sidx; (sidx = next++) < S;) run_shift(sidx);
    });
  for (auto& t : pool) t.join();
  double mu = 0;
  for (double v : means) mu += v;
  mu /= S;
  double var = 0;
  for (double v : means) var += (v - mu) * (v - mu);
  const double se = std::sqrt(var / (S - 1) / S);
  out.value = pre * mu;
  out.tail_bound = 3.0 * pre * se;
  out.heuristic = true;
  return out;
}

}  // namespace

TruncatedValue eta_integral(const intlin::IntMat& beta, const intlin::IntMat& B1, const intlin::IntMat& B2,
                            const TestFunction& rho, int n, const EtaOptions& opts) {
  const int m1 = static_cast<int>(beta.rows()), m2 = static_cast<int>(beta.cols());
  if (m1 < 1 || m2 < 1) fail(ErrorKind::DomainError, "beta must be nonempty");
  if (m1 + m2 >= n) fail(ErrorKind::DomainError, "eta_beta needs m1 + m2 < n");
  if (static_cast<int>(B1.cols()) != m1 || static_cast<int>(B2.cols()) != m2 || B1.rows() != rho.primal.size() ||
      B2.rows() != rho.dual.size())
    fail(ErrorKind::DomainError, "shapes of B1, B2 and the slots disagree");
  const Mat b1 = to_real(B1), b2 = to_real(B2);
  if (m1 == 1) return eta_m1_one(beta, b1, b2, rho, n, opts);
  return eta_wishart(beta, b1, b2, rho, n, opts);
}

double eta_ball_pair(long long beta, double R, int n) {
  const double V = geom::ball_volume(n) * std::pow(R, n);
  TestFunction rho{{RadialProfile::ball(V)}, {RadialProfile::ball(V)}};
  return eta_integral(intlin::IntMat{{static_cast<long>(beta)}}, intlin::IntMat{{1}}, intlin::IntMat{{1}}, rho, n)
      .value;
}

std::pair<double, double> eta_ball_pair_mc(long long beta, double R, int n, long samples, std::uint64_t seed) {
  if (samples < 2) fail(ErrorKind::DomainError, "need at least two samples");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double vol = geom::ball_volume(n) * std::pow(R, n);
  const double vn1 = geom::ball_volume(n - 1);
  const double b2 = static_cast<double>(beta) * static_cast<double>(beta);
  double s = 0, s2 = 0;
  for (long i = 0; i < samples; ++i) {
    // |x| for x uniform in the ball; the y-slice is a ball in the orthogonal hyperplane.
    const double r = R * std::pow(1.0 - u(rng), 1.0 / n);
    const double h = R * R - b2 / (r * r);
    const double v = h > 0 ? vol * vn1 * std::pow(h, 0.5 * (n - 1)) / r : 0.0;
    s += v;
    s2 += v * v;
  }
  const double mean = s / samples;
  const double sd = std::sqrt(std::max(0.0, s2 / samples - mean * mean) * samples / (samples - 1));
  return {mean, sd / std::sqrt(static_cast<double>(samples))};
}

RhsBreakdown dual_rhs(const TestFunction& rho, int n, const Truncation& trunc) {
  const int k1 = static_cast<int>(rho.primal.size()), k2 = static_cast<int>(rho.dual.size());
  if (n <= k1 + k2) fail(ErrorKind::DomainError, "dual formula needs n > k1 + k2");
  if (trunc.H < 1 || trunc.Dmax < 1 || trunc.beta_bound < 0) fail(ErrorKind::DomainError, "bad truncation");

  double origin1 = 1.0, origin2 = 1.0;
  for (const auto& f : rho.primal) origin1 *= f.at_origin();
  for (const auto& f : rho.dual) origin2 *= f.at_origin();

  auto assemble = [&](long H) {
    RhsBreakdown out;
    out.constant_term = origin1 * origin2;
    std::vector<std::pair<int, intlin::IntMat>> As1, As2;
    for (int m = 1; m <= k1; ++m)
      for (auto& B : intlin::enumerate_A(k1, m, H)) As1.emplace_back(m, std::move(B));
    for (int m = 1; m <= k2; ++m)
      for (auto& B : intlin::enumerate_A(k2, m, H)) As2.emplace_back(m, std::move(B));

    double sum = 0;
    for (const auto& [m1, B1] : As1)
      for (const auto& [m2, B2] : As2) {
        if (m1 + m2 >= n) continue;
        // Shells |beta|_inf = r, until a shell is negligible.
        double running = 0;
        for (long r = 0;; ++r) {
          if (r > trunc.beta_bound) {
            out.heuristic = true;
            break;
          }
          double shell = 0;
          const int cells = m1 * m2;
          std::vector<long> e(cells, -r);
          for (;;) {
            long mx = 0;
            for (long v : e) mx = std::max(mx, std::labs(v));
            if (mx == r) {
              intlin::IntMat beta(m1, m2);
              for (int i = 0; i < cells; ++i) beta(i / m2, i % m2) = e[i];
              TruncatedValue w = weights::weight_W(beta, n, trunc.Dmax);
              TruncatedValue eta = eta_integral(beta, B1, B2, rho, n);
              const double term = w.value * eta.value;
              shell += term;
              out.tail += w.tail_bound * eta.value + w.value * eta.tail_bound + w.tail_bound * eta.tail_bound;
              out.heuristic = out.heuristic || w.heuristic || eta.heuristic;
              out.terms.push_back({m1, m2, B1, B2, beta, w.value, eta.value});
            }
            int i = 0;
            while (i < cells && e[i] == r) e[i++] = -r;
            if (i == cells) break;
            ++e[i];
          }
          running += shell;
          if (r >= 1 && shell <= 1e-14 * std::fabs(running)) {
            out.tail += shell;
            break;
          }
        }
        sum += running;
      }
    for (const auto& [m1, B1] : As1) {
      TruncatedValue t = tuple_integral(rho.primal, B1, n);
      out.boundary_terms.push_back(t.value * origin2);
      out.tail += t.tail_bound * origin2;
      out.heuristic = out.heuristic || t.heuristic;
    }
    for (const auto& [m2, B2] : As2) {
      TruncatedValue t = tuple_integral(rho.dual, B2, n);
      out.boundary_terms.push_back(t.value * origin1);
      out.tail += t.tail_bound * origin1;
      out.heuristic = out.heuristic || t.heuristic;
    }
    for (double b : out.boundary_terms) sum += b;
    out.total = sum + out.constant_term;
    return out;
  };

  RhsBreakdown res = assemble(trunc.H);
  if (k1 >= 2 || k2 >= 2) {
    RhsBreakdown wide = assemble(2 * trunc.H);
    wide.tail += std::fabs(wide.total - res.total);
    wide.heuristic = true;
    return wide;
  }
  return res;
}

std::vector<std::vector<std::vector<int>>> set_partitions(int k) {
  if (k < 0) fail(ErrorKind::DomainError, "k must be nonnegative");
  std::vector<std::vector<std::vector<int>>> out;
  std::vector<std::vector<int>> cur;
  auto rec = [&](auto&& self, int i) -> void {
    if (i > k) {
      out.push_back(cur);
      return;
    }
    for (std::size_t b = 0; b < cur.size(); ++b) {
      cur[b].push_back(i);
      self(self, i + 1);
      cur[b].pop_back();
    }
    cur.push_back({i});
    self(self, i + 1);
    cur.pop_back();
  };
  rec(rec, 1);
  return out;
}

double moment_rhs(const std::vector<double>& V, const std::vector<double>& W) {
  if (!std::is_sorted(V.begin(), V.end()) || !std::is_sorted(W.begin(), W.end()))
    fail(ErrorKind::DomainError, "volumes must be sorted");
  auto side = [](const std::vector<double>& X) {
    const int k = static_cast<int>(X.size());
    double s = 0;
    for (const auto& P : set_partitions(k)) {
      double term = std::pow(2.0, k - static_cast<int>(P.size()));
      for (const auto& block : P) term *= X[*std::min_element(block.begin(), block.end()) - 1];
      s += term;
    }
    return s;
  };
  return side(V) * side(W);
}

double c_const(int n, int m1, int m2) {
  if (m1 < 1 || m2 < 1 || m1 + m2 >= n) fail(ErrorKind::DomainError, "c_const needs m1, m2 >= 1 and m1 + m2 < n");
  double s = 0;
  auto lv = [](int j) { return std::log(j * geom::ball_volume(j)); };
  for (int j = n - m1 + 1; j <= n; ++j) s += lv(j);
  for (int j = n - m1 - m2 + 1; j <= n - m2; ++j) s -= lv(j);
  s += m2 * std::log(geom::ball_volume(n - m1)) + m1 * std::log(geom::ball_volume(n - m2));
  return std::exp(s);
}

}  // namespace lab::rhs
