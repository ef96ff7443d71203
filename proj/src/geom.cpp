#include "lab/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lab::geom {

using LLMat = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

Lattice Lattice::from_basis(const RealMat& basis) {
  if (basis.rows() != basis.cols() || basis.rows() == 0) fail(ErrorKind::DomainError, "lattice basis must be square");
  const double d = std::fabs(basis.determinant());
  if (!(d > 0) || !std::isfinite(d)) fail(ErrorKind::SingularMatrix, "lattice basis is singular");
  return Lattice{basis, d};
}

double ball_volume(int n) {
  if (n < 0) fail(ErrorKind::DomainError, "ball_volume needs n >= 0");
  return std::exp(0.5 * n * std::log(M_PI) - std::lgamma(0.5 * n + 1.0));
}

double dvol(const RealMat& x) {
  if (x.cols() == 0) return 1.0;
  if (x.cols() > x.rows()) return 0.0;
  const double g = (x.transpose() * x).determinant();
  return g > 0 ? std::sqrt(g) : 0.0;
}

Lattice dual(const Lattice& L) {
  Eigen::FullPivLU<RealMat> lu(L.basis);
  if (!lu.isInvertible()) fail(ErrorKind::SingularMatrix, "dual of singular basis");
  RealMat d = lu.inverse().transpose();
  return Lattice{d, 1.0 / L.covolume};
}

namespace {

// Shared skeleton of the two LLL variants: Gram entries are recomputed from the
// current vectors, Gram-Schmidt rows are rebuilt lazily (the L^2 scheme).
template <class Basis>
void lll_core(Basis& B, double delta) {
  const int n = B.size();
  if (n <= 1) return;
  std::vector<std::vector<long double>> mu(n, std::vector<long double>(n, 0)), r(n, std::vector<long double>(n, 0));
  auto row = [&](int k) {
    for (int j = 0; j < k; ++j) {
      long double v = B.dot(k, j);
      for (int i = 0; i < j; ++i) v -= mu[j][i] * r[k][i];
      r[k][j] = v;
      mu[k][j] = v / r[j][j];
    }
    long double v = B.dot(k, k);
    for (int j = 0; j < k; ++j) v -= mu[k][j] * r[k][j];
    r[k][k] = v;
  };
  row(0);
  if (!(r[0][0] > 0)) fail(ErrorKind::NumericalFailure, "zero basis vector in LLL");
  int k = 1;
  long iter = 0;
  while (k < n) {
    if (++iter > 2000000) fail(ErrorKind::NumericalFailure, "LLL did not terminate");
    for (int pass = 0;; ++pass) {
      if (pass > 200) fail(ErrorKind::NumericalFailure, "size reduction did not converge");
      row(k);
      bool changed = false;
      for (int j = k - 1; j >= 0; --j) {
        long double m = mu[k][j];
        if (std::fabs(m) <= 0.51L) continue;  // eta = 0.51 avoids rounding ping-pong
        if (std::fabs(m) > 4e18L) fail(ErrorKind::NumericalFailure, "Gram-Schmidt coefficient overflow");
        long long X = std::llround(m);
        B.sub(k, j, X);
        for (int i = 0; i < j; ++i) mu[k][i] -= X * mu[j][i];
        mu[k][j] -= X;
        changed = true;
      }
      if (!changed) break;
    }
    // Lovasz test in the form delta * r_{k-1} > |b*_k|^2 + mu^2 r_{k-1}.
    long double s = r[k][k] + mu[k][k - 1] * mu[k][k - 1] * r[k - 1][k - 1];
    if (delta * r[k - 1][k - 1] > s) {
      B.swap(k, k - 1);
      k = std::max(k - 1, 1);
      if (k == 1) row(0);
    } else {
      if (!(r[k][k] > 0)) fail(ErrorKind::NumericalFailure, "basis vectors are dependent");
      ++k;
    }
  }
}

struct RealBasis {
  RealMat& M;
  LLMat& U;
  int size() const { return static_cast<int>(M.cols()); }
  long double dot(int i, int j) const {
    long double s = 0;
    for (int t = 0; t < M.rows(); ++t) s += static_cast<long double>(M(t, i)) * M(t, j);
    return s;
  }
  void sub(int k, int j, long long X) {
    M.col(k) -= static_cast<double>(X) * M.col(j);
    U.col(k) -= X * U.col(j);
  }
  void swap(int a, int b) {
    M.col(a).swap(M.col(b));
    U.col(a).swap(U.col(b));
  }
};

using i128 = __int128;
constexpr i128 kIntLimit = static_cast<i128>(1) << 58;

struct IntBasis {
  std::vector<std::vector<i128>> b;
  int size() const { return static_cast<int>(b.size()); }
  long double dot(int i, int j) const {
    i128 s = 0;
    for (std::size_t t = 0; t < b[i].size(); ++t) s += b[i][t] * b[j][t];
    return static_cast<long double>(s);
  }
  void sub(int k, int j, long long X) {
    for (std::size_t t = 0; t < b[k].size(); ++t) {
      i128 v = b[k][t] - static_cast<i128>(X) * b[j][t];
      if (v >= kIntLimit || v <= -kIntLimit) fail(ErrorKind::NumericalFailure, "integer LLL entry overflow");
      b[k][t] = v;
    }
  }
  void swap(int a, int c) { std::swap(b[a], b[c]); }
};

}  // namespace

Reduced lll_reduce(const RealMat& basis, double delta) {
  Reduced red{basis, LLMat::Identity(basis.cols(), basis.cols())};
  RealBasis rb{red.basis, red.U};
  lll_core(rb, delta);
  return red;
}

IntCols lll_integer(IntCols basis, double delta) {
  IntBasis ib;
  for (const auto& col : basis) {
    std::vector<i128> c;
    for (long long v : col) {
      if (v >= kIntLimit || v <= -kIntLimit) fail(ErrorKind::NumericalFailure, "integer basis entry too large");
      c.push_back(v);
    }
    ib.b.push_back(std::move(c));
  }
  lll_core(ib, delta);
  IntCols out;
  for (const auto& col : ib.b) {
    std::vector<long long> c;
    for (i128 v : col) c.push_back(static_cast<long long>(v));
    out.push_back(std::move(c));
  }
  return out;
}

Enumerator::Enumerator(const Lattice& L) : n_(L.dim()), lattice_(L) {
  Reduced red = lll_reduce(L.basis);
  reduced_ = red.basis;
  U_ = red.U;
  mu_ = RealMat::Zero(n_, n_);
  bstar2_.assign(n_, 0.0);
  // Gram-Schmidt of the reduced basis by modified Gram-Schmidt on the vectors.
  RealMat bstar = reduced_;
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < i; ++j) {
      mu_(i, j) = reduced_.col(i).dot(bstar.col(j)) / bstar2_[j];
      bstar.col(i) -= mu_(i, j) * bstar.col(j);
    }
    bstar2_[i] = bstar.col(i).squaredNorm();
    if (!(bstar2_[i] > 0)) fail(ErrorKind::NumericalFailure, "degenerate Gram-Schmidt vector");
  }
  inv_bstar_.resize(n_);
  for (int i = 0; i < n_; ++i) inv_bstar_[i] = 1 / std::sqrt(bstar2_[i]);
}

double Enumerator::gaussian_tail_bound(double t, double R) const {
  const double h = 0.05 * std::sqrt(t);
  double sum = 0, prev = HUGE_VAL;
  for (int j = 0; j < 100000; ++j) {
    const double r0 = R + j * h, r1 = r0 + h;
    double N = 1;
    for (double c : inv_bstar_) N *= 1 + 2 * r1 * c;
    double term = N * std::exp(-M_PI * r0 * r0 / t);
    if (!std::isfinite(N)) {
      double logN = 0;
      for (double c : inv_bstar_) logN += std::log1p(2 * r1 * c);
      term = std::exp(logN - M_PI * r0 * r0 / t);
    }
    sum += term;
    if (term < prev && term <= 1e-18 * sum) break;
    if (term < prev && sum == 0) break;
    prev = term;
  }
  return sum;
}

double Enumerator::gaussian_radius(double t, double tol) const {
  // Bracket [lo, hi] with bound(lo) > tol >= bound(hi), starting near the Gaussian decay radius.
  double hi = std::sqrt(t * std::max(1.0, std::log(1 / tol)) / M_PI);
  double lo;
  if (gaussian_tail_bound(t, hi) > tol) {
    do {
      lo = hi;
      hi *= 1.1;
    } while (gaussian_tail_bound(t, hi) > tol);
  } else {
    for (;;) {
      lo = hi / 1.1;
      if (gaussian_tail_bound(t, lo) > tol) break;
      hi = lo;
    }
  }
  while (hi - lo > 0.005 * hi) {
    double mid = 0.5 * (lo + hi);
    if (gaussian_tail_bound(t, mid) > tol)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

std::vector<RealVec> short_vectors(const Lattice& L, double R) {
  Enumerator e(L);
  std::vector<RealVec> out;
  e.enumerate(R, [&](const std::vector<long long>&, const RealVec& v, double) { out.push_back(v); });
  return out;
}

std::vector<double> normalized_volumes(const Lattice& L, int J) {
  if (J < 0) fail(ErrorKind::DomainError, "J must be nonnegative");
  if (J == 0) return {};
  const int n = L.dim();
  Enumerator e(L);
  // Radius of a ball holding about 2J points, grown until it holds at least 2J.
  double R = std::pow(2.0 * J * L.covolume / ball_volume(n), 1.0 / n);
  std::vector<double> norms;
  for (int attempt = 0; attempt < 200; ++attempt) {
    norms.clear();
    e.enumerate(R, [&](const std::vector<long long>&, const RealVec&, double n2) { norms.push_back(n2); });
    if (static_cast<int>(norms.size()) >= 2 * J) break;
    R *= 1.25;
  }
  std::sort(norms.begin(), norms.end());
  std::vector<double> out;
  const double vn = ball_volume(n);
  for (int j = 0; j < J; ++j) out.push_back(vn * std::pow(norms[2 * j], 0.5 * n));
  return out;
}

TuplePoint apply_g(const RealMat& g, const TuplePoint& p) {
  if (g.rows() != g.cols()) fail(ErrorKind::DomainError, "g must be square");
  Eigen::FullPivLU<RealMat> lu(g);
  if (!lu.isInvertible()) fail(ErrorKind::SingularMatrix, "g is singular");
  if (std::fabs(g.determinant() - 1.0) >= 1e-9) fail(ErrorKind::DomainError, "g must have determinant 1");
  return {g * p.x, lu.inverse().transpose() * p.y};
}

double scaling_delta(const RealMat& g, const RealMat& V) {
  const double d = dvol(V);
  if (!(d > 0)) fail(ErrorKind::RankDeficient, "subspace basis is rank deficient");
  return dvol(g * V) / d;
}

bool on_manifold(const RealMat& beta, const TuplePoint& p, double rel_tol) {
  if (p.x.rows() != p.y.rows() || beta.rows() != p.x.cols() || beta.cols() != p.y.cols()) return false;
  if (!(dvol(p.x) > 0) || !(dvol(p.y) > 0)) return false;
  const double scale = std::max({1.0, beta.cwiseAbs().maxCoeff(), p.x.norm() * p.y.norm()});
  return (p.x.transpose() * p.y - beta).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

namespace {

// Square matrix with the given leading columns, completed by an orthonormal basis of
// their orthogonal complement; the last column is rescaled so the determinant is 1.
RealMat complete_unimodular(const RealMat& lead) {
  const int n = static_cast<int>(lead.rows()), m = static_cast<int>(lead.cols());
  RealMat X(n, n);
  X.leftCols(m) = lead;
  if (m < n) {
    Eigen::JacobiSVD<RealMat> svd(lead.transpose(), Eigen::ComputeFullV);
    X.rightCols(n - m) = svd.matrixV().rightCols(n - m);
  }
  const double d = X.determinant();
  if (!(std::fabs(d) > 0)) fail(ErrorKind::NumericalFailure, "cannot complete basis");
  X.col(n - 1) /= d;
  return X;
}

// h in SL_n with h.p equal to a point that depends only on beta.
RealMat normalizer(const RealMat& beta, const TuplePoint& p) {
  const int n = static_cast<int>(p.x.rows()), m1 = static_cast<int>(p.x.cols()), m2 = static_cast<int>(p.y.cols());
  RealMat X = complete_unimodular(p.x);
  RealMat h1 = X.inverse();
  RealMat yp = X.transpose() * p.y;  // top block equals beta
  RealMat y2 = yp.bottomRows(n - m1);

  Eigen::JacobiSVD<RealMat> svd(beta, Eigen::ComputeFullV);
  const double tol = 1e-10 * std::max(1.0, beta.cwiseAbs().maxCoeff());
  int r = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol) ++r;
  RealMat pinv = beta.completeOrthogonalDecomposition().pseudoInverse();  // m2 x m1
  RealMat aT = y2 * pinv;                                                // (n-m1) x m1
  RealMat K = svd.matrixV().rightCols(m2 - r);                           // kernel of beta

  RealMat b = RealMat::Identity(n - m1, n - m1);
  if (m2 - r > 0) {
    RealMat YK = y2 * K;
    RealMat M = complete_unimodular(YK).inverse();  // M * YK = (I; 0)
    b = M.transpose().inverse();
  }
  RealMat hp = RealMat::Identity(n, n);
  hp.topRightCorner(m1, n - m1) = aT.transpose();
  hp.bottomRightCorner(n - m1, n - m1) = b;
  return hp * h1;
}

}  // namespace

RealMat transporter(const RealMat& beta, const TuplePoint& p, const TuplePoint& p2) {
  const int n = static_cast<int>(p.x.rows());
  if (p.x.cols() + p.y.cols() >= n) fail(ErrorKind::DomainError, "transporter needs m1 + m2 < n");
  if (!on_manifold(beta, p) || !on_manifold(beta, p2)) fail(ErrorKind::NotOnManifold, "points are not on S(beta)");
  RealMat g = normalizer(beta, p2).inverse() * normalizer(beta, p);
  TuplePoint q = apply_g(g, p);
  const double err = std::max((q.x - p2.x).cwiseAbs().maxCoeff(), (q.y - p2.y).cwiseAbs().maxCoeff());
  const double scale = std::max({1.0, p2.x.cwiseAbs().maxCoeff(), p2.y.cwiseAbs().maxCoeff()});
  if (err > 1e-6 * scale) fail(ErrorKind::NumericalFailure, "transporter lost accuracy");
  return g;
}

long long count_slice_points(const std::vector<long long>& x, long long beta, double R) {
  const int n = static_cast<int>(x.size());
  int s = -1;
  for (int i = 0; i < n; ++i)
    if (x[i] != 0) {
      s = i;
      break;
    }
  if (s < 0) fail(ErrorKind::DomainError, "x must be nonzero");
  const long long B = static_cast<long long>(std::ceil(R));
  const double R2 = R * R;
  std::vector<long long> w(n, 0);
  long long count = 0;
  // Free coordinates are all but s; w_s is solved from the linear condition.
  auto rec = [&](auto&& self, int i, long long partial2, long long dotp) -> void {
    if (i == n) {
      long long rhs = beta - dotp;
      if (rhs % x[s] != 0) return;
      long long ws = rhs / x[s];
      long long n2 = partial2 + ws * ws;
      if (n2 > 0 && static_cast<double>(n2) < R2) ++count;
      return;
    }
    if (i == s) {
      self(self, i + 1, partial2, dotp);
      return;
    }
    for (long long v = -B; v <= B; ++v) {
      long long p2 = partial2 + v * v;
      if (static_cast<double>(p2) >= R2) continue;
      self(self, i + 1, p2, dotp + x[i] * v);
    }
  };
  rec(rec, 0, 0, 0);
  return count;
}

}  // namespace lab::geom
