#pragma once

// Real lattice geometry: bases, duals, reduction, short-vector enumeration, the
// action of SL_n on pairs (x, y) and transporters on the pairing manifold.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <vector>

#include "lab/error.hpp"

namespace lab::geom {

using RealMat = Eigen::MatrixXd;
using RealVec = Eigen::VectorXd;
using IntCols = std::vector<std::vector<long long>>;  // integer basis, one inner vector per column

struct Lattice {
  RealMat basis;  // columns are basis vectors
  double covolume = 1.0;

  static Lattice from_basis(const RealMat& basis);
  int dim() const { return static_cast<int>(basis.rows()); }
};

struct TuplePoint {
  RealMat x;  // n x m1
  RealMat y;  // n x m2
};

double ball_volume(int n);
double dvol(const RealMat& x);
Lattice dual(const Lattice& L);

// LLL with Lovasz parameter delta; reduced = basis * U.
struct Reduced {
  RealMat basis;
  Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> U;
};
Reduced lll_reduce(const RealMat& basis, double delta = 0.99);

// Exact LLL for integer bases with entries below 2^58 (inner products in 128 bits,
// Gram-Schmidt in long double). Returns the reduced columns.
IntCols lll_integer(IntCols basis, double delta = 0.99);

// Fincke-Pohst enumeration over an LLL-reduced copy of a lattice basis.
class Enumerator {
 public:
  explicit Enumerator(const Lattice& L);

  int dim() const { return n_; }
  const Lattice& lattice() const { return lattice_; }

  // Calls visit(coords, v, norm2) for every v in L with 0 < |v| <= R. coords are
  // integer coordinates with respect to the original basis of L.
  template <class Visit>
  void enumerate(double R, Visit&& visit) const;

  // Rigorous upper bound on sum_{|v| > R} exp(-pi |v|^2 / t), from the point-count
  // majorant N(r) <= prod_i (1 + 2r / |b*_i|).
  double gaussian_tail_bound(double t, double R) const;
  // Radius whose tail bound is below tol, within 0.5% of the smallest such radius.
  double gaussian_radius(double t, double tol) const;

 private:
  int n_;
  Lattice lattice_;
  RealMat reduced_;
  Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> U_;
  RealMat mu_;
  std::vector<double> bstar2_;
  std::vector<double> inv_bstar_;  // 1 / |b*_i|
};

std::vector<RealVec> short_vectors(const Lattice& L, double R);
// V_n |v_j|^n for the first J vector pairs +-v_j by increasing length.
std::vector<double> normalized_volumes(const Lattice& L, int J);

TuplePoint apply_g(const RealMat& g, const TuplePoint& p);
double scaling_delta(const RealMat& g, const RealMat& V);
// x^T y = beta within rel_tol, d(x) > 0 and d(y) > 0.
bool on_manifold(const RealMat& beta, const TuplePoint& p, double rel_tol = 1e-8);
RealMat transporter(const RealMat& beta, const TuplePoint& p, const TuplePoint& p2);

// #{w in Z^n : x . w = beta, 0 < |w| < R}, exact.
long long count_slice_points(const std::vector<long long>& x, long long beta, double R);

// ---- template implementation ----

template <class Visit>
void Enumerator::enumerate(double R, Visit&& visit) const {
  if (!(R > 0)) fail(ErrorKind::DomainError, "enumeration radius must be positive");
  const int n = n_;
  const double R2 = R * R;
  const double R2slack = R2 * (1 + 1e-10) + 1e-300;
  std::vector<long long> x(n, 0), coords(n, 0);
  std::vector<double> partial(n + 1, 0.0);
  std::vector<double> center(n, 0.0);
  RealVec v(lattice_.basis.rows());

  auto emit = [&]() {
    bool zero = true;
    for (int i = 0; i < n; ++i)
      if (x[i] != 0) {
        zero = false;
        break;
      }
    if (zero) return;
    v.setZero();
    for (int i = 0; i < n; ++i)
      if (x[i] != 0) v += static_cast<double>(x[i]) * reduced_.col(i);
    const double norm2 = v.squaredNorm();
    if (norm2 > R2) return;
    for (int r = 0; r < n; ++r) {
      long long s = 0;
      for (int c = 0; c < n; ++c) s += U_(r, c) * x[c];
      coords[r] = s;
    }
    visit(coords, v, norm2);
  };

  // Depth-first over levels n-1 .. 0.
  auto rec = [&](auto&& self, int i) -> void {
    double c = 0;
    for (int j = i + 1; j < n; ++j) c -= mu_(j, i) * static_cast<double>(x[j]);
    const double rem = R2slack - partial[i + 1];
    if (rem < 0) return;
    const double half = std::sqrt(rem / bstar2_[i]);
    const long long lo = static_cast<long long>(std::ceil(c - half));
    const long long hi = static_cast<long long>(std::floor(c + half));
    for (long long xi = lo; xi <= hi; ++xi) {
      const double d = static_cast<double>(xi) - c;
      partial[i] = partial[i + 1] + d * d * bstar2_[i];
      if (partial[i] > R2slack) continue;
      x[i] = xi;
      if (i == 0)
        emit();
      else
        self(self, i - 1);
    }
    x[i] = 0;
  };
  rec(rec, n - 1);
}

}  // namespace lab::geom
