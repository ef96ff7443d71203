#include "lab/intlin.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

#include "lab/error.hpp"

namespace lab::intlin {

// ---- IntMat ---------------------------------------------------------------

IntMat::IntMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

IntMat::IntMat(std::initializer_list<std::initializer_list<long>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) fail(ErrorKind::DomainError, "ragged matrix literal");
    for (long v : r) data_.emplace_back(v);
  }
}

IntMat IntMat::identity(std::size_t n) {
  IntMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMat IntMat::column(const std::vector<long>& entries) {
  IntMat m(entries.size(), 1);
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, 0) = entries[i];
  return m;
}

IntMat IntMat::from_rows(const std::vector<std::vector<long>>& rows) {
  std::size_t nc = rows.empty() ? 0 : rows[0].size();
  IntMat m(rows.size(), nc);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != nc) fail(ErrorKind::DomainError, "ragged matrix rows");
    for (std::size_t j = 0; j < nc; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

IntMat IntMat::transpose() const {
  IntMat t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

IntMat IntMat::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  IntMat b(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
  return b;
}

bool IntMat::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const mpz_class& v) { return v == 0; });
}

long long IntMat::at_ll(std::size_t i, std::size_t j) const {
  const mpz_class& v = (*this)(i, j);
  if (!v.fits_slong_p()) fail(ErrorKind::DomainError, "matrix entry exceeds machine range");
  return v.get_si();
}

std::string IntMat::str() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < rows_; ++i) {
    os << (i ? ",[" : "[");
    for (std::size_t j = 0; j < cols_; ++j) os << (j ? "," : "") << (*this)(i, j).get_str();
    os << ']';
  }
  os << ']';
  return os.str();
}

void IntMat::swap_rows(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
}

void IntMat::swap_cols(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
}

void IntMat::add_row(std::size_t a, std::size_t b, const mpz_class& c) {
  if (c == 0) return;
  for (std::size_t j = 0; j < cols_; ++j) (*this)(a, j) += c * (*this)(b, j);
}

void IntMat::add_col(std::size_t a, std::size_t b, const mpz_class& c) {
  if (c == 0) return;
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, a) += c * (*this)(i, b);
}

void IntMat::negate_row(std::size_t a) {
  for (std::size_t j = 0; j < cols_; ++j) (*this)(a, j) = -(*this)(a, j);
}

void IntMat::negate_col(std::size_t a) {
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, a) = -(*this)(i, a);
}

bool operator==(const IntMat& a, const IntMat& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
  for (std::size_t i = 0; i < a.data_.size(); ++i)
    if (a.data_[i] != b.data_[i]) return false;
  return true;
}

IntMat operator*(const IntMat& a, const IntMat& b) {
  if (a.cols() != b.rows()) fail(ErrorKind::DomainError, "matrix product dimension mismatch");
  IntMat c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t l = 0; l < a.cols(); ++l) {
      if (a(i, l) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, l) * b(l, j);
    }
  return c;
}

IntMat operator+(const IntMat& a, const IntMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) fail(ErrorKind::DomainError, "matrix sum dimension mismatch");
  IntMat c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) += b(i, j);
  return c;
}

IntMat operator-(const IntMat& a, const IntMat& b) { return a + mpz_class(-1) * b; }

IntMat operator*(const mpz_class& s, const IntMat& a) {
  IntMat c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) *= s;
  return c;
}

// ---- RatMat ---------------------------------------------------------------

RatMat::RatMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

RatMat::RatMat(const IntMat& m) : RatMat(m.rows(), m.cols()) {
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = mpq_class(m(i, j));
}

RatMat RatMat::transpose() const {
  RatMat t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool RatMat::is_integral() const {
  return std::all_of(data_.begin(), data_.end(), [](const mpq_class& v) { return v.get_den() == 1; });
}

std::string RatMat::str() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < rows_; ++i) {
    os << (i ? ",[" : "[");
    for (std::size_t j = 0; j < cols_; ++j) os << (j ? "," : "") << (*this)(i, j).get_str();
    os << ']';
  }
  os << ']';
  return os.str();
}

bool operator==(const RatMat& a, const RatMat& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
  for (std::size_t i = 0; i < a.data_.size(); ++i)
    if (a.data_[i] != b.data_[i]) return false;
  return true;
}

RatMat operator*(const RatMat& a, const RatMat& b) {
  if (a.cols() != b.rows()) fail(ErrorKind::DomainError, "matrix product dimension mismatch");
  RatMat c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t l = 0; l < a.cols(); ++l) {
      if (a(i, l) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, l) * b(l, j);
    }
  return c;
}

// ---- determinants, rank, inverses -----------------------------------------

mpz_class det(const IntMat& a) {
  if (a.rows() != a.cols()) fail(ErrorKind::DomainError, "determinant of non-square matrix");
  std::size_t n = a.rows();
  if (n == 0) return 1;
  // Bareiss fraction-free elimination.
  IntMat m = a;
  mpz_class prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m(p, k) == 0) ++p;
      if (p == n) return 0;
      m.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        m(i, j) = m(i, j) * m(k, k) - m(i, k) * m(k, j);
        mpz_divexact(m(i, j).get_mpz_t(), m(i, j).get_mpz_t(), prev.get_mpz_t());
      }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

namespace {

// Reduced row echelon form in place; returns rank.
std::size_t rref(RatMat& m) {
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    mpq_class inv = 1 / m(r, c);
    for (std::size_t j = 0; j < m.cols(); ++j) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == 0) continue;
      mpq_class f = m(i, c);
      for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    ++r;
  }
  return r;
}

}  // namespace

mpq_class det(const RatMat& a) {
  if (a.rows() != a.cols()) fail(ErrorKind::DomainError, "determinant of non-square matrix");
  RatMat m = a;
  std::size_t n = a.rows();
  mpq_class d = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m(p, c) == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
      d = -d;
    }
    d *= m(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (m(i, c) == 0) continue;
      mpq_class f = m(i, c) / m(c, c);
      for (std::size_t j = c; j < n; ++j) m(i, j) -= f * m(c, j);
    }
  }
  return d;
}

std::size_t rank(const RatMat& a) {
  RatMat m = a;
  return rref(m);
}

std::size_t rank(const IntMat& a) { return rank(RatMat(a)); }

RatMat inverse(const RatMat& a) {
  if (a.rows() != a.cols()) fail(ErrorKind::DomainError, "inverse of non-square matrix");
  std::size_t n = a.rows();
  RatMat aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n + i) = 1;
  }
  if (rref(aug) < n || aug(n - 1, n - 1) == 0) fail(ErrorKind::SingularMatrix, "rational inverse of singular matrix");
  RatMat inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

mpz_class gram_det(const IntMat& b) { return det(b.transpose() * b); }

// ---- Smith and Hermite ----------------------------------------------------

SmithData smith(const IntMat& a) {
  if (a.empty()) fail(ErrorKind::DomainError, "smith of empty matrix");
  const std::size_t m = a.rows(), k = a.cols();
  SmithData s{IntMat::identity(m), a, IntMat::identity(k), {}};
  IntMat& D = s.D;
  IntMat& U = s.U;
  IntMat& V = s.V;
  // D is kept equal to U^{-1} A V^{-1}: every row operation on D is undone on the
  // columns of U, every column operation on the rows of V.
  auto row_add = [&](std::size_t i, std::size_t j, const mpz_class& c) {
    D.add_row(i, j, c);
    U.add_col(j, i, -c);
  };
  auto col_add = [&](std::size_t i, std::size_t j, const mpz_class& c) {
    D.add_col(i, j, c);
    V.add_row(j, i, -c);
  };
  auto row_swap = [&](std::size_t i, std::size_t j) {
    D.swap_rows(i, j);
    U.swap_cols(i, j);
  };
  auto col_swap = [&](std::size_t i, std::size_t j) {
    D.swap_cols(i, j);
    V.swap_rows(i, j);
  };

  const std::size_t r = std::min(m, k);
  mpz_class q;
  for (std::size_t t = 0; t < r; ++t) {
    bool exhausted = false;
    while (true) {
      std::size_t pi = m, pj = k;
      for (std::size_t i = t; i < m; ++i)
        for (std::size_t j = t; j < k; ++j)
          if (D(i, j) != 0 && (pi == m || abs(D(i, j)) < abs(D(pi, pj)))) {
            pi = i;
            pj = j;
          }
      if (pi == m) {
        exhausted = true;
        break;
      }
      row_swap(t, pi);
      col_swap(t, pj);
      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (D(i, t) == 0) continue;
        mpz_fdiv_q(q.get_mpz_t(), D(i, t).get_mpz_t(), D(t, t).get_mpz_t());
        row_add(i, t, -q);
        if (D(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < k; ++j) {
        if (D(t, j) == 0) continue;
        mpz_fdiv_q(q.get_mpz_t(), D(t, j).get_mpz_t(), D(t, t).get_mpz_t());
        col_add(j, t, -q);
        if (D(t, j) != 0) clean = false;
      }
      if (!clean) continue;
      bool fixed = false;
      for (std::size_t i = t + 1; i < m && !fixed; ++i)
        for (std::size_t j = t + 1; j < k; ++j)
          if (!mpz_divisible_p(D(i, j).get_mpz_t(), D(t, t).get_mpz_t())) {
            row_add(t, i, 1);
            fixed = true;
            break;
          }
      if (!fixed) break;
    }
    if (exhausted) break;
    if (D(t, t) < 0) {
      D.negate_row(t);
      U.negate_col(t);
    }
  }
  for (std::size_t t = 0; t < r; ++t) s.divisors.push_back(D(t, t));
  return s;
}

HermiteData row_hermite(const IntMat& mat) {
  HermiteData h{mat, IntMat::identity(mat.rows()), {}};
  IntMat& H = h.H;
  IntMat& g = h.gamma;
  const std::size_t m = H.rows(), k = H.cols();
  std::size_t r = 0;
  mpz_class q;
  for (std::size_t c = 0; c < k && r < m; ++c) {
    bool has_pivot = false;
    while (true) {
      std::size_t p = m;
      for (std::size_t i = r; i < m; ++i)
        if (H(i, c) != 0 && (p == m || abs(H(i, c)) < abs(H(p, c)))) p = i;
      if (p == m) break;
      has_pivot = true;
      H.swap_rows(r, p);
      g.swap_rows(r, p);
      bool done = true;
      for (std::size_t i = r + 1; i < m; ++i) {
        if (H(i, c) == 0) continue;
        mpz_fdiv_q(q.get_mpz_t(), H(i, c).get_mpz_t(), H(r, c).get_mpz_t());
        H.add_row(i, r, -q);
        g.add_row(i, r, -q);
        if (H(i, c) != 0) done = false;
      }
      if (done) break;
    }
    if (!has_pivot) continue;
    if (H(r, c) < 0) {
      H.negate_row(r);
      g.negate_row(r);
    }
    for (std::size_t i = 0; i < r; ++i) {
      mpz_fdiv_q(q.get_mpz_t(), H(i, c).get_mpz_t(), H(r, c).get_mpz_t());
      H.add_row(i, r, -q);
      g.add_row(i, r, -q);
    }
    h.pivots.push_back(c);
    ++r;
  }
  return h;
}

IntMat inverse_unimodular(const IntMat& a) {
  if (a.rows() != a.cols()) fail(ErrorKind::DomainError, "inverse of non-square matrix");
  HermiteData h = row_hermite(a);
  if (h.H != IntMat::identity(a.rows())) fail(ErrorKind::SingularMatrix, "matrix is not unimodular");
  return h.gamma;
}

bool is_wform(const IntMat& a) {
  if (a.rows() != a.cols()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (a(i, i) <= 0) return false;
    for (std::size_t j = 0; j < i; ++j)
      if (a(i, j) != 0) return false;
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (a(i, j) < 0 || a(i, j) >= a(j, j)) return false;
  }
  return true;
}

CosetCanonical coset_canonical_W(const IntMat& a) {
  if (a.rows() != a.cols()) fail(ErrorKind::DomainError, "coset_canonical_W needs a square matrix");
  if (a.rows() == 0) return {a, a};
  if (rank(a) < a.rows()) fail(ErrorKind::SingularMatrix, "coset_canonical_W of singular matrix");
  HermiteData h = row_hermite(a);
  return {h.H, h.gamma};
}

OrbitCanonical orbit_canonical_A(const IntMat& b) {
  if (b.cols() == 0) return {b, IntMat()};
  if (rank(b) < b.cols()) fail(ErrorKind::RankDeficient, "orbit_canonical_A needs full column rank");
  HermiteData h = row_hermite(b.transpose());
  return {h.H.transpose(), h.gamma.transpose()};
}

bool is_primitive(const IntMat& b) {
  if (b.cols() == 0) return true;
  if (b.cols() > b.rows()) return false;
  SmithData s = smith(b);
  return std::all_of(s.divisors.begin(), s.divisors.end(), [](const mpz_class& d) { return d == 1; });
}

bool is_canonical_A(const IntMat& b) {
  if (!is_primitive(b)) return false;
  return orbit_canonical_A(b).C == b;
}

RankDecomposition rank_decompose(const IntMat& c) {
  if (c.empty() || c.is_zero()) fail(ErrorKind::ZeroRank, "rank_decompose of zero matrix");
  SmithData s = smith(c);
  std::size_t m = 0;
  while (m < s.divisors.size() && s.divisors[m] != 0) ++m;
  const std::size_t n = c.rows(), k = c.cols();
  IntMat B0 = s.V.block(0, 0, m, k).transpose();
  OrbitCanonical oc = orbit_canonical_A(B0);
  IntMat scaled = s.U.block(0, 0, n, m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= s.divisors[j];
  RankDecomposition r{scaled * inverse_unimodular(oc.gamma).transpose(), oc.C};
  if (r.gamma * r.B.transpose() != c) fail(ErrorKind::NumericalFailure, "rank_decompose roundtrip failed");
  return r;
}

PrimitiveFactor primitive_factor(const IntMat& c) {
  const std::size_t n = c.rows(), m = c.cols();
  if (m == 0 || m > n || rank(c) < m) fail(ErrorKind::RankDeficient, "primitive_factor needs full column rank");
  SmithData s = smith(c);
  IntMat A0 = s.V;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) A0(i, j) *= s.divisors[i];
  CosetCanonical cw = coset_canonical_W(A0);
  PrimitiveFactor f{s.U.block(0, 0, n, m) * inverse_unimodular(cw.gamma), cw.H};
  if (f.P * f.A != c) fail(ErrorKind::NumericalFailure, "primitive_factor roundtrip failed");
  return f;
}

IntMat perp_rep(const IntMat& b) {
  const std::size_t k = b.rows(), m = b.cols();
  if (m >= k) fail(ErrorKind::NoComplement, "no orthogonal complement for full-rank B");
  if (!is_primitive(b)) fail(ErrorKind::NotCanonical, "perp_rep needs a primitive matrix");
  HermiteData h = row_hermite(b);
  // Rows of gamma beyond the rank annihilate B from the left and span the kernel lattice.
  IntMat kernel = h.gamma.block(m, 0, k - m, k).transpose();
  return orbit_canonical_A(kernel).C;
}

// ---- enumeration ----------------------------------------------------------

namespace {

long long gcd_ll(long long a, long long b) { return std::gcd(a, b); }

bool primitive_ll(const std::vector<long long>& e, int k, int m) {
  if (m == 1) {
    long long g = 0;
    for (long long v : e) g = gcd_ll(g, v);
    return g == 1;
  }
  IntMat b(k, m);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < m; ++j) b(i, j) = static_cast<long>(e[i * m + j]);
  return is_primitive(b);
}

}  // namespace

void for_each_A(int k, int m, long height, const std::function<void(const std::vector<long long>&)>& visit) {
  if (m < 1 || m > k || height < 1) fail(ErrorKind::DomainError, "enumerate_A needs 1 <= m <= k and H >= 1");
  if (m == k) {
    std::vector<long long> e(k * k, 0);
    for (int i = 0; i < k; ++i) e[i * k + i] = 1;
    visit(e);
    return;
  }
  // T = C^T is m x k in row-Hermite shape; cells are filled pivots first.
  struct Cell {
    int r, c, kind;  // 0 pivot, 1 above a pivot (bounded by it), 2 free
    int pivot_row;
  };
  std::vector<int> piv(m);
  std::function<void(int, int)> choose_pivots;
  std::vector<long long> T(m * k);
  std::vector<long long> out(k * m);

  auto run_cells = [&](const std::vector<Cell>& cells) {
    std::function<void(std::size_t)> rec = [&](std::size_t idx) {
      if (idx == cells.size()) {
        for (int r = 0; r < m; ++r)
          for (int c = 0; c < k; ++c) out[c * m + r] = T[r * k + c];
        if (primitive_ll(out, k, m)) visit(out);
        return;
      }
      const Cell& cell = cells[idx];
      long long lo, hi;
      if (cell.kind == 0) {
        lo = 1;
        hi = height;
      } else if (cell.kind == 1) {
        lo = 0;
        hi = T[cell.pivot_row * k + piv[cell.pivot_row]] - 1;
      } else {
        lo = -height;
        hi = height;
      }
      for (long long v = lo; v <= hi; ++v) {
        T[cell.r * k + cell.c] = v;
        rec(idx + 1);
      }
      T[cell.r * k + cell.c] = 0;
    };
    rec(0);
  };

  choose_pivots = [&](int r, int start) {
    if (r == m) {
      std::vector<Cell> cells;
      for (int i = 0; i < m; ++i) cells.push_back({i, piv[i], 0, i});
      for (int i = 0; i < m; ++i)
        for (int c = piv[i] + 1; c < k; ++c) {
          int s = -1;
          for (int j = 0; j < m; ++j)
            if (piv[j] == c) s = j;
          if (s >= 0) {
            if (s > i) cells.push_back({i, c, 1, s});
          } else {
            cells.push_back({i, c, 2, -1});
          }
        }
      std::fill(T.begin(), T.end(), 0);
      run_cells(cells);
      return;
    }
    for (int c = start; c <= k - (m - r); ++c) {
      piv[r] = c;
      choose_pivots(r + 1, c + 1);
    }
  };
  choose_pivots(0, 0);
}

std::vector<IntMat> enumerate_A(int k, int m, long height) {
  std::vector<IntMat> out;
  for_each_A(k, m, height, [&](const std::vector<long long>& e) {
    IntMat b(k, m);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < m; ++j) b(i, j) = static_cast<long>(e[i * m + j]);
    out.push_back(std::move(b));
  });
  return out;
}

std::vector<IntMat> enumerate_W(int m, long dmax) {
  if (m < 1 || dmax < 1) fail(ErrorKind::DomainError, "enumerate_W needs m >= 1 and Dmax >= 1");
  std::vector<IntMat> out;
  std::vector<long> diag(m);
  IntMat a(m, m);
  std::function<void(int, int)> fill_off = [&](int i, int j) {
    if (i == m) {
      out.push_back(a);
      return;
    }
    if (j == m) {
      fill_off(i + 1, i + 2);
      return;
    }
    for (long v = 0; v < diag[j]; ++v) {
      a(i, j) = v;
      fill_off(i, j + 1);
    }
    a(i, j) = 0;
  };
  std::function<void(int, long)> choose_diag = [&](int i, long prod) {
    if (i == m) {
      for (int t = 0; t < m; ++t) a(t, t) = diag[t];
      fill_off(0, 1);
      return;
    }
    for (long d = 1; prod * d <= dmax; ++d) {
      diag[i] = d;
      choose_diag(i + 1, prod * d);
    }
  };
  choose_diag(0, 1);
  return out;
}

// ---- congruences and the block bijection ----------------------------------

mpz_class congruence_count(const IntMat& theta, const mpz_class& q) {
  if (q < 1) fail(ErrorKind::DomainError, "congruence_count needs q >= 1");
  const std::size_t m1 = theta.rows();
  if (theta.cols() == 0) {
    mpz_class n;
    mpz_pow_ui(n.get_mpz_t(), q.get_mpz_t(), m1);
    return n;
  }
  SmithData s = smith(theta);
  std::size_t r = 0;
  mpz_class n = 1, g;
  for (const mpz_class& d : s.divisors) {
    if (d == 0) break;
    ++r;
    mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), q.get_mpz_t());
    n *= g;
  }
  mpz_class free_part;
  mpz_pow_ui(free_part.get_mpz_t(), q.get_mpz_t(), m1 - r);
  return n * free_part;
}

mpz_class rational_denominator(const RatMat& xi) {
  mpz_class q = 1;
  for (std::size_t i = 0; i < xi.rows(); ++i)
    for (std::size_t j = 0; j < xi.cols(); ++j) mpz_lcm(q.get_mpz_t(), q.get_mpz_t(), xi(i, j).get_den_mpz_t());
  return q;
}

B3Result b3_construct(const IntMat& b1, const IntMat& b2, const RatMat& alpha) {
  if (!is_canonical_A(b1) || !is_canonical_A(b2)) fail(ErrorKind::NotCanonical, "b3_construct needs canonical primitive B1, B2");
  const std::size_t k1 = b1.rows(), m1 = b1.cols(), k2 = b2.rows(), m2 = b2.cols();
  if (alpha.rows() != m2 || alpha.cols() != m1) fail(ErrorKind::DomainError, "alpha must be m2 x m1");
  IntMat perp = m2 < k2 ? perp_rep(b2) : IntMat(k2, 0);
  const std::size_t mp = k2 - m2;
  const std::size_t k = k1 + k2, w = m1 + mp;

  RatMat a = alpha;
  for (std::size_t i = 0; i < m2; ++i)
    for (std::size_t j = 0; j < m1; ++j) a(i, j).canonicalize();
  RatMat D(k, w);
  RatMat b2alpha = RatMat(b2) * a;
  for (std::size_t i = 0; i < k1; ++i)
    for (std::size_t j = 0; j < m1; ++j) D(i, j) = b1(i, j);
  for (std::size_t i = 0; i < k2; ++i) {
    for (std::size_t j = 0; j < m1; ++j) D(k1 + i, j) = b2alpha(i, j);
    for (std::size_t j = 0; j < mp; ++j) D(k1 + i, m1 + j) = perp(i, j);
  }

  mpz_class den = rational_denominator(D);
  IntMat Dint(k, w);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < w; ++j) {
      mpq_class v = D(i, j) * den;
      Dint(i, j) = v.get_num();
    }
  SmithData s = smith(Dint);
  std::size_t r = 0;
  while (r < s.divisors.size() && s.divisors[r] != 0) ++r;
  if (r != w) fail(ErrorKind::RankDeficient, "block matrix lost rank");
  IntMat B3 = orbit_canonical_A(s.U.block(0, 0, k, w)).C;

  RatMat B3q(B3);
  RatMat J = inverse(B3q.transpose() * B3q) * (B3q.transpose() * D);
  if (B3q * J != D) fail(ErrorKind::NumericalFailure, "B3 J = D failed");
  return {B3, J, D};
}

RogersTranslation translate_D_to_B(const IntMat& d) {
  const std::size_t m = d.rows(), k = d.cols();
  if (m == 0 || m > k) fail(ErrorKind::NotRogersAdmissible, "D must be m x k with 1 <= m <= k");
  mpz_class g = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < k; ++j) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d(i, j).get_mpz_t());
  if (g != 1) fail(ErrorKind::NotRogersAdmissible, "entries of D must have gcd 1");

  std::vector<std::size_t> nu(m);
  std::vector<std::size_t> found;
  mpz_class q;
  std::function<bool(std::size_t, std::size_t)> scan = [&](std::size_t i, std::size_t start) -> bool {
    if (i == m) {
      mpz_class qq = d(0, nu[0]);
      if (qq <= 0) return false;
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
          if (d(a, nu[b]) != (a == b ? qq : mpz_class(0))) return false;
      std::vector<bool> in_nu(k, false);
      for (std::size_t v : nu) in_nu[v] = true;
      for (std::size_t c = 0; c < k; ++c) {
        if (in_nu[c]) continue;
        for (std::size_t a = 0; a < m; ++a)
          if (c < nu[a] && d(a, c) != 0) return false;
      }
      q = qq;
      found = nu;
      return true;
    }
    for (std::size_t c = start; c + (m - i) <= k; ++c) {
      nu[i] = c;
      if (scan(i + 1, c + 1)) return true;
    }
    return false;
  };
  if (!scan(0, 0)) fail(ErrorKind::NotRogersAdmissible, "no valid division of columns");

  SmithData s = smith(d);
  IntMat B = orbit_canonical_A(s.V.block(0, 0, m, k).transpose()).C;
  return {B, q, s.divisors, found};
}

}  // namespace lab::intlin
