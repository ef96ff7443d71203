#pragma once

// Exact integer and rational matrices, normal forms and the lattice bijections
// built on them. Everything here is arbitrary precision (GMP).

#include <gmpxx.h>

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

namespace lab::intlin {

class IntMat {
 public:
  IntMat() = default;
  IntMat(std::size_t rows, std::size_t cols);
  IntMat(std::initializer_list<std::initializer_list<long>> rows);

  static IntMat identity(std::size_t n);
  static IntMat column(const std::vector<long>& entries);
  static IntMat from_rows(const std::vector<std::vector<long>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  mpz_class& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const mpz_class& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  IntMat transpose() const;
  IntMat block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  bool is_zero() const;
  // Entry as a machine integer; throws DomainError when it does not fit.
  long long at_ll(std::size_t i, std::size_t j) const;
  std::string str() const;

  void swap_rows(std::size_t a, std::size_t b);
  void swap_cols(std::size_t a, std::size_t b);
  // row a += c * row b
  void add_row(std::size_t a, std::size_t b, const mpz_class& c);
  void add_col(std::size_t a, std::size_t b, const mpz_class& c);
  void negate_row(std::size_t a);
  void negate_col(std::size_t a);

  friend bool operator==(const IntMat& a, const IntMat& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<mpz_class> data_;
};

IntMat operator*(const IntMat& a, const IntMat& b);
IntMat operator+(const IntMat& a, const IntMat& b);
IntMat operator-(const IntMat& a, const IntMat& b);
IntMat operator*(const mpz_class& s, const IntMat& a);
inline bool operator!=(const IntMat& a, const IntMat& b) { return !(a == b); }

class RatMat {
 public:
  RatMat() = default;
  RatMat(std::size_t rows, std::size_t cols);
  explicit RatMat(const IntMat& m);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  mpq_class& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const mpq_class& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  RatMat transpose() const;
  bool is_integral() const;
  std::string str() const;
  friend bool operator==(const RatMat& a, const RatMat& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<mpq_class> data_;
};

RatMat operator*(const RatMat& a, const RatMat& b);
inline bool operator!=(const RatMat& a, const RatMat& b) { return !(a == b); }

mpz_class det(const IntMat& a);
mpq_class det(const RatMat& a);
std::size_t rank(const IntMat& a);
std::size_t rank(const RatMat& a);
// Inverse of a nonsingular rational matrix.
RatMat inverse(const RatMat& a);
// Inverse of a unimodular matrix; throws SingularMatrix if |det| != 1.
IntMat inverse_unimodular(const IntMat& a);
// Gram determinant det(B^T B) = d(B)^2.
mpz_class gram_det(const IntMat& b);

struct SmithData {
  IntMat U;
  IntMat D;
  IntMat V;
  std::vector<mpz_class> divisors;  // min(rows, cols) entries, zeros trailing
};

SmithData smith(const IntMat& a);

// Row-echelon Hermite form H = gamma * M with positive pivots, zeros below each
// pivot and entries above a pivot reduced into [0, pivot).
struct HermiteData {
  IntMat H;
  IntMat gamma;
  std::vector<std::size_t> pivots;  // pivot column of each nonzero row
};

HermiteData row_hermite(const IntMat& m);

// Upper triangular, positive diagonal, 0 <= a_ij < a_jj above the diagonal.
bool is_wform(const IntMat& a);

struct CosetCanonical {
  IntMat H;
  IntMat gamma;
};

CosetCanonical coset_canonical_W(const IntMat& a);

struct OrbitCanonical {
  IntMat C;
  IntMat gamma;
};

OrbitCanonical orbit_canonical_A(const IntMat& b);

bool is_primitive(const IntMat& b);
// Primitive and equal to its own orbit representative.
bool is_canonical_A(const IntMat& b);

struct RankDecomposition {
  IntMat gamma;  // n x m
  IntMat B;      // k x m, canonical
};

RankDecomposition rank_decompose(const IntMat& c);

struct PrimitiveFactor {
  IntMat P;  // n x m primitive
  IntMat A;  // m x m in W-form
};

PrimitiveFactor primitive_factor(const IntMat& c);

IntMat perp_rep(const IntMat& b);

std::vector<IntMat> enumerate_A(int k, int m, long height);
// Streaming form of enumerate_A: entries row-major k x m, same order.
void for_each_A(int k, int m, long height, const std::function<void(const std::vector<long long>&)>& visit);
std::vector<IntMat> enumerate_W(int m, long dmax);

mpz_class congruence_count(const IntMat& theta, const mpz_class& q);
mpz_class rational_denominator(const RatMat& xi);

struct B3Result {
  IntMat B3;
  RatMat J;
  RatMat D;  // the block matrix B3 * J reproduces
};

B3Result b3_construct(const IntMat& b1, const IntMat& b2, const RatMat& alpha);

struct RogersTranslation {
  IntMat B;
  mpz_class q;
  std::vector<mpz_class> divisors;
  std::vector<std::size_t> nu;  // the division columns that witnessed admissibility
};

RogersTranslation translate_D_to_B(const IntMat& d);

}  // namespace lab::intlin
