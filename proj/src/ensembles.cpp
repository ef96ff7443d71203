#include "lab/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lab/error.hpp"

namespace lab::ensembles {

namespace {

using u64 = unsigned long long;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

long long invmod(long long a, long long p) {
  long long t = 0, nt = 1, r = p, nr = ((a % p) + p) % p;
  while (nr != 0) {
    long long q = r / nr;
    std::tie(t, nt) = std::make_pair(nt, t - q * nt);
    std::tie(r, nr) = std::make_pair(nr, r - q * nr);
  }
  if (r != 1) fail(ErrorKind::DomainError, "element not invertible mod p");
  return t < 0 ? t + p : t;
}

// Scale so the first nonzero coordinate is 1; false for the zero vector.
bool normalize(std::vector<long long>& a, long long p) {
  for (std::size_t s = 0; s < a.size(); ++s) {
    if (a[s] == 0) continue;
    const long long inv = invmod(a[s], p);
    for (std::size_t j = s; j < a.size(); ++j)
      a[j] = static_cast<long long>(mulmod(static_cast<u64>(a[j]), static_cast<u64>(inv), static_cast<u64>(p)));
    return true;
  }
  return false;
}

void require_prime(long long p) {
  if (!is_prime(p)) fail(ErrorKind::DomainError, "p must be prime: " + std::to_string(p));
}

}  // namespace

std::mt19937_64 member_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

X2Sample sample_x2_coords(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double c = std::sqrt(3.0) / 2.0;
  double x;
  for (;;) {
    x = unif(rng) - 0.5;
    if (unif(rng) * std::sqrt(1.0 - x * x) <= c) break;
  }
  const double u = 1.0 - unif(rng);  // (0, 1]
  const double y = std::sqrt(1.0 - x * x) / u;
  geom::RealMat B(2, 2);
  const double ry = std::sqrt(y);
  B << 1.0 / ry, x / ry, 0.0, ry;
  return {geom::Lattice{B, 1.0}, x, y};
}

geom::Lattice sample_x2(std::mt19937_64& rng) { return sample_x2_coords(rng).lattice; }

bool is_prime(long long p) {
  if (p < 2) return false;
  for (long long q : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (p % q == 0) return p == q;
  }
  u64 d = static_cast<u64>(p) - 1;
  int r = 0;
  while ((d & 1) == 0) d >>= 1, ++r;
  // These bases are deterministic for all 64-bit inputs.
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    u64 x = powmod(a, d, static_cast<u64>(p));
    if (x == 1 || x == static_cast<u64>(p) - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = mulmod(x, x, static_cast<u64>(p));
      if (x == static_cast<u64>(p) - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

unsigned long long projective_count(int n, long long p) {
  if (n < 1 || p < 2) fail(ErrorKind::DomainError, "projective_count needs n >= 1, p >= 2");
  u128 total = 0, pw = 1;
  for (int i = 0; i < n; ++i) {
    total += pw;
    pw *= static_cast<u128>(p);
    if (total > static_cast<u128>(1ULL << 62)) fail(ErrorKind::DomainError, "projective space too large to index");
  }
  return static_cast<u64>(total);
}

std::vector<long long> projective_point(int n, long long p, unsigned long long index) {
  std::vector<long long> a(n, 0);
  u64 block = 1;
  for (int i = 1; i < n; ++i) block *= static_cast<u64>(p);
  for (int s = 0; s < n; ++s) {
    if (index < block) {
      a[s] = 1;
      for (int j = n - 1; j > s; --j) {
        a[j] = static_cast<long long>(index % static_cast<u64>(p));
        index /= static_cast<u64>(p);
      }
      return a;
    }
    index -= block;
    block /= static_cast<u64>(p);
  }
  fail(ErrorKind::DomainError, "projective index out of range");
}

unsigned long long projective_index(const std::vector<long long>& a, long long p) {
  const int n = static_cast<int>(a.size());
  u64 offset = 0, block = 1;
  for (int i = 1; i < n; ++i) block *= static_cast<u64>(p);
  for (int s = 0; s < n; ++s) {
    if (a[s] != 0) {
      u64 v = 0;
      for (int j = s + 1; j < n; ++j) v = v * static_cast<u64>(p) + static_cast<u64>(a[j]);
      return offset + v;
    }
    offset += block;
    block /= static_cast<u64>(p);
  }
  fail(ErrorKind::DomainError, "zero vector has no projective index");
}

geom::Lattice hecke_lattice(const std::vector<long long>& a, long long p) {
  const int n = static_cast<int>(a.size());
  int s = 0;
  while (s < n && a[s] == 0) ++s;
  if (s == n || a[s] != 1) fail(ErrorKind::DomainError, "Hecke point must be normalized");
  geom::IntCols B;
  for (int j = 0; j < n; ++j) {
    std::vector<long long> c(n, 0);
    if (j == s) {
      c[s] = p;
    } else {
      c[j] = 1;
      if (j > s) c[s] = (p - a[j] % p) % p;
    }
    B.push_back(std::move(c));
  }
  geom::IntCols R = geom::lll_integer(std::move(B));
  const double scale = std::pow(static_cast<double>(p), -1.0 / n);
  geom::RealMat M(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) M(i, j) = static_cast<double>(R[j][i]) * scale;
  return geom::Lattice{M, std::fabs(M.determinant())};
}

std::vector<OrbitRep> hecke_orbits(int n, long long p) {
  require_prime(p);
  const u64 total = projective_count(n, p);
  if (total > (1ULL << 34)) fail(ErrorKind::DomainError, "too many projective points for orbit reduction");
  std::vector<std::uint64_t> seen((total + 63) / 64, 0);
  auto test_and_set = [&](u64 i) {
    std::uint64_t bit = 1ULL << (i & 63);
    bool was = seen[i >> 6] & bit;
    seen[i >> 6] |= bit;
    return was;
  };
  std::vector<int> perm0(n);
  std::iota(perm0.begin(), perm0.end(), 0);
  std::vector<std::vector<int>> perms;
  do perms.push_back(perm0);
  while (std::next_permutation(perm0.begin(), perm0.end()));

  std::vector<OrbitRep> reps;
  std::vector<long long> b(n);
  for (u64 idx = 0; idx < total; ++idx) {
    if (seen[idx >> 6] & (1ULL << (idx & 63))) continue;
    const std::vector<long long> a = projective_point(n, p, idx);
    std::uint32_t weight = 0;
    for (const auto& pi : perms) {
      // The overall sign acts trivially on projective points, so fix sign 0.
      for (u64 mask = 0; mask < (1ULL << (n - 1)); ++mask) {
        for (int i = 0; i < n; ++i) {
          long long v = a[pi[i]];
          if (i > 0 && ((mask >> (i - 1)) & 1) && v != 0) v = p - v;
          b[i] = v;
        }
        normalize(b, p);
        if (!test_and_set(projective_index(b, p))) ++weight;
      }
    }
    reps.push_back({idx, weight});
  }
  return reps;
}

namespace {

std::vector<long long> sampled_point(int n, long long p, std::mt19937_64& rng) {
  std::uniform_int_distribution<long long> u(0, p - 1);
  std::vector<long long> a(n);
  for (;;) {
    for (auto& v : a) v = u(rng);
    if (normalize(a, p)) return a;
  }
}

}  // namespace

std::vector<geom::Lattice> hecke_set(const Hecke& spec) {
  Ensemble e(spec);
  std::vector<geom::Lattice> out;
  out.reserve(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) out.push_back(e.member(i));
  return out;
}

intlin::IntMat random_unimodular(std::mt19937_64& rng, int n, int steps) {
  if (steps < 1) fail(ErrorKind::DomainError, "steps must be positive");
  intlin::IntMat U = intlin::IntMat::identity(n);
  if (n < 2) {
    if (rng() & 1) U.negate_col(0);
    return U;
  }
  std::uniform_int_distribution<int> pick(0, n - 1), kind(0, 3), coef(-2, 2);
  for (int s = 0; s < steps; ++s) {
    int i = pick(rng), j = pick(rng);
    while (j == i) j = pick(rng);
    switch (kind(rng)) {
      case 0:
        U.swap_cols(i, j);
        break;
      case 1:
        U.negate_col(i);
        break;
      default: {
        int c = coef(rng);
        if (c == 0) c = 1;
        U.add_col(i, j, c);
      }
    }
  }
  return U;
}

Ensemble::Ensemble(EnsembleSpec spec) : spec_(std::move(spec)) {
  if (auto* x = std::get_if<X2Exact>(&spec_)) {
    if (x->samples < 1) fail(ErrorKind::DomainError, "X2 sample count must be positive");
    size_ = static_cast<std::size_t>(x->samples);
  } else if (auto* h = std::get_if<Hecke>(&spec_)) {
    if (h->n < 2) fail(ErrorKind::DomainError, "Hecke ensembles need n >= 2");
    require_prime(h->p);
    switch (h->mode) {
      case HeckeMode::Full:
        size_ = projective_count(h->n, h->p);
        break;
      case HeckeMode::Sampled:
        if (h->count < 1) fail(ErrorKind::DomainError, "sample count must be positive");
        size_ = static_cast<std::size_t>(h->count);
        break;
      case HeckeMode::Orbits:
        orbits_ = hecke_orbits(h->n, h->p);
        size_ = orbits_.size();
        break;
    }
  } else {
    const auto& f = std::get<Fixed>(spec_);
    if (f.lattices.empty()) fail(ErrorKind::DomainError, "fixed ensemble is empty");
    size_ = f.lattices.size();
  }
}

geom::Lattice Ensemble::member(std::size_t i) const {
  if (i >= size_) fail(ErrorKind::DomainError, "member index out of range");
  if (auto* x = std::get_if<X2Exact>(&spec_)) {
    auto rng = member_stream(x->seed, i);
    return sample_x2(rng);
  }
  if (auto* h = std::get_if<Hecke>(&spec_)) {
    switch (h->mode) {
      case HeckeMode::Full:
        return hecke_lattice(projective_point(h->n, h->p, i), h->p);
      case HeckeMode::Sampled: {
        auto rng = member_stream(h->seed, i);
        return hecke_lattice(sampled_point(h->n, h->p, rng), h->p);
      }
      case HeckeMode::Orbits:
        return hecke_lattice(projective_point(h->n, h->p, orbits_[i].index), h->p);
    }
  }
  return std::get<Fixed>(spec_).lattices[i];
}

double Ensemble::weight(std::size_t i) const { return orbits_.empty() ? 1.0 : orbits_[i].weight; }

std::string Ensemble::describe() const {
  std::ostringstream os;
  if (auto* x = std::get_if<X2Exact>(&spec_)) {
    os << "x2_exact(samples=" << x->samples << ", seed=" << x->seed << ")";
  } else if (auto* h = std::get_if<Hecke>(&spec_)) {
    const char* mode = h->mode == HeckeMode::Full ? "full" : h->mode == HeckeMode::Sampled ? "sampled" : "orbits";
    os << "hecke(n=" << h->n << ", p=" << h->p << ", mode=" << mode;
    if (h->mode == HeckeMode::Sampled) os << ", count=" << h->count << ", seed=" << h->seed;
    os << ")";
  } else {
    os << "fixed(" << size_ << " lattices)";
  }
  return os.str();
}

}  // namespace lab::ensembles
