#pragma once

// Generators of covolume-one lattices: exact Haar samples on X_2, Hecke point sets
// (index-p sublattices of Z^n) and fixed lists.

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "lab/geom.hpp"
#include "lab/intlin.hpp"

namespace lab::ensembles {

struct X2Exact {
  long long samples = 0;
  std::uint64_t seed = 0;
};

// full: every point of P^{n-1}(F_p). sampled: `count` uniform draws with replacement.
// orbits: one representative per orbit of signed coordinate permutations, weighted by
// orbit size; averages agree with full mode for statistics invariant under O(n, Z).
enum class HeckeMode { Full, Sampled, Orbits };

struct Hecke {
  int n = 2;
  long long p = 2;
  HeckeMode mode = HeckeMode::Full;
  long long count = 0;
  std::uint64_t seed = 0;
};

struct Fixed {
  std::vector<geom::Lattice> lattices;
};

using EnsembleSpec = std::variant<X2Exact, Hecke, Fixed>;

// Independent stream for member `index` under `seed`.
std::mt19937_64 member_stream(std::uint64_t seed, std::uint64_t index);

struct X2Sample {
  geom::Lattice lattice;
  double x = 0, y = 0;
};
X2Sample sample_x2_coords(std::mt19937_64& rng);
geom::Lattice sample_x2(std::mt19937_64& rng);

bool is_prime(long long p);
// (p^n - 1)/(p - 1); DomainError on overflow.
unsigned long long projective_count(int n, long long p);
// Point of P^{n-1}(F_p) with its first nonzero coordinate equal to 1. Points are
// ordered by the position s of that coordinate, then by the trailing coordinates read
// as a base-p number.
std::vector<long long> projective_point(int n, long long p, unsigned long long index);
unsigned long long projective_index(const std::vector<long long>& a, long long p);

// {v in Z^n : a . v = 0 mod p} scaled by p^{-1/n}, with an LLL-reduced basis.
geom::Lattice hecke_lattice(const std::vector<long long>& a, long long p);

struct OrbitRep {
  unsigned long long index;  // projective index of the representative
  std::uint32_t weight;      // orbit size
};
std::vector<OrbitRep> hecke_orbits(int n, long long p);

std::vector<geom::Lattice> hecke_set(const Hecke& spec);

intlin::IntMat random_unimodular(std::mt19937_64& rng, int n, int steps);

// Uniform access to members of any ensemble. Member construction is a pure function
// of (spec, index), so disjoint index ranges can be built concurrently.
class Ensemble {
 public:
  explicit Ensemble(EnsembleSpec spec);

  std::size_t size() const { return size_; }
  geom::Lattice member(std::size_t i) const;
  double weight(std::size_t i) const;  // 1 except in orbit mode
  bool weighted() const { return !orbits_.empty(); }
  const EnsembleSpec& spec() const { return spec_; }
  std::string describe() const;

 private:
  EnsembleSpec spec_;
  std::size_t size_ = 0;
  std::vector<OrbitRep> orbits_;
};

}  // namespace lab::ensembles
