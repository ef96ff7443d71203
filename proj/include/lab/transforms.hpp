#pragma once

// Lattice sums (Siegel transforms, products over L and L*, primitive tuples, F_beta,
// rank-restricted sums, point counts) and their averages over an ensemble.

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "lab/ensembles.hpp"
#include "lab/geom.hpp"
#include "lab/intlin.hpp"

namespace lab::transforms {

// v -> exp(-pi |v|^2 / t), or the indicator of the open ball of volume V.
struct RadialProfile {
  enum class Kind { Gaussian, Ball };
  Kind kind = Kind::Gaussian;
  double t = 1.0;
  double volume = 0.0;
  bool exclude_origin = true;

  static RadialProfile gaussian(double t);
  static RadialProfile ball(double volume, bool exclude_origin = true);

  double radius(int n) const;  // ball radius; DomainError for Gaussians
  double at_norm2(double r2, int n) const;
  double at_origin() const;
  double integral(int n) const;
  // Profile of v -> f(d v).
  RadialProfile scaled(double d, int n) const;
};

struct TestFunction {
  std::vector<RadialProfile> primal;
  std::vector<RadialProfile> dual;
};

// Number of lattice points seen within 1e-12 of a ball boundary since the last reset.
long long boundary_warnings();
void reset_boundary_warnings();

// Relative truncation tolerance for Gaussian lattice sums.
inline constexpr double kGaussianTol = 1e-12;

double siegel_sum(const geom::Enumerator& e, const RadialProfile& f);
double siegel_sum(const geom::Lattice& L, const RadialProfile& f);
double product_multisum(const geom::Lattice& L, const TestFunction& rho);
double primitive_tuple_sum(const geom::Lattice& L, int k, const TestFunction& rho);
double f_beta_sum(const geom::Lattice& L, const intlin::IntMat& beta, const TestFunction& rho);
double rank_restricted_sum(const geom::Lattice& L, int m1, int m2, const intlin::IntMat& B1, const intlin::IntMat& B2,
                           const TestFunction& rho);

struct Counts {
  std::vector<long long> N;
  std::vector<long long> Ndual;
};
Counts count_statistic(const geom::Lattice& L, const std::vector<double>& V, const std::vector<double>& W);

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation over sqrt(count)
  long long count = 0;
  std::uint64_t seed = 0;
  ensembles::EnsembleSpec ensemble;
};

struct EstimateOptions {
  int threads = 0;           // 0: LAB_THREADS or hardware concurrency
  bool keep_values = false;  // record per-member values of the first component
};

struct MultiEstimate {
  std::vector<Estimate> components;
  std::vector<double> values;   // per member, when requested
  std::vector<double> weights;  // per member, when requested and weighted
};

// statistic(L, out) writes `dims` values for one member.
using MultiStatistic = std::function<void(const geom::Lattice&, double*)>;
using Statistic = std::function<double(const geom::Lattice&)>;

inline constexpr std::size_t kChunk = 1024;

int worker_count(int requested = 0);

MultiEstimate ensemble_estimate_multi(const ensembles::Ensemble& ens, std::size_t dims, const MultiStatistic& stat,
                                      EstimateOptions opts = {});
Estimate ensemble_estimate(const ensembles::Ensemble& ens, const Statistic& stat, EstimateOptions opts = {},
                           std::vector<double>* values = nullptr);

}  // namespace lab::transforms
