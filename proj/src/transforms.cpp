#include "lab/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numeric>
#include <thread>

#include "lab/error.hpp"

namespace lab::transforms {

namespace {

std::atomic<long long> g_boundary{0};

bool near_boundary(double r2, double R) {
  const double d = std::fabs(std::sqrt(r2) - R);
  return d <= 1e-12 * std::max(1.0, R);
}

double ball_value(double r2, double R) {
  if (near_boundary(r2, R)) g_boundary.fetch_add(1, std::memory_order_relaxed);
  return r2 < R * R ? 1.0 : 0.0;
}

double support_radius(const geom::Enumerator& e, const RadialProfile& f) {
  if (f.kind == RadialProfile::Kind::Ball) return f.radius(e.dim());
  return e.gaussian_radius(f.t, kGaussianTol);
}

struct SupportPoint {
  std::vector<long long> c;
  double val;
};

// Nonzero lattice points where f is nonzero (Gaussians truncated), plus the origin
// when requested and f(0) != 0.
std::vector<SupportPoint> support(const geom::Enumerator& e, const RadialProfile& f, bool with_origin) {
  std::vector<SupportPoint> out;
  const int n = e.dim();
  if (with_origin && f.at_origin() != 0) out.push_back({std::vector<long long>(n, 0), f.at_origin()});
  const double R = support_radius(e, f);
  if (f.kind == RadialProfile::Kind::Ball && !(R > 0)) return out;
  e.enumerate(R, [&](const std::vector<long long>& c, const geom::RealVec&, double n2) {
    const double v = f.at_norm2(n2, n);
    if (v != 0) out.push_back({c, v});
  });
  return out;
}

long long gcd_all(const std::vector<long long>& c) {
  long long g = 0;
  for (long long v : c) g = std::gcd(g, v);
  return g;
}

intlin::IntMat coords_matrix(const std::vector<const SupportPoint*>& pts, int n) {
  intlin::IntMat M(n, pts.size());
  for (std::size_t j = 0; j < pts.size(); ++j)
    for (int i = 0; i < n; ++i) M(i, j) = static_cast<long>(pts[j]->c[i]);
  return M;
}

bool tuple_primitive(const std::vector<const SupportPoint*>& pts, int n) {
  if (pts.size() == 1) return gcd_all(pts[0]->c) == 1;
  return intlin::is_primitive(coords_matrix(pts, n));
}

// Calls visit(tuple, product of values) for every tuple drawn from the lists.
template <class Visit>
void for_each_tuple(const std::vector<std::vector<SupportPoint>>& lists, Visit&& visit) {
  const std::size_t k = lists.size();
  std::vector<const SupportPoint*> cur(k);
  auto rec = [&](auto&& self, std::size_t i, double val) -> void {
    if (i == k) {
      visit(cur, val);
      return;
    }
    for (const auto& p : lists[i]) {
      cur[i] = &p;
      self(self, i + 1, val * p.val);
    }
  };
  rec(rec, 0, 1.0);
}

// Sum of products over tuples whose coordinate matrix decomposes with rank m and
// canonical factor B.
double rank_part(const geom::Enumerator& e, const std::vector<RadialProfile>& slots, int m, const intlin::IntMat& B) {
  const int n = e.dim();
  const int k = static_cast<int>(slots.size());
  if (static_cast<int>(B.rows()) != k || static_cast<int>(B.cols()) != m)
    fail(ErrorKind::DomainError, "B has the wrong shape");
  std::vector<std::vector<SupportPoint>> lists;
  for (const auto& f : slots) lists.push_back(support(e, f, true));
  double s = 0;
  for_each_tuple(lists, [&](const std::vector<const SupportPoint*>& t, double val) {
    bool zero = true;
    for (const auto* p : t)
      for (long long v : p->c)
        if (v != 0) zero = false;
    if (zero) {
      if (m == 0) s += val;
      return;
    }
    if (m == 0) return;
    intlin::RankDecomposition d = intlin::rank_decompose(coords_matrix(t, n));
    if (static_cast<int>(d.B.cols()) == m && d.B == B) s += val;
  });
  return s;
}

}  // namespace

RadialProfile RadialProfile::gaussian(double t) {
  if (!(t > 0)) fail(ErrorKind::DomainError, "Gaussian scale must be positive");
  RadialProfile f;
  f.kind = Kind::Gaussian;
  f.t = t;
  return f;
}

RadialProfile RadialProfile::ball(double volume, bool exclude_origin) {
  if (!(volume > 0)) fail(ErrorKind::DomainError, "ball volume must be positive");
  RadialProfile f;
  f.kind = Kind::Ball;
  f.volume = volume;
  f.exclude_origin = exclude_origin;
  return f;
}

double RadialProfile::radius(int n) const {
  if (kind != Kind::Ball) fail(ErrorKind::DomainError, "Gaussian profiles have no radius");
  return std::pow(volume / geom::ball_volume(n), 1.0 / n);
}

double RadialProfile::at_norm2(double r2, int n) const {
  if (r2 == 0) return at_origin();
  if (kind == Kind::Gaussian) return std::exp(-M_PI * r2 / t);
  return ball_value(r2, radius(n));
}

double RadialProfile::at_origin() const { return kind == Kind::Ball && exclude_origin ? 0.0 : 1.0; }

double RadialProfile::integral(int n) const { return kind == Kind::Gaussian ? std::pow(t, 0.5 * n) : volume; }

RadialProfile RadialProfile::scaled(double d, int n) const {
  if (!(d > 0)) fail(ErrorKind::DomainError, "scale factor must be positive");
  RadialProfile f = *this;
  if (kind == Kind::Gaussian)
    f.t = t / (d * d);
  else
    f.volume = volume / std::pow(d, n);
  return f;
}

long long boundary_warnings() { return g_boundary.load(); }
void reset_boundary_warnings() { g_boundary.store(0); }

double siegel_sum(const geom::Enumerator& e, const RadialProfile& f) {
  double s = f.at_origin();
  if (f.kind == RadialProfile::Kind::Gaussian) {
    const double R = e.gaussian_radius(f.t, kGaussianTol);
    const double c = -M_PI / f.t;
    e.enumerate(R, [&](const std::vector<long long>&, const geom::RealVec&, double n2) { s += std::exp(c * n2); });
  } else {
    const double R = f.radius(e.dim());
    double cnt = 0;
    e.enumerate(R, [&](const std::vector<long long>&, const geom::RealVec&, double n2) { cnt += ball_value(n2, R); });
    s += cnt;
  }
  return s;
}

double siegel_sum(const geom::Lattice& L, const RadialProfile& f) { return siegel_sum(geom::Enumerator(L), f); }

double product_multisum(const geom::Lattice& L, const TestFunction& rho) {
  double s = 1.0;
  if (!rho.primal.empty()) {
    geom::Enumerator e(L);
    for (const auto& f : rho.primal) s *= siegel_sum(e, f);
  }
  if (!rho.dual.empty()) {
    geom::Enumerator e(geom::dual(L));
    for (const auto& f : rho.dual) s *= siegel_sum(e, f);
  }
  return s;
}

double primitive_tuple_sum(const geom::Lattice& L, int k, const TestFunction& rho) {
  const int n = L.dim();
  if (k < 1 || k >= n) fail(ErrorKind::DomainError, "primitive tuples need 1 <= k < n");
  if (static_cast<int>(rho.primal.size()) != k) fail(ErrorKind::DomainError, "need k primal slots");
  geom::Enumerator e(L);
  std::vector<std::vector<SupportPoint>> lists;
  for (const auto& f : rho.primal) lists.push_back(support(e, f, false));
  double s = 0;
  for_each_tuple(lists, [&](const std::vector<const SupportPoint*>& t, double val) {
    if (tuple_primitive(t, n)) s += val;
  });
  return s;
}

double f_beta_sum(const geom::Lattice& L, const intlin::IntMat& beta, const TestFunction& rho) {
  const int n = L.dim();
  const int m1 = static_cast<int>(beta.rows()), m2 = static_cast<int>(beta.cols());
  if (m1 < 1 || m2 < 1 || m1 + m2 >= n) fail(ErrorKind::DomainError, "F_beta needs m1, m2 >= 1 and m1 + m2 < n");
  if (static_cast<int>(rho.primal.size()) != m1 || static_cast<int>(rho.dual.size()) != m2)
    fail(ErrorKind::DomainError, "slot counts must match beta");
  std::vector<std::vector<long long>> b(m1, std::vector<long long>(m2));
  for (int i = 0; i < m1; ++i)
    for (int j = 0; j < m2; ++j) b[i][j] = beta.at_ll(i, j);

  geom::Enumerator ex(L), ey(geom::dual(L));
  std::vector<std::vector<SupportPoint>> xl, yl;
  for (const auto& f : rho.primal) xl.push_back(support(ex, f, false));
  for (const auto& f : rho.dual) yl.push_back(support(ey, f, false));

  // Primitive x tuples, kept with their weight.
  std::vector<std::pair<std::vector<const SupportPoint*>, double>> xs;
  for_each_tuple(xl, [&](const std::vector<const SupportPoint*>& t, double val) {
    if (tuple_primitive(t, n)) xs.emplace_back(t, val);
  });

  double total = 0;
  std::vector<const SupportPoint*> y(m2);
  for (const auto& [x, xval] : xs) {
    // y_j ranges over points with x_i . y_j = beta_ij for all i.
    auto rec = [&](auto&& self, int j, double val) -> void {
      if (j == m2) {
        if (m2 > 1 && intlin::rank(coords_matrix(y, n)) != static_cast<std::size_t>(m2)) return;
        total += val;
        return;
      }
      for (const auto& p : yl[j]) {
        bool ok = true;
        for (int i = 0; i < m1 && ok; ++i) {
          long long d = 0;
          for (int t = 0; t < n; ++t) d += x[i]->c[t] * p.c[t];
          ok = d == b[i][j];
        }
        if (!ok) continue;
        y[j] = &p;
        self(self, j + 1, val * p.val);
      }
    };
    rec(rec, 0, xval);
  }
  return total;
}

double rank_restricted_sum(const geom::Lattice& L, int m1, int m2, const intlin::IntMat& B1, const intlin::IntMat& B2,
                           const TestFunction& rho) {
  double s = 1.0;
  if (!rho.primal.empty()) s *= rank_part(geom::Enumerator(L), rho.primal, m1, B1);
  if (s != 0 && !rho.dual.empty()) s *= rank_part(geom::Enumerator(geom::dual(L)), rho.dual, m2, B2);
  return s;
}

Counts count_statistic(const geom::Lattice& L, const std::vector<double>& V, const std::vector<double>& W) {
  if (!std::is_sorted(V.begin(), V.end()) || !std::is_sorted(W.begin(), W.end()))
    fail(ErrorKind::DomainError, "volume thresholds must be sorted");
  const int n = L.dim();
  const double vn = geom::ball_volume(n);
  auto count = [&](const geom::Lattice& M, const std::vector<double>& thr) {
    std::vector<long long> out(thr.size(), 0);
    if (thr.empty() || !(thr.back() > 0)) return out;
    const double R = std::pow(thr.back() / vn, 1.0 / n);
    geom::Enumerator e(M);
    e.enumerate(R, [&](const std::vector<long long>&, const geom::RealVec&, double n2) {
      const double vol = vn * std::pow(n2, 0.5 * n);
      for (std::size_t j = thr.size(); j-- > 0;) {
        if (std::fabs(vol - thr[j]) <= 1e-12 * std::max(1.0, thr[j])) g_boundary.fetch_add(1, std::memory_order_relaxed);
        if (vol < thr[j])
          ++out[j];
        else
          break;
      }
    });
    return out;
  };
  Counts c;
  c.N = count(L, V);
  if (!W.empty()) c.Ndual = count(geom::dual(L), W);
  return c;
}

int worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

namespace {

struct Acc {
  double w = 0;
  std::vector<double> mean, m2;
};

void combine(Acc& a, const Acc& b) {
  if (b.w == 0) return;
  if (a.w == 0) {
    a = b;
    return;
  }
  const double W = a.w + b.w;
  for (std::size_t d = 0; d < a.mean.size(); ++d) {
    const double delta = b.mean[d] - a.mean[d];
    a.mean[d] += delta * b.w / W;
    a.m2[d] += b.m2[d] + delta * delta * a.w * b.w / W;
  }
  a.w = W;
}

std::uint64_t spec_seed(const ensembles::EnsembleSpec& s) {
  if (auto* x = std::get_if<ensembles::X2Exact>(&s)) return x->seed;
  if (auto* h = std::get_if<ensembles::Hecke>(&s)) return h->seed;
  return 0;
}

}  // namespace

MultiEstimate ensemble_estimate_multi(const ensembles::Ensemble& ens, std::size_t dims, const MultiStatistic& stat,
                                      EstimateOptions opts) {
  if (dims == 0) fail(ErrorKind::DomainError, "statistic must have at least one component");
  const std::size_t N = ens.size();
  const std::size_t nchunks = (N + kChunk - 1) / kChunk;
  std::vector<Acc> accs(nchunks);
  MultiEstimate out;
  if (opts.keep_values) {
    out.values.assign(N, 0.0);
    if (ens.weighted()) out.weights.assign(N, 0.0);
  }

  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::size_t err_index = N;
  ErrorKind err_kind = ErrorKind::NumericalFailure;
  std::string err_msg;

  auto work = [&]() {
    std::vector<double> buf(dims);
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= nchunks) return;
      {
        std::lock_guard<std::mutex> lock(err_mu);
        if (err_index < N) return;
      }
      Acc acc;
      acc.mean.assign(dims, 0.0);
      acc.m2.assign(dims, 0.0);
      const std::size_t lo = c * kChunk, hi = std::min(N, lo + kChunk);
      for (std::size_t i = lo; i < hi; ++i) {
        const double w = ens.weight(i);
        try {
          stat(ens.member(i), buf.data());
        } catch (const Error& e) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (i < err_index) err_index = i, err_kind = e.kind(), err_msg = e.what();
          return;
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (i < err_index) err_index = i, err_kind = ErrorKind::NumericalFailure, err_msg = e.what();
          return;
        }
        const double W = acc.w + w;
        for (std::size_t d = 0; d < dims; ++d) {
          const double delta = buf[d] - acc.mean[d];
          acc.mean[d] += delta * w / W;
          acc.m2[d] += w * delta * (buf[d] - acc.mean[d]);
        }
        acc.w = W;
        if (opts.keep_values) {
          out.values[i] = buf[0];
          if (!out.weights.empty()) out.weights[i] = w;
        }
      }
      accs[c] = std::move(acc);
    }
  };

  const int nw = static_cast<int>(std::min<std::size_t>(worker_count(opts.threads), std::max<std::size_t>(nchunks, 1)));
  if (nw <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nw; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (err_index < N) fail(err_kind, err_msg + " (member " + std::to_string(err_index) + ")");

  Acc total;
  for (const auto& a : accs) combine(total, a);
  for (std::size_t d = 0; d < dims; ++d) {
    Estimate e;
    e.count = static_cast<long long>(std::llround(total.w));
    e.mean = total.mean[d];
    e.std_error = total.w > 1 ? std::sqrt(std::max(0.0, total.m2[d] / (total.w - 1)) / total.w) : 0.0;
    e.seed = spec_seed(ens.spec());
    e.ensemble = ens.spec();
    out.components.push_back(std::move(e));
  }
  return out;
}

Estimate ensemble_estimate(const ensembles::Ensemble& ens, const Statistic& stat, EstimateOptions opts,
                           std::vector<double>* values) {
  if (values) opts.keep_values = true;
  MultiEstimate m = ensemble_estimate_multi(
      ens, 1, [&](const geom::Lattice& L, double* out) { out[0] = stat(L); }, opts);
  if (values) *values = std::move(m.values);
  return m.components[0];
}

}  // namespace lab::transforms
