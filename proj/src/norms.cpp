#include "haarlab/norms.hpp"

#include "haarlab/errors.hpp"

#define LAPACK_COMPLEX_CPP
#include <lapacke.h>

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>

namespace haarlab {

double lorentz_norm(std::vector<double> a, const LorentzIndex& idx) {
  for (auto& v : a) v = std::abs(v);
  std::sort(a.begin(), a.end(), std::greater<>());
  const double p = idx.p;
  if (std::isinf(idx.q)) {
    double best = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
      best = std::max(best, std::pow(static_cast<double>(k + 1), 1.0 / p) * a[k]);
    return best;
  }
  const double q = idx.q;
  const double e = 1.0 / p - 1.0 / q;
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] == 0.0) break;
    s += std::pow(std::pow(static_cast<double>(k + 1), e) * a[k], q);
  }
  return std::pow(s, 1.0 / q);
}

std::vector<double> singular_values(const Mat& m) {
  if (m.size() == 0) return {};
  if (!m.allFinite()) throw Error(ErrorCode::svd_failure, "matrix has non-finite entries");
  // LAPACK zgesvd (QR iteration), values only; column-major copy is overwritten
  Mat a = m;
  const auto rows = static_cast<lapack_int>(a.rows()), cols = static_cast<lapack_int>(a.cols());
  std::vector<double> out(static_cast<std::size_t>(std::min(rows, cols)));
  std::vector<double> superb(out.size() > 1 ? out.size() - 1 : 1);
  const lapack_int info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'N', 'N', rows, cols, reinterpret_cast<lapack_complex_double*>(a.data()),
                                         rows, out.data(), nullptr, 1, nullptr, 1, superb.data());
  if (info != 0) throw Error(ErrorCode::svd_failure, "zgesvd returned " + std::to_string(info));
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

std::vector<double> singular_values(const DenseOperator& op) { return singular_values(op.m); }

double schatten(const Mat& m, const LorentzIndex& idx) { return lorentz_norm(singular_values(m), idx); }

double schatten(const DenseOperator& op, const LorentzIndex& idx) { return schatten(op.m, idx); }

double besov_martingale(const SampledFunction& b, double p) {
  const auto& g = *b.grid;
  const HaarCoefficients c = analyze(b);
  double s = 0.0;
  for (int k = 0; k < g.L(); ++k) {
    const double w = std::pow(g.cube_measure(k), -p / 2);
    for (const auto& v : c.coef[k]) s += std::pow(std::abs(v), p) * w;
  }
  return std::pow(s, 1.0 / p);
}

double besov_martingale_diff(const SampledFunction& b, double p) {
  const auto& g = *b.grid;
  double s = 0.0;
  double weight = 1.0;
  for (int k = 1; k <= g.L(); ++k) {
    weight *= g.children();
    s += weight * std::pow(lp_norm(difference(b, k), p), p);
  }
  return std::pow(s, 1.0 / p);
}

double besov_martingale_tail(const SampledFunction& b, double p) {
  const auto& g = *b.grid;
  double s = 0.0;
  double weight = 1.0;
  for (int k = 0; k < g.L(); ++k) {
    s += weight * std::pow(lp_norm(b - expectation(b, k), p), p);
    weight *= g.children();
  }
  return std::pow(s, 1.0 / p);
}

double bmo_martingale(const SampledFunction& b) {
  const auto& gp = b.grid;
  const auto& g = *gp;
  const std::size_t N = g.leaf_count();
  // tail[x] = sum_{k > n} |d_k b(x)|^2, built from k = L downward
  std::vector<double> tail(N, 0.0);
  double best = 0.0;
  std::vector<cd> upper = cube_averages(b, g.L());
  for (int n = g.L() - 1; n >= 0; --n) {
    const std::vector<cd> lower = cube_averages(b, n);
    for (std::size_t x = 0; x < N; ++x) {
      const cd dk = upper[g.cube_of_leaf(x, n + 1)] - lower[g.cube_of_leaf(x, n)];
      tail[x] += std::norm(dk);
    }
    for (std::size_t Q = 0; Q < g.cube_count(n); ++Q) {
      double s = 0.0;
      for (auto x : g.leaves_of(n, Q)) s += tail[x];
      best = std::max(best, s / static_cast<double>(g.leaves_per_cube(n)));
    }
    upper = lower;
  }
  return std::sqrt(best);
}

namespace {

double oscillation(const SampledFunction& b, const Grid& g, int level, std::size_t Q, bool quadratic) {
  const auto leaves = g.leaves_of(level, Q);
  cd avg = 0;
  for (auto x : leaves) avg += b.values[x];
  avg /= static_cast<double>(leaves.size());
  double s = 0.0;
  for (auto x : leaves) s += quadratic ? std::norm(b.values[x] - avg) : std::abs(b.values[x] - avg);
  s /= static_cast<double>(leaves.size());
  return quadratic ? std::sqrt(s) : s;
}

void check_partition(const SampledFunction& b, const Grid& g) {
  if (!b.grid->same_partition(g)) throw Error(ErrorCode::dimension_mismatch, "cube and function on different partitions");
}

}  // namespace

double mo1(const SampledFunction& b, const Cube& Q) {
  check_partition(b, *Q.grid);
  return oscillation(b, *Q.grid, Q.level, Q.index(), false);
}

double mo2(const SampledFunction& b, const Cube& Q) {
  check_partition(b, *Q.grid);
  return oscillation(b, *Q.grid, Q.level, Q.index(), true);
}

double weak_besov(const SampledFunction& b, const GridFamily& fam, const LorentzIndex& idx, Oscillation kind) {
  double total = 0.0;
  for (const auto& gp : fam.members) {
    check_partition(b, *gp);
    std::vector<double> vals;
    for (int k = 0; k < gp->L(); ++k)
      for (std::size_t Q = 0; Q < gp->cube_count(k); ++Q)
        vals.push_back(oscillation(b, *gp, k, Q, kind == Oscillation::mo2));
    total += lorentz_norm(std::move(vals), idx);
  }
  return total;
}

double besov_martingale_family(const SampledFunction& b, const GridFamily& fam, double p) {
  double total = 0.0;
  for (const auto& gp : fam.members) total += besov_martingale(rebind(b, gp), p);
  return total;
}

namespace {

struct PairAccumulator {
  std::vector<double> ps;
  std::vector<double> eps_desc;             // distinct cutoffs, decreasing
  std::vector<std::vector<double>> bands;   // bands[i][t]: pairs with eps_t <= r < eps_{t-1}

  int band(double r) const {
    // first t with eps_desc[t] <= r; size() when r is below every cutoff
    int t = 0;
    while (t < static_cast<int>(eps_desc.size()) && eps_desc[t] > r) ++t;
    return t;
  }

  void add_row(const double* m2, std::size_t len, double w, int t) {
    if (t >= static_cast<int>(eps_desc.size())) return;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const double p = ps[i];
      double s = 0.0;
      if (p == 2.0) {
        for (std::size_t j = 0; j < len; ++j) s += m2[j];
      } else if (p == 3.0) {
        for (std::size_t j = 0; j < len; ++j) s += m2[j] * std::sqrt(m2[j]);
      } else if (p == 1.0) {
        for (std::size_t j = 0; j < len; ++j) s += std::sqrt(m2[j]);
      } else {
        for (std::size_t j = 0; j < len; ++j) s += std::pow(m2[j], p / 2);
      }
      bands[i][static_cast<std::size_t>(t)] += w * s;
    }
  }
};

// Sum over unordered leaf pairs of |b(x)-b(y)|^p / |x-y|^{2n} * (leaf measure)^2, banded by distance.
PairAccumulator pair_sums(const SampledFunction& b, const std::vector<double>& ps, const std::vector<double>& eps) {
  const auto& g = *b.grid;
  if (g.shifted()) throw Error(ErrorCode::invalid_grid, "continuous quadrature uses the unshifted leaf geometry");
  for (double p : ps)
    if (p < 1.0) throw Error(ErrorCode::config_invalid, "p >= 1 required");
  PairAccumulator acc;
  acc.ps = ps;
  acc.eps_desc = eps;
  std::sort(acc.eps_desc.begin(), acc.eps_desc.end(), std::greater<>());
  acc.eps_desc.erase(std::unique(acc.eps_desc.begin(), acc.eps_desc.end()), acc.eps_desc.end());
  acc.bands.assign(ps.size(), std::vector<double>(acc.eps_desc.size(), 0.0));

  const int n = g.n();
  const auto M = static_cast<std::int64_t>(g.axis_cells(g.L()));
  const double h = g.cube_side(g.L());
  // leaf measure^2 / |x-y|^{2n} = 1 / |delta|^{2n} in lattice units
  std::vector<double> m2(static_cast<std::size_t>(M));

  if (n == 1) {
    for (std::int64_t dl = 1; dl < M; ++dl) {
      const int t = acc.band(h * static_cast<double>(dl));
      if (t >= static_cast<int>(acc.eps_desc.size())) continue;
      const std::size_t len = static_cast<std::size_t>(M - dl);
      for (std::size_t j = 0; j < len; ++j) m2[j] = std::norm(b.values[j] - b.values[j + static_cast<std::size_t>(dl)]);
      acc.add_row(m2.data(), len, 1.0 / static_cast<double>(dl * dl), t);
    }
    return acc;
  }
  if (n == 2) {
    std::vector<std::int64_t> lo(static_cast<std::size_t>(M), 0), hi(static_cast<std::size_t>(M), 0);
    for (std::int64_t r = 0; r < M; ++r) {
      std::int64_t a = M, z = 0;
      for (std::int64_t c = 0; c < M; ++c)
        if (b.values[static_cast<std::size_t>(r * M + c)] != cd(0.0)) {
          a = std::min(a, c);
          z = c + 1;
        }
      lo[static_cast<std::size_t>(r)] = a < z ? a : 0;
      hi[static_cast<std::size_t>(r)] = a < z ? z : 0;
    }
    for (std::int64_t di = 0; di < M; ++di) {
      for (std::int64_t dj = -(M - 1); dj < M; ++dj) {
        if (di == 0 && dj <= 0) continue;
        const double d2 = static_cast<double>(di * di + dj * dj);
        const int t = acc.band(h * std::sqrt(d2));
        if (t >= static_cast<int>(acc.eps_desc.size())) continue;
        const double w = 1.0 / (d2 * d2);
        const std::int64_t jmin = std::max<std::int64_t>(0, -dj);
        const std::int64_t jmax = std::min<std::int64_t>(M, M - dj);
        for (std::int64_t r = 0; r + di < M; ++r) {
          const std::size_t r1 = static_cast<std::size_t>(r);
          const std::size_t r2 = static_cast<std::size_t>(r + di);
          std::int64_t a = M, z = 0;
          if (hi[r1] > lo[r1]) {
            a = std::min(a, lo[r1]);
            z = std::max(z, hi[r1]);
          }
          if (hi[r2] > lo[r2]) {
            a = std::min(a, lo[r2] - dj);
            z = std::max(z, hi[r2] - dj);
          }
          a = std::max(a, jmin);
          z = std::min(z, jmax);
          if (a >= z) continue;
          const cd* p1 = b.values.data() + r1 * static_cast<std::size_t>(M);
          const cd* p2 = b.values.data() + r2 * static_cast<std::size_t>(M) + dj;
          const std::size_t len = static_cast<std::size_t>(z - a);
          for (std::size_t j = 0; j < len; ++j) m2[j] = std::norm(p1[a + static_cast<std::int64_t>(j)] - p2[a + static_cast<std::int64_t>(j)]);
          acc.add_row(m2.data(), len, w, t);
        }
      }
    }
    return acc;
  }
  const std::size_t N = g.leaf_count();
  std::vector<std::vector<double>> centers(N);
  for (std::size_t i = 0; i < N; ++i) centers[i] = g.leaf_center(i);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      double r2 = 0.0;
      for (int a = 0; a < n; ++a) r2 += (centers[i][a] - centers[j][a]) * (centers[i][a] - centers[j][a]);
      const int t = acc.band(std::sqrt(r2));
      const double v = std::norm(b.values[i] - b.values[j]);
      const double w = std::pow(g.leaf_measure(), 2) / std::pow(r2, n);
      acc.add_row(&v, 1, w, t);
    }
  return acc;
}

std::vector<std::vector<double>> cumulative(const PairAccumulator& acc, const std::vector<double>& eps, bool root) {
  std::vector<std::vector<double>> out(acc.ps.size(), std::vector<double>(eps.size(), 0.0));
  for (std::size_t i = 0; i < acc.ps.size(); ++i) {
    std::vector<double> cum(acc.eps_desc.size());
    double s = 0.0;
    for (std::size_t t = 0; t < acc.eps_desc.size(); ++t) {
      s += acc.bands[i][t];
      cum[t] = 2.0 * s;  // ordered pairs
    }
    for (std::size_t e = 0; e < eps.size(); ++e) {
      const auto it = std::find(acc.eps_desc.begin(), acc.eps_desc.end(), eps[e]);
      const double v = cum[static_cast<std::size_t>(it - acc.eps_desc.begin())];
      out[i][e] = root ? std::pow(v, 1.0 / acc.ps[i]) : v;
    }
  }
  return out;
}

}  // namespace

std::vector<std::vector<double>> besov_continuous_profile(const SampledFunction& b, const std::vector<double>& ps,
                                                          const std::vector<double>& eps) {
  return cumulative(pair_sums(b, ps, eps), eps, true);
}

std::vector<std::vector<double>> besov_continuous_integral(const SampledFunction& b, const std::vector<double>& ps,
                                                           const std::vector<double>& eps) {
  return cumulative(pair_sums(b, ps, eps), eps, false);
}

double besov_continuous(const SampledFunction& b, double p, double epsilon) {
  return besov_continuous_profile(b, {p}, {epsilon})[0][0];
}

std::vector<std::vector<double>> besov_integral_radial(const std::function<cd(std::span<const double>)>& b, int n,
                                                       const std::vector<double>& center, double R,
                                                       const std::vector<double>& ps, const std::vector<double>& eps, int M,
                                                       int directions) {
  if (n != 1 && n != 2) throw Error(ErrorCode::config_invalid, "radial quadrature supports n = 1, 2");
  if (static_cast<int>(center.size()) != n || !(R > 0) || M < 4 || directions < 1 || eps.empty())
    throw Error(ErrorCode::config_invalid, "radial quadrature: bad center, radius, lattice or cutoffs");
  for (double e : eps)
    if (!(e > 0)) throw Error(ErrorCode::config_invalid, "cutoffs must be positive");
  std::vector<double> cuts(eps);
  std::sort(cuts.begin(), cuts.end(), std::greater<>());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // lattice over [c - W, c + W]^n; shifts up to the largest cutoff keep the support inside it
  const double W = R + cuts.front();
  const double h = 2 * W / M;
  const double cell = std::pow(h, n);
  const std::size_t npts = n == 1 ? static_cast<std::size_t>(M) : static_cast<std::size_t>(M) * static_cast<std::size_t>(M);
  std::vector<std::array<double, 2>> X(npts);
  std::vector<cd> B(npts);
  for (std::size_t a = 0; a < npts; ++a) {
    const std::size_t i0 = n == 1 ? a : a / static_cast<std::size_t>(M);
    const std::size_t i1 = n == 1 ? 0 : a % static_cast<std::size_t>(M);
    X[a] = {center[0] - W + (static_cast<double>(i0) + 0.5) * h, n == 2 ? center[1] - W + (static_cast<double>(i1) + 0.5) * h : 0.0};
    B[a] = b(std::span<const double>(X[a].data(), static_cast<std::size_t>(n)));
  }
  auto powp = [](double v, double p) { return p == 2.0 ? v * v : p == 3.0 ? v * v * v : std::pow(v, p); };
  std::vector<double> mass(ps.size(), 0.0);
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (const auto& v : B) mass[i] += powp(std::abs(v), ps[i]) * cell;

  // D(delta) = int |b(x + delta) - b(x)|^p dx
  std::vector<double> acc(ps.size());
  auto D = [&](double d0, double d1, std::vector<double>& out) {
    const bool inner = std::max(std::abs(d0), std::abs(d1)) <= W - R;
    std::fill(acc.begin(), acc.end(), 0.0);
    std::array<double, 2> y{};
    for (std::size_t a = 0; a < npts; ++a) {
      y[0] = X[a][0] + d0;
      y[1] = X[a][1] + d1;
      const cd by = b(std::span<const double>(y.data(), static_cast<std::size_t>(n)));
      const double diff = std::abs(by - B[a]);
      for (std::size_t i = 0; i < ps.size(); ++i)
        acc[i] += inner ? powp(diff, ps[i]) : powp(diff, ps[i]) - powp(std::abs(by), ps[i]);
    }
    // outside the lattice box only b(x + delta) can be nonzero
    for (std::size_t i = 0; i < ps.size(); ++i) out[i] = acc[i] * cell + (inner ? 0.0 : mass[i]);
  };

  // G(r) = sum over directions of D(r omega) with D(-delta) = D(delta)
  std::vector<std::pair<double, double>> dirs;  // (angle, weight)
  if (n == 1) dirs.push_back({0.0, 2.0});
  else
    for (int j = 0; j < directions; ++j) dirs.push_back({std::numbers::pi * j / directions, 2 * std::numbers::pi / directions});
  std::vector<double> Dv(ps.size());
  auto G = [&](double r, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& [t, w] : dirs) {
      D(r * std::cos(t), n == 2 ? r * std::sin(t) : 0.0, Dv);
      for (std::size_t i = 0; i < ps.size(); ++i) out[i] += w * Dv[i];
    }
  };

  using GL = boost::math::quadrature::gauss<double, 8>;
  std::vector<double> Gv(ps.size());
  // int_a^b G(r) r^{-n-1} dr, split into pieces of ratio at most 2
  auto panel = [&](double lo, double hi, std::vector<double>& sum) {
    const int pieces = std::max(1, static_cast<int>(std::ceil(std::log2(hi / lo) - 1e-12)));
    const double q = std::pow(hi / lo, 1.0 / pieces);
    double a = lo;
    for (int k = 0; k < pieces; ++k) {
      const double c = k + 1 == pieces ? hi : a * q;
      const double mid = 0.5 * (a + c), half = 0.5 * (c - a);
      const auto& xs = GL::abscissa();
      const auto& ws = GL::weights();
      for (std::size_t g = 0; g < xs.size(); ++g)
        for (int sgn : {-1, 1}) {
          if (xs[g] == 0.0 && sgn < 0) continue;
          const double r = mid + sgn * half * xs[g];
          G(r, Gv);
          for (std::size_t i = 0; i < ps.size(); ++i) sum[i] += half * ws[g] * Gv[i] * std::pow(r, -n - 1);
        }
      a = c;
    }
  };

  const double diam = 2 * R * std::sqrt(static_cast<double>(n));
  const double sphere = n == 1 ? 2.0 : 2 * std::numbers::pi;
  std::vector<double> running(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) running[i] = 2 * mass[i] * sphere * std::pow(std::max(diam, cuts.front()), -n) / n;
  if (cuts.front() < diam) panel(cuts.front(), diam, running);
  std::vector<std::vector<double>> by_cut(cuts.size());
  by_cut[0] = running;
  for (std::size_t t = 1; t < cuts.size(); ++t) {
    panel(cuts[t], cuts[t - 1], running);
    by_cut[t] = running;
  }

  std::vector<std::vector<double>> out(ps.size(), std::vector<double>(eps.size()));
  for (std::size_t t = 0; t < eps.size(); ++t) {
    const auto k = static_cast<std::size_t>(std::find(cuts.begin(), cuts.end(), eps[t]) - cuts.begin());
    for (std::size_t i = 0; i < ps.size(); ++i) out[i][t] = by_cut[k][i];
  }
  return out;
}

double sobolev_seminorm(const SampledFunction& b, double p) {
  const auto& g = *b.grid;
  if (p < 1.0) throw Error(ErrorCode::config_invalid, "p >= 1 required");
  const int n = g.n();
  const auto M = static_cast<std::int64_t>(g.axis_cells(g.L()));
  const double h = g.cube_side(g.L());
  double s = 0.0;
  for (std::size_t leaf = 0; leaf < g.leaf_count(); ++leaf) {
    auto pcoord = g.leaf_coords(leaf);
    double grad2 = 0.0;
    for (int a = 0; a < n; ++a) {
      auto lo = pcoord;
      auto hi = pcoord;
      double span = 2.0 * h;
      if (pcoord[a] == 0) {
        lo[a] = 0;
        hi[a] = std::min<std::int64_t>(1, M - 1);
        span = h;
      } else if (pcoord[a] == M - 1) {
        lo[a] = M - 2;
        hi[a] = M - 1;
        span = h;
      } else {
        lo[a] -= 1;
        hi[a] += 1;
      }
      if (M == 1) continue;
      const cd diff = (b.values[g.leaf_linear(hi)] - b.values[g.leaf_linear(lo)]) / span;
      grad2 += std::norm(diff);
    }
    s += std::pow(std::sqrt(grad2), p);
  }
  return std::pow(s * g.leaf_measure(), 1.0 / p);
}

}  // namespace haarlab
