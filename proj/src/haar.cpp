#include "haarlab/haar.hpp"

#include "haarlab/errors.hpp"

#include <cmath>
#include <numbers>

namespace haarlab {

namespace {

cd root_of_unity(long m, int d) {
  m %= d;
  if (m < 0) m += d;
  if ((4 * m) % d == 0) {
    switch ((4 * m) / d) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(m) / d);
}

void check_same(const SampledFunction& a, const SampledFunction& b) {
  if (a.values.size() != b.values.size() || !a.grid->same_partition(*b.grid))
    throw Error(ErrorCode::dimension_mismatch, "functions live on different leaf partitions");
}

}  // namespace

SampledFunction zeros(const GridPtr& g) { return {g, std::vector<cd>(g->leaf_count())}; }

SampledFunction constant(const GridPtr& g, cd c) { return {g, std::vector<cd>(g->leaf_count(), c)}; }

SampledFunction sample(const GridPtr& g, const std::function<cd(std::span<const double>)>& f) {
  SampledFunction out = zeros(g);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto x = g->leaf_center(i);
    out.values[i] = f(x);
  }
  return out;
}

SampledFunction rebind(const SampledFunction& f, const GridPtr& g) {
  if (!f.grid->same_partition(*g)) throw Error(ErrorCode::dimension_mismatch, "grids differ in leaf partition");
  return {g, f.values};
}

cd inner(const SampledFunction& f, const SampledFunction& g) {
  check_same(f, g);
  cd s = 0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::conj(f.values[i]) * g.values[i];
  return s * f.grid->leaf_measure();
}

double l2_norm(const SampledFunction& f) { return lp_norm(f, 2.0); }

double lp_norm(const SampledFunction& f, double p) {
  double s = 0;
  for (const auto& v : f.values) s += std::pow(std::abs(v), p);
  return std::pow(s * f.grid->leaf_measure(), 1.0 / p);
}

SampledFunction operator+(const SampledFunction& a, const SampledFunction& b) {
  check_same(a, b);
  SampledFunction out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += b.values[i];
  return out;
}

SampledFunction operator-(const SampledFunction& a, const SampledFunction& b) {
  check_same(a, b);
  SampledFunction out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] -= b.values[i];
  return out;
}

SampledFunction operator*(cd s, const SampledFunction& a) {
  SampledFunction out = a;
  for (auto& v : out.values) v *= s;
  return out;
}

SampledFunction pointwise(const SampledFunction& a, const SampledFunction& b) {
  check_same(a, b);
  SampledFunction out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] *= b.values[i];
  return out;
}

cd child_pattern(const Grid& g, int branch, int j) {
  if (branch == g.children()) return 1.0;
  if (g.n() == 1) return root_of_unity(static_cast<long>(branch) * (j + 1), g.d());
  double v = 1.0;
  for (int a = 0; a < g.n(); ++a) {
    const int shift = g.n() - 1 - a;
    if (((branch >> shift) & 1) && ((j >> shift) & 1)) v = -v;
  }
  return v;
}

SampledFunction haar_function(const GridPtr& g, const WaveletIndex& w) {
  if (w.level < 0 || w.level >= g->L()) throw Error(ErrorCode::level_overflow, "wavelet level must be below L");
  if (w.branch < 1 || w.branch > g->children()) throw Error(ErrorCode::invalid_grid, "wavelet branch out of range");
  SampledFunction out = zeros(g);
  const double s = 1.0 / std::sqrt(g->cube_measure(w.level));
  for (auto leaf : g->leaves_of(w.level, w.cube))
    out.values[leaf] = s * child_pattern(*g, w.branch, g->child_slot(leaf, w.level));
  return out;
}

cd& HaarCoefficients::at(const WaveletIndex& w) {
  return coef[w.level][w.cube * static_cast<std::size_t>(grid->branches()) + static_cast<std::size_t>(w.branch - 1)];
}

cd HaarCoefficients::at(const WaveletIndex& w) const {
  return coef[w.level][w.cube * static_cast<std::size_t>(grid->branches()) + static_cast<std::size_t>(w.branch - 1)];
}

HaarCoefficients zero_coefficients(const GridPtr& g) {
  HaarCoefficients c;
  c.grid = g;
  c.coef.resize(g->L());
  for (int k = 0; k < g->L(); ++k) c.coef[k].assign(g->cube_count(k) * g->branches(), 0.0);
  c.avg.assign(g->cube_count(0), 0.0);
  return c;
}

std::vector<cd> cube_averages(const SampledFunction& f, int k) {
  const auto& g = *f.grid;
  std::vector<cd> avg(g.cube_count(k), 0.0);
  for (std::size_t c = 0; c < avg.size(); ++c) {
    cd s = 0;
    for (auto leaf : g.leaves_of(k, c)) s += f.values[leaf];
    avg[c] = s / static_cast<double>(g.leaves_per_cube(k));
  }
  return avg;
}

HaarCoefficients analyze(const SampledFunction& f) {
  const GridPtr& gp = f.grid;
  const auto& g = *gp;
  HaarCoefficients out = zero_coefficients(gp);
  const int nc = g.children();
  const int nb = g.branches();
  std::vector<cd> fine = cube_averages(f, g.L());
  for (int k = g.L() - 1; k >= 0; --k) {
    std::vector<cd> coarse(g.cube_count(k));
    const double scale = std::sqrt(g.cube_measure(k)) / nc;
    for (std::size_t c = 0; c < coarse.size(); ++c) {
      cd s = 0;
      for (int j = 0; j < nc; ++j) s += fine[g.child(k, c, j)];
      coarse[c] = s / static_cast<double>(nc);
      for (int b = 1; b <= nb; ++b) {
        cd t = 0;
        for (int j = 0; j < nc; ++j) t += std::conj(child_pattern(g, b, j)) * fine[g.child(k, c, j)];
        out.coef[k][c * nb + (b - 1)] = scale * t;
      }
    }
    fine = std::move(coarse);
  }
  out.avg = std::move(fine);
  return out;
}

SampledFunction synthesize(const HaarCoefficients& c) {
  const GridPtr& gp = c.grid;
  const auto& g = *gp;
  const int nc = g.children();
  const int nb = g.branches();
  std::vector<cd> coarse = c.avg;
  for (int k = 0; k < g.L(); ++k) {
    std::vector<cd> fine(g.cube_count(k + 1));
    const double scale = 1.0 / std::sqrt(g.cube_measure(k));
    for (std::size_t q = 0; q < coarse.size(); ++q) {
      for (int j = 0; j < nc; ++j) {
        cd v = coarse[q];
        for (int b = 1; b <= nb; ++b) v += scale * c.coef[k][q * nb + (b - 1)] * child_pattern(g, b, j);
        fine[g.child(k, q, j)] = v;
      }
    }
    coarse = std::move(fine);
  }
  SampledFunction out = zeros(gp);
  for (std::size_t leaf = 0; leaf < out.size(); ++leaf) out.values[leaf] = coarse[g.cube_of_leaf(leaf, g.L())];
  return out;
}

SampledFunction expectation(const SampledFunction& f, int k) {
  const auto& g = *f.grid;
  if (k < 0 || k > g.L()) throw Error(ErrorCode::level_overflow, "expectation level out of range");
  const auto avg = cube_averages(f, k);
  SampledFunction out = zeros(f.grid);
  for (std::size_t leaf = 0; leaf < out.size(); ++leaf) out.values[leaf] = avg[g.cube_of_leaf(leaf, k)];
  return out;
}

SampledFunction difference(const SampledFunction& f, int k) {
  if (k < 1 || k > f.grid->L()) throw Error(ErrorCode::level_overflow, "difference level out of range");
  return expectation(f, k) - expectation(f, k - 1);
}

ProductIndex product_index(int i, int j, int d, double mu) {
  int r = (i + j) % d;
  if (r == 0) r = d;
  return {r, 1.0 / std::sqrt(mu)};
}

ProductIndex product_index(const Grid& g, int i, int j, double mu) {
  if (g.n() == 1) return product_index(i, j, g.d(), mu);
  const int x = i ^ j;
  return {x == 0 ? g.children() : x, 1.0 / std::sqrt(mu)};
}

}  // namespace haarlab
