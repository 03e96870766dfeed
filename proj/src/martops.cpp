#include "haarlab/martops.hpp"

#include "haarlab/errors.hpp"

#include <cmath>
#include <map>
#include <tuple>
#include <numbers>

namespace haarlab {

namespace {

void check_grid(const DenseOperator& a, const DenseOperator& b) {
  if (a.m.rows() != b.m.rows() || a.m.cols() != b.m.cols())
    throw Error(ErrorCode::dimension_mismatch, "operator sizes differ");
  if (a.grid && b.grid && !a.grid->same_partition(*b.grid))
    throw Error(ErrorCode::dimension_mismatch, "operators live on different grids");
}

Vec to_vec(const SampledFunction& f) {
  return Eigen::Map<const Vec>(f.values.data(), static_cast<Eigen::Index>(f.values.size()));
}

// Adds coef * D_k restricted to each level-(k-1) cube, row-scaled by row_scale[y].
// D_k[y, c'] = [same level-k cube]/m_k - 1/m_{k-1} inside the parent cube.
template <class RowScale>
void add_difference_slice(Mat& M, const Grid& g, int k, RowScale row_scale) {
  const double inv_m = 1.0 / static_cast<double>(g.leaves_per_cube(k - 1));
  const double inv_mk = 1.0 / static_cast<double>(g.leaves_per_cube(k));
  for (std::size_t Q = 0; Q < g.cube_count(k - 1); ++Q) {
    const auto leaves = g.leaves_of(k - 1, Q);
    for (auto y : leaves) {
      const cd s = row_scale(y, Q);
      if (s == cd(0.0)) continue;
      const auto cy = g.cube_of_leaf(y, k);
      for (auto c : leaves) {
        const double D = (g.cube_of_leaf(c, k) == cy ? inv_mk : 0.0) - inv_m;
        M(y, c) += s * D;
      }
    }
  }
}

}  // namespace

SampledFunction DenseOperator::apply(const SampledFunction& f) const {
  const Vec v = m * to_vec(f);
  SampledFunction out = zeros(grid);
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = v(static_cast<Eigen::Index>(i));
  return out;
}

DenseOperator identity(const GridPtr& g) {
  const auto N = static_cast<Eigen::Index>(g->leaf_count());
  return {g, Mat::Identity(N, N), {}};
}

DenseOperator zero_operator(const GridPtr& g) {
  const auto N = static_cast<Eigen::Index>(g->leaf_count());
  return {g, Mat::Zero(N, N), {}};
}

DenseOperator operator+(const DenseOperator& a, const DenseOperator& b) {
  check_grid(a, b);
  return {a.grid, a.m + b.m, {}};
}

DenseOperator operator-(const DenseOperator& a, const DenseOperator& b) {
  check_grid(a, b);
  return {a.grid, a.m - b.m, {}};
}

DenseOperator operator*(const DenseOperator& a, const DenseOperator& b) {
  check_grid(a, b);
  return {a.grid, a.m * b.m, {}};
}

DenseOperator operator*(cd s, const DenseOperator& a) { return {a.grid, s * a.m, {}}; }

DenseOperator multiplier(const SampledFunction& b) {
  DenseOperator out = zero_operator(b.grid);
  out.m.diagonal() = to_vec(b);
  return out;
}

DenseOperator expectation_operator(const GridPtr& g, int k) {
  if (k < 0 || k > g->L()) throw Error(ErrorCode::level_overflow, "expectation level out of range");
  DenseOperator out = zero_operator(g);
  const double w = 1.0 / static_cast<double>(g->leaves_per_cube(k));
  for (std::size_t Q = 0; Q < g->cube_count(k); ++Q) {
    const auto leaves = g->leaves_of(k, Q);
    for (auto y : leaves)
      for (auto c : leaves) out.m(y, c) = w;
  }
  return out;
}

DenseOperator difference_operator(const GridPtr& g, int k) {
  if (k < 1 || k > g->L()) throw Error(ErrorCode::level_overflow, "difference level out of range");
  DenseOperator out = zero_operator(g);
  add_difference_slice(out.m, *g, k, [](std::size_t, std::size_t) { return cd(1.0); });
  return out;
}

DenseOperator paraproduct(const SampledFunction& b) {
  const auto& g = *b.grid;
  DenseOperator out = zero_operator(b.grid);
  for (int k = 1; k <= g.L(); ++k) {
    const SampledFunction db = difference(b, k);
    const double inv_m = 1.0 / static_cast<double>(g.leaves_per_cube(k - 1));
    for (std::size_t Q = 0; Q < g.cube_count(k - 1); ++Q) {
      const auto leaves = g.leaves_of(k - 1, Q);
      for (auto y : leaves) {
        const cd s = db.values[y] * inv_m;
        for (auto c : leaves) out.m(y, c) += s;
      }
    }
  }
  return out;
}

DenseOperator paraproduct_haar(const SampledFunction& b) {
  const auto& gp = b.grid;
  const auto& g = *gp;
  const HaarCoefficients hc = analyze(b);
  DenseOperator out = zero_operator(gp);
  for (int k = 0; k < g.L(); ++k) {
    const double norm = 1.0 / std::sqrt(g.cube_measure(k));
    const double inv_m = 1.0 / static_cast<double>(g.leaves_per_cube(k));
    for (std::size_t I = 0; I < g.cube_count(k); ++I) {
      const auto leaves = g.leaves_of(k, I);
      for (int br = 1; br <= g.branches(); ++br) {
        const cd coef = hc.at({k, I, br});
        if (coef == cd(0.0)) continue;
        for (auto x : leaves) {
          const cd hx = norm * child_pattern(g, br, g.child_slot(x, k));
          for (auto c : leaves) out.m(x, c) += coef * hx * inv_m;
        }
      }
    }
  }
  return out;
}

DenseOperator paraproduct_adjoint(const SampledFunction& b) {
  const auto& g = *b.grid;
  DenseOperator out = zero_operator(b.grid);
  for (int k = 1; k <= g.L(); ++k) {
    const SampledFunction db = difference(b, k);
    const double inv_m = 1.0 / static_cast<double>(g.leaves_per_cube(k - 1));
    const double inv_mk = 1.0 / static_cast<double>(g.leaves_per_cube(k));
    for (std::size_t Q = 0; Q < g.cube_count(k - 1); ++Q) {
      const auto leaves = g.leaves_of(k - 1, Q);
      // w(c') = sum_y conj(db(y)) D_k[y, c']
      std::map<std::size_t, cd> child_sum;
      cd total = 0;
      for (auto y : leaves) {
        child_sum[g.cube_of_leaf(y, k)] += std::conj(db.values[y]);
        total += std::conj(db.values[y]);
      }
      for (auto c : leaves) {
        const cd w = child_sum[g.cube_of_leaf(c, k)] * inv_mk - total * inv_m;
        for (auto x : leaves) out.m(x, c) += w * inv_m;
      }
    }
  }
  return out;
}

DenseOperator lambda(const SampledFunction& b) {
  const auto& g = *b.grid;
  DenseOperator out = zero_operator(b.grid);
  for (int k = 1; k <= g.L(); ++k) {
    const SampledFunction db = difference(b, k);
    add_difference_slice(out.m, g, k, [&](std::size_t y, std::size_t) { return db.values[y]; });
  }
  return out;
}

DenseOperator remainder(const SampledFunction& b) {
  const auto& g = *b.grid;
  DenseOperator out = zero_operator(b.grid);
  for (int k = 1; k <= g.L(); ++k) {
    const auto avg = cube_averages(b, k - 1);
    add_difference_slice(out.m, g, k, [&](std::size_t, std::size_t Q) { return avg[Q]; });
  }
  return out;
}

DenseOperator psi(const SampledFunction& a, const SampledFunction& b) {
  const auto& g = *b.grid;
  if (!a.grid->same_partition(g)) throw Error(ErrorCode::dimension_mismatch, "symbols on different grids");
  DenseOperator out = zero_operator(b.grid);
  Mat G = Mat::Zero(out.m.rows(), out.m.cols());  // sum_{j < k} d_j b * d_j
  for (int k = 1; k <= g.L(); ++k) {
    const SampledFunction da = difference(a, k);
    for (Eigen::Index r = 0; r < G.rows(); ++r) out.m.row(r) += da.values[static_cast<std::size_t>(r)] * G.row(r);
    const SampledFunction db = difference(b, k);
    add_difference_slice(G, g, k, [&](std::size_t y, std::size_t) { return db.values[y]; });
  }
  return out;
}

DenseOperator commutator(const DenseOperator& A, const DenseOperator& B) {
  check_grid(A, B);
  return {A.grid, A.m * B.m - B.m * A.m, {}};
}

DenseOperator expectation_zero_correction(const SampledFunction& b) {
  return multiplier(expectation(b, 0)) * expectation_operator(b.grid, 0);
}

double shift_coefficient_bound(const Grid& g, const ShiftEntry& e, int i, int j) {
  return std::sqrt(g.cube_measure(e.k_level + i) * g.cube_measure(e.k_level + j)) / g.cube_measure(e.k_level);
}

namespace {

std::vector<std::size_t> descendants(const Grid& g, int level, std::size_t K, int depth) {
  std::vector<std::size_t> out;
  for (auto leaf : g.leaves_of(level, K)) {
    const std::size_t c = g.cube_of_leaf(leaf, level + depth);
    if (out.empty() || out.back() != c) {
      bool seen = false;
      for (auto v : out) seen = seen || v == c;
      if (!seen) out.push_back(c);
    }
  }
  return out;
}

}  // namespace

ShiftCoefficients shift_max_random(const GridPtr& gp, int i, int j, std::mt19937_64& rng) {
  const auto& g = *gp;
  ShiftCoefficients c{gp, i, j, {}};
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  const int top = g.L() - 1 - std::max(i, j);
  for (int k = 0; k <= top; ++k) {
    for (std::size_t K = 0; K < g.cube_count(k); ++K) {
      const auto Is = descendants(g, k, K, i);
      const auto Js = descendants(g, k, K, j);
      for (auto I : Is)
        for (auto J : Js)
          for (int xi = 1; xi <= g.branches(); ++xi)
            for (int eta = 1; eta <= g.branches(); ++eta) {
              ShiftEntry e{k, K, I, J, xi, eta, 0.0};
              e.a = std::polar(shift_coefficient_bound(g, e, i, j), phase(rng));
              c.entries.push_back(e);
            }
    }
  }
  return c;
}

ShiftCoefficients shift_haar_delta(const GridPtr& gp) {
  const auto& g = *gp;
  ShiftCoefficients c{gp, 0, 0, {}};
  for (int k = 0; k < g.L(); ++k)
    for (std::size_t K = 0; K < g.cube_count(k); ++K)
      for (int xi = 1; xi <= g.branches(); ++xi) c.entries.push_back({k, K, K, K, xi, xi, 1.0});
  return c;
}

DenseOperator dyadic_shift(const ShiftCoefficients& c) {
  const auto& g = *c.grid;
  DenseOperator out = zero_operator(c.grid);
  const double h = g.leaf_measure();
  for (const auto& e : c.entries) {
    if (e.k_level < 0 || e.k_level + std::max(c.i, c.j) > g.L() - 1)
      throw Error(ErrorCode::coefficient_bound_violation, "shift entry outside the truncated levels");
    const double bound = shift_coefficient_bound(g, e, c.i, c.j);
    if (std::abs(e.a) > bound * (1.0 + 1e-12))
      throw Error(ErrorCode::coefficient_bound_violation, "|a| exceeds sqrt(|I||J|)/|K|");
    const int lI = e.k_level + c.i;
    const int lJ = e.k_level + c.j;
    const double nI = 1.0 / std::sqrt(g.cube_measure(lI));
    const double nJ = 1.0 / std::sqrt(g.cube_measure(lJ));
    const auto Ileaves = g.leaves_of(lI, e.I);
    const auto Jleaves = g.leaves_of(lJ, e.J);
    for (auto x : Jleaves) {
      const cd hJ = nJ * child_pattern(g, e.eta, g.child_slot(x, lJ));
      for (auto y : Ileaves) {
        const cd hI = nI * child_pattern(g, e.xi, g.child_slot(y, lI));
        out.m(x, y) += e.a * hJ * std::conj(hI) * h;
      }
    }
  }
  return out;
}

double shift_weight_bound(int i, int j, int n, double alpha) {
  const double m = std::max(i, j);
  return std::pow(1.0 + m, 2.0 * (n + alpha)) * std::pow(2.0, -alpha * m);
}

WaveletBasis wavelet_basis(const GridPtr& gp, int K_level, std::size_t K, int depth) {
  const auto& g = *gp;
  const int level = K_level + depth;
  if (level < 0 || level >= g.L()) throw Error(ErrorCode::level_overflow, "basis level out of range");
  WaveletBasis out;
  const auto cubes = descendants(g, K_level, K, depth);
  const auto N = static_cast<Eigen::Index>(g.leaf_count());
  out.columns = Mat::Zero(N, static_cast<Eigen::Index>(cubes.size() * g.branches()));
  const double sh = std::sqrt(g.leaf_measure());
  Eigen::Index col = 0;
  for (auto I : cubes) {
    for (int br = 1; br <= g.branches(); ++br) {
      const WaveletIndex w{level, I, br};
      const auto f = haar_function(gp, w);
      for (Eigen::Index r = 0; r < N; ++r) out.columns(r, col) = sh * f.values[static_cast<std::size_t>(r)];
      out.index.push_back(w);
      ++col;
    }
  }
  return out;
}

WaveletBasis full_wavelet_basis(const GridPtr& gp) {
  const auto& g = *gp;
  const auto N = static_cast<Eigen::Index>(g.leaf_count());
  WaveletBasis out;
  out.columns = Mat::Zero(N, N);
  out.columns.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(N)));
  out.index.push_back({0, 0, g.children()});
  Eigen::Index col = 1;
  const double sh = std::sqrt(g.leaf_measure());
  for (int k = 0; k < g.L(); ++k)
    for (std::size_t I = 0; I < g.cube_count(k); ++I)
      for (int br = 1; br <= g.branches(); ++br) {
        const WaveletIndex w{k, I, br};
        const auto f = haar_function(gp, w);
        for (Eigen::Index r = 0; r < N; ++r) out.columns(r, col) = sh * f.values[static_cast<std::size_t>(r)];
        out.index.push_back(w);
        ++col;
      }
  return out;
}

DenseOperator shift_remainder_commutator(const ShiftCoefficients& c, const SampledFunction& b) {
  DenseOperator phi = commutator(dyadic_shift(c), remainder(b));
  phi.tag = kShiftRemainderTag;
  return phi;
}

Mat block_extract(const DenseOperator& phi, int K_level, std::size_t K, int depth) {
  if (phi.tag != kShiftRemainderTag)
    throw Error(ErrorCode::not_a_shift_remainder_commutator, "operator is not tagged as [S, R_b]");
  const WaveletBasis B = wavelet_basis(phi.grid, K_level, K, depth);
  const Mat PB = phi.m * B.columns;
  return PB.adjoint() * PB;
}

BlockReport block_structure(const DenseOperator& phi, int i, int j) {
  if (phi.tag != kShiftRemainderTag)
    throw Error(ErrorCode::not_a_shift_remainder_commutator, "operator is not tagged as [S, R_b]");
  const auto& gp = phi.grid;
  const auto& g = *gp;
  const WaveletBasis U = full_wavelet_basis(gp);
  const Mat PU = phi.m * U.columns;
  const Mat G = PU.adjoint() * PU;
  std::map<std::tuple<int, std::size_t, int>, Eigen::Index> pos;
  for (std::size_t c = 0; c < U.index.size(); ++c)
    pos[{U.index[c].level, U.index[c].cube, U.index[c].branch}] = static_cast<Eigen::Index>(c);

  BlockReport rep;
  rep.total_mass = G.squaredNorm();
  rep.trace_total = G.trace().real();
  std::vector<long> block_of(U.index.size(), -1);
  const int top = g.L() - 1 - std::max(i, j);
  for (int k = 0; k <= top; ++k) {
    for (std::size_t K = 0; K < g.cube_count(k); ++K) {
      std::vector<Eigen::Index> idx;
      for (auto I : descendants(g, k, K, i))
        for (int br = 1; br <= g.branches(); ++br) idx.push_back(pos.at({k + i, I, br}));
      Mat blk(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
      for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t c = 0; c < idx.size(); ++c)
          blk(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = G(idx[r], idx[c]);
      for (auto r : idx) block_of[static_cast<std::size_t>(r)] = static_cast<long>(rep.blocks.size());
      rep.trace_blocks += blk.trace().real();
      rep.blocks.push_back(std::move(blk));
    }
  }
  for (Eigen::Index r = 0; r < G.rows(); ++r)
    for (Eigen::Index c = 0; c < G.cols(); ++c) {
      const long br = block_of[static_cast<std::size_t>(r)];
      if (br < 0 || br != block_of[static_cast<std::size_t>(c)]) rep.cross_mass += std::norm(G(r, c));
    }
  return rep;
}

}  // namespace haarlab
