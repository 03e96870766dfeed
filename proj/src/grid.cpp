#include "haarlab/grid.hpp"

#include "haarlab/errors.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace haarlab {

namespace {

double to_double(const Rat& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

std::int64_t mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace

Grid::Grid(GridSpec spec) : spec_(std::move(spec)) {
  auto& s = spec_;
  if (s.n < 1) throw Error(ErrorCode::invalid_grid, "dimension must be positive");
  if (s.d < 2) throw Error(ErrorCode::invalid_grid, "branching must be at least 2");
  if (s.n >= 2 && s.d != 2) throw Error(ErrorCode::invalid_grid, "n >= 2 requires d = 2");
  if (s.L < 1) throw Error(ErrorCode::invalid_grid, "leaf level must be at least 1");
  if (s.side <= 0) throw Error(ErrorCode::invalid_grid, "window side must be positive");
  if (s.origin.empty()) s.origin.assign(s.n, Rat(0));
  if (s.sigma.empty()) s.sigma.assign(s.n, Rat(0));
  if (static_cast<int>(s.origin.size()) != s.n || static_cast<int>(s.sigma.size()) != s.n)
    throw Error(ErrorCode::invalid_grid, "origin/sigma size must equal n");

  nc_ = s.n == 1 ? s.d : (1 << s.n);
  const int per_axis = s.n == 1 ? s.d : 2;
  axis_pow_.resize(s.L + 1);
  cube_count_.resize(s.L + 1);
  axis_pow_[0] = 1;
  cube_count_[0] = 1;
  for (int k = 1; k <= s.L; ++k) {
    axis_pow_[k] = axis_pow_[k - 1] * per_axis;
    cube_count_[k] = cube_count_[k - 1] * static_cast<std::size_t>(nc_);
    if (cube_count_[k] > (std::size_t{1} << 26))
      throw Error(ErrorCode::invalid_grid, "leaf count exceeds 2^26");
  }

  side_ = to_double(s.side);
  window_measure_ = std::pow(side_, s.n);
  origin_.resize(s.n);
  shift_.resize(s.n);
  const std::int64_t M = axis_pow_[s.L];
  for (int a = 0; a < s.n; ++a) {
    origin_[a] = to_double(s.origin[a]);
    const Rat cells = s.sigma[a] / s.side * Rat(M);
    if (s.sigma[a] < 0 || s.sigma[a] >= s.side)
      throw Error(ErrorCode::invalid_grid, "sigma must lie in [0, side)");
    if (cells.denominator() != 1)
      throw Error(ErrorCode::invalid_grid, "sigma must be a multiple of the leaf side");
    shift_[a] = cells.numerator();
  }

  const std::size_t N = leaf_count();
  cube_of_.assign(s.L + 1, std::vector<std::uint32_t>(N));
  sorted_leaves_.assign(s.L + 1, std::vector<std::uint32_t>(N));
  std::vector<std::int64_t> p(s.n), local(s.n), q(s.n);
  for (std::size_t leaf = 0; leaf < N; ++leaf) {
    std::size_t rest = leaf;
    for (int a = s.n - 1; a >= 0; --a) {
      p[a] = static_cast<std::int64_t>(rest % static_cast<std::size_t>(M));
      rest /= static_cast<std::size_t>(M);
    }
    for (int a = 0; a < s.n; ++a) local[a] = mod(p[a] - shift_[a], M);
    for (int k = 0; k <= s.L; ++k) {
      const std::int64_t m = M / axis_pow_[k];
      for (int a = 0; a < s.n; ++a) q[a] = local[a] / m;
      cube_of_[k][leaf] = static_cast<std::uint32_t>(cube_linear(k, q));
    }
  }
  // order leaves by (cube, grid-local position); the local position of a leaf is its
  // level-L cube index, so sorting by that alone groups every coarser level too
  for (int k = 0; k <= s.L; ++k) {
    auto& out = sorted_leaves_[k];
    std::vector<std::uint32_t> by_local(N);
    for (std::size_t leaf = 0; leaf < N; ++leaf) by_local[cube_of_[s.L][leaf]] = static_cast<std::uint32_t>(leaf);
    const std::size_t m = N / cube_count_[k];
    std::vector<std::size_t> fill(cube_count_[k], 0);
    for (std::size_t loc = 0; loc < N; ++loc) {
      const std::uint32_t leaf = by_local[loc];
      const std::size_t c = cube_of_[k][leaf];
      out[c * m + fill[c]++] = leaf;
    }
  }
}

bool Grid::shifted() const {
  for (auto v : shift_)
    if (v != 0) return true;
  return false;
}

std::span<const std::uint32_t> Grid::leaves_of(int k, std::size_t cube) const {
  const std::size_t m = leaves_per_cube(k);
  return {sorted_leaves_[k].data() + cube * m, m};
}

int Grid::child_slot(std::size_t leaf, int k) const {
  const std::size_t c = cube_of_[k + 1][leaf];
  if (spec_.n == 1) return static_cast<int>(c % static_cast<std::size_t>(spec_.d));
  const auto q = cube_coords(k + 1, c);
  int slot = 0;
  for (int a = 0; a < spec_.n; ++a) slot = (slot << 1) | static_cast<int>(q[a] & 1);
  return slot;
}

std::size_t Grid::child(int k, std::size_t cube, int j) const {
  if (k >= spec_.L) throw Error(ErrorCode::level_overflow, "cube at leaf level has no children");
  if (spec_.n == 1) return cube * static_cast<std::size_t>(spec_.d) + static_cast<std::size_t>(j);
  auto q = cube_coords(k, cube);
  for (int a = 0; a < spec_.n; ++a) q[a] = 2 * q[a] + ((j >> (spec_.n - 1 - a)) & 1);
  return cube_linear(k + 1, q);
}

std::size_t Grid::parent(int k, std::size_t cube) const {
  if (spec_.n == 1) return cube / static_cast<std::size_t>(spec_.d);
  auto q = cube_coords(k, cube);
  for (auto& v : q) v /= 2;
  return cube_linear(k - 1, q);
}

std::vector<std::int64_t> Grid::cube_coords(int k, std::size_t cube) const {
  std::vector<std::int64_t> q(spec_.n);
  const auto m = static_cast<std::size_t>(axis_pow_[k]);
  for (int a = spec_.n - 1; a >= 0; --a) {
    q[a] = static_cast<std::int64_t>(cube % m);
    cube /= m;
  }
  return q;
}

std::size_t Grid::cube_linear(int k, std::span<const std::int64_t> q) const {
  std::size_t idx = 0;
  const auto m = static_cast<std::size_t>(axis_pow_[k]);
  for (int a = 0; a < spec_.n; ++a) idx = idx * m + static_cast<std::size_t>(q[a]);
  return idx;
}

std::vector<std::int64_t> Grid::leaf_coords(std::size_t leaf) const {
  std::vector<std::int64_t> p(spec_.n);
  const auto M = static_cast<std::size_t>(axis_pow_[spec_.L]);
  for (int a = spec_.n - 1; a >= 0; --a) {
    p[a] = static_cast<std::int64_t>(leaf % M);
    leaf /= M;
  }
  return p;
}

std::size_t Grid::leaf_linear(std::span<const std::int64_t> p) const {
  std::size_t idx = 0;
  const auto M = static_cast<std::size_t>(axis_pow_[spec_.L]);
  for (int a = 0; a < spec_.n; ++a) idx = idx * M + static_cast<std::size_t>(p[a]);
  return idx;
}

std::vector<double> Grid::leaf_center(std::size_t leaf) const {
  const auto p = leaf_coords(leaf);
  const double h = cube_side(spec_.L);
  std::vector<double> x(spec_.n);
  for (int a = 0; a < spec_.n; ++a) x[a] = origin_[a] + (static_cast<double>(p[a]) + 0.5) * h;
  return x;
}

bool Grid::same_partition(const Grid& o) const {
  return spec_.n == o.spec_.n && spec_.d == o.spec_.d && spec_.L == o.spec_.L &&
         spec_.side == o.spec_.side && spec_.origin == o.spec_.origin;
}

std::string Grid::describe() const {
  std::ostringstream os;
  os << "n=" << spec_.n << " d=" << spec_.d << " L=" << spec_.L << " side=" << spec_.side << " sigma=(";
  for (int a = 0; a < spec_.n; ++a) os << (a ? "," : "") << spec_.sigma[a];
  os << ")";
  return os.str();
}

GridPtr make_grid(GridSpec spec) { return std::make_shared<const Grid>(std::move(spec)); }

GridPtr make_grid(int n, int d, int L, Rat side, std::vector<Rat> origin, std::vector<Rat> sigma) {
  GridSpec s;
  s.n = n;
  s.d = d;
  s.L = L;
  s.side = side;
  s.origin = std::move(origin);
  s.sigma = std::move(sigma);
  return make_grid(std::move(s));
}

GridPtr with_shift(const Grid& g, std::vector<Rat> sigma) {
  GridSpec s = g.spec();
  s.sigma = std::move(sigma);
  return make_grid(std::move(s));
}

std::size_t Cube::index() const { return grid->cube_linear(level, q); }

std::vector<double> Cube::lower() const {
  const auto& s = grid->spec();
  const std::int64_t M = grid->axis_cells(s.L);
  const std::int64_t m = M / grid->axis_cells(level);
  const double h = grid->cube_side(s.L);
  std::vector<double> x(s.n);
  for (int a = 0; a < s.n; ++a) {
    const std::int64_t start = mod(q[a] * m + grid->shift_cells()[a], M);
    x[a] = to_double(s.origin[a]) + static_cast<double>(start) * h;
  }
  return x;
}

bool Cube::wraps() const {
  const auto& s = grid->spec();
  const std::int64_t M = grid->axis_cells(s.L);
  const std::int64_t m = M / grid->axis_cells(level);
  for (int a = 0; a < s.n; ++a) {
    const std::int64_t start = mod(q[a] * m + grid->shift_cells()[a], M);
    if (start + m > M) return true;
  }
  return false;
}

std::vector<double> Cube::center() const {
  auto x = lower();
  const double half = side() / 2;
  const auto& s = grid->spec();
  for (int a = 0; a < s.n; ++a) {
    x[a] += half;
    const double o = to_double(s.origin[a]);
    if (x[a] >= o + grid->side()) x[a] -= grid->side();
  }
  return x;
}

bool Cube::operator==(const Cube& o) const {
  return grid.get() == o.grid.get() && level == o.level && q == o.q;
}

Cube make_cube(const GridPtr& g, int level, std::size_t index) {
  if (level < 0 || level > g->L()) throw Error(ErrorCode::level_overflow, "level out of range");
  return Cube{g, level, g->cube_coords(level, index)};
}

Cube root_cube(const GridPtr& g) { return make_cube(g, 0, 0); }

std::vector<Cube> children(const Cube& c) {
  if (c.level >= c.grid->L()) throw Error(ErrorCode::level_overflow, "cube at leaf level has no children");
  std::vector<Cube> out;
  const std::size_t idx = c.index();
  for (int j = 0; j < c.grid->children(); ++j)
    out.push_back(make_cube(c.grid, c.level + 1, c.grid->child(c.level, idx, j)));
  return out;
}

Cube parent(const Cube& c) {
  if (c.level == 0) throw Error(ErrorCode::level_overflow, "root has no parent");
  return make_cube(c.grid, c.level - 1, c.grid->parent(c.level, c.index()));
}

Cube cube_at(const GridPtr& g, std::span<const double> x, int k) {
  const auto& s = g->spec();
  if (k < 0 || k > s.L) throw Error(ErrorCode::level_overflow, "level out of range");
  if (static_cast<int>(x.size()) != s.n) throw Error(ErrorCode::dimension_mismatch, "point dimension");
  const std::int64_t M = g->axis_cells(s.L);
  std::vector<std::int64_t> p(s.n);
  for (int a = 0; a < s.n; ++a) {
    const double t = (x[a] - to_double(s.origin[a])) / g->side();
    if (!(t >= 0.0 && t < 1.0)) throw Error(ErrorCode::point_outside_window, "point outside window");
    p[a] = std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(t * static_cast<double>(M))), M - 1);
  }
  const std::size_t leaf = g->leaf_linear(p);
  return make_cube(g, k, g->cube_of_leaf(leaf, k));
}

Rat one_third_step(int L) {
  const std::int64_t M = std::int64_t{1} << L;
  const std::int64_t r = (M + 1) / 3;  // nearest integer to M/3, since M mod 3 is 1 or 2
  return Rat(r, M);
}

GridFamily adjacent_family(int n, int L, Rat side, std::vector<Rat> origin) {
  if (L < 2) throw Error(ErrorCode::invalid_grid, "adjacent family needs L >= 2");
  const Rat step = one_third_step(L) * side;
  GridFamily fam;
  int total = 1;
  for (int a = 0; a < n; ++a) total *= 3;
  for (int code = 0; code < total; ++code) {
    std::vector<Rat> sigma(n);
    int c = code;
    for (int a = n - 1; a >= 0; --a) {
      sigma[a] = step * Rat(c % 3);
      c /= 3;
    }
    fam.members.push_back(make_grid(n, 2, L, side, origin, sigma));
  }
  fam.covering_constant = 7.0;
  return fam;
}

CoverResult cover(const GridFamily& fam, const Box& B) {
  if (fam.members.empty()) throw Error(ErrorCode::no_cover_found, "empty family");
  const auto& g0 = *fam.members.front();
  const int n = g0.n();
  if (static_cast<int>(B.lower.size()) != n) throw Error(ErrorCode::dimension_mismatch, "box dimension");
  const double c = fam.covering_constant;
  const double tol = 1e-12 * g0.side();
  int start = 0;
  while (start < g0.L() && g0.cube_side(start + 1) >= B.side - tol) ++start;
  for (int k = start; k >= 0 && g0.cube_side(k) <= c * B.side + tol; --k) {
    for (std::size_t i = 0; i < fam.members.size(); ++i) {
      const Cube Q = cube_at(fam.members[i], B.lower, k);
      if (Q.wraps()) continue;
      const auto lo = Q.lower();
      bool inside = true;
      for (int a = 0; a < n && inside; ++a)
        inside = lo[a] <= B.lower[a] + tol && B.lower[a] + B.side <= lo[a] + Q.side() + tol;
      if (inside) return CoverResult{Q, i, Q.side() / B.side};
    }
  }
  throw Error(ErrorCode::no_cover_found, "no member cube covers the box within the constant");
}

}  // namespace haarlab
