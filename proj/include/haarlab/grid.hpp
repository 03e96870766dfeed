#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace haarlab {

using Rat = boost::rational<std::int64_t>;

// Window is origin + side*[0,1)^n, treated as a torus when sigma != 0.
// For n >= 2 the branching is fixed to 2 per axis.
struct GridSpec {
  int n = 1;
  int d = 2;
  int L = 1;
  std::vector<Rat> origin;
  Rat side{1};
  std::vector<Rat> sigma;
};

class Grid {
 public:
  explicit Grid(GridSpec spec);

  const GridSpec& spec() const { return spec_; }
  int n() const { return spec_.n; }
  int d() const { return spec_.d; }
  int L() const { return spec_.L; }
  // children per cube: d for n = 1, 2^n otherwise
  int children() const { return nc_; }
  int branches() const { return nc_ - 1; }
  std::int64_t axis_cells(int k) const { return axis_pow_[k]; }
  std::size_t cube_count(int k) const { return cube_count_[k]; }
  std::size_t leaf_count() const { return cube_count_[spec_.L]; }
  std::size_t leaves_per_cube(int k) const { return leaf_count() / cube_count(k); }

  double side() const { return side_; }
  double window_measure() const { return window_measure_; }
  double leaf_measure() const { return cube_measure(spec_.L); }
  double cube_measure(int k) const { return window_measure_ / static_cast<double>(cube_count_[k]); }
  double cube_side(int k) const { return side_ / static_cast<double>(axis_pow_[k]); }

  // shift in leaf units, per axis, in [0, axis_cells(L))
  const std::vector<std::int64_t>& shift_cells() const { return shift_; }
  bool shifted() const;

  std::size_t cube_of_leaf(std::size_t leaf, int k) const { return cube_of_[k][leaf]; }
  // leaves of the level-k cube, in increasing order of the grid-local position
  std::span<const std::uint32_t> leaves_of(int k, std::size_t cube) const;
  // index in 0..children()-1 of the level-(k+1) cube holding `leaf` inside its level-k cube
  int child_slot(std::size_t leaf, int k) const;

  std::size_t child(int k, std::size_t cube, int j) const;
  std::size_t parent(int k, std::size_t cube) const;
  std::vector<std::int64_t> cube_coords(int k, std::size_t cube) const;
  std::size_t cube_linear(int k, std::span<const std::int64_t> q) const;

  // unshifted leaf multi-index and its geometric center
  std::vector<std::int64_t> leaf_coords(std::size_t leaf) const;
  std::vector<double> leaf_center(std::size_t leaf) const;
  std::size_t leaf_linear(std::span<const std::int64_t> p) const;

  // same n, d, L, window: shifted members share one leaf partition
  bool same_partition(const Grid& o) const;
  std::string describe() const;

 private:
  GridSpec spec_;
  int nc_ = 2;
  double side_ = 1.0;
  double window_measure_ = 1.0;
  std::vector<double> origin_;
  std::vector<std::int64_t> axis_pow_;
  std::vector<std::size_t> cube_count_;
  std::vector<std::int64_t> shift_;
  std::vector<std::vector<std::uint32_t>> cube_of_;
  std::vector<std::vector<std::uint32_t>> sorted_leaves_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(int n, int d, int L, Rat side = Rat(1), std::vector<Rat> origin = {},
                  std::vector<Rat> sigma = {});
GridPtr make_grid(GridSpec spec);
// same grid with a different offset
GridPtr with_shift(const Grid& g, std::vector<Rat> sigma);

struct Cube {
  GridPtr grid;
  int level = 0;
  std::vector<std::int64_t> q;

  std::size_t index() const;
  double measure() const { return grid->cube_measure(level); }
  double side() const { return grid->cube_side(level); }
  // lower corner, reduced into the window
  std::vector<double> lower() const;
  // true when the cube crosses the window boundary under the periodic wrap
  bool wraps() const;
  std::vector<double> center() const;
  bool operator==(const Cube& o) const;
};

Cube make_cube(const GridPtr& g, int level, std::size_t index);
Cube root_cube(const GridPtr& g);
std::vector<Cube> children(const Cube& c);
Cube parent(const Cube& c);
Cube cube_at(const GridPtr& g, std::span<const double> x, int k);

// axis-aligned cube in window coordinates
struct Box {
  std::vector<double> lower;
  double side = 0.0;
};

struct GridFamily {
  std::vector<GridPtr> members;
  double covering_constant = 7.0;
};

// 3^n grids with per-axis offsets {0, s_L, 2 s_L}, s_L = round(2^L/3) 2^-L (window units)
GridFamily adjacent_family(int n, int L, Rat side = Rat(1), std::vector<Rat> origin = {});
Rat one_third_step(int L);

struct CoverResult {
  Cube cube;
  std::size_t member = 0;
  double ratio = 0.0;
};

CoverResult cover(const GridFamily& fam, const Box& B);

}  // namespace haarlab
