#include "haarlab/errors.hpp"
#include "haarlab/grid.hpp"
#include "haarlab/random.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <random>

using namespace haarlab;

namespace {

void expect_interval(const Cube& c, double lo, double hi) {
  EXPECT_NEAR(c.lower()[0], lo, 1e-15);
  EXPECT_NEAR(c.lower()[0] + c.side(), hi, 1e-15);
}

}  // namespace

TEST(Grid, ChildrenBisection) {
  const auto g = make_grid(1, 2, 3);
  const auto ch = children(root_cube(g));
  ASSERT_EQ(ch.size(), 2u);
  expect_interval(ch[0], 0.0, 0.5);
  expect_interval(ch[1], 0.5, 1.0);
  EXPECT_EQ(parent(ch[1]), root_cube(g));
}

TEST(Grid, ChildrenTrisection) {
  const auto g = make_grid(1, 3, 3);
  const auto c = make_cube(g, 1, 0);
  expect_interval(c, 0.0, 1.0 / 3);
  const auto ch = children(c);
  ASSERT_EQ(ch.size(), 3u);
  for (int j = 0; j < 3; ++j) expect_interval(ch[j], j / 9.0, (j + 1) / 9.0);
}

TEST(Grid, ChildrenQuadrantsLexicographic) {
  const auto g = make_grid(2, 2, 2);
  const auto ch = children(root_cube(g));
  ASSERT_EQ(ch.size(), 4u);
  std::vector<std::vector<double>> lows;
  for (const auto& c : ch) {
    EXPECT_DOUBLE_EQ(c.side(), 0.5);
    lows.push_back(c.lower());
  }
  EXPECT_TRUE(std::is_sorted(lows.begin(), lows.end()));
  EXPECT_EQ(lows.front(), (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(lows.back(), (std::vector<double>{0.5, 0.5}));
}

TEST(Grid, CubeAtUnshifted) {
  const auto g = make_grid(1, 2, 4);
  const double x = 0.6;
  expect_interval(cube_at(g, std::span(&x, 1), 1), 0.5, 1.0);
}

TEST(Grid, CubeAtBoundaryGoesRight) {
  const auto g = make_grid(1, 2, 4);
  const double x = 0.5;
  expect_interval(cube_at(g, std::span(&x, 1), 1), 0.5, 1.0);
}

TEST(Grid, CubeAtShiftedWraps) {
  const auto g = make_grid(1, 2, 2, Rat(1), {}, {Rat(1, 4)});
  const double x = 0.1;
  const auto c = cube_at(g, std::span(&x, 1), 1);
  EXPECT_TRUE(c.wraps());
  EXPECT_NEAR(c.lower()[0], 0.75, 1e-15);
  EXPECT_DOUBLE_EQ(c.side(), 0.5);
}

TEST(Grid, AdjacentFamilyOffsets) {
  auto offsets = [](int L) {
    std::vector<Rat> s;
    for (const auto& m : adjacent_family(1, L).members) s.push_back(m->spec().sigma.empty() ? Rat(0) : m->spec().sigma[0]);
    return s;
  };
  EXPECT_EQ(offsets(4), (std::vector<Rat>{Rat(0), Rat(5, 16), Rat(10, 16)}));
  EXPECT_EQ(offsets(2), (std::vector<Rat>{Rat(0), Rat(1, 4), Rat(1, 2)}));
  EXPECT_EQ(one_third_step(4), Rat(5, 16));
  const auto fam2 = adjacent_family(2, 4);
  EXPECT_EQ(fam2.members.size(), 9u);
  std::set<std::vector<Rat>> seen;
  for (const auto& m : fam2.members) {
    auto s = m->spec().sigma;
    s.resize(2, Rat(0));
    seen.insert(s);
  }
  EXPECT_EQ(seen.size(), 9u);
}

TEST(Grid, CoverExamples) {
  const auto fam = adjacent_family(1, 6);
  const auto r = cover(fam, Box{{0.3}, 0.25});
  EXPECT_LE(r.cube.side(), 7 * 0.25 + 1e-12);
  const auto c = cover(fam, Box{{0.25}, 0.25});
  EXPECT_DOUBLE_EQ(c.ratio, 1.0);
  EXPECT_NEAR(c.cube.lower()[0], 0.25, 1e-15);
}

TEST(Grid, CoverRandomBoxes) {
  const auto fam = adjacent_family(1, 8);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int found = 0, trials = 2000;
  const double leaf = fam.members[0]->cube_side(8);
  for (int t = 0; t < trials; ++t) {
    const double side = leaf * std::pow(0.5 / leaf, u(rng));
    const double lo = u(rng) * (1.0 - side);
    try {
      const auto r = cover(fam, Box{{lo}, side});
      found += r.ratio <= fam.covering_constant + 1e-12;
    } catch (const Error&) {
    }
  }
  EXPECT_GE(found, 0.99 * trials);
}

TEST(Grid, PartitionAndNesting) {
  for (auto g : {make_grid(1, 3, 4), make_grid(2, 2, 3), make_grid(1, 2, 5, Rat(1), {}, {Rat(3, 32)})}) {
    for (int k = 0; k <= g->L(); ++k) {
      std::size_t total = 0;
      for (std::size_t q = 0; q < g->cube_count(k); ++q) {
        const auto leaves = g->leaves_of(k, q);
        total += leaves.size();
        const auto c = make_cube(g, k, q);
        for (auto leaf : leaves) {
          EXPECT_EQ(g->cube_of_leaf(leaf, k), q);
          const auto x = g->leaf_center(leaf);
          EXPECT_EQ(cube_at(g, x, k), c);
        }
      }
      EXPECT_EQ(total, g->leaf_count());
    }
  }
}

TEST(Grid, ShiftConsistency) {
  const auto base = make_grid(1, 2, 5);
  const Rat sigma(7, 32);
  const auto sh = with_shift(*base, {sigma});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const double x = u(rng);
    double y = x - boost::rational_cast<double>(sigma);
    if (y < 0) y += 1.0;
    for (int k = 0; k <= 5; ++k)
      EXPECT_EQ(cube_at(sh, std::span(&x, 1), k).q, cube_at(base, std::span(&y, 1), k).q);
  }
}

TEST(Grid, InvalidGridRejected) {
  EXPECT_THROW(make_grid(1, 1, 3), Error);
  EXPECT_THROW(make_grid(1, 2, -1), Error);
}
