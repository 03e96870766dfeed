#include "haarlab/median.hpp"
#include "haarlab/random.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

using namespace haarlab;
using exact::i128;

namespace {

WeightedPointSet atoms(std::initializer_list<std::pair<cd, double>> list) {
  WeightedPointSet P;
  for (const auto& [z, w] : list) P.atoms.push_back({z, w});
  return P;
}

const WeightedPointSet kRoots = atoms({{{1, 0}, 0.25}, {{0, 1}, 0.25}, {{-1, 0}, 0.25}, {{0, -1}, 0.25}});

// dyadic coordinates in [-1/2, 1/2] with small integer weights, clustered to force ties
WeightedPointSet random_dyadic(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> c(-8, 8), w(1, 5), line(0, 3);
  WeightedPointSet P;
  for (int i = 0; i < n; ++i) {
    int x = c(rng), y = c(rng);
    if (line(rng) == 0) y = x;
    P.atoms.push_back({cd(x / 16.0, y / 16.0), static_cast<double>(w(rng))});
  }
  return P;
}

}  // namespace

TEST(Median, HalvingExamples) {
  auto r = halving_line(atoms({{0.0, 0.5}, {1.0, 0.5}}), 0.0);
  EXPECT_EQ(r.offset, 0.0);
  EXPECT_EQ(r.lower, 0.5);
  EXPECT_EQ(r.upper, 1.0);
  r = halving_line(atoms({{cd(2, 3), 0.7}}), 0.3);
  EXPECT_EQ(r.lower, 0.7);
  EXPECT_EQ(r.upper, 0.7);
  r = halving_line(atoms({{0.0, 0.25}, {1.0, 0.25}, {2.0, 0.25}, {3.0, 0.25}}), 0.0);
  EXPECT_EQ(r.offset, 1.0);
  EXPECT_EQ(r.lower, 0.5);
  EXPECT_EQ(r.upper, 0.75);
}

TEST(Median, QuarterExamples) {
  const auto q = quarter_partition(atoms({{cd(1, 1), 0.25}, {cd(1, -1), 0.25}, {cd(-1, 1), 0.25}, {cd(-1, -1), 0.25}}));
  for (double m : q.masses) EXPECT_GE(m, 0.25);
  const auto s = quarter_partition(atoms({{cd(0.5, -2), 3.0}}));
  for (double m : s.masses) EXPECT_EQ(m, 3.0);
}

TEST(Median, ComplexMedianExamples) {
  const auto one = complex_median(atoms({{cd(0.25, -0.75), 2.0}}));
  EXPECT_TRUE(one.certified);
  EXPECT_EQ(one.pair.center, cd(0.25, -0.75));
  for (double m : one.masses) EXPECT_EQ(m, 2.0);
  const auto r = complex_median(kRoots);
  EXPECT_TRUE(r.certified);
  EXPECT_TRUE(r.exact);
  for (double m : r.masses) EXPECT_GE(m, 1.0 / 16);
}

TEST(Median, QuadrantMassExamples) {
  for (double m : quadrant_masses(kRoots, {0.0, 0.0})) EXPECT_EQ(m, 0.5);
  for (double m : quadrant_masses(atoms({{cd(0.3, 0.1), 1.5}, {cd(2, 2), 0.5}}), {cd(0.3, 0.1), 0.4})) EXPECT_GE(m, 1.5);
  const auto P = atoms({{cd(0.3, 0.1), 1.0}, {cd(-0.7, 0.2), 2.0}, {cd(0.1, -0.9), 0.5}});
  const auto m = quadrant_masses(P, {cd(0.01, 0.02), 0.3});
  EXPECT_DOUBLE_EQ(m[0] + m[1] + m[2] + m[3], P.total());
}

TEST(Median, EmptySetRejected) { EXPECT_ANY_THROW(complex_median(WeightedPointSet{})); }

// halving and quarter contracts under exact integer comparisons
TEST(Median, LemmaChainExact) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> dir(-5, 5);
  for (int t = 0; t < 10000; ++t) {
    const auto P = random_dyadic(rng, 1 + t % 12);
    const auto S = exact::to_exact(P);
    ASSERT_TRUE(S);
    int dx = dir(rng), dy = dir(rng);
    if (dx == 0 && dy == 0) dx = 1;
    const auto h = exact::halving_line(*S, dx, dy);
    EXPECT_GE(2 * h.lower, i128{S->total});
    EXPECT_GE(2 * h.upper, i128{S->total});
    if (t % 10 == 0) {
      const auto q = exact::quarter_partition(*S);
      for (auto m : q.masses) EXPECT_GE(4 * m, i128{S->total});
    }
  }
}

TEST(Median, AgreesWithOracle) {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 300; ++t) {
    const auto P = random_dyadic(rng, 1 + t % 20);
    const auto r = complex_median(P);
    const auto o = median_oracle(P);
    EXPECT_TRUE(r.certified);
    EXPECT_TRUE(r.exact);
    ASSERT_TRUE(o.has_value());
    EXPECT_TRUE(o->certified);
    EXPECT_TRUE(certify(P, r.pair));
  }
}

// rotate by a quarter turn and translate; the transported pair sees the same masses
TEST(Median, TransportEquivariance) {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> sh(-4, 4);
  for (int t = 0; t < 100; ++t) {
    const auto P = random_dyadic(rng, 3 + t % 15);
    const auto S = *exact::to_exact(P);
    const auto sol = exact::complex_median(S);
    ASSERT_TRUE(exact::certified(S, sol.pair));
    const std::int64_t tx = sh(rng) * (std::int64_t{1} << S.coord_exp) / 8, ty = sh(rng) * (std::int64_t{1} << S.coord_exp) / 8;
    exact::ExactSet T = S;
    for (auto& z : T.z) z = {-z.y + tx, z.x + ty};
    exact::Pair L = sol.pair;
    const i128 rx = -L.ry, ry = L.rx;
    L.c1 += L.q1 * (rx * ty - ry * tx);
    L.c2 += L.q2 * (rx * tx + ry * ty);
    L.rx = rx;
    L.ry = ry;
    EXPECT_EQ(exact::quadrant_masses(T, L), exact::quadrant_masses(S, sol.pair));
    EXPECT_TRUE(exact::certified(T, exact::complex_median(T).pair));
  }
}

TEST(Median, WeightScaling) {
  std::mt19937_64 rng(24);
  for (int t = 0; t < 50; ++t) {
    auto P = random_dyadic(rng, 2 + t % 10);
    const auto r = complex_median(P);
    const auto m = quadrant_masses(P, r.pair);
    for (auto& a : P.atoms) a.w *= 3.0;
    const auto m3 = quadrant_masses(P, r.pair);
    for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(m3[i], 3 * m[i]);
    EXPECT_TRUE(certify(P, r.pair));
    EXPECT_GE(m[0] + m[1] + m[2] + m[3], P.total() / 3 - 1e-12);
  }
}

// non-dyadic inputs go through the quantized route and are certified in double precision
TEST(Median, GenericInputs) {
  for (int t = 0; t < 100; ++t) {
    auto rng = keyed_engine(25, t);
    WeightedPointSet P;
    for (int i = 0; i < 1 + t % 30; ++i) P.atoms.push_back({complex_gaussian(rng), 0.1 + std::abs(complex_gaussian(rng))});
    const auto r = complex_median(P);
    EXPECT_TRUE(r.certified);
    EXPECT_FALSE(r.exact);
    EXPECT_GT(r.slack, 0.0);
    EXPECT_LE(r.slack, 1e-5);
    EXPECT_TRUE(certify(P, r.pair, r.slack));
  }
}
