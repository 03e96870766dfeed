#include "haarlab/martops.hpp"
#include "haarlab/norms.hpp"
#include "haarlab/random.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace haarlab;

namespace {

SampledFunction haar_pair(const GridPtr& g) {
  return haar_function(g, {0, 0, 1}) + haar_function(g, {1, 0, 1});
}

SampledFunction linear(const GridPtr& g, double slope) {
  return sample(g, [=](std::span<const double> x) { return cd(slope * x[0]); });
}

double bump(double t) { return t < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0; }

}  // namespace

TEST(Norms, Lorentz) {
  EXPECT_NEAR(lorentz_norm({1, 1}, {2, 2}), std::sqrt(2.0), 1e-15);
  std::vector<double> harmonic;
  for (int k = 1; k <= 100; ++k) harmonic.push_back(1.0 / k);
  EXPECT_NEAR(lorentz_norm(harmonic, {1, kInf}), 1.0, 1e-14);
  std::vector<double> geo;
  for (int k = 1; k <= 60; ++k) geo.push_back(std::pow(2.0, 1 - k));
  EXPECT_NEAR(lorentz_norm(geo, {1, kInf}), 1.0, 1e-14);
}

TEST(Norms, LorentzProperties) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> a(30);
    for (auto& x : a) x = u(rng);
    for (double p : {1.0, 1.5, 3.0}) {
      double s = 0.0;
      for (double x : a) s += std::pow(x, p);
      EXPECT_NEAR(lorentz_norm(a, {p, p}), std::pow(s, 1.0 / p), 1e-12);
    }
    auto b = a;
    std::shuffle(b.begin(), b.end(), rng);
    EXPECT_DOUBLE_EQ(lorentz_norm(a, {2, kInf}), lorentz_norm(b, {2, kInf}));
    auto c = a;
    for (auto& x : c) x *= 2.5;
    EXPECT_NEAR(lorentz_norm(c, {4, 2}), 2.5 * lorentz_norm(a, {4, 2}), 1e-12);
  }
}

TEST(Norms, SchattenExamples) {
  EXPECT_NEAR(schatten(Mat(Mat::Identity(3, 3)), {2, 2}), std::sqrt(3.0), 1e-14);
  Mat d = Mat::Zero(3, 3);
  d.diagonal() << 3, 2, 1;
  EXPECT_NEAR(schatten(d, {1, 1}), 6.0, 1e-13);
}

// LAPACK singular values against Eigen's one-sided Jacobi
TEST(Norms, SingularValuesOracle) {
  for (int t = 0; t < 10; ++t) {
    auto rng = keyed_engine(12, t);
    const int r = 5 + 7 * t, c = 40 - 3 * t;
    Mat m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = complex_gaussian(rng);
    const auto s = singular_values(m);
    Eigen::JacobiSVD<Mat> svd(m);
    ASSERT_EQ(s.size(), static_cast<std::size_t>(svd.singularValues().size()));
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(s[i], svd.singularValues()(static_cast<Eigen::Index>(i)), 1e-12 * s[0]);
    EXPECT_NEAR(schatten(m, {2, 2}), m.norm(), 1e-10 * m.norm());
  }
}

TEST(Norms, SchattenUnitaryInvariance) {
  auto rng = keyed_engine(13, 0);
  Mat m(16, 16), z(16, 16);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = complex_gaussian(rng);
    z.data()[i] = complex_gaussian(rng);
  }
  const Mat U = Eigen::HouseholderQR<Mat>(z).householderQ();
  for (const LorentzIndex idx : {LorentzIndex{1, 1}, LorentzIndex{3, 3}, LorentzIndex{2, kInf}}) {
    const double a = schatten(m, idx), b = schatten(Mat(U * m * U.adjoint()), idx);
    EXPECT_NEAR(a, b, 1e-9 * a);
  }
}

TEST(Norms, BesovMartingaleExamples) {
  const auto g = make_grid(1, 2, 5);
  EXPECT_LE(besov_martingale(constant(g, 2.0), 2), 1e-14);
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    EXPECT_NEAR(besov_martingale(haar_function(g, {0, 0, 1}), p), 1.0, 1e-13);
    EXPECT_NEAR(besov_martingale(haar_pair(g), p), std::pow(1 + std::pow(2.0, p / 2), 1 / p), 1e-13);
  }
  EXPECT_LE(besov_martingale_diff(constant(g, 2.0), 2), 1e-14);
  EXPECT_LE(besov_martingale_tail(constant(g, 2.0), 2), 1e-14);
}

// the three discrete forms are comparable with constants independent of the level
TEST(Norms, BesovFormsComparable) {
  for (double p : {1.5, 2.0, 3.0}) {
    double lo = 1e300, hi = 0.0;
    for (int L : {4, 6, 8}) {
      const auto g = make_grid(1, 2, L);
      for (int t = 0; t < 10; ++t) {
        auto rng = keyed_engine(14, t);
        const auto b = random_symbol(g, rng);
        const double m = besov_martingale(b, p);
        for (double v : {besov_martingale_diff(b, p), besov_martingale_tail(b, p)}) {
          lo = std::min(lo, v / m);
          hi = std::max(hi, v / m);
        }
      }
    }
    EXPECT_GT(lo, 0.1) << p;
    EXPECT_LT(hi, 10.0) << p;
  }
}

TEST(Norms, Bmo) {
  const auto g = make_grid(1, 2, 5);
  EXPECT_LE(bmo_martingale(constant(g, 1.0)), 1e-14);
  const auto h = haar_function(g, {0, 0, 1});
  EXPECT_NEAR(bmo_martingale(h), 1.0, 1e-14);
  EXPECT_NEAR(bmo_martingale(cd(3, 4) * h), 5.0, 1e-13);
}

TEST(Norms, MeanOscillation) {
  const auto g = make_grid(1, 2, 4);
  const auto root = root_cube(g);
  EXPECT_LE(mo1(constant(g, 7.0), root), 1e-14);
  EXPECT_LE(mo2(constant(g, 7.0), root), 1e-14);
  const auto h = haar_function(g, {0, 0, 1});
  EXPECT_NEAR(mo1(h, root), 1.0, 1e-14);
  EXPECT_NEAR(mo2(h, root), 1.0, 1e-14);
  const auto ind = sample(g, [](std::span<const double> x) { return cd(x[0] < 0.5 ? 1.0 : 0.0); });
  EXPECT_NEAR(mo1(ind, root), 0.5, 1e-14);
  EXPECT_NEAR(mo2(ind, root), 0.5, 1e-14);
}

// h^1 of the unit interval: only cubes straddling 1/2 oscillate
TEST(Norms, WeakBesovEnumeration) {
  const int L = 4;
  const auto fam = adjacent_family(1, L);
  const auto b = haar_function(fam.members[0], {0, 0, 1});
  EXPECT_LE(weak_besov(constant(fam.members[0], 1.0), fam, {1, kInf}), 1e-14);
  double expect = 0.0;
  for (const auto& gp : fam.members) {
    std::vector<double> vals;
    for (int k = 0; k < L; ++k)
      for (std::size_t q = 0; q < gp->cube_count(k); ++q) {
        const auto Q = make_cube(gp, k, q);
        const auto leaves = gp->leaves_of(k, q);
        double plus = 0;
        for (auto x : leaves) plus += b.values[x].real() > 0;
        const double f = plus / static_cast<double>(leaves.size());
        // values are +-1, so MO1 = 4 f (1 - f)
        vals.push_back(4 * f * (1 - f));
        EXPECT_NEAR(mo1(rebind(b, gp), Q), 4 * f * (1 - f), 1e-14);
      }
    std::sort(vals.rbegin(), vals.rend());
    double best = 0.0;
    for (std::size_t k = 0; k < vals.size(); ++k) best = std::max(best, static_cast<double>(k + 1) * vals[k]);
    expect += best;
  }
  EXPECT_NEAR(weak_besov(b, fam, {1, kInf}), expect, 1e-12);
}

TEST(Norms, Mo2DominatedByMo1) {
  const auto fam = adjacent_family(1, 6);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    auto rng = keyed_engine(15, t);
    const auto b = random_symbol(fam.members[0], rng);
    worst = std::max(worst, weak_besov(b, fam, {1, kInf}, Oscillation::mo2) / weak_besov(b, fam, {1, kInf}));
  }
  EXPECT_GT(worst, 0.0);
  EXPECT_LT(worst, 10.0);
}

TEST(Norms, BesovContinuousConstantAndMonotone) {
  const auto g = make_grid(1, 2, 8);
  EXPECT_EQ(besov_continuous(constant(g, 3.0), 2, 1.0 / 64), 0.0);
  auto rng = keyed_engine(16, 0);
  const auto b = random_symbol(g, rng);
  const auto prof = besov_continuous_profile(b, {2}, {1.0 / 8, 1.0 / 32, 1.0 / 128});
  EXPECT_LE(prof[0][0], prof[0][1]);
  EXPECT_LE(prof[0][1], prof[0][2]);
}

TEST(Norms, BesovContinuousDilation) {
  auto f = [](double t) { return cd(std::sin(5 * t) + t * t); };
  for (int L : {6, 8}) {
    const auto g1 = make_grid(1, 2, L);
    const auto g2 = make_grid(1, 2, L, Rat(1, 2));
    const auto b1 = sample(g1, [&](std::span<const double> x) { return f(x[0]); });
    const auto b2 = sample(g2, [&](std::span<const double> x) { return f(2 * x[0]); });
    for (double p : {2.0, 3.0}) {
      const double v1 = besov_continuous(b1, p, 1.0 / 16), v2 = besov_continuous(b2, p, 1.0 / 32);
      EXPECT_NEAR(v2 / v1, 1.0, 0.05);
    }
  }
}

// hat on [0,2]: D(t) = int |b(x+t)-b(x)|^2 dx is integrated piecewise, then 2 int D(t)/t^2 dt
TEST(Norms, BesovContinuousHatOracle) {
  const double eps = 1.0 / 32;
  auto hat = [](double x) { return 1.0 - std::abs(x - 1.0); };
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::gauss_kronrod;
  auto D = [&](double t) {
    std::vector<double> cuts{0.0, 2.0 - t};
    for (double c : {1.0 - t, 1.0})
      if (c > 0 && c < 2 - t) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      s += gauss<double, 10>::integrate([&](double x) { return std::pow(hat(x + t) - hat(x), 2); }, cuts[i], cuts[i + 1]);
    return s;
  };
  auto integrand = [&](double t) { return D(t) / (t * t); };
  const double oracle = std::sqrt(2 * (gauss_kronrod<double, 31>::integrate(integrand, eps, 1.0, 15, 1e-13) +
                                       gauss_kronrod<double, 31>::integrate(integrand, 1.0, 2.0, 15, 1e-13)));
  const auto g = make_grid(1, 2, 10, Rat(2));
  const auto b = sample(g, [&](std::span<const double> x) { return cd(hat(x[0])); });
  EXPECT_NEAR(besov_continuous(b, 2, eps) / oracle, 1.0, 0.02);
}

// R x R integral of a bump inside [0,1) equals the window pair sum plus the pairs with one
// point outside, which integrate to 2 sum |b(x)|^p (1/x + 1/(1-x)) h
TEST(Norms, BesovRadialAgainstLeafPairs) {
  const double c = 0.5, R = 0.25;
  auto f = [&](std::span<const double> x) { return cd(bump(std::abs(x[0] - c) / R)); };
  const auto g = make_grid(1, 2, 11);
  const auto b = sample(g, f);
  const double h = g->leaf_measure();
  const std::vector<double> eps{1.0 / 8, 1.0 / 16};
  for (double p : {2.0, 3.0}) {
    double outside = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const double x = g->leaf_center(i)[0];
      outside += 2 * std::pow(std::abs(b.values[i]), p) * (1 / x + 1 / (1 - x)) * h;
    }
    const auto win = besov_continuous_integral(b, {p}, eps);
    const auto rad = besov_integral_radial(f, 1, {c}, R, {p}, eps, 512);
    for (std::size_t e = 0; e < eps.size(); ++e) EXPECT_NEAR((win[0][e] + outside) / rad[0][e], 1.0, 2e-3) << p;
  }
}

TEST(Norms, Sobolev) {
  const auto g = make_grid(1, 2, 6);
  EXPECT_LE(sobolev_seminorm(constant(g, 1.0), 2), 1e-14);
  for (double p : {1.0, 2.0, 3.0}) {
    EXPECT_NEAR(sobolev_seminorm(linear(g, 1.0), p), 1.0, 1e-12);
    EXPECT_NEAR(sobolev_seminorm(linear(g, 2.0), p), 2.0, 1e-12);
  }
  const auto g2 = make_grid(2, 2, 4);
  EXPECT_NEAR(sobolev_seminorm(linear(g2, 1.0), 2), 1.0, 1e-12);
}
