#include "haarlab/errors.hpp"
#include "haarlab/kernels.hpp"
#include "haarlab/norms.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <numbers>

using namespace haarlab;
using std::numbers::pi;

TEST(Kernels, StandardEstimates) {
  const auto h = standard_estimate_check(hilbert_kernel(), 20000, 1);
  EXPECT_TRUE(h.pass);
  EXPECT_LE(h.size_ratio, 1 / pi + 1e-12);
  EXPECT_TRUE(standard_estimate_check(zero_kernel(1), 1000, 2).pass);
  EXPECT_TRUE(standard_estimate_check(riesz_kernel(2, 0), 20000, 3).pass);
  EXPECT_TRUE(standard_estimate_check(homogeneous_kernel(2), 20000, 4).pass);
  const auto wrong = standard_estimate_check(power_kernel(1, 0.5), 20000, 5);
  EXPECT_FALSE(wrong.pass);
  EXPECT_GT(wrong.size_ratio, 10.0);
}

TEST(Kernels, Witness) {
  const Point y{0.0};
  const auto x = nondegenerate_witness(hilbert_kernel(), y, 2.0);
  EXPECT_NEAR(std::abs(x[0]), 2.0, 1e-12);
  EXPECT_NEAR(std::abs(evaluate(hilbert_kernel(), x, y)), 1 / (2 * pi), 1e-15);
  EXPECT_THROW(nondegenerate_witness(zero_kernel(1), y, 1.0), Error);
  const Point y2{0.0, 0.0};
  const auto K = riesz_kernel(2, 0);
  const auto x2 = nondegenerate_witness(K, y2, 1.0);
  EXPECT_NEAR(std::abs(x2[0]), 1.0, 1e-9);
  EXPECT_NEAR(x2[1], 0.0, 1e-9);
  EXPECT_NEAR(std::abs(evaluate(K, x2, y2)), std::tgamma(1.5) / std::pow(pi, 1.5), 1e-12);
}

TEST(Kernels, BallPairExamples) {
  const Point x0{0.0};
  const auto bp = ball_pair(hilbert_kernel(), x0, 1.0, 10.0);
  EXPECT_NEAR(bp.y0[0], 10.0, 1e-12);
  EXPECT_NEAR(bp.normalized, 1 / pi, 1e-14);
  const Point z{0.0, 0.0};
  const auto rp = ball_pair(riesz_kernel(2, 0), z, 1.0, 16.0);
  EXPECT_NEAR(std::abs(rp.y0[0]), 16.0, 1e-9);
  EXPECT_NEAR(rp.y0[1], 0.0, 1e-9);
}

// the relative oscillation decays like 1/A, within a factor 4 over the range
TEST(Kernels, BallPairDecay) {
  for (const auto& K : {hilbert_kernel(), riesz_kernel(2, 0), riesz_kernel(2, 1), homogeneous_kernel(2)}) {
    const Point x0(static_cast<std::size_t>(K.n), 0.0);
    double lo = 1e300, hi = 0.0, prev_rho = 1e300;
    for (double A : {8.0, 16.0, 32.0, 64.0}) {
      const auto bp = ball_pair(K, x0, 1.0, A);
      const double scaled = bp.relative * std::pow(A, K.alpha);
      lo = std::min(lo, scaled);
      hi = std::max(hi, scaled);
      EXPECT_LE(bp.rho, prev_rho * (1 + 1e-12)) << K.preset;
      prev_rho = bp.rho;
    }
    EXPECT_LE(hi, 4 * lo) << K.preset;
  }
}

TEST(Kernels, DiscretizeStructure) {
  const auto g = make_grid(1, 2, 6);
  const auto H = discretize(hilbert_kernel(), g);
  EXPECT_LE((H.m + H.m.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(discretize(zero_kernel(1), g).m.cwiseAbs().maxCoeff(), 0.0);
  // odd symmetry about the middle cell of [-1, 1)
  const auto s = make_grid(1, 3, 4, Rat(2), {Rat(-1)});
  const auto one = discretize(hilbert_kernel(), s).apply(constant(s, 1.0));
  const std::size_t mid = s->leaf_count() / 2;
  EXPECT_NEAR(s->leaf_center(mid)[0], 0.0, 1e-15);
  EXPECT_NEAR(std::abs(one.values[mid]), 0.0, 1e-13);
}

// Hf(x) = (1/pi)[ int (f(y) - f(x))/(x - y) dy + f(x) log(x/(1-x)) ] over [0, 1)
TEST(Kernels, DiscretizationConsistency) {
  auto f = [](double y) {
    const double t = std::abs(y - 0.45) / 0.3;
    return t < 1 ? std::exp(1 - 1 / (1 - t * t)) : 0.0;
  };
  using boost::math::quadrature::gauss_kronrod;
  std::vector<double> err;
  for (int L : {6, 8, 10}) {
    const auto g = make_grid(1, 2, L);
    const auto b = sample(g, [&](std::span<const double> p) { return cd(f(p[0])); });
    const auto out = discretize(hilbert_kernel(), g).apply(b);
    const double xl[1] = {0.4};
    const auto leaf = cube_at(g, xl, L).index();
    const double x = g->leaf_center(leaf)[0];
    auto reg = [&](double y) { return y == x ? 0.0 : (f(y) - f(x)) / (x - y); };
    const double oracle = (gauss_kronrod<double, 61>::integrate(reg, 0.0, x, 20, 1e-14) +
                           gauss_kronrod<double, 61>::integrate(reg, x, 1.0, 20, 1e-14) + f(x) * std::log(x / (1 - x))) /
                          pi;
    err.push_back(std::abs(out.values[leaf].real() - oracle));
  }
  EXPECT_GE(err[0] / err[1], 3.0);
  EXPECT_GE(err[1] / err[2], 3.0);
}

TEST(Kernels, CommutatorRankOne) {
  const auto g = make_grid(1, 2, 8);
  EXPECT_LE(sio_commutator(hilbert_kernel(), constant(g, 2.0)).m.cwiseAbs().maxCoeff(), 1e-15);
  const auto b = sample(g, [](std::span<const double> x) { return cd(x[0]); });
  const auto C = sio_commutator(hilbert_kernel(), b);
  const double h = g->leaf_measure();
  for (Eigen::Index i = 0; i < C.m.rows(); ++i)
    for (Eigen::Index j = 0; j < C.m.cols(); ++j) EXPECT_NEAR(std::abs(C.m(i, j)), i == j ? 0.0 : h / pi, 1e-14);
  const auto s = singular_values(C);
  EXPECT_NEAR(s[0], 1 / pi, 0.02 / pi);
}

TEST(Kernels, Presets) {
  EXPECT_EQ(kernel_by_name("riesz_2", 2).component, 1);
  EXPECT_THROW(kernel_by_name("nope", 1), Error);
  EXPECT_THROW(riesz_kernel(2, 2), Error);
}
