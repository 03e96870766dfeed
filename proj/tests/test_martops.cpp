#include "haarlab/errors.hpp"
#include "haarlab/martops.hpp"
#include "haarlab/random.hpp"

#include <Eigen/SVD>
#include <gtest/gtest.h>

using namespace haarlab;

namespace {

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

SampledFunction real_part(const SampledFunction& f) {
  auto r = f;
  for (auto& v : r.values) v = v.real();
  return r;
}

double spectral_norm(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

TEST(Martops, Multiplier) {
  const auto g = make_grid(1, 3, 3);
  EXPECT_EQ(max_abs(multiplier(constant(g, 1.0)).m - identity(g).m), 0.0);
  auto rng = keyed_engine(1, 0);
  const auto b = random_function(g, rng), c = random_function(g, rng);
  EXPECT_LE(max_abs((multiplier(b) * multiplier(c)).m - multiplier(pointwise(b, c)).m), 1e-13);
  double mx = 0.0;
  for (auto v : b.values) mx = std::max(mx, std::abs(v));
  EXPECT_NEAR(spectral_norm(multiplier(b).m), mx, 1e-12);
  EXPECT_LE(max_abs(commutator(multiplier(b), multiplier(c)).m), 1e-14);
  EXPECT_LE(max_abs(commutator(multiplier(b), identity(g)).m), 0.0);
}

TEST(Martops, ParaproductExamples) {
  const auto g = make_grid(1, 2, 4);
  EXPECT_LE(max_abs(paraproduct(constant(g, 3.0)).m), 1e-14);
  auto rng = keyed_engine(2, 0);
  const auto b = random_function(g, rng);
  const auto lhs = paraproduct(b).apply(constant(g, 1.0));
  const auto rhs = b - expectation(b, 0);
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(std::abs(lhs.values[i] - rhs.values[i]), 0.0, 1e-13);
  const auto h = haar_function(g, {0, 0, 1});
  EXPECT_LE(l2_norm(paraproduct(h).apply(h)), 1e-14);
}

// the difference-operator form and the Haar-coefficient form are assembled independently
TEST(Martops, ParaproductTwoRoutes) {
  for (auto g : {make_grid(1, 2, 5), make_grid(1, 3, 3), make_grid(2, 2, 3)}) {
    auto rng = keyed_engine(4, 0);
    const auto b = random_symbol(g, rng);
    EXPECT_LE(max_abs(paraproduct(b).m - paraproduct_haar(b).m), 1e-12);
  }
}

TEST(Martops, ParaproductAdjoint) {
  const auto g = make_grid(1, 3, 3);
  for (int t = 0; t < 50; ++t) {
    auto rng = keyed_engine(5, t);
    const auto b = random_symbol(g, rng);
    EXPECT_LE(max_abs(paraproduct_adjoint(b).m - paraproduct(b).m.adjoint()), 1e-12);
  }
  EXPECT_LE(max_abs(paraproduct_adjoint(constant(g, 2.0)).m), 1e-14);
  auto rng = keyed_engine(5, 99);
  const auto b = random_symbol(g, rng);
  const auto c = analyze(b);
  const WaveletIndex w{1, 2, 1};
  const auto out = paraproduct_adjoint(b).apply(haar_function(g, w));
  const double mu = g->cube_measure(w.level);
  auto expect = zeros(g);
  for (auto leaf : g->leaves_of(w.level, w.cube)) expect.values[leaf] = std::conj(c.at(w)) / mu;
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_NEAR(std::abs(out.values[i] - expect.values[i]), 0.0, 1e-12);
}

TEST(Martops, LambdaExamples) {
  const auto g = make_grid(1, 2, 4);
  const auto h = haar_function(g, {0, 0, 1});
  const auto out = lambda(h).apply(h);
  for (auto v : out.values) EXPECT_NEAR(std::abs(v - 1.0), 0.0, 1e-14);
  EXPECT_LE(max_abs(lambda(constant(g, 5.0)).m), 1e-14);
}

// The adjoint of sum_k M_{d_k b} D_k is sum_k D_k M_{conj d_k b}; for real b this is not
// lambda(b) itself, because d_k b d_k f need not lie in the k-th difference slice.
TEST(Martops, LambdaAdjointForm) {
  const auto g = make_grid(1, 2, 4);
  auto rng = keyed_engine(6, 0);
  const auto b = real_part(random_symbol(g, rng));
  Mat adj = Mat::Zero(g->leaf_count(), g->leaf_count());
  for (int k = 1; k <= g->L(); ++k) {
    auto db = difference(b, k);
    for (auto& v : db.values) v = std::conj(v);
    adj += difference_operator(g, k).m * multiplier(db).m;
  }
  const Mat L = lambda(b).m;
  EXPECT_LE(max_abs(L.adjoint() - adj), 1e-12);
  EXPECT_GT(max_abs(L - L.adjoint()), 1e-3);
}

TEST(Martops, RemainderExamples) {
  const auto g = make_grid(1, 3, 3);
  const Mat expect = identity(g).m - expectation_operator(g, 0).m;
  EXPECT_LE(max_abs(remainder(constant(g, 1.0)).m - expect), 1e-13);
  const cd c(2, -3);
  EXPECT_LE(max_abs(remainder(constant(g, c)).m - c * expect), 1e-12);
}

TEST(Martops, PsiExamples) {
  const auto g = make_grid(1, 2, 4);
  auto rng = keyed_engine(7, 0);
  const auto b = random_symbol(g, rng);
  EXPECT_LE(max_abs(psi(constant(g, 2.0), b).m), 1e-14);
  EXPECT_LE(max_abs(psi(b, constant(g, 2.0)).m), 1e-14);
  const auto a = haar_function(g, {0, 0, 1});
  const auto f = haar_function(g, {1, 0, 1});
  EXPECT_LE(l2_norm(psi(a, f).apply(f)), 1e-14);
}

TEST(Martops, DecompositionIdentities) {
  for (auto g : {make_grid(1, 2, 5), make_grid(1, 3, 3), make_grid(2, 2, 3)}) {
    for (int t = 0; t < 5; ++t) {
      auto rng = keyed_engine(8, t);
      const auto a = random_symbol(g, rng), b = random_symbol(g, rng);
      const Mat lhs = paraproduct(b).m + lambda(b).m + remainder(b).m;
      const Mat rhs = multiplier(b).m - expectation_zero_correction(b).m;
      EXPECT_LE(max_abs(lhs - rhs), 1e-12);
      const auto pa = paraproduct(a);
      const Mat second = commutator(pa, remainder(b)).m + psi(a, b).m + (pa * paraproduct(b)).m +
                         (pa * expectation_zero_correction(b)).m;
      EXPECT_LE(max_abs(second), 1e-11);
    }
  }
}

TEST(Martops, ShiftHaarDeltaIsWaveletProjection) {
  const auto g = make_grid(1, 3, 3);
  const Mat expect = identity(g).m - expectation_operator(g, 0).m;
  EXPECT_LE(max_abs(dyadic_shift(shift_haar_delta(g)).m - expect), 1e-12);
  ShiftCoefficients z{g, 1, 1, {}};
  EXPECT_EQ(max_abs(dyadic_shift(z).m), 0.0);
}

TEST(Martops, ShiftContraction) {
  const auto g = make_grid(1, 2, 5);
  for (int t = 0; t < 100; ++t) {
    auto rng = keyed_engine(9, t);
    const int i = t % 3, j = (t / 3) % 3;
    const auto c = shift_max_random(g, i, j, rng);
    EXPECT_LE(spectral_norm(dyadic_shift(c).m), 1.0 + 1e-9) << "i=" << i << " j=" << j;
  }
}

TEST(Martops, ShiftBoundEnforced) {
  const auto g = make_grid(1, 2, 4);
  auto rng = keyed_engine(10, 0);
  auto c = shift_max_random(g, 1, 1, rng);
  c.entries[0].a *= 1.5;
  EXPECT_THROW(dyadic_shift(c), Error);
}

TEST(Martops, ShiftWeightBound) {
  EXPECT_DOUBLE_EQ(shift_weight_bound(0, 0, 1, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(shift_weight_bound(1, 1, 1, 1.0), 8.0);
  // partial sums over max(i, j) <= N; the shell at N has 2N + 1 terms
  double prev = 0.0;
  for (int N = 0; N <= 60; ++N) {
    double s = 0.0;
    for (int i = 0; i <= N; ++i)
      for (int j = 0; j <= N; ++j) s += shift_weight_bound(i, j, 1, 1.0);
    if (N >= 50) EXPECT_LE(s - prev, 1e-6);
    prev = s;
  }
}

TEST(Martops, BlockStructure) {
  const auto g = make_grid(1, 2, 5);
  auto rng = keyed_engine(11, 0);
  const auto c = shift_max_random(g, 1, 1, rng);
  const auto b = random_symbol(g, rng);
  const auto phi = shift_remainder_commutator(c, b);
  const auto r = block_structure(phi, 1, 1);
  EXPECT_NEAR(r.trace_blocks, r.trace_total, 1e-10 * std::max(1.0, r.trace_total));
  EXPECT_LE(r.cross_mass, 1e-20 * std::max(1.0, r.total_mass));
  const auto rc = block_structure(shift_remainder_commutator(c, constant(g, 2.0)), 1, 1);
  EXPECT_LE(rc.trace_total, 1e-24);
}
