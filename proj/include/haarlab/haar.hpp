#pragma once

#include "haarlab/grid.hpp"

#include <complex>
#include <functional>
#include <vector>

namespace haarlab {

using cd = std::complex<double>;

// Leaf values in the common (unshifted) leaf order of the grid's window.
struct SampledFunction {
  GridPtr grid;
  std::vector<cd> values;

  std::size_t size() const { return values.size(); }
};

SampledFunction zeros(const GridPtr& g);
SampledFunction constant(const GridPtr& g, cd c);
// samples f at leaf centers
SampledFunction sample(const GridPtr& g, const std::function<cd(std::span<const double>)>& f);
// same values viewed through another grid with the same leaf partition
SampledFunction rebind(const SampledFunction& f, const GridPtr& g);

// <f, g> = sum conj(f) g * leaf measure
cd inner(const SampledFunction& f, const SampledFunction& g);
double l2_norm(const SampledFunction& f);
double lp_norm(const SampledFunction& f, double p);
SampledFunction operator+(const SampledFunction& a, const SampledFunction& b);
SampledFunction operator-(const SampledFunction& a, const SampledFunction& b);
SampledFunction operator*(cd s, const SampledFunction& a);
SampledFunction pointwise(const SampledFunction& a, const SampledFunction& b);

// branch is 1..d-1 (n = 1, roots of unity) or the bit pattern eta in 1..2^n-1 (n >= 2,
// axis 0 in the most significant bit); branch == children() denotes |I|^{-1/2} 1_I
struct WaveletIndex {
  int level = 0;
  std::size_t cube = 0;
  int branch = 1;
};

// unimodular value of sqrt|I| h_I^branch on child slot j
cd child_pattern(const Grid& g, int branch, int j);

SampledFunction haar_function(const GridPtr& g, const WaveletIndex& w);

struct HaarCoefficients {
  GridPtr grid;
  // coef[k][cube * branches + (branch - 1)] for levels k = 0..L-1
  std::vector<std::vector<cd>> coef;
  // level-0 average per top cell (the window is a single top cell)
  std::vector<cd> avg;

  cd& at(const WaveletIndex& w);
  cd at(const WaveletIndex& w) const;
};

HaarCoefficients zero_coefficients(const GridPtr& g);
HaarCoefficients analyze(const SampledFunction& f);
SampledFunction synthesize(const HaarCoefficients& c);

// averages of f over the level-k cubes
std::vector<cd> cube_averages(const SampledFunction& f, int k);
SampledFunction expectation(const SampledFunction& f, int k);
SampledFunction difference(const SampledFunction& f, int k);

struct ProductIndex {
  int branch = 0;
  double scale = 0.0;
};

// h_I^i h_I^j = mu^{-1/2} h_I^{r}; r in 1..d with d the constant branch.
// For the n >= 2 sign system r = i xor j, with 0 reported as children().
ProductIndex product_index(int i, int j, int d, double mu);
ProductIndex product_index(const Grid& g, int i, int j, double mu);

}  // namespace haarlab
