#include "haarlab/random.hpp"

#include <cmath>

namespace haarlab {

std::mt19937_64 keyed_engine(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

cd complex_gaussian(std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  const double re = nd(rng);
  const double im = nd(rng);
  return {re, im};
}

SampledFunction random_symbol(const GridPtr& g, std::mt19937_64& rng, double s, bool with_mean) {
  HaarCoefficients c = zero_coefficients(g);
  for (int k = 0; k < g->L(); ++k) {
    const double scale = std::pow(g->cube_measure(k), s);
    for (auto& v : c.coef[k]) v = scale * complex_gaussian(rng);
  }
  for (auto& v : c.avg) v = with_mean ? complex_gaussian(rng) : cd(0.0);
  return synthesize(c);
}

SampledFunction random_function(const GridPtr& g, std::mt19937_64& rng) {
  SampledFunction f = zeros(g);
  for (auto& v : f.values) v = complex_gaussian(rng);
  return f;
}

}  // namespace haarlab
