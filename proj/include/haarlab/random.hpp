#pragma once

#include "haarlab/haar.hpp"

#include <cstdint>
#include <random>

namespace haarlab {

// Generator keyed by (seed, stream, trial); independent of how trials are scheduled.
std::mt19937_64 keyed_engine(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream = 0);

cd complex_gaussian(std::mt19937_64& rng);

// Haar coefficients i.i.d. complex Gaussian scaled by |I|^s, plus a Gaussian top average,
// synthesized to leaf values.
SampledFunction random_symbol(const GridPtr& g, std::mt19937_64& rng, double s = 0.5, bool with_mean = true);

SampledFunction random_function(const GridPtr& g, std::mt19937_64& rng);

}  // namespace haarlab
