#pragma once

#include "haarlab/grid.hpp"
#include "haarlab/haar.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace haarlab {

struct Atom {
  cd z;
  double w = 0.0;
};

struct WeightedPointSet {
  std::vector<Atom> atoms;
  double total() const;
};

// leaf values of b on Q, weighted by leaf measure
WeightedPointSet point_set(const SampledFunction& b, const Cube& Q);

struct OrthoLinePair {
  cd center;
  double theta = 0.0;  // [0, pi/2)
};

struct HalvingResult {
  double offset = 0.0;
  double lower = 0.0;  // mass of {proj <= offset}
  double upper = 0.0;  // mass of {proj >= offset}
};

struct QuarterSplit {
  // base line l = {Re z = alpha}; ray l_1 = {Im z = alpha1, Re z <= alpha},
  // ray l_2 = {Im z = alpha2, Re z >= alpha}
  double alpha = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  // S1 = {Re <= a, Im <= a1}, S2 = {Re <= a, Im >= a1}, S3 = {Re >= a, Im <= a2}, S4 = {Re >= a, Im >= a2}
  std::array<double, 4> masses{};
};

struct MedianResult {
  OrthoLinePair pair;
  std::array<double, 4> masses{};
  double total = 0.0;
  bool certified = false;
  bool exact = false;  // certificate used exact arithmetic
  double slack = 0.0;  // tau of the double-precision certificate
  std::string route;
  // per atom, bit s set when the atom lies in closed quadrant T_{s+1}; taken from
  // the exact (possibly rounded) problem the pair was solved on
  std::vector<std::uint8_t> membership;
};

HalvingResult halving_line(const WeightedPointSet& P, double angle);
QuarterSplit quarter_partition(const WeightedPointSet& P);
MedianResult complex_median(const WeightedPointSet& P);
// closed quadrants T1..T4 counterclockwise from theta
// tau > 0 widens each closed half-plane by tau, for pairs solved on a rounded copy of P
std::array<double, 4> quadrant_masses(const WeightedPointSet& P, const OrthoLinePair& L, double tau = 0.0);
// all masses >= mu/16 - 1e-12 mu
bool certify(const WeightedPointSet& P, const OrthoLinePair& L, double tau = 0.0);

// Exhaustive candidate search; nullopt when no candidate pair is valid.
std::optional<MedianResult> median_oracle(const WeightedPointSet& P);

namespace exact {

using i128 = __int128;

struct IPoint {
  std::int64_t x = 0;
  std::int64_t y = 0;
  bool operator==(const IPoint&) const = default;
};

// coordinates z * 2^-coord_exp, weights w * 2^-weight_exp
struct ExactSet {
  std::vector<IPoint> z;
  std::vector<std::int64_t> w;
  std::int64_t total = 0;
  int coord_exp = 0;
  int weight_exp = 0;
};

inline constexpr std::int64_t kCoordBound = std::int64_t{1} << 24;

// nullopt unless every coordinate and weight is representable at the exact scales
std::optional<ExactSet> to_exact(const WeightedPointSet& P);
// nearest representable set (coordinates rounded, weights at least one unit)
ExactSet quantize(const WeightedPointSet& P);
// distance within which a rounded atom may sit on the far side of a line through its copy
double rounding_slack(const ExactSet& S);

// L1 = {q1 cross(r, z) = c1}, L2 = {q2 dot(r, z) = c2}; T1 = {dot >= , cross >=} and so on
struct Pair {
  i128 rx = 1, ry = 0;
  i128 c1 = 0, q1 = 1;
  i128 c2 = 0, q2 = 1;
};

std::array<i128, 4> quadrant_masses(const ExactSet& S, const Pair& L);
bool certified(const ExactSet& S, const Pair& L);

struct Halving {
  i128 offset = 0;
  i128 lower = 0;
  i128 upper = 0;
};
// projections dot((dx, dy), z)
Halving halving_line(const ExactSet& S, std::int64_t dx, std::int64_t dy);

struct Quarter {
  std::int64_t alpha = 0, alpha1 = 0, alpha2 = 0;
  std::array<i128, 4> masses{};
};
Quarter quarter_partition(const ExactSet& S);

struct Solution {
  Pair pair;
  std::string route;
};
// follows the constructive argument; falls back to the oracle only if every route fails
Solution complex_median(const ExactSet& S);
std::optional<Pair> oracle(const ExactSet& S);

// double-valued output pair, masses permuted to match theta in [0, pi/2)
MedianResult to_result(const ExactSet& S, const Pair& L, const std::string& route);

}  // namespace exact

}  // namespace haarlab
