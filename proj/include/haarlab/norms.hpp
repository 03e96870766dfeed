#pragma once

#include "haarlab/grid.hpp"
#include "haarlab/haar.hpp"
#include "haarlab/martops.hpp"

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace haarlab {

struct LorentzIndex {
  double p = 2.0;
  double q = 2.0;  // +infinity for the weak space
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// q < inf: (sum (k^{1/p-1/q} a*_k)^q)^{1/q};  q = inf: sup k^{1/p} a*_k
double lorentz_norm(std::vector<double> a, const LorentzIndex& idx);

// nonincreasing singular values
std::vector<double> singular_values(const Mat& m);
std::vector<double> singular_values(const DenseOperator& op);
double schatten(const DenseOperator& op, const LorentzIndex& idx);
double schatten(const Mat& m, const LorentzIndex& idx);

// (sum_I sum_i |<h_I^i, b>|^p / |I|^{p/2})^{1/p}
double besov_martingale(const SampledFunction& b, double p);
// (sum_{k=1..L} d^k ||d_k b||_p^p)^{1/p}
double besov_martingale_diff(const SampledFunction& b, double p);
// (sum_{k=0..L-1} d^k ||b - E_k b||_p^p)^{1/p}
double besov_martingale_tail(const SampledFunction& b, double p);
// sup_n || E_n sum_{k>n} |d_k b|^2 ||_inf^{1/2}
double bmo_martingale(const SampledFunction& b);

double mo1(const SampledFunction& b, const Cube& Q);
double mo2(const SampledFunction& b, const Cube& Q);

enum class Oscillation { mo1, mo2 };
// sum over members of the Lorentz norm of the oscillations over cubes of levels 0..L-1
double weak_besov(const SampledFunction& b, const GridFamily& fam, const LorentzIndex& idx,
                  Oscillation kind = Oscillation::mo1);
// sum over members of besov_martingale on that member
double besov_martingale_family(const SampledFunction& b, const GridFamily& fam, double p);

// midpoint rule over leaf pairs with center distance >= epsilon
double besov_continuous(const SampledFunction& b, double p, double epsilon);
// values[i][t] for p = ps[i], epsilon = eps[t], in one pass over the pairs
std::vector<std::vector<double>> besov_continuous_profile(const SampledFunction& b, const std::vector<double>& ps,
                                                          const std::vector<double>& eps);
// raw double integral (no 1/p root) for the same quadrature
std::vector<std::vector<double>> besov_continuous_integral(const SampledFunction& b, const std::vector<double>& ps,
                                                           const std::vector<double>& eps);

// The same double integral over R^n x R^n (n = 1, 2) for b known pointwise and vanishing
// outside [center - R, center + R]^n: raw values (no 1/p root) for p = ps[i], epsilon = eps[t].
// Gauss-Legendre in |x - y| between cutoffs, trapezoid over directions, midpoint in x on an
// M^n lattice over the enlarged support cube, closed-form tail beyond the support diameter.
std::vector<std::vector<double>> besov_integral_radial(const std::function<cd(std::span<const double>)>& b, int n,
                                                       const std::vector<double>& center, double R,
                                                       const std::vector<double>& ps, const std::vector<double>& eps,
                                                       int M = 256, int directions = 64);

// ||grad b||_p with centered differences on the leaf lattice, one-sided at the edges
double sobolev_seminorm(const SampledFunction& b, double p);

}  // namespace haarlab
