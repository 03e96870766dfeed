#pragma once

#include "haarlab/grid.hpp"
#include "haarlab/haar.hpp"
#include "haarlab/martops.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace haarlab {

using Point = std::vector<double>;

// Omega on the unit sphere, for the homogeneous preset
using SphereFunction = std::function<cd(std::span<const double>)>;

struct KernelSpec {
  std::string preset;  // hilbert | riesz | homogeneous | zero | power
  int n = 1;
  int component = 0;   // riesz: K = c_n (x_j - y_j)/|x-y|^{n+1}
  double exponent = 0; // power: K = 1/|x-y|^exponent
  double alpha = 1.0;
  double C = 1.0;
  double c0 = 1.0;
  bool nondegenerate = true;
  SphereFunction omega;
};

KernelSpec hilbert_kernel();
KernelSpec riesz_kernel(int n, int component);
// Omega must be Lipschitz on the sphere; C and c0 are taken as declared
KernelSpec homogeneous_kernel(int n, SphereFunction omega, double C, double c0);
// n = 1: Omega = sign; n >= 2: Omega = cos(2 phi) in the first two coordinates
KernelSpec homogeneous_kernel(int n);
KernelSpec zero_kernel(int n);
// deliberately wrong decay, used to see the size check fail
KernelSpec power_kernel(int n, double exponent);
KernelSpec kernel_by_name(const std::string& name, int n);

cd evaluate(const KernelSpec& K, std::span<const double> x, std::span<const double> y);

struct EstimateReport {
  std::size_t samples = 0;
  double size_ratio = 0.0;    // max |K(x,y)| |x-y|^n
  double smooth_ratio = 0.0;  // max (|K(x,y)-K(x',y)| + |K(y,x)-K(y,x')|) |x-y|^{n+a} / |x-x'|^a
  bool pass = false;
};
EstimateReport standard_estimate_check(const KernelSpec& K, std::size_t samples, std::uint64_t seed);

// x with |x-y| >= r and |K(x,y)| >= 1/(c0 r^n)
Point nondegenerate_witness(const KernelSpec& K, std::span<const double> y, double r);

struct BallPair {
  Point y0;
  double distance = 0.0;
  double normalized = 0.0;   // |K(y0,x0)| (A r)^n
  double oscillation = 0.0;  // sup |K(y1,x1) - K(y0,x0)| A^{n+a} r^n over sampled balls
  double relative = 0.0;     // sup |K(y1,x1)/K(y0,x0) - 1|
  double rho = 0.0;          // sup |Im K~| / Re K~ after rotating K(y0,x0) to the positive axis
};
// accept: optional constraint on y0 (e.g. stay inside a window)
BallPair ball_pair(const KernelSpec& K, std::span<const double> x0, double r, double A,
                   const std::function<bool(std::span<const double>)>& accept = {});

// principal-value discretization on the unshifted leaf centers
DenseOperator discretize(const KernelSpec& K, const GridPtr& g);
DenseOperator sio_commutator(const KernelSpec& K, const SampledFunction& b);

}  // namespace haarlab
