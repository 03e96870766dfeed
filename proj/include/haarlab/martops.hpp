#pragma once

#include "haarlab/haar.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace haarlab {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Matrix acting on leaf value vectors. The leaf measure is uniform, so the
// measure-weighted adjoint is the plain conjugate transpose.
struct DenseOperator {
  GridPtr grid;
  Mat m;
  // provenance marker checked by block_extract
  std::string tag;

  DenseOperator adjoint() const { return {grid, m.adjoint(), {}}; }
  SampledFunction apply(const SampledFunction& f) const;
};

DenseOperator identity(const GridPtr& g);
DenseOperator zero_operator(const GridPtr& g);
DenseOperator operator+(const DenseOperator& a, const DenseOperator& b);
DenseOperator operator-(const DenseOperator& a, const DenseOperator& b);
DenseOperator operator*(const DenseOperator& a, const DenseOperator& b);
DenseOperator operator*(cd s, const DenseOperator& a);

DenseOperator multiplier(const SampledFunction& b);
DenseOperator expectation_operator(const GridPtr& g, int k);
DenseOperator difference_operator(const GridPtr& g, int k);

// f -> sum_k d_k b * E_{k-1} f
DenseOperator paraproduct(const SampledFunction& b);
// same operator assembled from sum <h,b> <1_I/|I|, f> h
DenseOperator paraproduct_haar(const SampledFunction& b);
// f -> sum_k E_{k-1}(conj(d_k b) d_k f)
DenseOperator paraproduct_adjoint(const SampledFunction& b);
// f -> sum_k d_k b * d_k f
DenseOperator lambda(const SampledFunction& b);
// f -> sum_k E_{k-1} b * d_k f
DenseOperator remainder(const SampledFunction& b);
// f -> sum_k d_k a * sum_{j<k} d_j b * d_j f
DenseOperator psi(const SampledFunction& a, const SampledFunction& b);
DenseOperator commutator(const DenseOperator& A, const DenseOperator& B);
DenseOperator expectation_zero_correction(const SampledFunction& b);  // M_{E0 b} E0

struct ShiftEntry {
  int k_level = 0;
  std::size_t K = 0;
  std::size_t I = 0;  // cube at level k_level + i
  std::size_t J = 0;  // cube at level k_level + j
  int xi = 1;
  int eta = 1;
  cd a = 0.0;
};

struct ShiftCoefficients {
  GridPtr grid;
  int i = 0;
  int j = 0;
  std::vector<ShiftEntry> entries;
};

// |a| = sqrt(|I||J|)/|K| with uniform phase for every admissible (K, I, J, xi, eta)
ShiftCoefficients shift_max_random(const GridPtr& g, int i, int j, std::mt19937_64& rng);
// i = j = 0 and a_{KKK}^{xi eta} = delta
ShiftCoefficients shift_haar_delta(const GridPtr& g);
double shift_coefficient_bound(const Grid& g, const ShiftEntry& e, int i, int j);

DenseOperator dyadic_shift(const ShiftCoefficients& c);
double shift_weight_bound(int i, int j, int n, double alpha);

// Orthonormal wavelet columns sqrt(leaf measure) * h, for all cubes at `level`
// below `K` (or the whole level if K_level < 0), every branch.
struct WaveletBasis {
  std::vector<WaveletIndex> index;
  Mat columns;
};
WaveletBasis wavelet_basis(const GridPtr& g, int K_level, std::size_t K, int depth);
// all wavelets plus the normalized constant, as a unitary matrix
WaveletBasis full_wavelet_basis(const GridPtr& g);

inline constexpr const char* kShiftRemainderTag = "shift_remainder_commutator";
// Phi = [S^{ij}, R_b], tagged for block_extract
DenseOperator shift_remainder_commutator(const ShiftCoefficients& c, const SampledFunction& b);

// B_K^* B_K in the basis {H_I : I in K at depth i} for Phi = [S^{ij}, R_b]
Mat block_extract(const DenseOperator& phi, int K_level, std::size_t K, int depth);

struct BlockReport {
  double total_mass = 0.0;       // sum |G|^2 over all entries
  double cross_mass = 0.0;       // entries outside the declared blocks
  double trace_total = 0.0;      // trace of Phi^* Phi
  double trace_blocks = 0.0;     // sum of block traces
  std::vector<Mat> blocks;
};
// Phi^* Phi in the full wavelet basis, split along the K-blocks at depth i
BlockReport block_structure(const DenseOperator& phi, int i, int j);

}  // namespace haarlab
