#pragma once

#include <vector>

#include "nmfpool/matrix.hpp"
#include "nmfpool/nmf.hpp"

namespace nmfpool {

// Learnable weight of one graph convolution, with its gradient accumulator.
struct GcParams {
  DenseMatrix theta;       // d_in x d_out
  DenseMatrix grad_theta;  // same shape
};

// Chebyshev filter coefficients, one matrix per polynomial order.
struct ChebParams {
  std::vector<DenseMatrix> thetas;       // K matrices, d_in x d_out
  std::vector<DenseMatrix> grad_thetas;  // same shapes
};

struct GcCache {
  DenseMatrix a_norm;
  DenseMatrix z_in;
  DenseMatrix pre;  // a_norm * z * theta, before ReLU
};

struct ChebCache {
  std::vector<DenseMatrix> poly;   // T_k(L_hat), k = 0..K-1
  std::vector<DenseMatrix> terms;  // T_k(L_hat) * X
  DenseMatrix pre;
};

// Record of one pooling application; S is the assignment operator H^T.
struct PoolTrace {
  DenseMatrix s;      // n x k_effective
  DenseMatrix a_in;   // n x n
  DenseMatrix a_out;  // k_effective x k_effective
  NmfFactors nmf;
  int k_requested = 0;
  int k_effective = 0;
};

struct ScaledLaplacianResult {
  DenseMatrix l_hat;
  double lambda_max = 0.0;
  bool zero_graph = false;  // A was all-zero; l_hat is -I
};

struct GcForward {
  DenseMatrix z_out;
  GcCache cache;
};

struct GcBackward {
  DenseMatrix d_z;
};

// z_out = ReLU(a_norm * z * theta)
GcForward gc_forward(const DenseMatrix& a_norm, const DenseMatrix& z, const GcParams& p);

// Accumulates into p.grad_theta; returns gradient w.r.t. z.
GcBackward gc_backward(const GcCache& cache, const DenseMatrix& d_out, GcParams& p);

// 2 (D - A) / lambda_max - I, lambda_max estimated by power iteration.
ScaledLaplacianResult scaled_laplacian(const DenseMatrix& a);

struct ChebForward {
  DenseMatrix z_out;
  ChebCache cache;
};

// z_out = ReLU(sum_k T_k(l_hat) x theta_k), Chebyshev recurrence on the terms.
ChebForward cheb_forward(const DenseMatrix& l_hat, const DenseMatrix& x,
                         const ChebParams& p);

DenseMatrix cheb_backward(const ChebCache& cache, const DenseMatrix& d_out,
                          ChebParams& p);

struct PoolForward {
  DenseMatrix a_next;  // k' x k', symmetrized
  DenseMatrix z_next;  // k' x d
  PoolTrace trace;
};

// Factorizes a with k clamped to min(k, max(1, n-1)), forms S = H^T and
// coarsens: z' = S^T z, a' = S^T a S.
PoolForward nmfpool_forward(const DenseMatrix& a, const DenseMatrix& z, int k,
                            const NmfConfig& cfg);

// S is a constant linear operator during backprop; d_z = S * d_z_next.
DenseMatrix nmfpool_backward(const PoolTrace& trace, const DenseMatrix& d_z_next);

// Column means, 1 x d.
DenseMatrix readout_mean(const DenseMatrix& z);
DenseMatrix readout_backward(std::size_t n, const DenseMatrix& d_out);

}  // namespace nmfpool
