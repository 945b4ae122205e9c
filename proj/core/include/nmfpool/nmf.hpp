#pragma once

#include <cstdint>

#include "nmfpool/matrix.hpp"

namespace nmfpool {

// Non-negative factor pair approximating A (n x m) as W (n x k) * H (k x m).
struct NmfFactors {
  DenseMatrix w;
  DenseMatrix h;
  double final_objective = 0.0;
  int iterations_run = 0;
  bool converged = false;
};

struct NmfConfig {
  int k = 1;
  int max_iters = 200;
  double rel_tol = 1e-4;
  std::uint64_t seed = 0;
};

// Frobenius norm of A - WH.
double nmf_objective(const DenseMatrix& a, const NmfFactors& f);

// One Lee-Seung F-norm update pair: H first, then W with the updated H.
// Non-increasing objective, non-negativity preserved.
NmfFactors multiplicative_step(const DenseMatrix& a, const NmfFactors& f);

// Seeded uniform init, multiplicative updates until the relative objective
// change falls below cfg.rel_tol or cfg.max_iters is reached.
NmfFactors factorize(const DenseMatrix& a, const NmfConfig& cfg);

}  // namespace nmfpool
