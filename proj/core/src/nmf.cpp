#include "nmfpool/nmf.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace nmfpool {

namespace {

void require_non_negative(const DenseMatrix& m, const char* what) {
  for (double v : m.values()) {
    if (v < 0.0) {
      throw std::invalid_argument(std::string("nmf: negative entry in ") + what);
    }
  }
}

}  // namespace

double nmf_objective(const DenseMatrix& a, const NmfFactors& f) {
  return frobenius_norm(sub(a, matmul(f.w, f.h)));
}

NmfFactors multiplicative_step(const DenseMatrix& a, const NmfFactors& f) {
  require_non_negative(a, "A");
  require_non_negative(f.w, "W");
  require_non_negative(f.h, "H");

  NmfFactors out = f;
  const DenseMatrix wt = transpose(out.w);
  out.h = hadamard(out.h, div_guarded(matmul(wt, a), matmul(matmul(wt, out.w), out.h)));
  const DenseMatrix ht = transpose(out.h);
  out.w = hadamard(out.w, div_guarded(matmul(a, ht), matmul(out.w, matmul(out.h, ht))));
  out.final_objective = nmf_objective(a, out);
  return out;
}

NmfFactors factorize(const DenseMatrix& a, const NmfConfig& cfg) {
  require_non_negative(a, "A");
  if (!all_finite(a)) throw std::invalid_argument("nmf: non-finite input");
  if (cfg.k < 1) throw std::invalid_argument("nmf: k must be >= 1");

  const std::size_t n = a.rows(), m = a.cols();
  const std::size_t k = static_cast<std::size_t>(cfg.k);

  double mean = 0.0;
  for (double v : a.values()) mean += v;
  mean /= static_cast<double>(a.size());
  const double scale = std::sqrt(std::max(mean, 1e-12) / static_cast<double>(cfg.k));

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto draw = [&] { return scale * std::max(unif(rng), 1e-12); };

  NmfFactors f;
  f.w = DenseMatrix(n, k);
  f.h = DenseMatrix(k, m);
  for (double& v : f.w.values()) v = draw();
  for (double& v : f.h.values()) v = draw();

  double prev = nmf_objective(a, f);
  for (int it = 0; it < cfg.max_iters; ++it) {
    f = multiplicative_step(a, f);
    f.iterations_run = it + 1;
    const double cur = f.final_objective;
    if (std::abs(prev - cur) / std::max(prev, kDivEpsilon) < cfg.rel_tol) {
      f.converged = true;
      break;
    }
    prev = cur;
  }
  f.final_objective = nmf_objective(a, f);
  return f;
}

}  // namespace nmfpool
