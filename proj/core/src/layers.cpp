#include "nmfpool/layers.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace nmfpool {

GcForward gc_forward(const DenseMatrix& a_norm, const DenseMatrix& z,
                     const GcParams& p) {
  GcForward out;
  out.cache.a_norm = a_norm;
  out.cache.z_in = z;
  out.cache.pre = matmul(matmul(a_norm, z), p.theta);
  out.z_out = relu(out.cache.pre);
  return out;
}

GcBackward gc_backward(const GcCache& cache, const DenseMatrix& d_out, GcParams& p) {
  if (!d_out.same_shape(cache.pre)) {
    throw std::invalid_argument("gc_backward: cotangent shape " + d_out.shape_str() +
                                " does not match cache " + cache.pre.shape_str());
  }
  const DenseMatrix g = hadamard(d_out, relu_mask(cache.pre));
  const DenseMatrix az = matmul(cache.a_norm, cache.z_in);
  p.grad_theta = add(p.grad_theta, matmul(transpose(az), g));
  GcBackward back;
  back.d_z = matmul(transpose(cache.a_norm), matmul(g, transpose(p.theta)));
  return back;
}

ScaledLaplacianResult scaled_laplacian(const DenseMatrix& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("scaled_laplacian: square matrix required, got " +
                                a.shape_str());
  }
  const std::size_t n = a.rows();
  DenseMatrix lap(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      deg += a(i, j);
      lap(i, j) = -a(i, j);
    }
    lap(i, i) += deg;
  }

  // Power iteration; L is PSD so the dominant eigenvalue is lambda_max.
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  DenseMatrix v(n, 1);
  for (double& x : v.values()) x = unif(rng);
  double norm = frobenius_norm(v);
  if (norm > 0.0) v = scaled(v, 1.0 / norm);

  double lambda = 0.0;
  for (int it = 0; it < 100; ++it) {
    DenseMatrix lv = matmul(lap, v);
    const double lv_norm = frobenius_norm(lv);
    if (lv_norm == 0.0) {
      lambda = 0.0;
      break;
    }
    double est = 0.0;  // Rayleigh quotient v^T L v with unit v
    for (std::size_t i = 0; i < n; ++i) est += v(i, 0) * lv(i, 0);
    v = scaled(lv, 1.0 / lv_norm);
    if (it > 0 && std::abs(est - lambda) < 1e-7 * std::max(std::abs(est), 1.0)) {
      lambda = est;
      break;
    }
    lambda = est;
  }

  ScaledLaplacianResult res;
  res.lambda_max = lambda;
  if (lambda <= 0.0) {
    res.zero_graph = true;
    res.l_hat = scaled(DenseMatrix::identity(n), -1.0);
    return res;
  }
  res.l_hat = scaled(lap, 2.0 / lambda);
  for (std::size_t i = 0; i < n; ++i) res.l_hat(i, i) -= 1.0;
  return res;
}

ChebForward cheb_forward(const DenseMatrix& l_hat, const DenseMatrix& x,
                         const ChebParams& p) {
  if (p.thetas.empty()) throw std::invalid_argument("cheb_forward: K must be >= 1");
  const std::size_t kmax = p.thetas.size();

  ChebForward out;
  auto& poly = out.cache.poly;
  auto& terms = out.cache.terms;
  poly.push_back(DenseMatrix::identity(l_hat.rows()));
  terms.push_back(x);
  if (kmax >= 2) {
    poly.push_back(l_hat);
    terms.push_back(matmul(l_hat, x));
  }
  for (std::size_t k = 2; k < kmax; ++k) {
    poly.push_back(sub(scaled(matmul(l_hat, poly[k - 1]), 2.0), poly[k - 2]));
    terms.push_back(sub(scaled(matmul(l_hat, terms[k - 1]), 2.0), terms[k - 2]));
  }

  out.cache.pre = matmul(terms[0], p.thetas[0]);
  for (std::size_t k = 1; k < kmax; ++k) {
    out.cache.pre = add(out.cache.pre, matmul(terms[k], p.thetas[k]));
  }
  out.z_out = relu(out.cache.pre);
  return out;
}

DenseMatrix cheb_backward(const ChebCache& cache, const DenseMatrix& d_out,
                          ChebParams& p) {
  if (!d_out.same_shape(cache.pre)) {
    throw std::invalid_argument("cheb_backward: cotangent shape " + d_out.shape_str() +
                                " does not match cache " + cache.pre.shape_str());
  }
  const DenseMatrix g = hadamard(d_out, relu_mask(cache.pre));
  DenseMatrix d_x(cache.terms[0].rows(), cache.terms[0].cols());
  for (std::size_t k = 0; k < p.thetas.size(); ++k) {
    p.grad_thetas[k] = add(p.grad_thetas[k], matmul(transpose(cache.terms[k]), g));
    d_x = add(d_x, matmul(transpose(cache.poly[k]), matmul(g, transpose(p.thetas[k]))));
  }
  return d_x;
}

PoolForward nmfpool_forward(const DenseMatrix& a, const DenseMatrix& z, int k,
                            const NmfConfig& cfg) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("nmfpool_forward: square adjacency required, got " +
                                a.shape_str());
  }
  if (k < 1) throw std::invalid_argument("nmfpool_forward: k must be >= 1");

  const int n = static_cast<int>(a.rows());
  const int k_eff = std::min(k, std::max(1, n - 1));

  // Scrub tiny negative float residue before the non-negativity check.
  DenseMatrix a_clean = a;
  for (double& v : a_clean.values()) {
    if (v < 0.0 && v > -1e-12) v = 0.0;
  }

  NmfConfig run_cfg = cfg;
  run_cfg.k = k_eff;

  PoolForward out;
  out.trace.nmf = factorize(a_clean, run_cfg);
  out.trace.s = transpose(out.trace.nmf.h);  // n x k_eff
  out.trace.a_in = a_clean;
  out.trace.k_requested = k;
  out.trace.k_effective = k_eff;

  const DenseMatrix st = transpose(out.trace.s);
  out.z_next = matmul(st, z);
  DenseMatrix a_next = matmul(st, matmul(a_clean, out.trace.s));
  a_next = scaled(add(a_next, transpose(a_next)), 0.5);
  out.a_next = a_next;
  out.trace.a_out = a_next;
  return out;
}

DenseMatrix nmfpool_backward(const PoolTrace& trace, const DenseMatrix& d_z_next) {
  if (d_z_next.rows() != trace.s.cols()) {
    throw std::invalid_argument("nmfpool_backward: cotangent rows " +
                                d_z_next.shape_str() + " do not match assignment " +
                                trace.s.shape_str());
  }
  return matmul(trace.s, d_z_next);
}

DenseMatrix readout_mean(const DenseMatrix& z) {
  DenseMatrix out(1, z.cols());
  for (std::size_t j = 0; j < z.cols(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < z.rows(); ++i) sum += z(i, j);
    out(0, j) = sum / static_cast<double>(z.rows());
  }
  return out;
}

DenseMatrix readout_backward(std::size_t n, const DenseMatrix& d_out) {
  DenseMatrix out(n, d_out.cols());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d_out.cols(); ++j) {
      out(i, j) = d_out(0, j) / static_cast<double>(n);
    }
  }
  return out;
}

}  // namespace nmfpool
