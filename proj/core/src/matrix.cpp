#include "nmfpool/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nmfpool {

namespace {

[[noreturn]] void throw_shape_mismatch(const char* op, const DenseMatrix& a,
                                       const DenseMatrix& b) {
  throw std::invalid_argument(std::string(op) + ": shape mismatch " + a.shape_str() +
                              " vs " + b.shape_str());
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (rows == 0 || cols == 0) {
    throw std::invalid_argument("DenseMatrix: dimensions must be >= 1, got " +
                                shape_str());
  }
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows.begin() == rows.end() ? 0 : rows.begin()->size();
  if (rows_ == 0 || cols_ == 0) {
    throw std::invalid_argument("DenseMatrix: empty initializer");
  }
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) {
      throw std::invalid_argument("DenseMatrix: ragged initializer rows");
    }
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::string DenseMatrix::shape_str() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw_shape_mismatch("matmul", a, b);
  DenseMatrix out(a.rows(), b.cols());
  const std::size_t m = a.rows(), kk = a.cols(), n = b.cols();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < kk; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        out(i, j) += aik * b(k, j);
      }
    }
  }
  return out;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) throw_shape_mismatch("hadamard", a, b);
  DenseMatrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] *= b.values()[i];
  return out;
}

DenseMatrix div_guarded(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) throw_shape_mismatch("div_guarded", a, b);
  DenseMatrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values()[i] /= std::max(b.values()[i], kDivEpsilon);
  }
  return out;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) throw_shape_mismatch("add", a, b);
  DenseMatrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] += b.values()[i];
  return out;
}

DenseMatrix sub(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) throw_shape_mismatch("sub", a, b);
  DenseMatrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] -= b.values()[i];
  return out;
}

DenseMatrix scaled(const DenseMatrix& a, double c) {
  DenseMatrix out = a;
  for (double& v : out.values()) v *= c;
  return out;
}

DenseMatrix relu(const DenseMatrix& a) {
  DenseMatrix out = a;
  for (double& v : out.values()) v = std::max(0.0, v);
  return out;
}

DenseMatrix relu_mask(const DenseMatrix& a) {
  DenseMatrix out = a;
  for (double& v : out.values()) v = v > 0.0 ? 1.0 : 0.0;
  return out;
}

double frobenius_norm(const DenseMatrix& a) {
  double sum = 0.0;
  for (double v : a.values()) sum += v * v;
  return std::sqrt(sum);
}

bool all_finite(const DenseMatrix& a) {
  return std::all_of(a.values().begin(), a.values().end(),
                     [](double v) { return std::isfinite(v); });
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) throw_shape_mismatch("max_abs_diff", a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  }
  return m;
}

SoftmaxResult row_softmax_cross_entropy(const DenseMatrix& logits, std::size_t label) {
  if (logits.rows() != 1) {
    throw std::invalid_argument("row_softmax_cross_entropy: expected 1xC logits, got " +
                                logits.shape_str());
  }
  if (!all_finite(logits)) {
    throw std::invalid_argument("row_softmax_cross_entropy: non-finite logits");
  }
  const std::size_t c = logits.cols();
  if (label >= c) {
    throw std::invalid_argument("row_softmax_cross_entropy: label " +
                                std::to_string(label) + " out of range for C=" +
                                std::to_string(c));
  }
  double max_logit = logits(0, 0);
  for (std::size_t j = 1; j < c; ++j) max_logit = std::max(max_logit, logits(0, j));

  SoftmaxResult res;
  res.grad = DenseMatrix(1, c);
  double denom = 0.0;
  for (std::size_t j = 0; j < c; ++j) {
    res.grad(0, j) = std::exp(logits(0, j) - max_logit);
    denom += res.grad(0, j);
  }
  for (std::size_t j = 0; j < c; ++j) res.grad(0, j) /= denom;
  res.loss = -(logits(0, label) - max_logit - std::log(denom));
  res.grad(0, label) -= 1.0;
  return res;
}

}  // namespace nmfpool
