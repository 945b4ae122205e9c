#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace nmfpool {

// Denominator guard used by guarded elementwise division and the
// multiplicative NMF updates.
inline constexpr double kDivEpsilon = 1e-9;

// Dense row-major matrix of doubles. The single numeric currency of the
// library; all layers, the NMF solver and the dataset statistics work on it.
class DenseMatrix {
 public:
  DenseMatrix() = default;  // empty placeholder, not a valid value
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  bool same_shape(const DenseMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  std::string shape_str() const;

  bool operator==(const DenseMatrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Standard product, deterministic accumulation (row-major, inner loop over k).
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix transpose(const DenseMatrix& a);

// Hadamard product.
DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b);

// Elementwise a/b with each denominator entry clamped to at least kDivEpsilon.
DenseMatrix div_guarded(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix sub(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix scaled(const DenseMatrix& a, double c);

DenseMatrix relu(const DenseMatrix& a);
// 1 where the entry is > 0, else 0.
DenseMatrix relu_mask(const DenseMatrix& a);

double frobenius_norm(const DenseMatrix& a);

bool all_finite(const DenseMatrix& a);

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

struct SoftmaxResult {
  double loss = 0.0;
  DenseMatrix grad;  // 1 x C, softmax(logits) - onehot(label)
};

// Max-shifted softmax cross-entropy on a 1 x C row of logits.
SoftmaxResult row_softmax_cross_entropy(const DenseMatrix& logits, std::size_t label);

}  // namespace nmfpool
