#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace poisonlab {

// Dense row-major matrix of doubles. 64-bit throughout so gradient checks
// are not confounded by precision.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0);

  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  double* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
  const double* row(int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }

  // Fills the rows x cols prefix (hot-path buffers may hold slack capacity).
  void fill(double v) {
    std::fill_n(data.begin(), static_cast<std::size_t>(rows) * cols, v);
  }
  void resize(int r, int c);
  // Reshapes without clearing: contents are undefined and must be fully
  // overwritten by the caller. Never shrinks the allocation.
  void ensure_shape(int r, int c);
  bool same_shape(const Matrix& other) const { return rows == other.rows && cols == other.cols; }

  bool operator==(const Matrix&) const = default;
};

Matrix matmul(const Matrix& a, const Matrix& b);  // throws on inner-dim mismatch
Matrix transpose(const Matrix& a);

Matrix relu(const Matrix& x);
// Zeroes upstream wherever x <= 0.
Matrix relu_backward(const Matrix& x, const Matrix& upstream);

// Numerically stable softmax (max subtraction). Output sums to 1.
std::vector<double> softmax(std::span<const double> z);

struct CrossEntropyResult {
  double loss = 0.0;   // mean over the batch of -log p[label]
  Matrix dlogits;      // (probs - onehot) / batch, gradient w.r.t. logits
};

// probs: one distribution per row; labels: class index per row.
// Throws std::invalid_argument on an out-of-range label.
CrossEntropyResult cross_entropy(const Matrix& probs, const std::vector<int>& labels);

// A learnable tensor: value, gradient, and per-entry Adam moment buffers.
struct ParamTensor {
  Matrix value;
  Matrix grad;
  Matrix m;  // first moment
  Matrix v;  // second moment

  ParamTensor() = default;
  ParamTensor(int r, int c) : value(r, c), grad(r, c), m(r, c), v(r, c) {}

  void zero_grad() { grad.fill(0.0); }
};

struct OptimizerConfig {
  double lr = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  bool plain_sgd = false;  // w <- w - lr * grad, moments untouched
};

// One optimizer step at time t (t >= 1, shared across tensors of a model).
void adam_step(ParamTensor& p, const OptimizerConfig& cfg, std::int64_t t);

// Compares the gradients already stored in params against central finite
// differences of loss_fn (which must recompute the loss from the current
// parameter values). Returns the max relative error over all entries;
// entries where both gradients are below 1e-8 in magnitude contribute their
// absolute difference instead.
double finite_diff_check(const std::function<double()>& loss_fn,
                         std::span<ParamTensor* const> params, double h);

}  // namespace poisonlab
