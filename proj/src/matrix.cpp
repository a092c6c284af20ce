#include "poisonlab/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace poisonlab {

Matrix::Matrix(int r, int c, double fill) {
  if (r < 0 || c < 0) throw std::invalid_argument("matrix dimensions must be non-negative");
  rows = r;
  cols = c;
  data.assign(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill);
}

void Matrix::resize(int r, int c) {
  rows = r;
  cols = c;
  data.assign(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0.0);
}

void Matrix::ensure_shape(int r, int c) {
  const std::size_t need = static_cast<std::size_t>(r) * static_cast<std::size_t>(c);
  if (data.size() < need) data.resize(need);
  rows = r;
  cols = c;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows)
    throw std::invalid_argument("matmul: inner dimensions disagree (" + std::to_string(a.cols) +
                                " vs " + std::to_string(b.rows) + ")");
  Matrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    double* out_row = out.row(i);
    const double* a_row = a.row(i);
    for (int k = 0; k < a.cols; ++k) {
      const double aik = a_row[k];
      const double* b_row = b.row(k);
      for (int j = 0; j < b.cols; ++j) out_row[j] += aik * b_row[j];
    }
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) out.at(j, i) = a.at(i, j);
  return out;
}

Matrix relu(const Matrix& x) {
  Matrix out = x;
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  return out;
}

Matrix relu_backward(const Matrix& x, const Matrix& upstream) {
  if (!x.same_shape(upstream)) throw std::invalid_argument("relu_backward: shape mismatch");
  Matrix out = upstream;
  for (std::size_t i = 0; i < out.data.size(); ++i)
    if (x.data[i] <= 0.0) out.data[i] = 0.0;
  return out;
}

std::vector<double> softmax(std::span<const double> z) {
  std::vector<double> out(z.size());
  double mx = z[0];
  for (double v : z) mx = std::max(mx, v);
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = std::exp(z[i] - mx);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

CrossEntropyResult cross_entropy(const Matrix& probs, const std::vector<int>& labels) {
  if (static_cast<int>(labels.size()) != probs.rows)
    throw std::invalid_argument("cross_entropy: one label per row required");
  const int batch = probs.rows;
  CrossEntropyResult res;
  res.dlogits = probs;
  const double inv_batch = 1.0 / batch;
  for (int i = 0; i < batch; ++i) {
    const int label = labels[static_cast<std::size_t>(i)];
    if (label < 0 || label >= probs.cols)
      throw std::invalid_argument("cross_entropy: label out of range: " + std::to_string(label));
    res.loss -= std::log(probs.at(i, label)) * inv_batch;
    for (int c = 0; c < probs.cols; ++c) res.dlogits.at(i, c) *= inv_batch;
    res.dlogits.at(i, label) -= inv_batch;
  }
  return res;
}

void adam_step(ParamTensor& p, const OptimizerConfig& cfg, std::int64_t t) {
  if (t < 1) throw std::invalid_argument("adam_step: t must be >= 1");
  const std::size_t n = p.value.data.size();
  if (cfg.plain_sgd) {
    for (std::size_t i = 0; i < n; ++i) p.value.data[i] -= cfg.lr * p.grad.data[i];
    return;
  }
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < n; ++i) {
    const double g = p.grad.data[i];
    const double m = cfg.beta1 * p.m.data[i] + (1.0 - cfg.beta1) * g;
    const double v = cfg.beta2 * p.v.data[i] + (1.0 - cfg.beta2) * g * g;
    p.m.data[i] = m;
    p.v.data[i] = v;
    p.value.data[i] -= cfg.lr * (m / bc1) / (std::sqrt(v / bc2) + cfg.eps);
  }
}

double finite_diff_check(const std::function<double()>& loss_fn,
                         std::span<ParamTensor* const> params, double h) {
  double max_err = 0.0;
  for (ParamTensor* p : params) {
    for (std::size_t i = 0; i < p->value.data.size(); ++i) {
      const double saved = p->value.data[i];
      p->value.data[i] = saved + h;
      const double f_plus = loss_fn();
      p->value.data[i] = saved - h;
      const double f_minus = loss_fn();
      p->value.data[i] = saved;
      const double numeric = (f_plus - f_minus) / (2.0 * h);
      const double analytic = p->grad.data[i];
      const double scale = std::max(std::abs(numeric), std::abs(analytic));
      const double err = scale < 1e-8 ? std::abs(numeric - analytic)
                                      : std::abs(numeric - analytic) / scale;
      max_err = std::max(max_err, err);
    }
  }
  return max_err;
}

}  // namespace poisonlab
