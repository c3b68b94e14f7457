#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace gaan {

// Signed container size for clean comparisons against int indices.
template <typename C>
int isize(const C& c) {
  return static_cast<int>(c.size());
}

// Dense row-major float64 matrix. Scalars are 1x1, row vectors 1xd.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int rows, int cols)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {}

  static Tensor full(int rows, int cols, double v) {
    Tensor t(rows, cols);
    std::fill(t.data_.begin(), t.data_.end(), v);
    return t;
  }
  static Tensor scalar(double v) { return full(1, 1, v); }
  static Tensor from_rows(const std::vector<std::vector<double>>& rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int size() const { return static_cast<int>(data_.size()); }
  bool empty() const { return data_.empty(); }

  double& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double at(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double& operator[](int i) { return data_[i]; }
  double operator[](int i) const { return data_[i]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }
  bool all_finite() const;
  double max_abs() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// Handle into a Tape node.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Append-only Wengert list. Nodes are created in topological order, so the
// backward sweep is a single reverse pass over creation order.
class Tape {
 public:
  Var input(Tensor value, bool requires_grad = false);

  Var add(Var a, Var b);
  // a + c*b with constant c
  Var add_scaled(Var a, Var b, double c);
  // elementwise m*x + a with constants
  Var affine(Var x, double m, double a);
  Var matmul(Var a, Var b);
  // broadcast-add a 1xd row vector to every row
  Var add_row(Var x, Var row);
  Var tanh_(Var x);
  Var sigmoid_(Var x);
  // x scaled by a 1x1 tensor variable
  Var scale_var(Var x, Var s);
  Var gather_rows(Var x, std::vector<int> idx);
  // out[i] = sum of x rows listed in groups[i]; empty group gives a zero row
  Var gather_sum_rows(Var x, std::vector<std::vector<int>> groups);
  // out has n_out rows; out[pos[k]] = piece[k]; unmentioned rows stay zero
  Var scatter_rows(Var piece, std::vector<int> pos, int n_out);
  // out[i] = coeffs[i] * x[i] with a constant per-row coefficient
  Var scale_rows(Var x, std::vector<double> coeffs);
  Var concat_rows(const std::vector<Var>& parts);
  Var slice_rows(Var x, int begin, int count);
  // column means, 1xd
  Var mean_rows(Var x);

  // Per-column standardization over all rows (biased variance, epsilon under
  // the square root), then scale/shift. Batch mean/var are written to
  // batch_mean/batch_var for the caller's running-stat update.
  Var batch_norm_train(Var x, Var gamma, Var shift, Tensor* batch_mean, Tensor* batch_var);
  Var batch_norm_eval(Var x, Var gamma, Var shift, const Tensor& mean, const Tensor& var);

  // Masked multitask loss: sigmoid cross entropy for classification columns,
  // squared error for regression columns, mean over observed (non-NaN) labels.
  Var multitask_loss(Var logits, const Tensor& labels, const std::vector<bool>& is_classification);
  // Mean squared error against a constant target.
  Var mse_loss(Var pred, const Tensor& target);

  void backward(Var loss);

  const Tensor& value(Var v) const { return nodes_[v.id].value; }
  const Tensor& grad(Var v) const { return nodes_[v.id].grad; }
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  static constexpr double kBatchNormEpsilon = 1e-5;

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    std::function<void(Tape&)> backprop;  // accumulates into parent grads
  };

  Var emit(Tensor value, bool requires_grad, std::function<void(Tape&)> backprop);
  Tensor& grad_mut(Var v) { return nodes_[v.id].grad; }

  std::vector<Node> nodes_;
};

}  // namespace gaan
