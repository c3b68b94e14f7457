#include "gaan/tensor.hpp"

#include <cassert>
#include <cmath>
#include <utility>

#include "gaan/error.hpp"

namespace gaan {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(Error::Kind::DimensionMismatch, msg);
}

// Numerically stable pieces of sigmoid cross entropy with logits.
double stable_sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

double bce_with_logits(double z, double y) {
  // max(z,0) - z*y + log(1 + exp(-|z|))
  return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::fabs(z)));
}

}  // namespace

Tensor Tensor::from_rows(const std::vector<std::vector<double>>& rows) {
  Tensor t(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (int r = 0; r < isize(rows); ++r) {
    assert(isize(rows[r]) == t.cols());
    for (int c = 0; c < t.cols(); ++c) t.at(r, c) = rows[r][c];
  }
  return t;
}

bool Tensor::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

double Tensor::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::fabs(v));
  return m;
}

Var Tape::input(Tensor value, bool requires_grad) {
  return emit(std::move(value), requires_grad, nullptr);
}

Var Tape::emit(Tensor value, bool requires_grad, std::function<void(Tape&)> backprop) {
  Node node;
  if (requires_grad) node.grad = Tensor(value.rows(), value.cols());
  node.value = std::move(value);
  node.requires_grad = requires_grad;
  node.backprop = std::move(backprop);
  nodes_.push_back(std::move(node));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::add(Var a, Var b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  require(av.rows() == bv.rows() && av.cols() == bv.cols(), "add: shape mismatch");
  Tensor out = av;
  for (int i = 0; i < out.size(); ++i) out[i] += bv[i];
  bool rg = requires_grad(a) || requires_grad(b);
  Var self{static_cast<int>(nodes_.size())};
  return emit(std::move(out), rg, [a, b, self](Tape& t) {
    const Tensor& dy = t.grad(self);
    if (t.requires_grad(a)) {
      Tensor& da = t.grad_mut(a);
      for (int i = 0; i < dy.size(); ++i) da[i] += dy[i];
    }
    if (t.requires_grad(b)) {
      Tensor& db = t.grad_mut(b);
      for (int i = 0; i < dy.size(); ++i) db[i] += dy[i];
    }
  });
}

Var Tape::add_scaled(Var a, Var b, double c) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  require(av.rows() == bv.rows() && av.cols() == bv.cols(), "add_scaled: shape mismatch");
  Tensor out = av;
  for (int i = 0; i < out.size(); ++i) out[i] += c * bv[i];
  bool rg = requires_grad(a) || requires_grad(b);
  Var self{static_cast<int>(nodes_.size())};
  return emit(std::move(out), rg, [a, b, c, self](Tape& t) {
    const Tensor& dy = t.grad(self);
    if (t.requires_grad(a)) {
      Tensor& da = t.grad_mut(a);
      for (int i = 0; i < dy.size(); ++i) da[i] += dy[i];
    }
    if (t.requires_grad(b)) {
      Tensor& db = t.grad_mut(b);
      for (int i = 0; i < dy.size(); ++i) db[i] += c * dy[i];
    }
  });
}

Var Tape::affine(Var x, double m, double a) {
  Tensor out = value(x);
  for (int i = 0; i < out.size(); ++i) out[i] = m * out[i] + a;
  Var self{static_cast<int>(nodes_.size())};
  return emit(std::move(out), requires_grad(x), [x, m, self](Tape& t) {
    if (!t.requires_grad(x)) return;
    const Tensor& dy = t.grad(self);
    Tensor& dx = t.grad_mut(x);
    for (int i = 0; i < dy.size(); ++i) dx[i] += m * dy[i];
  });
}

Var Tape::matmul(Var a, Var b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  require(av.cols() == bv.rows(), "matmul: inner dimension mismatch");
  const int r = av.rows(), k = av.cols(), c = bv.cols();
  Tensor out(r, c);
  // ikj order keeps the inner loop contiguous in both out and b
  for (int i = 0; i < r; ++i) {
    double* orow = out.data() + i * c;
    const double* arow = av.data() + i * k;
    for (int kk = 0; kk < k; ++kk) {
      const double aik = arow[kk];
      const double* brow = bv.data() + kk * c;
      for (int j = 0; j < c; ++j) orow[j] += aik * brow[j];
    }
  }
  bool rg = requires_grad(a) || requires_grad(b);
  Var self{static_cast<int>(nodes_.size())};
  return emit(std::move(out), rg, [a, b, r, k, c, self](Tape& t) {
    const Tensor& dy = t.grad(self);
    const Tensor& av = t.value(a);
    const Tensor& bv = t.value(b);
    if (t.requires_grad(a)) {
      // da += dy * b^T
      Tensor& da = t.grad_mut(a);
      for (int i = 0; i < r; ++i)
        for (int kk = 0; kk < k; ++kk) {
          double acc = 0.0;
          const double* dyrow = dy.data() + i * c;
          const double* brow = bv.data() + kk * c;
          for (int j = 0; j < c; ++j) acc += dyrow[j] * brow[j];
          da.at(i, kk) += acc;
        }
    }
    if (t.requires_grad(b)) {
      // db += a^T * dy
      Tensor& db = t.grad_mut(b);
      for (int i = 0; i < r; ++i) {
        const double* arow = av.data() + i * k;
        const double* dyrow = dy.data() + i * c;
        for (int kk = 0; kk < k; ++kk) {
          const double aik = arow[kk];
          double* dbrow = db.data() + kk * c;
          for (int j = 0; j < c; ++j) dbrow[j] += aik * dyrow[j];
        }
      }
    }
  });
}

Var Tape::add_row(Var x, Var row) {
  const Tensor& xv = value(x);
  const Tensor& rv = value(row);
  require(rv.rows() == 1 && rv.cols() == xv.cols(), "add_row: row vector shape mismatch");
  Tensor out = xv;
  for (int r = 0; r < out.rows(); ++r)
    for (int c = 0; c < out.cols(); ++c) out.at(r, c) += rv.at(0, c);
  bool rg = requires_grad(x) || requires_grad(row);
  Var self{static_cast<int>(nodes_.size())};
  return emit(std::move(out), rg, [x, row, self](Tape& t) {
    const Tensor& dy = t.grad(self);
    if (t.requires_grad(x)) {
      Tensor& dx = t.grad_mut(x);
      for (int i = 0; i < dy.size(); ++i) dx[i] += dy[i];
    }
    if (t.requires_grad(row)) {
      Tensor& dr = t.grad_mut(row);
      for (int r = 0; r < dy.rows(); ++r)
        for (int c = 0; c < dy.cols(); ++c) dr.at(0, c) += dy.at(r, c);
    }
  });
}

Var Tape::tanh_(Var x) {
  Tensor out = value(x);
  for (int i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
  Var self{static_cast<int>(nodes_.size())};
  return emit(std::move(out), requires_grad(x), [x, self](Tape& t) {
    if (!t.requires_grad(x)) return;
    const Tensor& dy = t.grad(self);
    const Tensor& y = t.value(self);
    Tensor& dx = t.grad_mut(x);
    for (int i = 0; i < dy.size(); ++i) dx[i] += (1.0 - y[i] * y[i]) * dy[i];
  });
}

Var Tape::sigmoid_(Var x) {
  Tensor out = value(x);
  for (int i = 0; i < out.size(); ++i) out[i] = stable_sigmoid(out[i]);
  Var self{static_cast<int>(nodes_.size())};
  return emit(std::move(out), requires_grad(x), [x, self](Tape& t) {
    if (!t.requires_grad(x)) return;
    const Tensor& dy = t.grad(self);
    const Tensor& y = t.value(self);
    Tensor& dx = t.grad_mut(x);
    for (int i = 0; i < dy.size(); ++i) dx[i] += y[i] * (1.0 - y[i]) * dy[i];
  });
}

Var Tape::scale_var(Var x, Var s) {
  const Tensor& sv = value(s);
  require(sv.rows() == 1 && sv.cols() == 1, "scale_var: scale must be 1x1");
  const double sval = sv.at(0, 0);
  Tensor out = value(x);
  for (int i = 0; i < out.size(); ++i) out[i] *= sval;
  bool rg = requires_grad(x) || requires_grad(s);
  Var self{static_cast<int>(nodes_.size())};
  return emit(std::move(out), rg, [x, s, sval, self](Tape& t) {
    const Tensor& dy = t.grad(self);
    if (t.requires_grad(x)) {
      Tensor& dx = t.grad_mut(x);
      for (int i = 0; i < dy.size(); ++i) dx[i] += sval * dy[i];
    }
    if (t.requires_grad(s)) {
      const Tensor& xv = t.value(x);
      double acc = 0.0;
      for (int i = 0; i < dy.size(); ++i) acc += xv[i] * dy[i];
      t.grad_mut(s).at(0, 0) += acc;
    }
  });
}

Var Tape::gather_rows(Var x, std::vector<int> idx) {
  const Tensor& xv = value(x);
  const int d = xv.cols();
  Tensor out(idx.size(), d);
  for (int i = 0; i < isize(idx); ++i)
    for (int c = 0; c < d; ++c) out.at(i, c) = xv.at(idx[i], c);
  Var self{static_cast<int>(nodes_.size())};
  return emit(std::move(out), requires_grad(x), [x, idx = std::move(idx), self](Tape& t) {
    if (!t.requires_grad(x)) return;
    const Tensor& dy = t.grad(self);
    Tensor& dx = t.grad_mut(x);
    for (int i = 0; i < isize(idx); ++i)
      for (int c = 0; c < dy.cols(); ++c) dx.at(idx[i], c) += dy.at(i, c);
  });
}

Var Tape::gather_sum_rows(Var x, std::vector<std::vector<int>> groups) {
  const Tensor& xv = value(x);
  const int d = xv.cols();
  Tensor out(groups.size(), d);
  for (int i = 0; i < isize(groups); ++i)
    for (int j : groups[i])
      for (int c = 0; c < d; ++c) out.at(i, c) += xv.at(j, c);
  Var self{static_cast<int>(nodes_.size())};
  return emit(std::move(out), requires_grad(x), [x, groups = std::move(groups), self](Tape& t) {
    if (!t.requires_grad(x)) return;
    const Tensor& dy = t.grad(self);
    Tensor& dx = t.grad_mut(x);
    for (int i = 0; i < isize(groups); ++i)
      for (int j : groups[i])
        for (int c = 0; c < dy.cols(); ++c) dx.at(j, c) += dy.at(i, c);
  });
}

Var Tape::scatter_rows(Var piece, std::vector<int> pos, int n_out) {
  const Tensor& pv = value(piece);
  require(pv.rows() == isize(pos), "scatter_rows: position count mismatch");
  Tensor out(n_out, pv.cols());
  for (int k = 0; k < isize(pos); ++k)
    for (int c = 0; c < pv.cols(); ++c) out.at(pos[k], c) += pv.at(k, c);
  Var self{static_cast<int>(nodes_.size())};
  return emit(std::move(out), requires_grad(piece), [piece, pos = std::move(pos), self](Tape& t) {
    if (!t.requires_grad(piece)) return;
    const Tensor& dy = t.grad(self);
    Tensor& dp = t.grad_mut(piece);
    for (int k = 0; k < isize(pos); ++k)
      for (int c = 0; c < dy.cols(); ++c) dp.at(k, c) += dy.at(pos[k], c);
  });
}

Var Tape::scale_rows(Var x, std::vector<double> coeffs) {
  const Tensor& xv = value(x);
  require(isize(coeffs) == xv.rows(), "scale_rows: coefficient count mismatch");
  Tensor out = xv;
  for (int r = 0; r < out.rows(); ++r)
    for (int c = 0; c < out.cols(); ++c) out.at(r, c) *= coeffs[r];
  Var self{static_cast<int>(nodes_.size())};
  return emit(std::move(out), requires_grad(x), [x, coeffs = std::move(coeffs), self](Tape& t) {
    if (!t.requires_grad(x)) return;
    const Tensor& dy = t.grad(self);
    Tensor& dx = t.grad_mut(x);
    for (int r = 0; r < dy.rows(); ++r)
      for (int c = 0; c < dy.cols(); ++c) dx.at(r, c) += coeffs[r] * dy.at(r, c);
  });
}

Var Tape::concat_rows(const std::vector<Var>& parts) {
  require(!parts.empty(), "concat_rows: empty part list");
  int total = 0;
  const int d = value(parts[0]).cols();
  for (Var p : parts) {
    require(value(p).cols() == d, "concat_rows: width mismatch");
    total += value(p).rows();
  }
  Tensor out(total, d);
  int at = 0;
  bool rg = false;
  for (Var p : parts) {
    const Tensor& pv = value(p);
    for (int r = 0; r < pv.rows(); ++r)
      for (int c = 0; c < d; ++c) out.at(at + r, c) = pv.at(r, c);
    at += pv.rows();
    rg = rg || requires_grad(p);
  }
  Var self{static_cast<int>(nodes_.size())};
  std::vector<Var> ps = parts;
  return emit(std::move(out), rg, [ps = std::move(ps), self](Tape& t) {
    const Tensor& dy = t.grad(self);
    int at = 0;
    for (Var p : ps) {
      const int rows = t.value(p).rows();
      if (t.requires_grad(p)) {
        Tensor& dp = t.grad_mut(p);
        for (int r = 0; r < rows; ++r)
          for (int c = 0; c < dy.cols(); ++c) dp.at(r, c) += dy.at(at + r, c);
      }
      at += rows;
    }
  });
}

Var Tape::slice_rows(Var x, int begin, int count) {
  const Tensor& xv = value(x);
  require(begin + count <= xv.rows(), "slice_rows: range out of bounds");
  Tensor out(count, xv.cols());
  for (int r = 0; r < count; ++r)
    for (int c = 0; c < xv.cols(); ++c) out.at(r, c) = xv.at(begin + r, c);
  Var self{static_cast<int>(nodes_.size())};
  return emit(std::move(out), requires_grad(x), [x, begin, count, self](Tape& t) {
    if (!t.requires_grad(x)) return;
    const Tensor& dy = t.grad(self);
    Tensor& dx = t.grad_mut(x);
    for (int r = 0; r < count; ++r)
      for (int c = 0; c < dy.cols(); ++c) dx.at(begin + r, c) += dy.at(r, c);
  });
}

Var Tape::mean_rows(Var x) {
  const Tensor& xv = value(x);
  require(xv.rows() >= 1, "mean_rows: empty input");
  const int n = xv.rows(), d = xv.cols();
  Tensor out(1, d);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < d; ++c) out.at(0, c) += xv.at(r, c);
  for (int c = 0; c < d; ++c) out.at(0, c) /= static_cast<double>(n);
  Var self{static_cast<int>(nodes_.size())};
  return emit(std::move(out), requires_grad(x), [x, n, self](Tape& t) {
    if (!t.requires_grad(x)) return;
    const Tensor& dy = t.grad(self);
    Tensor& dx = t.grad_mut(x);
    const double inv = 1.0 / static_cast<double>(n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < dy.cols(); ++c) dx.at(r, c) += inv * dy.at(0, c);
  });
}

Var Tape::batch_norm_train(Var x, Var gamma, Var shift, Tensor* batch_mean, Tensor* batch_var) {
  const Tensor& xv = value(x);
  const Tensor& gv = value(gamma);
  const Tensor& sv = value(shift);
  require(xv.rows() >= 1, "batch_norm_train: needs at least one row");
  require(gv.rows() == 1 && gv.cols() == xv.cols(), "batch_norm_train: gamma shape");
  require(sv.rows() == 1 && sv.cols() == xv.cols(), "batch_norm_train: shift shape");
  const int n = xv.rows(), d = xv.cols();

  Tensor mean(1, d), var(1, d);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < d; ++c) mean.at(0, c) += xv.at(r, c);
  for (int c = 0; c < d; ++c) mean.at(0, c) /= static_cast<double>(n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < d; ++c) {
      const double diff = xv.at(r, c) - mean.at(0, c);
      var.at(0, c) += diff * diff;
    }
  for (int c = 0; c < d; ++c) var.at(0, c) /= static_cast<double>(n);
  if (batch_mean) *batch_mean = mean;
  if (batch_var) *batch_var = var;

  Tensor inv_sigma(1, d);
  for (int c = 0; c < d; ++c)
    inv_sigma.at(0, c) = 1.0 / std::sqrt(var.at(0, c) + kBatchNormEpsilon);

  Tensor xhat(n, d);
  Tensor out(n, d);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < d; ++c) {
      xhat.at(r, c) = (xv.at(r, c) - mean.at(0, c)) * inv_sigma.at(0, c);
      out.at(r, c) = gv.at(0, c) * xhat.at(r, c) + sv.at(0, c);
    }

  bool rg = requires_grad(x) || requires_grad(gamma) || requires_grad(shift);
  Var self{static_cast<int>(nodes_.size())};
  return emit(std::move(out), rg,
              [x, gamma, shift, xhat = std::move(xhat), inv_sigma = std::move(inv_sigma), n, d,
               self](Tape& t) {
                const Tensor& dy = t.grad(self);
                if (t.requires_grad(gamma)) {
                  Tensor& dg = t.grad_mut(gamma);
                  for (int r = 0; r < n; ++r)
                    for (int c = 0; c < d; ++c) dg.at(0, c) += dy.at(r, c) * xhat.at(r, c);
                }
                if (t.requires_grad(shift)) {
                  Tensor& ds = t.grad_mut(shift);
                  for (int r = 0; r < n; ++r)
                    for (int c = 0; c < d; ++c) ds.at(0, c) += dy.at(r, c);
                }
                if (t.requires_grad(x)) {
                  const Tensor& gv = t.value(gamma);
                  Tensor dy_mean(1, d), dyxhat_mean(1, d);
                  for (int r = 0; r < n; ++r)
                    for (int c = 0; c < d; ++c) {
                      dy_mean.at(0, c) += dy.at(r, c);
                      dyxhat_mean.at(0, c) += dy.at(r, c) * xhat.at(r, c);
                    }
                  for (int c = 0; c < d; ++c) {
                    dy_mean.at(0, c) /= static_cast<double>(n);
                    dyxhat_mean.at(0, c) /= static_cast<double>(n);
                  }
                  Tensor& dx = t.grad_mut(x);
                  for (int r = 0; r < n; ++r)
                    for (int c = 0; c < d; ++c)
                      dx.at(r, c) += gv.at(0, c) * inv_sigma.at(0, c) *
                                     (dy.at(r, c) - dy_mean.at(0, c) -
                                      xhat.at(r, c) * dyxhat_mean.at(0, c));
                  }
              });
}

Var Tape::batch_norm_eval(Var x, Var gamma, Var shift, const Tensor& mean, const Tensor& var) {
  const Tensor& xv = value(x);
  const Tensor& gv = value(gamma);
  const Tensor& sv = value(shift);
  const int n = xv.rows(), d = xv.cols();
  require(mean.cols() == d && var.cols() == d, "batch_norm_eval: running stat shape");
  Tensor inv_sigma(1, d);
  for (int c = 0; c < d; ++c)
    inv_sigma.at(0, c) = 1.0 / std::sqrt(var.at(0, c) + kBatchNormEpsilon);
  Tensor xhat(n, d);
  Tensor out(n, d);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < d; ++c) {
      xhat.at(r, c) = (xv.at(r, c) - mean.at(0, c)) * inv_sigma.at(0, c);
      out.at(r, c) = gv.at(0, c) * xhat.at(r, c) + sv.at(0, c);
    }
  bool rg = requires_grad(x) || requires_grad(gamma) || requires_grad(shift);
  Var self{static_cast<int>(nodes_.size())};
  return emit(std::move(out), rg,
              [x, gamma, shift, xhat = std::move(xhat), inv_sigma = std::move(inv_sigma), n, d,
               self](Tape& t) {
                const Tensor& dy = t.grad(self);
                if (t.requires_grad(gamma)) {
                  Tensor& dg = t.grad_mut(gamma);
                  for (int r = 0; r < n; ++r)
                    for (int c = 0; c < d; ++c) dg.at(0, c) += dy.at(r, c) * xhat.at(r, c);
                }
                if (t.requires_grad(shift)) {
                  Tensor& ds = t.grad_mut(shift);
                  for (int r = 0; r < n; ++r)
                    for (int c = 0; c < d; ++c) ds.at(0, c) += dy.at(r, c);
                }
                if (t.requires_grad(x)) {
                  const Tensor& gv = t.value(gamma);
                  Tensor& dx = t.grad_mut(x);
                  for (int r = 0; r < n; ++r)
                    for (int c = 0; c < d; ++c)
                      dx.at(r, c) += gv.at(0, c) * inv_sigma.at(0, c) * dy.at(r, c);
                }
              });
}

Var Tape::multitask_loss(Var logits, const Tensor& labels,
                         const std::vector<bool>& is_classification) {
  const Tensor& zv = value(logits);
  require(zv.rows() == labels.rows() && zv.cols() == labels.cols(),
          "multitask_loss: label shape mismatch");
  require(isize(is_classification) == zv.cols(), "multitask_loss: task type count mismatch");

  int observed = 0;
  for (int i = 0; i < labels.size(); ++i)
    if (!std::isnan(labels[i])) ++observed;
  if (observed == 0)
    throw Error(Error::Kind::AllLabelsMissing, "multitask_loss: every label is missing");

  double total = 0.0;
  Tensor dz(zv.rows(), zv.cols());  // d(total)/d(z) before the 1/N
  for (int r = 0; r < zv.rows(); ++r)
    for (int c = 0; c < zv.cols(); ++c) {
      const double y = labels.at(r, c);
      if (std::isnan(y)) continue;
      const double z = zv.at(r, c);
      if (is_classification[c]) {
        total += bce_with_logits(z, y);
        dz.at(r, c) = stable_sigmoid(z) - y;
      } else {
        const double diff = z - y;
        total += diff * diff;
        dz.at(r, c) = 2.0 * diff;
      }
    }
  const double inv_n = 1.0 / static_cast<double>(observed);
  Tensor out = Tensor::scalar(total * inv_n);
  Var self{static_cast<int>(nodes_.size())};
  return emit(std::move(out), requires_grad(logits),
              [logits, dz = std::move(dz), inv_n, self](Tape& t) {
                if (!t.requires_grad(logits)) return;
                const double seed = t.grad(self).at(0, 0);
                Tensor& dl = t.grad_mut(logits);
                for (int i = 0; i < dz.size(); ++i) dl[i] += seed * inv_n * dz[i];
              });
}

Var Tape::mse_loss(Var pred, const Tensor& target) {
  const Tensor& pv = value(pred);
  require(pv.rows() == target.rows() && pv.cols() == target.cols(),
          "mse_loss: target shape mismatch");
  const double inv_n = 1.0 / static_cast<double>(pv.size());
  double total = 0.0;
  for (int i = 0; i < pv.size(); ++i) {
    const double diff = pv[i] - target[i];
    total += diff * diff;
  }
  Tensor out = Tensor::scalar(total * inv_n);
  Var self{static_cast<int>(nodes_.size())};
  return emit(std::move(out), requires_grad(pred), [pred, target, inv_n, self](Tape& t) {
    if (!t.requires_grad(pred)) return;
    const double seed = t.grad(self).at(0, 0);
    const Tensor& pv = t.value(pred);
    Tensor& dp = t.grad_mut(pred);
    for (int i = 0; i < pv.size(); ++i)
      dp[i] += seed * inv_n * 2.0 * (pv[i] - target[i]);
  });
}

void Tape::backward(Var loss) {
  require(loss.valid() && static_cast<std::size_t>(loss.id) < nodes_.size(),
          "backward: invalid loss node");
  Node& top = nodes_[loss.id];
  require(top.value.rows() == 1 && top.value.cols() == 1, "backward: loss must be scalar");
  if (!top.requires_grad) return;
  top.grad.at(0, 0) = 1.0;
  for (int i = loss.id; i >= 0; --i) {
    Node& node = nodes_[i];
    if (node.requires_grad && node.backprop) node.backprop(*this);
  }
}

}  // namespace gaan
