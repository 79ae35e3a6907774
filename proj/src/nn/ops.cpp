#include <algorithm>
#include <cmath>

#include "cdn/nn/ops.hpp"

namespace cdn::nn {

namespace {
void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) throw ShapeMismatch(op);
}
}  // namespace

VarId add(Tape& t, VarId a, VarId b) {
  require_same_shape(t.value(a), t.value(b), "add");
  Tensor out = t.value(a);
  out.array() += t.value(b).array();
  return t.make(std::move(out), {a, b}, [a, b](Tape& tp, VarId self) {
    tp.grad(a).array() += tp.grad(self).array();
    tp.grad(b).array() += tp.grad(self).array();
  });
}

VarId mul(Tape& t, VarId a, VarId b) {
  require_same_shape(t.value(a), t.value(b), "mul");
  Tensor out = t.value(a);
  out.array() *= t.value(b).array();
  return t.make(std::move(out), {a, b}, [a, b](Tape& tp, VarId self) {
    tp.grad(a).array() += tp.grad(self).array() * tp.value(b).array();
    tp.grad(b).array() += tp.grad(self).array() * tp.value(a).array();
  });
}

VarId scale(Tape& t, VarId a, float s) {
  Tensor out = t.value(a);
  out.array() *= s;
  return t.make(std::move(out), {a}, [a, s](Tape& tp, VarId self) {
    tp.grad(a).array() += tp.grad(self).array() * s;
  });
}

VarId relu(Tape& t, VarId a) {
  Tensor out = t.value(a);
  out.array() = out.array().max(0.0f);
  return t.make(std::move(out), {a}, [a](Tape& tp, VarId self) {
    tp.grad(a).array() +=
        tp.grad(self).array() * (tp.value(a).array() > 0.0f).cast<float>();
  });
}

VarId tanh_op(Tape& t, VarId a) {
  Tensor out = t.value(a);
  out.array() = out.array().tanh();
  return t.make(std::move(out), {a}, [a](Tape& tp, VarId self) {
    const auto& y = tp.value(self).array();
    tp.grad(a).array() += tp.grad(self).array() * (1.0f - y * y);
  });
}

VarId sigmoid(Tape& t, VarId a) {
  Tensor out = t.value(a);
  out.array() = 1.0f / (1.0f + (-out.array()).exp());
  return t.make(std::move(out), {a}, [a](Tape& tp, VarId self) {
    const auto& y = tp.value(self).array();
    tp.grad(a).array() += tp.grad(self).array() * y * (1.0f - y);
  });
}

VarId exp_op(Tape& t, VarId a) {
  Tensor out = t.value(a);
  out.array() = out.array().exp();
  return t.make(std::move(out), {a}, [a](Tape& tp, VarId self) {
    tp.grad(a).array() += tp.grad(self).array() * tp.value(self).array();
  });
}

VarId clamp(Tape& t, VarId a, float lo, float hi) {
  Tensor out = t.value(a);
  out.array() = out.array().min(hi).max(lo);
  return t.make(std::move(out), {a}, [a, lo, hi](Tape& tp, VarId self) {
    const auto& x = tp.value(a).array();
    tp.grad(a).array() += tp.grad(self).array() *
                          ((x >= lo) && (x <= hi)).cast<float>();
  });
}

VarId concat(Tape& t, const std::vector<VarId>& parts) {
  int total = 0;
  for (VarId p : parts) total += t.value(p).size();
  Tensor out({total});
  int off = 0;
  for (VarId p : parts) {
    int n = t.value(p).size();
    out.array().segment(off, n) = t.value(p).array();
    off += n;
  }
  return t.make(std::move(out), parts, [parts](Tape& tp, VarId self) {
    int off = 0;
    for (VarId p : parts) {
      int n = tp.value(p).size();
      tp.grad(p).array() += tp.grad(self).array().segment(off, n);
      off += n;
    }
  });
}

VarId slice(Tape& t, VarId a, int start, int len) {
  if (start < 0 || start + len > t.value(a).size())
    throw IndexOutOfRange("slice");
  Tensor out({len});
  out.array() = t.value(a).array().segment(start, len);
  return t.make(std::move(out), {a}, [a, start, len](Tape& tp, VarId self) {
    tp.grad(a).array().segment(start, len) += tp.grad(self).array();
  });
}

VarId matmul(Tape& t, VarId a, VarId b) {
  const Tensor& va = t.value(a);
  const Tensor& vb = t.value(b);
  if (va.rank() != 2 || vb.rank() != 2 || va.cols() != vb.rows())
    throw ShapeMismatch("matmul");
  Tensor out({va.rows(), vb.cols()});
  out.matrix().noalias() = va.matrix() * vb.matrix();
  return t.make(std::move(out), {a, b}, [a, b](Tape& tp, VarId self) {
    Tensor& g = tp.grad(self);
    tp.grad(a).matrix().noalias() += g.matrix() * tp.value(b).matrix().transpose();
    tp.grad(b).matrix().noalias() += tp.value(a).matrix().transpose() * g.matrix();
  });
}

VarId affine(Tape& t, VarId w, VarId x, VarId b) {
  const Tensor& vw = t.value(w);
  const Tensor& vx = t.value(x);
  const Tensor& vb = t.value(b);
  if (vw.rank() != 2 || vw.cols() != vx.size() || vb.size() != vw.rows())
    throw ShapeMismatch("affine");
  Tensor out({vw.rows()});
  out.vector().noalias() = vw.matrix() * vx.vector() + vb.vector();
  return t.make(std::move(out), {w, x, b}, [w, x, b](Tape& tp, VarId self) {
    const Tensor& g = tp.grad(self);
    tp.grad(w).matrix().noalias() += g.vector() * tp.value(x).vector().transpose();
    tp.grad(x).vector().noalias() += tp.value(w).matrix().transpose() * g.vector();
    tp.grad(b).array() += g.array();
  });
}

VarId embedding_lookup(Tape& t, VarId table, int row) {
  const Tensor& tab = t.value(table);
  if (tab.rank() != 2 || row < 0 || row >= tab.rows())
    throw IndexOutOfRange("embedding_lookup");
  int d = tab.cols();
  Tensor out({d});
  out.array() = tab.array().segment(row * d, d);
  return t.make(std::move(out), {table}, [table, row, d](Tape& tp, VarId self) {
    tp.grad(table).array().segment(row * d, d) += tp.grad(self).array();
  });
}

VarId embedding_seq(Tape& t, VarId table, const std::vector<int>& rows) {
  const Tensor& tab = t.value(table);
  if (tab.rank() != 2) throw ShapeMismatch("embedding_seq");
  int d = tab.cols();
  int L = static_cast<int>(rows.size());
  Tensor out({L, d});
  for (int i = 0; i < L; ++i) {
    if (rows[i] < 0 || rows[i] >= tab.rows())
      throw IndexOutOfRange("embedding_seq");
    out.array().segment(i * d, d) = tab.array().segment(rows[i] * d, d);
  }
  return t.make(std::move(out), {table}, [table, rows, d](Tape& tp, VarId self) {
    for (std::size_t i = 0; i < rows.size(); ++i)
      tp.grad(table).array().segment(rows[i] * d, d) +=
          tp.grad(self).array().segment(static_cast<int>(i) * d, d);
  });
}

VarId conv1d_bank(Tape& t, VarId x, const std::vector<int>& widths,
                  const std::vector<VarId>& weights,
                  const std::vector<VarId>& biases) {
  const Tensor& vx = t.value(x);
  if (vx.rank() != 2) throw ShapeMismatch("conv1d_bank input");
  int seq_len = vx.rows();
  int d = vx.cols();
  std::vector<VarId> pooled;
  for (std::size_t wi = 0; wi < widths.size(); ++wi) {
    int w = widths[wi];
    if (seq_len < w) throw ShapeMismatch("conv1d_bank: seq_len < width");
    const Tensor& vfw = t.value(weights[wi]);
    const Tensor& vfb = t.value(biases[wi]);
    if (vfw.rank() != 2 || vfw.cols() != w * d || vfb.size() != vfw.rows())
      throw ShapeMismatch("conv1d_bank filters");
    int filters = vfw.rows();
    int windows = seq_len - w + 1;

    Tensor out({filters});
    std::vector<int> argmax(filters, 0);
    for (int f = 0; f < filters; ++f) out[f] = -std::numeric_limits<float>::infinity();
    for (int pos = 0; pos < windows; ++pos) {
      // Flattened window dot each filter row.
      Eigen::Map<const Eigen::VectorXf> window(vx.data() + pos * d, w * d);
      Eigen::VectorXf act = vfw.matrix() * window + vfb.vector();
      for (int f = 0; f < filters; ++f) {
        if (act[f] > out[f]) {
          out[f] = act[f];
          argmax[f] = pos;
        }
      }
    }
    VarId node = t.make(
        std::move(out), {x, weights[wi], biases[wi]},
        [x, wt = weights[wi], bi = biases[wi], argmax, w, d, filters](
            Tape& tp, VarId self) {
          const Tensor& g = tp.grad(self);
          const Tensor& vx2 = tp.value(x);
          const Tensor& vfw2 = tp.value(wt);
          for (int f = 0; f < filters; ++f) {
            int pos = argmax[f];
            Eigen::Map<const Eigen::VectorXf> window(vx2.data() + pos * d, w * d);
            // filter weight grad
            Eigen::Map<Eigen::VectorXf> wrow(
                tp.grad(wt).data() + f * w * d, w * d);
            wrow += g[f] * window;
            // input grad
            Eigen::Map<Eigen::VectorXf> xseg(tp.grad(x).data() + pos * d, w * d);
            xseg += g[f] * vfw2.matrix().row(f).transpose();
            tp.grad(bi)[f] += g[f];
          }
        });
    pooled.push_back(node);
  }
  return pooled.size() == 1 ? pooled[0] : concat(t, pooled);
}

std::pair<VarId, VarId> lstm_cell_step(Tape& t, VarId x, VarId h, VarId c,
                                       const LstmCellParams& p) {
  int u = p.units;
  if (t.value(h).size() != u || t.value(c).size() != u)
    throw ShapeMismatch("lstm_cell_step state");
  // gates = Wx*x + Wh*h + b, order i,f,g,o
  VarId zeros = t.constant(Tensor({4 * u}));
  VarId gx = affine(t, p.wx, x, p.b);
  VarId gh = affine(t, p.wh, h, zeros);
  VarId gates = add(t, gx, gh);
  VarId i = sigmoid(t, slice(t, gates, 0, u));
  VarId f = sigmoid(t, slice(t, gates, u, u));
  VarId g = tanh_op(t, slice(t, gates, 2 * u, u));
  VarId o = sigmoid(t, slice(t, gates, 3 * u, u));
  VarId c_next = add(t, mul(t, f, c), mul(t, i, g));
  VarId h_next = mul(t, o, tanh_op(t, c_next));
  return {h_next, c_next};
}

VarId softmax_cross_entropy(Tape& t, VarId logits, int target_index) {
  const Tensor& z = t.value(logits);
  if (target_index < 0 || target_index >= z.size())
    throw IndexOutOfRange("softmax_cross_entropy target");
  float zmax = z.array().maxCoeff();
  Eigen::ArrayXf shifted = z.array() - zmax;
  Eigen::ArrayXf e = shifted.exp();
  float sum = e.sum();
  float loss = std::log(sum) - shifted[target_index];
  Eigen::ArrayXf probs = e / sum;
  return t.make(Tensor::scalar(loss), {logits},
                [logits, target_index, probs](Tape& tp, VarId self) {
                  float g = tp.grad(self)[0];
                  tp.grad(logits).array() += g * probs;
                  tp.grad(logits)[target_index] -= g;
                });
}

VarId kl_gaussian_to_standard(Tape& t, VarId mu, VarId log_sigma) {
  const Tensor& m = t.value(mu);
  const Tensor& ls = t.value(log_sigma);
  require_same_shape(m, ls, "kl_gaussian_to_standard");
  Eigen::ArrayXf sigma2 = (2.0f * ls.array()).exp();
  float kl = 0.5f * (m.array().square() + sigma2 - 2.0f * ls.array() - 1.0f).sum();
  return t.make(Tensor::scalar(kl), {mu, log_sigma},
                [mu, log_sigma, sigma2](Tape& tp, VarId self) {
                  float g = tp.grad(self)[0];
                  tp.grad(mu).array() += g * tp.value(mu).array();
                  tp.grad(log_sigma).array() += g * (sigma2 - 1.0f);
                });
}

Tensor softmax(const Tensor& logits) {
  Tensor out = logits;
  float zmax = out.array().maxCoeff();
  out.array() = (out.array() - zmax).exp();
  out.array() /= out.array().sum();
  return out;
}

}  // namespace cdn::nn
