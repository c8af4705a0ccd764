#include "causalmamba/ops.hpp"

#include <cmath>
#include <string>

#include "causalmamba/error.hpp"
#include "causalmamba/logging.hpp"
#include "causalmamba/matrix_exp.hpp"

namespace causalmamba::ad {

namespace {

void same_shape(Var a, Var b, const char* op) {
  if (a.shape() != b.shape())
    throw Error(Errc::ShapeMismatch,
                std::string(op) + ": " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
}

// Elementwise unary op from a value function and a derivative expressed in
// terms of input x and output y.
template <class F, class DF>
Var unary(Var a, F f, DF df) {
  const Tensor& x = a.value();
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
  Tape& tape = *a.tape();
  return tape.record(std::move(y), {a}, [a, df](Tape& t, const Tensor& g) {
    Tensor* ga = t.grad_slot(a);
    const Tensor& x = a.value();
    for (std::size_t i = 0; i < x.size(); ++i) (*ga)[i] += g[i] * df(x[i]);
  });
}

double softplus_value(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }
double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Var matmul(Var a, Var b) {
  Tensor out = causalmamba::matmul(a.value(), b.value());
  return a.tape()->record(std::move(out), {a, b}, [a, b](Tape& t, const Tensor& g) {
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    const std::size_t m = av.rows(), k = av.cols(), n = bv.dim(1);
    if (Tensor* ga = t.grad_slot(a)) {
      // ga += g · bᵀ
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          double s = 0.0;
          const double* grow = g.data() + i * n;
          const double* brow = bv.data() + p * n;
          for (std::size_t j = 0; j < n; ++j) s += grow[j] * brow[j];
          (*ga)[i * k + p] += s;
        }
    }
    if (Tensor* gb = t.grad_slot(b)) {
      // gb += aᵀ · g
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          const double av_ip = av[i * k + p];
          if (av_ip == 0.0) continue;
          double* gbrow = gb->data() + p * n;
          const double* grow = g.data() + i * n;
          for (std::size_t j = 0; j < n; ++j) gbrow[j] += av_ip * grow[j];
        }
    }
  });
}

Var transpose(Var a) {
  return a.tape()->record(causalmamba::transpose(a.value()), {a}, [a](Tape& t, const Tensor& g) {
    Tensor* ga = t.grad_slot(a);
    for (std::size_t i = 0; i < g.dim(0); ++i)
      for (std::size_t j = 0; j < g.dim(1); ++j) (*ga)(j, i) += g(i, j);
  });
}

Var add(Var a, Var b) {
  same_shape(a, b, "add");
  return a.tape()->record(a.value() + b.value(), {a, b}, [a, b](Tape& t, const Tensor& g) {
    for (Var v : {a, b})
      if (Tensor* gv = t.grad_slot(v))
        for (std::size_t i = 0; i < g.size(); ++i) (*gv)[i] += g[i];
  });
}

Var sub(Var a, Var b) {
  same_shape(a, b, "sub");
  return a.tape()->record(a.value() - b.value(), {a, b}, [a, b](Tape& t, const Tensor& g) {
    if (Tensor* ga = t.grad_slot(a))
      for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i];
    if (Tensor* gb = t.grad_slot(b))
      for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i] -= g[i];
  });
}

Var mul(Var a, Var b) {
  same_shape(a, b, "mul");
  return a.tape()->record(hadamard(a.value(), b.value()), {a, b}, [a, b](Tape& t, const Tensor& g) {
    if (Tensor* ga = t.grad_slot(a))
      for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] * b.value()[i];
    if (Tensor* gb = t.grad_slot(b))
      for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i] += g[i] * a.value()[i];
  });
}

Var mul_const(Var a, const Tensor& c) {
  if (a.shape() != c.shape()) throw Error(Errc::ShapeMismatch, "mul_const shape mismatch");
  return a.tape()->record(hadamard(a.value(), c), {a}, [a, c](Tape& t, const Tensor& g) {
    Tensor* ga = t.grad_slot(a);
    for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] * c[i];
  });
}

Var scale(Var a, double s) {
  return unary(a, [s](double x) { return s * x; }, [s](double) { return s; });
}

Var add_scalar(Var a, double s) {
  return unary(a, [s](double x) { return x + s; }, [](double) { return 1.0; });
}

Var add_bias(Var a, Var bias) {
  const Tensor& x = a.value();
  if (bias.value().rank() != 1 || bias.value().size() != x.cols())
    throw Error(Errc::ShapeMismatch, "add_bias: bias " + shape_string(bias.shape()) + " for " + shape_string(x.shape()));
  Tensor y = x;
  const std::size_t c = x.cols();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += bias.value()[i % c];
  return a.tape()->record(std::move(y), {a, bias}, [a, bias, c](Tape& t, const Tensor& g) {
    if (Tensor* ga = t.grad_slot(a))
      for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i];
    if (Tensor* gb = t.grad_slot(bias))
      for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i % c] += g[i];
  });
}

Var relu(Var a) {
  return unary(a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x) { return x > 0.0 ? 1.0 : 0.0; });
}

Var exp(Var a) {
  return unary(a, [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); });
}

Var log(Var a) {
  std::size_t clamped = 0;
  for (double v : a.value().values()) clamped += v < kLogClamp;
  if (clamped > 0) warn("log: " + std::to_string(clamped) + " value(s) clamped at 1e-12");
  return unary(
      a, [](double x) { return std::log(x < kLogClamp ? kLogClamp : x); },
      [](double x) { return x < kLogClamp ? 0.0 : 1.0 / x; });
}

Var softplus(Var a) { return unary(a, softplus_value, sigmoid); }

Var square(Var a) {
  return unary(a, [](double x) { return x * x; }, [](double x) { return 2.0 * x; });
}

Var abs(Var a) {
  return unary(
      a, [](double x) { return std::abs(x); }, [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Var sum(Var a) {
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  return a.tape()->record(Tensor::scalar(s), {a}, [a](Tape& t, const Tensor& g) {
    Tensor* ga = t.grad_slot(a);
    const double gv = g[0];
    for (double& v : ga->values()) v += gv;
  });
}

Var mean(Var a) {
  const double n = static_cast<double>(a.value().size());
  return scale(sum(a), 1.0 / n);
}

Var weighted_sum(Var a, const Tensor& weights) {
  if (a.shape() != weights.shape()) throw Error(Errc::ShapeMismatch, "weighted_sum shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) s += a.value()[i] * weights[i];
  return a.tape()->record(Tensor::scalar(s), {a}, [a, weights](Tape& t, const Tensor& g) {
    Tensor* ga = t.grad_slot(a);
    for (std::size_t i = 0; i < weights.size(); ++i) (*ga)[i] += g[0] * weights[i];
  });
}

Var softmax(Var a) {
  const Tensor& x = a.value();
  const std::size_t rows = x.rows(), c = x.cols();
  Tensor y(x.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = x.data() + r * c;
    double* yr = y.data() + r * c;
    double mx = xr[0];
    for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, xr[j]);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += (yr[j] = std::exp(xr[j] - mx));
    for (std::size_t j = 0; j < c; ++j) yr[j] /= z;
  }
  Tensor saved = y;
  return a.tape()->record(std::move(y), {a}, [a, y = std::move(saved), rows, c](Tape& t, const Tensor& g) {
    Tensor* ga = t.grad_slot(a);
    for (std::size_t r = 0; r < rows; ++r) {
      const double* yr = y.data() + r * c;
      const double* gr = g.data() + r * c;
      double dot = 0.0;
      for (std::size_t j = 0; j < c; ++j) dot += gr[j] * yr[j];
      for (std::size_t j = 0; j < c; ++j) (*ga)[r * c + j] += yr[j] * (gr[j] - dot);
    }
  });
}

Var layer_norm(Var a, Var gamma, Var beta, double eps) {
  const Tensor& x = a.value();
  const std::size_t rows = x.rows(), c = x.cols();
  if (gamma.value().size() != c || beta.value().size() != c)
    throw Error(Errc::ShapeMismatch, "layer_norm: scale/shift width does not match " + shape_string(x.shape()));
  Tensor xhat(x.shape());
  std::vector<double> inv_std(rows);
  Tensor y(x.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = x.data() + r * c;
    double mu = 0.0;
    for (std::size_t j = 0; j < c; ++j) mu += xr[j];
    mu /= static_cast<double>(c);
    double var = 0.0;
    for (std::size_t j = 0; j < c; ++j) var += (xr[j] - mu) * (xr[j] - mu);
    var /= static_cast<double>(c);
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < c; ++j) {
      const double h = (xr[j] - mu) * inv_std[r];
      xhat[r * c + j] = h;
      y[r * c + j] = gamma.value()[j] * h + beta.value()[j];
    }
  }
  return a.tape()->record(
      std::move(y), {a, gamma, beta},
      [a, gamma, beta, xhat = std::move(xhat), inv_std = std::move(inv_std), rows, c](Tape& t, const Tensor& g) {
        Tensor* ga = t.grad_slot(a);
        Tensor* gg = t.grad_slot(gamma);
        Tensor* gb = t.grad_slot(beta);
        const double inv_c = 1.0 / static_cast<double>(c);
        for (std::size_t r = 0; r < rows; ++r) {
          const double* gr = g.data() + r * c;
          const double* hr = xhat.data() + r * c;
          if (gg)
            for (std::size_t j = 0; j < c; ++j) (*gg)[j] += gr[j] * hr[j];
          if (gb)
            for (std::size_t j = 0; j < c; ++j) (*gb)[j] += gr[j];
          if (ga) {
            double m1 = 0.0, m2 = 0.0;
            for (std::size_t j = 0; j < c; ++j) {
              const double gh = gr[j] * gamma.value()[j];
              m1 += gh;
              m2 += gh * hr[j];
            }
            m1 *= inv_c;
            m2 *= inv_c;
            for (std::size_t j = 0; j < c; ++j) {
              const double gh = gr[j] * gamma.value()[j];
              (*ga)[r * c + j] += inv_std[r] * (gh - m1 - hr[j] * m2);
            }
          }
        }
      });
}

Var mask_rows(Var a, const Tensor& mask) {
  const Tensor& x = a.value();
  if (mask.size() != x.rows()) throw Error(Errc::ShapeMismatch, "mask_rows: mask size does not match row count");
  const std::size_t c = x.cols();
  Tensor y = x;
  for (std::size_t r = 0; r < x.rows(); ++r)
    if (mask[r] == 0.0)
      for (std::size_t j = 0; j < c; ++j) y[r * c + j] = 0.0;
  return a.tape()->record(std::move(y), {a}, [a, mask, c](Tape& t, const Tensor& g) {
    Tensor* ga = t.grad_slot(a);
    for (std::size_t r = 0; r < mask.size(); ++r)
      if (mask[r] != 0.0)
        for (std::size_t j = 0; j < c; ++j) (*ga)[r * c + j] += g[r * c + j];
  });
}

Var masked_mean_pool(Var a, const Tensor& mask) {
  const Tensor& x = a.value();
  if (x.rank() != 3 || mask.shape() != Shape{x.dim(0), x.dim(1)})
    throw Error(Errc::ShapeMismatch, "masked_mean_pool: " + shape_string(x.shape()) + " with mask " +
                                         shape_string(mask.shape()));
  const std::size_t batch = x.dim(0), len = x.dim(1), d = x.dim(2);
  std::vector<double> counts(batch, 0.0);
  Tensor z({batch, d});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t i = 0; i < len; ++i) counts[b] += mask(b, i);
    if (counts[b] <= 0.0) throw Error(Errc::AllMasked, "example " + std::to_string(b) + " has no unmasked node");
    for (std::size_t i = 0; i < len; ++i) {
      const double m = mask(b, i);
      if (m == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) z(b, j) += x(b, i, j) * m;
    }
    for (std::size_t j = 0; j < d; ++j) z(b, j) /= counts[b];
  }
  return a.tape()->record(std::move(z), {a}, [a, mask, counts](Tape& t, const Tensor& g) {
    Tensor* ga = t.grad_slot(a);
    const std::size_t batch = mask.dim(0), len = mask.dim(1), d = g.dim(1);
    for (std::size_t b = 0; b < batch; ++b)
      for (std::size_t i = 0; i < len; ++i) {
        const double w = mask(b, i) / counts[b];
        if (w == 0.0) continue;
        for (std::size_t j = 0; j < d; ++j) (*ga)(b, i, j) += g(b, j) * w;
      }
  });
}

Var slice_rows(Var a, std::size_t batch_index, std::size_t n) {
  const Tensor& x = a.value();
  if (x.rank() != 3 || batch_index >= x.dim(0) || n > x.dim(1))
    throw Error(Errc::IndexOutOfRange, "slice_rows out of range for " + shape_string(x.shape()));
  const std::size_t d = x.dim(2);
  const std::size_t offset = batch_index * x.dim(1) * d;
  Tensor y({n, d});
  std::copy(x.data() + offset, x.data() + offset + n * d, y.data());
  return a.tape()->record(std::move(y), {a}, [a, offset, n, d](Tape& t, const Tensor& g) {
    Tensor* ga = t.grad_slot(a);
    for (std::size_t i = 0; i < n * d; ++i) (*ga)[offset + i] += g[i];
  });
}

Var selective_scan(Var u, Var delta, Var b, Var c, Var a_log, Var d_skip, const Tensor& mask) {
  const Tensor& uv = u.value();
  if (uv.rank() != 3) throw Error(Errc::ShapeMismatch, "selective_scan: input must be B x L x d");
  const std::size_t batch = uv.dim(0), len = uv.dim(1), d = uv.dim(2);
  const std::size_t s = a_log.value().rank() == 2 ? a_log.value().dim(1) : 0;
  if (s == 0 || a_log.value().dim(0) != d) throw Error(Errc::ShapeMismatch, "selective_scan: A must be d x s");
  require_shape(delta.value(), uv.shape(), "selective_scan delta");
  require_shape(b.value(), {batch, len, s}, "selective_scan B");
  require_shape(c.value(), {batch, len, s}, "selective_scan C");
  require_shape(d_skip.value(), {d}, "selective_scan D");
  require_shape(mask, {batch, len}, "selective_scan mask");

  Tensor a_mat({d, s});
  for (std::size_t i = 0; i < d * s; ++i) a_mat[i] = -std::exp(a_log.value()[i]);

  // states[b, t] holds h after position t (carried through masked positions).
  Tensor states({batch, len, d * s});
  Tensor y({batch, len, d});
  std::vector<double> h(d * s);
  for (std::size_t bi = 0; bi < batch; ++bi) {
    std::fill(h.begin(), h.end(), 0.0);
    for (std::size_t t = 0; t < len; ++t) {
      if (mask(bi, t) != 0.0) {
        const double* bt = b.value().data() + (bi * len + t) * s;
        const double* ct = c.value().data() + (bi * len + t) * s;
        for (std::size_t ch = 0; ch < d; ++ch) {
          const double dt = delta.value()(bi, t, ch);
          const double x = uv(bi, t, ch);
          double acc = 0.0;
          for (std::size_t n = 0; n < s; ++n) {
            double& hv = h[ch * s + n];
            hv = std::exp(dt * a_mat[ch * s + n]) * hv + dt * bt[n] * x;
            acc += ct[n] * hv;
          }
          y(bi, t, ch) = acc + d_skip.value()[ch] * x;
        }
      }
      std::copy(h.begin(), h.end(), states.data() + (bi * len + t) * d * s);
    }
  }

  Tape& tape = *u.tape();
  Var out = tape.record(
      std::move(y), {u, delta, b, c, a_log, d_skip},
      [u, delta, b, c, a_log, d_skip, mask, a_mat, states = std::move(states), batch, len, d, s](Tape& tp,
                                                                                                const Tensor& g) {
        Tensor* gu = tp.grad_slot(u);
        Tensor* gdelta = tp.grad_slot(delta);
        Tensor* gb = tp.grad_slot(b);
        Tensor* gc = tp.grad_slot(c);
        Tensor* galog = tp.grad_slot(a_log);
        Tensor* gd = tp.grad_slot(d_skip);
        std::vector<double> gh(d * s);
        const std::vector<double> zeros(d * s, 0.0);
        for (std::size_t bi = 0; bi < batch; ++bi) {
          std::fill(gh.begin(), gh.end(), 0.0);
          for (std::size_t t = len; t-- > 0;) {
            if (mask(bi, t) == 0.0) continue;  // h carried unchanged: gh passes through
            const double* h_t = states.data() + (bi * len + t) * d * s;
            const double* h_prev = t == 0 ? zeros.data() : states.data() + (bi * len + t - 1) * d * s;
            const double* bt = b.value().data() + (bi * len + t) * s;
            const double* ct = c.value().data() + (bi * len + t) * s;
            for (std::size_t ch = 0; ch < d; ++ch) {
              const double gy = g(bi, t, ch);
              const double dt = delta.value()(bi, t, ch);
              const double x = u.value()(bi, t, ch);
              if (gd) (*gd)[ch] += gy * x;
              double gx = gy * d_skip.value()[ch];
              double gdt = 0.0;
              for (std::size_t n = 0; n < s; ++n) {
                const std::size_t k = ch * s + n;
                const double a = a_mat[k];
                const double decay = std::exp(dt * a);
                const double ght = gh[k] + gy * ct[n];
                if (gc) (*gc)(bi, t, n) += gy * h_t[k];
                const double g_decay = ght * h_prev[k];
                gdt += g_decay * decay * a + ght * bt[n] * x;
                if (galog) (*galog)[k] += g_decay * decay * dt * a;
                if (gb) (*gb)(bi, t, n) += ght * dt * x;
                gx += ght * dt * bt[n];
                gh[k] = ght * decay;
              }
              if (gu) (*gu)(bi, t, ch) += gx;
              if (gdelta) (*gdelta)(bi, t, ch) += gdt;
            }
          }
        }
      });
  return out;
}

Var graph_aggregate(Var h, const std::vector<Tensor>& adjacency) {
  const Tensor& x = h.value();
  if (x.rank() != 3 || adjacency.size() != x.dim(0))
    throw Error(Errc::ShapeMismatch, "graph_aggregate: one adjacency per batch entry required");
  const std::size_t len = x.dim(1), d = x.dim(2);
  Tensor y(x.shape());
  for (std::size_t bi = 0; bi < adjacency.size(); ++bi) {
    const Tensor& adj = adjacency[bi];
    const std::size_t n = adj.dim(0);
    if (adj.rank() != 2 || adj.dim(1) != n || n > len)
      throw Error(Errc::ShapeMismatch, "graph_aggregate: bad adjacency " + shape_string(adj.shape()));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double w = adj(i, j);
        if (w == 0.0) continue;
        for (std::size_t k = 0; k < d; ++k) y(bi, i, k) += w * x(bi, j, k);
      }
  }
  return h.tape()->record(std::move(y), {h}, [h, adjacency, d](Tape& t, const Tensor& g) {
    Tensor* gh = t.grad_slot(h);
    for (std::size_t bi = 0; bi < adjacency.size(); ++bi) {
      const Tensor& adj = adjacency[bi];
      const std::size_t n = adj.dim(0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const double w = adj(i, j);
          if (w == 0.0) continue;
          for (std::size_t k = 0; k < d; ++k) (*gh)(bi, j, k) += w * g(bi, i, k);
        }
    }
  });
}

Var trace_expm(Var s) {
  Tensor e = matrix_exp(s.value());
  const double tr = trace(e);
  return s.tape()->record(Tensor::scalar(tr), {s}, [s, e = std::move(e)](Tape& t, const Tensor& g) {
    Tensor* gs = t.grad_slot(s);
    const std::size_t n = e.dim(0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) (*gs)(i, j) += g[0] * e(j, i);
  });
}

}  // namespace causalmamba::ad
