#include "hcprune/ops.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace hcprune {

namespace {

Var make_op(const char* op, Tensor value, std::vector<Var> inputs,
            std::function<void(Node&)> bwd, std::size_t active_inputs) {
  auto node = std::make_shared<Node>();
  node->op = op;
  node->value = std::move(value);
  node->inputs.reserve(inputs.size());
  for (const Var& v : inputs) node->inputs.push_back(v.node());
  node->active_inputs = active_inputs;
  for (std::size_t i = 0; i < active_inputs; ++i) {
    if (node->inputs[i]->requires_grad) node->requires_grad = true;
  }
  if (node->requires_grad) node->backward_fn = std::move(bwd);
  return Var(std::move(node));
}

Var make_op(const char* op, Tensor value, std::vector<Var> inputs,
            std::function<void(Node&)> bwd) {
  const std::size_t n = inputs.size();
  return make_op(op, std::move(value), std::move(inputs), std::move(bwd), n);
}

bool wants(const Node& n, std::size_t i) { return n.inputs[i]->requires_grad; }

Tensor colsum(const Tensor& m) {
  Tensor v({m.cols()});
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) v[j] += m.at(i, j);
  return v;
}

}  // namespace

Var add(const Var& a, const Var& b) {
  return make_op("add", add(a.value(), b.value()), {a, b}, [](Node& n) {
    if (wants(n, 0)) n.inputs[0]->accumulate_grad(n.grad);
    if (wants(n, 1)) n.inputs[1]->accumulate_grad(n.grad);
  });
}

Var sub(const Var& a, const Var& b) {
  return make_op("sub", sub(a.value(), b.value()), {a, b}, [](Node& n) {
    if (wants(n, 0)) n.inputs[0]->accumulate_grad(n.grad);
    if (wants(n, 1)) n.inputs[1]->accumulate_grad(scale(n.grad, -1.0));
  });
}

Var mul(const Var& a, const Var& b) {
  return make_op("mul", mul(a.value(), b.value()), {a, b}, [](Node& n) {
    if (wants(n, 0)) n.inputs[0]->accumulate_grad(mul(n.grad, n.inputs[1]->value));
    if (wants(n, 1)) n.inputs[1]->accumulate_grad(mul(n.grad, n.inputs[0]->value));
  });
}

Var matmul(const Var& a, const Var& b) {
  return make_op("matmul", matmul(a.value(), b.value()), {a, b}, [](Node& n) {
    if (wants(n, 0)) n.inputs[0]->accumulate_grad(matmul_nt(n.grad, n.inputs[1]->value));
    if (wants(n, 1)) n.inputs[1]->accumulate_grad(matmul_tn(n.inputs[0]->value, n.grad));
  });
}

Var transpose(const Var& a) {
  return make_op("transpose", transpose(a.value()), {a}, [](Node& n) {
    if (wants(n, 0)) n.inputs[0]->accumulate_grad(transpose(n.grad));
  });
}

Var scale(const Var& a, double c) {
  return make_op("scale", scale(a.value(), c), {a}, [c](Node& n) {
    if (wants(n, 0)) n.inputs[0]->accumulate_grad(scale(n.grad, c));
  });
}

Var add_scalar(const Var& a, double c) {
  return make_op("add_scalar", add_scalar(a.value(), c), {a}, [](Node& n) {
    if (wants(n, 0)) n.inputs[0]->accumulate_grad(n.grad);
  });
}

Var add_rowvec(const Var& m, const Var& v) {
  return make_op("add_rowvec", add_rowvec(m.value(), v.value()), {m, v}, [](Node& n) {
    if (wants(n, 0)) n.inputs[0]->accumulate_grad(n.grad);
    if (wants(n, 1)) n.inputs[1]->accumulate_grad(colsum(n.grad));
  });
}

Var mul_rowvec(const Var& m, const Var& v) {
  return make_op("mul_rowvec", mul_rowvec(m.value(), v.value()), {m, v}, [](Node& n) {
    if (wants(n, 0)) n.inputs[0]->accumulate_grad(mul_rowvec(n.grad, n.inputs[1]->value));
    if (wants(n, 1)) n.inputs[1]->accumulate_grad(colsum(mul(n.grad, n.inputs[0]->value)));
  });
}

Var mul_by_scalar(const Var& m, const Var& s) {
  if (!s.value().is_scalar()) shape_error("mul_by_scalar", "scale operand must be scalar");
  return make_op("mul_by_scalar", scale(m.value(), s.value().item()), {m, s}, [](Node& n) {
    if (wants(n, 0)) n.inputs[0]->accumulate_grad(scale(n.grad, n.inputs[1]->value.item()));
    if (wants(n, 1)) {
      double acc = 0.0;
      const Tensor& mv = n.inputs[0]->value;
      for (std::size_t i = 0; i < mv.size(); ++i) acc += n.grad[i] * mv[i];
      n.inputs[1]->accumulate_grad(Tensor::scalar(acc));
    }
  });
}

Var softmax_rows(const Var& a) {
  return make_op("softmax_rows", softmax_rows(a.value()), {a}, [](Node& n) {
    if (!wants(n, 0)) return;
    const Tensor& y = n.value;
    Tensor dx(y.shape());
    const std::size_t rows = y.rows(), cols = y.cols();
    for (std::size_t i = 0; i < rows; ++i) {
      const double* yr = y.data() + i * cols;
      const double* gr = n.grad.data() + i * cols;
      double dot = 0.0;
      for (std::size_t j = 0; j < cols; ++j) dot += yr[j] * gr[j];
      double* dr = dx.data() + i * cols;
      for (std::size_t j = 0; j < cols; ++j) dr[j] = yr[j] * (gr[j] - dot);
    }
    n.inputs[0]->accumulate_grad(dx);
  });
}

Var sigmoid(const Var& a) {
  return make_op("sigmoid", sigmoid(a.value()), {a}, [](Node& n) {
    if (!wants(n, 0)) return;
    Tensor dx = n.grad;
    for (std::size_t i = 0; i < dx.size(); ++i) {
      const double y = n.value[i];
      dx[i] *= y * (1.0 - y);
    }
    n.inputs[0]->accumulate_grad(dx);
  });
}

Var gelu(const Var& a) {
  return make_op("gelu", gelu(a.value()), {a}, [](Node& n) {
    if (!wants(n, 0)) return;
    const Tensor& x = n.inputs[0]->value;
    Tensor dx = n.grad;
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= gelu_grad_scalar(x[i]);
    n.inputs[0]->accumulate_grad(dx);
  });
}

Var clamp(const Var& a, double lo, double hi) {
  Var out = make_op("clamp", clamp(a.value(), lo, hi), {a}, [lo, hi](Node& n) {
    if (!wants(n, 0)) return;
    const Tensor& x = n.inputs[0]->value;
    Tensor dx = n.grad;
    for (std::size_t i = 0; i < dx.size(); ++i) {
      if (!(x[i] > lo && x[i] < hi)) dx[i] = 0.0;
    }
    n.inputs[0]->accumulate_grad(dx);
  });
  const Tensor& x = a.value();
  double kink = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    kink = std::min(kink, std::min(std::abs(x[i] - lo), std::abs(x[i] - hi)));
  }
  out.node()->kink_distance = kink;
  return out;
}

Var normalize_rows(const Var& a, double eps) {
  const Tensor& x = a.value();
  Tensor y = normalize_rows(x, eps);
  // per-row inverse std, needed again in the backward
  Tensor inv({x.rows()});
  const std::size_t cols = x.cols();
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double m = 0.0;
    for (std::size_t j = 0; j < cols; ++j) m += x.at(i, j);
    m /= static_cast<double>(cols);
    double var = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const double d = x.at(i, j) - m;
      var += d * d;
    }
    inv[i] = 1.0 / std::sqrt(var / static_cast<double>(cols) + eps);
  }
  return make_op("normalize_rows", std::move(y), {a}, [inv = std::move(inv)](Node& n) {
    if (!wants(n, 0)) return;
    const Tensor& y = n.value;
    const std::size_t rows = y.rows(), cols = y.cols();
    Tensor dx(y.shape());
    for (std::size_t i = 0; i < rows; ++i) {
      const double* yr = y.data() + i * cols;
      const double* gr = n.grad.data() + i * cols;
      double gmean = 0.0, gymean = 0.0;
      for (std::size_t j = 0; j < cols; ++j) {
        gmean += gr[j];
        gymean += gr[j] * yr[j];
      }
      gmean /= static_cast<double>(cols);
      gymean /= static_cast<double>(cols);
      double* dr = dx.data() + i * cols;
      for (std::size_t j = 0; j < cols; ++j) {
        dr[j] = inv[i] * (gr[j] - gmean - yr[j] * gymean);
      }
    }
    n.inputs[0]->accumulate_grad(dx);
  });
}

Var layer_norm(const Var& x, const Var& gain, const Var& bias, double eps) {
  return add_rowvec(mul_rowvec(normalize_rows(x, eps), gain), bias);
}

Var concat_cols(const std::vector<Var>& parts) {
  std::vector<const Tensor*> vals;
  vals.reserve(parts.size());
  for (const Var& p : parts) vals.push_back(&p.value());
  Tensor out = concat_cols(vals);
  return make_op("concat_cols", std::move(out), parts, [](Node& n) {
    const std::size_t rows = n.value.rows();
    std::size_t col0 = 0;
    for (std::size_t k = 0; k < n.inputs.size(); ++k) {
      const std::size_t w = n.inputs[k]->value.cols();
      if (wants(n, k) && w > 0) {
        Tensor piece({rows, w});
        for (std::size_t i = 0; i < rows; ++i)
          for (std::size_t j = 0; j < w; ++j) piece.at(i, j) = n.grad.at(i, col0 + j);
        n.inputs[k]->accumulate_grad(piece);
      }
      col0 += w;
    }
  });
}

Var sum(const Var& a) {
  return make_op("sum", Tensor::scalar(sum(a.value())), {a}, [](Node& n) {
    if (wants(n, 0))
      n.inputs[0]->accumulate_grad(Tensor::full(n.inputs[0]->value.shape(), n.grad.item()));
  });
}

Var mean(const Var& a) {
  return make_op("mean", Tensor::scalar(mean(a.value())), {a}, [](Node& n) {
    if (!wants(n, 0)) return;
    const double g = n.grad.item() / static_cast<double>(n.inputs[0]->value.size());
    n.inputs[0]->accumulate_grad(Tensor::full(n.inputs[0]->value.shape(), g));
  });
}

Var mse(const Var& a, const Var& b) {
  return make_op("mse", Tensor::scalar(mse(a.value(), b.value())), {a, b}, [](Node& n) {
    const Tensor& av = n.inputs[0]->value;
    const Tensor& bv = n.inputs[1]->value;
    const double c = 2.0 * n.grad.item() / static_cast<double>(av.size());
    if (wants(n, 0) || wants(n, 1)) {
      Tensor d = sub(av, bv);
      if (wants(n, 0)) n.inputs[0]->accumulate_grad(scale(d, c));
      if (wants(n, 1)) n.inputs[1]->accumulate_grad(scale(d, -c));
    }
  });
}

Var slice_vec(const Var& v, std::size_t offset, std::size_t len) {
  const Tensor& x = v.value();
  if (x.rank() != 1 || offset + len > x.size()) {
    shape_error("slice_vec", "range [" + std::to_string(offset) + ", " +
                                 std::to_string(offset + len) + ") out of " + x.shape_str());
  }
  Tensor out({len});
  for (std::size_t i = 0; i < len; ++i) out[i] = x[offset + i];
  return make_op("slice_vec", std::move(out), {v}, [offset, len](Node& n) {
    if (!wants(n, 0)) return;
    Tensor g = Tensor::zeros(n.inputs[0]->value.shape());
    for (std::size_t i = 0; i < len; ++i) g[offset + i] = n.grad[i];
    n.inputs[0]->accumulate_grad(g);
  });
}

Var custom_grad(const Var& wrapped, std::function<Tensor(const Tensor&)> transform) {
  const Node& w = *wrapped.node();
  if (w.active_inputs != 1) {
    throw std::runtime_error("hcprune: custom_grad expects a single-input node, got op '" +
                             std::string(w.op) + "'");
  }
  Var input(w.inputs[0]);
  Var out = make_op(
      "custom_grad", w.value, {input, wrapped},
      [transform = std::move(transform)](Node& n) {
        if (!wants(n, 0)) return;
        Tensor g = transform(n.grad);
        if (!g.same_shape(n.inputs[0]->value)) {
          shape_error("custom_grad", "transform output shape " + g.shape_str() +
                                         " does not match input shape " +
                                         n.inputs[0]->value.shape_str());
        }
        n.inputs[0]->accumulate_grad(g);
      },
      1);
  out.node()->kink_distance = w.kink_distance;
  return out;
}

}  // namespace hcprune
