#pragma once

#include <functional>
#include <vector>

#include "hcprune/graph.hpp"

namespace hcprune {

// Differentiable ops over graph Vars. Each call evaluates the forward result
// eagerly and installs the matching backward rule. Shapes are validated by
// the underlying tensor kernels.

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var matmul(const Var& a, const Var& b);
Var transpose(const Var& a);
Var scale(const Var& a, double c);
Var add_scalar(const Var& a, double c);
Var add_rowvec(const Var& m, const Var& v);
Var mul_rowvec(const Var& m, const Var& v);
Var mul_by_scalar(const Var& m, const Var& s);
Var softmax_rows(const Var& a);
Var sigmoid(const Var& a);
Var gelu(const Var& a);
Var clamp(const Var& a, double lo, double hi);
Var normalize_rows(const Var& a, double eps);
Var layer_norm(const Var& x, const Var& gain, const Var& bias, double eps = 1e-5);
Var concat_cols(const std::vector<Var>& parts);
Var sum(const Var& a);
Var mean(const Var& a);
Var mse(const Var& a, const Var& b);
Var slice_vec(const Var& v, std::size_t offset, std::size_t len);

// Replaces the wrapped node's backward rule: forward value is unchanged,
// backward feeds transform(upstream adjoint) straight into the wrapped
// node's input. The wrapped node must have exactly one gradient input; it
// stays reachable as a spectator so graph inspection still sees it.
Var custom_grad(const Var& wrapped, std::function<Tensor(const Tensor&)> transform);

}  // namespace hcprune
