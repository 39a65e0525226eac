#include <doctest.h>

#include <cmath>

#include "hcprune/fdcheck.hpp"
#include "hcprune/ops.hpp"
#include "hcprune/rng.hpp"

using namespace hcprune;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double sd = 0.5) {
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.normal(0.0, sd);
  return t;
}

}  // namespace

TEST_CASE("sum backward fills ones") {
  Var x = Var::param(Tensor({2, 3}, {1, -2, 3, 0.5, 4, -1}));
  Var root = sum(x);
  backward(root);
  for (std::size_t i = 0; i < 6; ++i) CHECK(x.grad()[i] == 1.0);
}

TEST_CASE("sigmoid gradient at zero is a quarter") {
  Var x = Var::param(Tensor::scalar(0.0));
  Var root = sigmoid(x);
  backward(root);
  CHECK(x.grad()[0] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("backward rejects non-scalar roots") {
  Var x = Var::param(Tensor({2, 2}));
  Var y = add(x, x);
  CHECK_THROWS_AS(backward(y), std::runtime_error);
}

TEST_CASE("backward twice doubles leaf grads exactly") {
  Rng rng(11);
  Var w = Var::param(random_tensor({3, 3}, rng));
  Var x = Var::constant(random_tensor({2, 3}, rng));
  Var root = mse(matmul(x, w), Var::constant(random_tensor({2, 3}, rng)));
  backward(root);
  const std::vector<double> g1 = w.grad().vec();
  backward(root);
  for (std::size_t i = 0; i < g1.size(); ++i) CHECK(w.grad()[i] == 2.0 * g1[i]);
}

TEST_CASE("identical seeds give bit-identical forwards") {
  auto run = [] {
    Rng rng(77);
    Var w = Var::param(random_tensor({4, 4}, rng));
    Var x = Var::constant(random_tensor({3, 4}, rng));
    Var y = softmax_rows(matmul(x, transpose(w)));
    return sum(gelu(y)).value().item();
  };
  const double a = run();
  const double b = run();
  CHECK(a == b);
}

TEST_CASE("finite differences match analytic grads on a random graph") {
  Rng rng(5);
  // five parameters through matmul, gelu, softmax, layer norm, mse
  Var w1 = Var::param(random_tensor({4, 6}, rng));
  Var b1 = Var::param(random_tensor({6}, rng, 0.2));
  Var w2 = Var::param(random_tensor({6, 4}, rng));
  Var gain = Var::param(Tensor::ones({4}));
  Var bias = Var::param(Tensor::zeros({4}));
  Var x = Var::constant(random_tensor({3, 4}, rng));
  Var target = Var::constant(random_tensor({3, 4}, rng));

  auto build = [&] {
    Var h = gelu(add_rowvec(matmul(x, w1), b1));
    Var y = layer_norm(matmul(h, w2), gain, bias);
    Var att = softmax_rows(matmul(y, transpose(y)));
    return mse(matmul(att, y), target);
  };

  FdReport report = finite_difference_check(
      build, {{"w1", w1}, {"b1", b1}, {"w2", w2}, {"gain", gain}, {"bias", bias}}, 1e-5, 1e-4);
  CHECK(report.pass);
  CHECK_FALSE(report.kink_proximity);
  CHECK(report.max_rel_err < 1e-4);
}

TEST_CASE("finite differences are near exact for a linear model") {
  Rng rng(6);
  Var w = Var::param(random_tensor({3, 2}, rng));
  Var x = Var::constant(random_tensor({2, 3}, rng));
  auto build = [&] { return sum(matmul(x, w)); };
  FdReport report = finite_difference_check(build, {{"w", w}}, 1e-5, 1e-6);
  CHECK(report.pass);
  CHECK(report.max_rel_err < 1e-6);
}

TEST_CASE("clamp kink proximity is flagged instead of failed") {
  Var x = Var::param(Tensor({2}, {0.9999998, 0.5}));
  auto build = [&] { return sum(clamp(x, 0.0, 1.0)); };
  FdReport report = finite_difference_check(build, {{"x", x}}, 1e-5, 1e-4);
  CHECK(report.kink_proximity);
  CHECK(report.pass);
}

TEST_CASE("custom_grad identity transform sees through the clamp") {
  // clamp saturates at 1 so its own rule would zero the gradient
  Var x = Var::param(Tensor({3}, {1.7, 2.0, 3.1}));
  Var clamped = clamp(x, 0.0, 1.0);
  Var wrapped = custom_grad(clamped, [](const Tensor& g) { return g; });
  backward(sum(wrapped));
  for (std::size_t i = 0; i < 3; ++i) CHECK(x.grad()[i] == 1.0);

  Var y = Var::param(Tensor({3}, {1.7, 2.0, 3.1}));
  backward(sum(clamp(y, 0.0, 1.0)));
  for (std::size_t i = 0; i < 3; ++i) CHECK(y.grad()[i] == 0.0);
}

TEST_CASE("custom_grad zero transform blocks gradient") {
  Var x = Var::param(Tensor({2}, {0.3, 0.4}));
  Var wrapped = custom_grad(clamp(x, 0.0, 1.0),
                            [](const Tensor& g) { return Tensor::zeros(g.shape()); });
  backward(sum(wrapped));
  CHECK(x.grad()[0] == 0.0);
  CHECK(x.grad()[1] == 0.0);
}

TEST_CASE("custom_grad transform shape mismatch raises") {
  Var x = Var::param(Tensor({2}, {0.3, 0.4}));
  Var wrapped = custom_grad(clamp(x, 0.0, 1.0), [](const Tensor&) { return Tensor({3}); });
  CHECK_THROWS_AS(backward(sum(wrapped)), std::runtime_error);
}

TEST_CASE("gradients accumulate across shared subexpressions") {
  Var x = Var::param(Tensor::scalar(0.7));
  Var y = mul(x, x);  // d/dx = 2x
  backward(y);
  CHECK(x.grad()[0] == doctest::Approx(1.4).epsilon(1e-15));
}

TEST_CASE("constant inputs never allocate gradients") {
  Var c = Var::constant(Tensor({2, 2}, {1, 2, 3, 4}));
  Var p = Var::param(Tensor({2, 2}, {1, 1, 1, 1}));
  backward(sum(mul(c, p)));
  CHECK_FALSE(c.node()->grad_allocated);
  CHECK(p.grad()[3] == 4.0);
}
