#include <doctest.h>

#include <stdexcept>
#include <string>

#include "hcprune/tensor.hpp"

using namespace hcprune;

TEST_CASE("matmul against identity padding") {
  Tensor a({2, 3}, {1, 2, 3, 4, 5, 6});
  Tensor eye({3, 2}, {1, 0, 0, 1, 0, 0});
  Tensor c = matmul(a, eye);
  CHECK(c.rows() == 2);
  CHECK(c.cols() == 2);
  CHECK(c.at(0, 0) == doctest::Approx(1.0));
  CHECK(c.at(0, 1) == doctest::Approx(2.0));
  CHECK(c.at(1, 0) == doctest::Approx(4.0));
  CHECK(c.at(1, 1) == doctest::Approx(5.0));
}

TEST_CASE("matmul shape mismatch names op and shapes") {
  Tensor a({2, 3});
  Tensor b({4, 2});
  try {
    matmul(a, b);
    FAIL("expected shape error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("matmul") != std::string::npos);
    CHECK(msg.find("2x3") != std::string::npos);
    CHECK(msg.find("4x2") != std::string::npos);
  }
}

TEST_CASE("matmul transposed variants agree with explicit transpose") {
  Tensor a({3, 4});
  Tensor b({5, 4});
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = 0.1 * static_cast<double>(i) - 0.4;
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = 0.07 * static_cast<double>(i) - 0.9;
  Tensor nt = matmul_nt(a, b);
  Tensor ref = matmul(a, transpose(b));
  REQUIRE(nt.same_shape(ref));
  for (std::size_t i = 0; i < nt.size(); ++i) CHECK(nt[i] == doctest::Approx(ref[i]));

  Tensor c({3, 6});
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.03 * static_cast<double>(i);
  Tensor tn = matmul_tn(a, c);
  Tensor ref2 = matmul(transpose(a), c);
  REQUIRE(tn.same_shape(ref2));
  for (std::size_t i = 0; i < tn.size(); ++i) CHECK(tn[i] == doctest::Approx(ref2[i]));
}

TEST_CASE("softmax of zero row is uniform") {
  Tensor a({1, 2});
  Tensor y = softmax_rows(a);
  CHECK(y[0] == doctest::Approx(0.5));
  CHECK(y[1] == doctest::Approx(0.5));
}

TEST_CASE("gelu fixes zero") { CHECK(gelu_scalar(0.0) == 0.0); }

TEST_CASE("normalize_rows yields zero mean unit variance") {
  Tensor a({2, 4}, {1, 2, 3, 4, -1, 0, 5, 2});
  Tensor y = normalize_rows(a, 0.0);
  for (std::size_t r = 0; r < 2; ++r) {
    double m = 0, v = 0;
    for (std::size_t c = 0; c < 4; ++c) m += y.at(r, c);
    m /= 4;
    for (std::size_t c = 0; c < 4; ++c) v += (y.at(r, c) - m) * (y.at(r, c) - m);
    v /= 4;
    CHECK(m == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("concat_cols stitches blocks and keeps rows aligned") {
  Tensor a({2, 1}, {1, 3});
  Tensor b({2, 2}, {10, 11, 30, 31});
  Tensor c = concat_cols({&a, &b});
  CHECK(c.cols() == 3);
  CHECK(c.at(0, 0) == 1.0);
  CHECK(c.at(0, 2) == 11.0);
  CHECK(c.at(1, 1) == 30.0);
}

TEST_CASE("zero-width tensors are legal and empty") {
  Tensor a({4, 0});
  CHECK(a.size() == 0);
  Tensor b = matmul(Tensor({3, 4}), a);
  CHECK(b.rows() == 3);
  CHECK(b.cols() == 0);
}

TEST_CASE("mse of constant offset") {
  Tensor a = Tensor::full({3, 2}, 1.5);
  Tensor b = Tensor::zeros({3, 2});
  CHECK(mse(a, b) == doctest::Approx(2.25));
}
