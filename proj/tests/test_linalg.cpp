#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "svir/linalg.hpp"

using namespace svir;

namespace {

Matrix5 random_matrix(std::mt19937_64& gen, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix5 m{};
  for (auto& row : m)
    for (auto& v : row) v = u(gen);
  return m;
}

}  // namespace

TEST_CASE("char_poly on reference matrices") {
  SECTION("zero matrix") {
    const auto k = char_poly(Matrix5{});
    for (double c : k) REQUIRE(c == 0.0);
  }
  SECTION("identity: (tau - 1)^5") {
    const auto k = char_poly(identity<5>());
    REQUIRE(k == std::array<double, 5>{-5, 10, -10, 5, -1});
  }
  SECTION("k1 is minus the trace") {
    std::mt19937_64 gen(7);
    const Matrix5 m = random_matrix(gen, 2.0);
    REQUIRE(char_poly(m)[0] == Catch::Approx(-trace(m)).epsilon(1e-12));
  }
}

TEST_CASE("eigenvalues of a diagonal matrix") {
  Matrix5 m{};
  for (std::size_t i = 0; i < 5; ++i) m[i][i] = static_cast<double>(i + 1);
  const auto eigs = eigenvalues(m);
  // sorted by real part descending
  for (std::size_t i = 0; i < 5; ++i) {
    REQUIRE(eigs[i].real() == Catch::Approx(5.0 - static_cast<double>(i)));
    REQUIRE(eigs[i].imag() == Catch::Approx(0.0).margin(1e-12));
  }
}

TEST_CASE("eigenvalues recover a known complex pair") {
  // block diag(rotation by +-2, 3, -1, 0.5)
  Matrix5 m{};
  m[0][0] = 1.0;
  m[0][1] = -2.0;
  m[1][0] = 2.0;
  m[1][1] = 1.0;
  m[2][2] = 3.0;
  m[3][3] = -1.0;
  m[4][4] = 0.5;
  const auto eigs = eigenvalues(m);
  REQUIRE(eigs[0].real() == Catch::Approx(3.0));
  REQUIRE(eigs[1].real() == Catch::Approx(1.0));
  REQUIRE(std::abs(eigs[1].imag()) == Catch::Approx(2.0));
  REQUIRE(eigs[2].real() == Catch::Approx(1.0));
  REQUIRE(eigs[1].imag() == Catch::Approx(-eigs[2].imag()));
}

TEST_CASE("eigenvalues satisfy Vieta relations against char_poly") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix5 m = random_matrix(gen, 3.0);
    const auto eigs = eigenvalues(m);
    const auto k = char_poly(m);
    // expand prod (tau - tau_i) and compare coefficients
    std::array<Complex, 6> poly{};
    poly[0] = 1.0;
    for (const auto& e : eigs) {
      std::array<Complex, 6> next{};
      for (std::size_t i = 0; i < 5; ++i) {
        next[i + 1] += poly[i];
        next[i] -= e * poly[i];
      }
      poly = next;
    }
    // poly[j] is the coefficient of tau^j; poly[5] = 1
    double scale = 0.0;
    for (double c : k) scale = std::max(scale, std::abs(c));
    scale = std::max(scale, 1.0);
    for (std::size_t i = 0; i < 5; ++i) {
      const Complex expanded = poly[4 - i];  // coefficient of tau^(4-i)
      REQUIRE(std::abs(expanded.imag()) <= 1e-8 * scale);
      REQUIRE(std::abs(expanded.real() - k[i]) <= 1e-8 * std::max(scale, std::abs(k[i])));
    }
  }
}

TEST_CASE("solve handles permuted systems and flags singularity") {
  Matrix5 m{};
  // permutation-ish matrix with a known solution
  m[0][2] = 2.0;
  m[1][0] = 1.0;
  m[2][4] = -1.0;
  m[3][1] = 4.0;
  m[4][3] = 0.5;
  const std::array<double, 5> x_true{1, -2, 3, 4, -5};
  const auto b = multiply(m, x_true);
  const auto x = solve<5>(m, b);
  for (std::size_t i = 0; i < 5; ++i) {
    REQUIRE(x[i] == Catch::Approx(x_true[i]).epsilon(1e-12));
  }

  Matrix5 sing{};
  sing[0][0] = 1.0;  // rank 1
  REQUIRE_THROWS_AS(solve<5>(sing, std::array<double, 5>{1, 1, 1, 1, 1}),
                    NumericError);
}

TEST_CASE("null_vector finds the kernel direction of a singular matrix") {
  // rank-4 matrix with kernel span{(1,1,1,1,1)}
  Matrix5 m{};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 5; ++j) m[i][j] = 0.0;
    m[i][i] = 1.0;
    m[i][i + 1] = -1.0;
  }
  const auto v = null_vector(m);
  for (std::size_t i = 1; i < 5; ++i) {
    REQUIRE(v[i] == Catch::Approx(v[0]).epsilon(1e-9));
  }
}
