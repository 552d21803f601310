#include <doctest.h>

#include <cmath>
#include <vector>

#include "ajd/eigen.hpp"
#include "ajd/rng.hpp"
#include "support.hpp"

using namespace ajd;

namespace {

double reconstruction_residual(const SymmetricMatrix& s, const EigenDecomposition& eig) {
  const std::size_t n = s.dim();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double v = 0.0;
      for (std::size_t l = 0; l < n; ++l) v += eig.vectors(i, l) * eig.values[l] * eig.vectors(j, l);
      const double d = v - s(i, j);
      acc += d * d;
    }
  return std::sqrt(acc);
}

}  // namespace

TEST_CASE("sym_eig on hand-checked matrices") {
  SUBCASE("already diagonal") {
    const auto eig = sym_eig(SymmetricMatrix::diagonal(std::vector<double>{5, 2, 1}));
    CHECK(eig.values == std::vector<double>{5, 2, 1});
    CHECK(eig.vectors == Matrix::identity(3));
  }
  SUBCASE("2x2 with known spectrum") {
    const auto eig = sym_eig(SymmetricMatrix::from_rows({{2, 1}, {1, 2}}));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(eig.values[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(eig.values[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(eig.vectors(0, 0) == doctest::Approx(r).epsilon(1e-12));
    CHECK(eig.vectors(1, 0) == doctest::Approx(r).epsilon(1e-12));
    CHECK(eig.vectors(0, 1) == doctest::Approx(r).epsilon(1e-12));
    CHECK(eig.vectors(1, 1) == doctest::Approx(-r).epsilon(1e-12));
  }
  SUBCASE("zero matrix") {
    const auto eig = sym_eig(SymmetricMatrix(3));
    CHECK(eig.values == std::vector<double>{0, 0, 0});
    CHECK(eig.vectors == Matrix::identity(3));
  }
}

TEST_CASE("sym_eig reconstruction and orthonormality on random input") {
  Rng rng(11);
  for (std::size_t n : {2, 3, 5, 8, 13, 20}) {
    const SymmetricMatrix s = testsup::random_symmetric(rng, n);
    const auto eig = sym_eig(s);
    CHECK(reconstruction_residual(s, eig) <= 1e-9 * std::max(1.0, frobenius_norm(s)));
    CHECK(orthogonality_defect(eig.vectors) <= 1e-10);
    for (std::size_t i = 0; i + 1 < n; ++i) CHECK(eig.values[i] >= eig.values[i + 1]);
  }
}

TEST_CASE("sym_eig is deterministic") {
  Rng rng(13);
  const SymmetricMatrix s = testsup::random_symmetric(rng, 7);
  const auto a = sym_eig(s);
  const auto b = sym_eig(s);
  CHECK(a.values == b.values);
  CHECK(a.vectors == b.vectors);
}

TEST_CASE("sym_eig rejects non-finite input") {
  SymmetricMatrix s(2);
  s.set(0, 1, std::nan(""));
  CHECK_THROWS_AS(sym_eig(s), Error);
}

TEST_CASE("power_iteration on hand-checked matrices") {
  SUBCASE("dominant axis of diag(1, 0)") {
    const std::vector<double> start{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
    const auto res = power_iteration(SymmetricMatrix::diagonal(std::vector<double>{1, 0}),
                                     start, 50, 1e-12);
    CHECK(res.converged);
    CHECK(res.passes <= 5);
    CHECK(res.value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(res.vector[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(res.vector[1]) <= 1e-10);
  }
  SUBCASE("2x2 with gap") {
    const std::vector<double> start{1.0, 0.0};
    const auto res =
        power_iteration(SymmetricMatrix::from_rows({{2, 1}, {1, 2}}), start, 200, 1e-11);
    CHECK(res.converged);
    CHECK(res.value == doctest::Approx(3.0).epsilon(1e-9));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(res.vector[0] == doctest::Approx(r).epsilon(1e-7));
    CHECK(res.vector[1] == doctest::Approx(r).epsilon(1e-7));
  }
  SUBCASE("rank-1 projector converges in one pass") {
    Rng rng(5);
    std::vector<double> v(6);
    for (double& x : v) x = rng.next_gaussian();
    const double nv = norm2(v);
    for (double& x : v) x /= nv;
    SymmetricMatrix p(6);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = i; j < 6; ++j) p.set(i, j, v[i] * v[j]);

    std::vector<double> start(6);
    for (std::size_t i = 0; i < 6; ++i) start[i] = v[i] + 0.8 * ((i == 0) ? 1.0 : 0.1);
    REQUIRE(std::abs(dot(start, v)) > 0.1);

    const auto res = power_iteration(p, start, 50, 1e-10);
    CHECK(res.converged);
    CHECK(res.passes <= 1);
    CHECK(res.value == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("power_iteration refuses to answer from the null space") {
  const std::vector<double> start{0.0, 1.0};
  const auto res =
      power_iteration(SymmetricMatrix::diagonal(std::vector<double>{1, 0}), start, 50, 1e-12);
  CHECK_FALSE(res.converged);
}

TEST_CASE("power_iteration agrees with sym_eig under a spectral gap") {
  Rng rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 4 + rep % 4;
    const Matrix q = testsup::random_orthogonal(rng, n);
    std::vector<double> lam(n);
    lam[0] = 2.0 + rng.next_unit();
    for (std::size_t i = 1; i < n; ++i) lam[i] = rng.next_unit();  // gap >= 1
    SymmetricMatrix s(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t l = 0; l < n; ++l) acc += q(i, l) * lam[l] * q(j, l);
        s.set(i, j, acc);
      }
    std::vector<double> start(n, 1.0);
    const auto pow = power_iteration(s, start, 500, 1e-12);
    const auto eig = sym_eig(s);
    REQUIRE(pow.converged);
    CHECK(std::abs(pow.value - eig.values[0]) <= 1e-6);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(std::abs(pow.vector[i] - eig.vectors(i, 0)) <= 1e-5);
  }
}
