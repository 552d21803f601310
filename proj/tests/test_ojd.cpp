#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ajd/ojd.hpp"
#include "support.hpp"

using namespace ajd;

TEST_CASE("givens_angle closed form") {
  SUBCASE("diagonal matrices need no rotation") {
    const MatrixSet c({SymmetricMatrix::diagonal(std::vector<double>{3.0, -7.0})});
    CHECK(givens_angle(c, 0, 1) == 0.0);
  }
  SUBCASE("antidiagonal rotates by pi/4") {
    const MatrixSet c({SymmetricMatrix::from_rows({{0, 1}, {1, 0}})});
    const double theta = givens_angle(c, 0, 1);
    CHECK(theta == doctest::Approx(std::numbers::pi / 4).epsilon(1e-14));
    const auto res = ojd_run(c);
    const SymmetricMatrix rotated = congruence(c.matrices[0], res.b);
    CHECK(rotated(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rotated(1, 1) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(rotated(0, 1)) <= 1e-14);
  }
  SUBCASE("full 2x2 matches the eigensolver") {
    const MatrixSet c({SymmetricMatrix::from_rows({{1, 2}, {2, 1}})});
    CHECK(givens_angle(c, 0, 1) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-14));
    const auto res = ojd_run(c);
    const SymmetricMatrix rotated = congruence(c.matrices[0], res.b);
    const auto eig = sym_eig(c.matrices[0]);
    CHECK(rotated(0, 0) + rotated(1, 1) == doctest::Approx(eig.values[0] + eig.values[1]));
    CHECK(std::abs(rotated(0, 1)) <= 1e-14);
  }
  SUBCASE("angle stays in (-pi/4, pi/4]") {
    Rng rng(211);
    for (int rep = 0; rep < 30; ++rep) {
      const MatrixSet c = testsup::random_set(rng, 4, 3);
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) {
          const double theta = givens_angle(c, i, j);
          CHECK(theta > -std::numbers::pi / 4 - 1e-15);
          CHECK(theta <= std::numbers::pi / 4 + 1e-15);
        }
    }
  }
}

TEST_CASE("ojd_run") {
  SUBCASE("diagonal set converges in one sweep with B = I") {
    const MatrixSet c({SymmetricMatrix::diagonal(std::vector<double>{1, 2, 3}),
                       SymmetricMatrix::diagonal(std::vector<double>{2, 5, 1})});
    const auto res = ojd_run(c);
    CHECK(res.converged);
    CHECK(res.sweeps_used == 1);
    CHECK(res.b == Matrix::identity(3));
    CHECK(res.final_off == 0.0);
  }
  SUBCASE("single matrix reduces to eigendecomposition") {
    Rng rng(223);
    const SymmetricMatrix s = testsup::random_symmetric(rng, 4);
    const MatrixSet c({s});
    const auto res = ojd_run(c);
    CHECK(res.converged);
    const double scale = frobenius_norm(s) * frobenius_norm(s);
    CHECK(res.final_off <= 1e-10 * scale);
    // columns match eigenvectors up to sign and permutation
    const auto eig = sym_eig(s);
    for (std::size_t j = 0; j < 4; ++j) {
      double best = 0.0;
      for (std::size_t l = 0; l < 4; ++l) {
        double d = 0.0;
        for (std::size_t i = 0; i < 4; ++i) d += res.b(i, j) * eig.vectors(i, l);
        best = std::max(best, std::abs(d));
      }
      CHECK(best >= 1.0 - 1e-8);
    }
  }
  SUBCASE("orthogonality is preserved") {
    Rng rng(227);
    const MatrixSet c = testsup::random_set(rng, 6, 8);
    const auto res = ojd_run(c);
    CHECK(orthogonality_defect(res.b) <= 1e-10);
  }
  SUBCASE("every rotation descends the off-criterion") {
    Rng rng(229);
    for (int rep = 0; rep < 5; ++rep) {
      const MatrixSet c = testsup::random_set(rng, 5, 4);
      const auto res = ojd_run(c);
      CHECK(res.max_descent_violation <= 1e-12);
    }
  }
  SUBCASE("recovers an exact orthogonal mixing") {
    Rng rng(233);
    const auto exact = testsup::exact_jd_set(rng, 5, 10, true);
    const auto res = ojd_run(exact.set);
    CHECK(res.converged);
    CHECK(res.final_off <= 1e-10 * set_norm2(exact.set));
  }
  SUBCASE("deterministic across runs") {
    Rng rng(239);
    const MatrixSet c = testsup::random_set(rng, 5, 5);
    const auto a = ojd_run(c);
    const auto b = ojd_run(c);
    CHECK(a.b == b.b);
    CHECK(a.final_off == b.final_off);
  }
}
