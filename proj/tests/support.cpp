#include "support.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

namespace testsup {

using namespace ajd;

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.next_gaussian();
  return m;
}

SymmetricMatrix random_symmetric(Rng& rng, std::size_t n) {
  SymmetricMatrix s(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) s.set(i, j, rng.next_gaussian());
  return s;
}

Matrix random_orthogonal(Rng& rng, std::size_t n) {
  return qr_orthonormalize(random_matrix(rng, n, n));
}

Matrix random_well_conditioned(Rng& rng, std::size_t n) {
  const Matrix q1 = random_orthogonal(rng, n);
  const Matrix q2 = random_orthogonal(rng, n);
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) d(i, i) = 0.5 + 1.5 * rng.next_unit();
  return multiply(multiply(q1, d), q2);
}

MatrixSet random_set(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<SymmetricMatrix> ms;
  ms.reserve(k);
  for (std::size_t i = 0; i < k; ++i) ms.push_back(random_symmetric(rng, n));
  return MatrixSet(std::move(ms));
}

ExactSet exact_jd_set(Rng& rng, std::size_t n, std::size_t k, bool orthogonal_mixing) {
  ExactSet out;
  Matrix a = orthogonal_mixing ? random_orthogonal(rng, n) : random_well_conditioned(rng, n);
  std::vector<SymmetricMatrix> ms;
  ms.reserve(k);
  for (std::size_t kk = 0; kk < k; ++kk) {
    std::vector<double> d(n);
    for (double& v : d) {
      const double z = rng.next_gaussian();
      v = z * z + 0.05;  // bounded away from zero so every target is PD
    }
    SymmetricMatrix ck(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t m = 0; m < n; ++m) acc += a(i, m) * d[m] * a(j, m);
        ck.set(i, j, acc);
      }
    ms.push_back(std::move(ck));
  }
  out.set = MatrixSet(std::move(ms));
  out.b_true = transpose(solve_linear(a, Matrix::identity(n)));
  out.a = std::move(a);
  return out;
}

Matrix random_generalized_permutation(Rng& rng, std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.next_u64() % i;
    std::swap(perm[i - 1], perm[j]);
  }
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double scale = 0.25 + 3.75 * rng.next_unit();
    if (rng.next_u64() & 1ULL) scale = -scale;
    g(i, perm[i]) = scale;
  }
  return g;
}

}  // namespace testsup
