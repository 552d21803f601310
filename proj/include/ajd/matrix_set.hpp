#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ajd/errors.hpp"
#include "ajd/matrix.hpp"

namespace ajd {

/// The K symmetric N x N input matrices to be jointly diagonalized.
struct MatrixSet {
  std::size_t n = 0;
  std::vector<SymmetricMatrix> matrices;

  MatrixSet() = default;

  explicit MatrixSet(std::vector<SymmetricMatrix> ms) : matrices(std::move(ms)) {
    if (matrices.empty()) throw Error("MatrixSet: needs at least one matrix");
    n = matrices.front().dim();
    for (const auto& m : matrices) {
      if (m.dim() != n) throw Error("MatrixSet: mixed dimensions");
      detail::check_finite(m.entries(), "MatrixSet");
    }
  }

  std::size_t k() const { return matrices.size(); }
};

/// Sum over the set of the squared Frobenius norms, the natural scale of the
/// off-criterion.
inline double set_norm2(const MatrixSet& c) {
  double acc = 0.0;
  for (const auto& m : c.matrices) {
    const double f = frobenius_norm(m);
    acc += f * f;
  }
  return acc;
}

}  // namespace ajd
