#pragma once

// Shared generators for test data: random matrices, random matrix sets and
// exactly jointly-diagonalizable sets with a known mixing matrix.

#include <cstdint>
#include <vector>

#include "ajd/ajd.hpp"

namespace testsup {

ajd::Matrix random_matrix(ajd::Rng& rng, std::size_t rows, std::size_t cols);
ajd::SymmetricMatrix random_symmetric(ajd::Rng& rng, std::size_t n);
ajd::Matrix random_orthogonal(ajd::Rng& rng, std::size_t n);

/// Random nonsingular matrix with singular values in [0.5, 2].
ajd::Matrix random_well_conditioned(ajd::Rng& rng, std::size_t n);

/// K random symmetric matrices (no joint structure).
ajd::MatrixSet random_set(ajd::Rng& rng, std::size_t n, std::size_t k);

struct ExactSet {
  ajd::MatrixSet set;      // C_k = A D_k A^T, no noise
  ajd::Matrix a;           // mixing matrix
  ajd::Matrix b_true;      // inverse transpose of a: an exact joint diagonalizer
};

/// Exactly diagonalizable set from a random mixing matrix and positive
/// diagonal targets.
ExactSet exact_jd_set(ajd::Rng& rng, std::size_t n, std::size_t k, bool orthogonal_mixing);

/// Random generalized permutation: a permutation with nonzero signed scales.
ajd::Matrix random_generalized_permutation(ajd::Rng& rng, std::size_t n);

}  // namespace testsup
