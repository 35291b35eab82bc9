#pragma once

// Seeded random operators. Every experiment derives per-task generators from
// one master seed so parallel runs stay reproducible.

#include <cstdint>
#include <random>

#include "ncmart/algebra.hpp"

namespace ncmart {

using Rng = std::mt19937_64;

/// splitmix64 mix of (seed, stream); used to give each task its own stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Entries i.i.d. standard complex Gaussian.
Matrix gaussian_matrix(Index rows, Index cols, Rng& rng);

/// Haar-distributed unitary (QR of a Gaussian matrix with phase fix).
Matrix random_unitary(Index d, Rng& rng);

/// Orthonormal d x k frame drawn from the Haar measure.
Matrix random_frame(Index d, Index k, Rng& rng);

Operator random_operator(const TracialAlgebra& alg, Rng& rng);
Operator random_hermitian(const TracialAlgebra& alg, Rng& rng);

/// Haar-random projection with the given corank.
Projection random_projection(const TracialAlgebra& alg, Index corank, Rng& rng);

}  // namespace ncmart
