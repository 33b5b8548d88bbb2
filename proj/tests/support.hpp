#pragma once

#include "otsm/block_types.hpp"
#include "otsm/problem.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace otsm::testing {

/// Standard normal matrix from a seeded stream.
Matrix gaussian_matrix(int rows, int cols, std::uint64_t seed);
/// Symmetric matrix (G + G^T) / 2 with G Gaussian.
Matrix random_symmetric(int n, std::uint64_t seed);
/// Haar-ish orthogonal r x r matrix (Q factor of a Gaussian draw).
Matrix random_orthogonal(int r, std::uint64_t seed);
/// Random Stiefel blocks on `spec`.
StiefelBlocks random_stiefel(const BlockSpec& spec, std::uint64_t seed);

/// Polar factor by M (M^T M)^{-1/2}; independent of the SVD route.
Matrix polar_oracle(const Matrix& m);

/// Projection onto {lo <= x_i <= hi, sum x = total} by enumerating every
/// assignment of coordinates to {free, at hi, at lo} and keeping the closest
/// feasible KKT candidate. Long double throughout.
Vector projection_oracle(const Vector& v, double hi, double total, std::optional<double> lo);

/// Spec with random dimensions: m in [m_lo, m_hi], r in [1, r_hi], d_i in [r, d_hi].
BlockSpec random_spec(std::uint64_t seed, int m_lo, int m_hi, int r_hi, int d_hi);

}  // namespace otsm::testing
