#pragma once

#include <cstdint>
#include <random>

#include "diracbvp/grid_space.hpp"

namespace diracbvp::families {

using Rng = std::mt19937_64;

/// +1 on [0, L/2), -1 on [L/2, L): a periodized sign function with two jumps.
ScalarField periodic_sign(const Torus& torus);

/// Vector block [[1, k s(x)], [-k s(x), 1]] with s the periodized sign; n = 1 only.
CoefficientField kkpt(const Torus& torus, double k);

/// Constant complex accretive (n+1)x(n+1) matrix, not symmetric in general.
Matrix random_accretive_matrix(int size, Rng& rng);

/// Smooth trigonometric matrix field with max_x ||R(x)|| = 1.
std::vector<Matrix> smooth_matrix_field(const Torus& torus, int size, Rng& rng, bool real_valued);

/// I + A + I + ... with A smooth, real symmetric, kappa >= kappa_floor.
CoefficientField smooth_real_symmetric(const Torus& torus, std::uint64_t seed, double kappa_floor = 0.3);
/// Degree-preserving, complex, smooth, accretive, with couplings between normal and tangential parts.
CoefficientField smooth_accretive(const Torus& torus, std::uint64_t seed);
/// Like smooth_accretive but commuting with the normal/tangential splitting.
CoefficientField smooth_block(const Torus& torus, std::uint64_t seed);

struct DirectionOptions {
  bool vector_block_only = true;
  bool block_structured = false;
  bool hermitian = false;
};
/// Smooth perturbation direction with unit sup norm (not accretive; used as B0 + eps * D).
CoefficientField smooth_direction(const Torus& torus, std::uint64_t seed, DirectionOptions options);

}  // namespace diracbvp::families
