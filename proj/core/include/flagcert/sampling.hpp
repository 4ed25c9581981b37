#pragma once

// Deterministic samplers. Every sample is a pure function of
// (seed, index), so reports are reproducible across runs and platforms.

#include <cstdint>
#include <random>

#include "flagcert/linalg.hpp"

namespace flagcert {

/// Portable uniform in [0, 1) from the top 53 bits of a 64-bit draw;
/// std::uniform_real_distribution is not specified bit-exactly.
double uniform01(std::mt19937_64& rng);
double uniform(std::mt19937_64& rng, double lo, double hi);
double standard_normal(std::mt19937_64& rng);
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n);

/// Radical-inverse (Halton) coordinate of `index` in the given prime base.
double radical_inverse(std::uint64_t index, unsigned base);

/// Point of the scrambled Halton sequence in [0,1)^dim. The seed selects a
/// per-coordinate Cranley-Patterson rotation.
Vec halton_point(std::uint64_t index, std::size_t dim, std::uint64_t seed);

/// Low-discrepancy direction on the unit sphere S^{dim-1}. For dim == 1 the
/// directions alternate between +1 and -1.
Vec sphere_direction(std::uint64_t index, std::size_t dim, std::uint64_t seed);

/// Low-discrepancy point in the open unit ball of R^dim.
Vec ball_point(std::uint64_t index, std::size_t dim, std::uint64_t seed);

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace flagcert
