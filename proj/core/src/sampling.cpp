#include "flagcert/sampling.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace flagcert {

namespace {

constexpr std::array<unsigned, 24> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                              41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

double clamp_open(double u) {
  constexpr double kTiny = 1e-12;
  return std::min(1.0 - kTiny, std::max(kTiny, u));
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

double standard_normal(std::mt19937_64& rng) {
  const double u1 = clamp_open(uniform01(rng));
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return n == 0 ? 0 : static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

double radical_inverse(std::uint64_t index, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

Vec halton_point(std::uint64_t index, std::size_t dim, std::uint64_t seed) {
  Vec p(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const unsigned base = kPrimes[i % kPrimes.size()];
    const double shift = static_cast<double>(mix_seed(seed, i) >> 11) * 0x1.0p-53;
    double u = radical_inverse(index + 1, base) + shift;
    p[i] = u - std::floor(u);
  }
  return p;
}

Vec sphere_direction(std::uint64_t index, std::size_t dim, std::uint64_t seed) {
  if (dim == 1) return {index % 2 == 0 ? 1.0 : -1.0};
  if (dim == 2) {
    const double t = 2.0 * std::numbers::pi * halton_point(index, 1, seed)[0];
    return {std::cos(t), std::sin(t)};
  }
  const Vec u = halton_point(index, dim + (dim % 2), seed);
  Vec g(dim);
  for (std::size_t i = 0; i < dim; i += 2) {
    const double r = std::sqrt(-2.0 * std::log(clamp_open(u[i])));
    const double t = 2.0 * std::numbers::pi * u[i + 1];
    g[i] = r * std::cos(t);
    if (i + 1 < dim) g[i + 1] = r * std::sin(t);
  }
  return normalized(g);
}

Vec ball_point(std::uint64_t index, std::size_t dim, std::uint64_t seed) {
  Vec dir = sphere_direction(index, dim, seed);
  const double u = halton_point(index, dim + 1, mix_seed(seed, 77))[dim];
  const double r = std::pow(u, 1.0 / static_cast<double>(dim));
  for (double& x : dir) x *= r;
  return dir;
}

}  // namespace flagcert
