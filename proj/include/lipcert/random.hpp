#pragma once

#include <cstdint>
#include <random>

#include "lipcert/common.hpp"
#include "lipcert/domains.hpp"

namespace lipcert {

// Seeded generator used everywhere randomness is needed. Every consumer
// constructs its own Rng from an explicit seed, so results are reproducible
// regardless of call order or threading.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }
    std::uint64_t next_u64() { return gen_(); }
    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen_);
    }

    VectorF normal_vector(std::size_t n, double scale = 1.0);

    // Point on the radius-`epsilon` surface of the given norm ball. A Gaussian
    // direction is reflected into the non-negative orthant when requested,
    // then normalized to the surface.
    VectorF sphere_point(std::size_t n, Norm norm, double epsilon, bool nonneg);

    // Point inside the ball: surface point shrunk by a uniform radius factor.
    VectorF ball_point(std::size_t n, Norm norm, double epsilon, bool nonneg);

  private:
    std::mt19937_64 gen_;
};

}  // namespace lipcert
