#pragma once

#include <cstdint>
#include <random>

#include "phm/types.hpp"

namespace phm {

/// Seedable generator with a pinned algorithm: std::mt19937_64 for raw bits, 53-bit
/// uniforms (bits >> 11) · 2⁻⁵³, and Box–Muller normals from pairs of uniforms
/// (the sine branch is discarded). Nothing depends on the standard library's
/// distribution classes, so streams are reproducible across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform();

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal N(0, 1).
    double normal();

    /// (N(0,1) + i N(0,1)) / √2, so E|z|² = 1.
    Complex complex_normal();

private:
    std::mt19937_64 engine_;
};

}  // namespace phm
