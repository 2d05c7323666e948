// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace ucsl {

/// Reproducible random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. Uniform and normal variates are derived by hand (53-bit mantissa
/// scaling, Box-Muller) instead of the standard distributions, whose results
/// are implementation-defined; identical seeds therefore produce identical
/// streams on any conforming platform.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 bits of precision.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    /// Standard normal via Box-Muller; generates pairs, caches the second.
    double normal();

    Eigen::VectorXd normal_vector(int dim);

    /// Gaussian direction normalized to unit length.
    Eigen::VectorXd unit_vector(int dim);

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace ucsl
