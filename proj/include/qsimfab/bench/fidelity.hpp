// Copyright 2026 The qsimfab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qsimfab/svcore/sampling.hpp"

namespace qsimfab::bench {

/// Squared Bhattacharyya coefficient of two histograms (each normalized
/// first).
inline double hellinger_fidelity(const CountsDistribution &a, const CountsDistribution &b) {
    const CountsDistribution p = a.normalized();
    const CountsDistribution q = b.normalized();
    double s = 0.0;
    for (const auto &[key, pv] : p.entries) s += std::sqrt(pv * q.get(key));
    return std::min(1.0, s * s);
}

namespace detail {

inline std::size_t register_width(const CountsDistribution &d) {
    std::size_t width = d.entries.begin()->first.size();
    for (const auto &[key, v] : d.entries) {
        if (key.size() != width) throw std::invalid_argument("bitstrings of mixed width: '" + key + "'");
    }
    return width;
}

}  // namespace detail

/// Normalized Hellinger fidelity: the raw value rescaled so that sampling
/// the uniform distribution over the register scores 0, clamped to [0, 1].
/// When the ideal itself is uniform the rescaling is undefined and the raw
/// fidelity is returned.
inline double fidelity(const CountsDistribution &measured, const CountsDistribution &ideal) {
    if (measured.entries.empty() || measured.total <= 0.0) throw std::invalid_argument("measured distribution is empty");
    if (ideal.entries.empty() || ideal.total <= 0.0) throw std::invalid_argument("ideal distribution is empty");
    const std::size_t width = detail::register_width(ideal);
    if (detail::register_width(measured) != width) {
        throw std::invalid_argument("measured and ideal registers differ in width");
    }
    if (measured.normalized() == ideal.normalized()) return 1.0;

    const double f = hellinger_fidelity(measured, ideal);
    const CountsDistribution q = ideal.normalized();
    const double u = std::ldexp(1.0, -static_cast<int>(width));
    double s = 0.0;
    for (const auto &[key, qv] : q.entries) s += std::sqrt(qv * u);
    const double f_uniform = s * s;
    if (f_uniform >= 1.0) return f;
    return std::clamp((f - f_uniform) / (1.0 - f_uniform), 0.0, 1.0);
}

}  // namespace qsimfab::bench
