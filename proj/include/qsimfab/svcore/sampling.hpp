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
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsimfab/svcore/types.hpp"
#include "qsimfab/util/random.hpp"

namespace qsimfab {

/// Outcome histogram keyed by bitstring. Holds either raw shot counts or
/// probabilities; `total` is the sum of all entries.
struct CountsDistribution {
    std::map<std::string, double> entries;
    double total = 0.0;

    void add(const std::string &key, double weight) {
        entries[key] += weight;
        total += weight;
    }

    double get(const std::string &key) const {
        auto it = entries.find(key);
        return it == entries.end() ? 0.0 : it->second;
    }

    CountsDistribution normalized() const {
        if (total <= 0.0) {
            throw std::invalid_argument("cannot normalize an empty distribution");
        }
        CountsDistribution out;
        for (const auto &[k, v] : entries) {
            out.entries[k] = v / total;
        }
        out.total = 1.0;
        return out;
    }

    friend bool operator==(const CountsDistribution &, const CountsDistribution &) = default;
};

/// Renders the measured bits of a program-order basis index, highest
/// measured qubit leftmost: character i from the right is measured[i].
inline std::string render_bitstring(std::uint64_t index, std::span<const int> measured) {
    std::string s(measured.size(), '0');
    for (std::size_t i = 0; i < measured.size(); ++i) {
        if ((index >> measured[i]) & 1U) {
            s[measured.size() - 1 - i] = '1';
        }
    }
    return s;
}

inline std::vector<int> all_qubits(int n) {
    std::vector<int> q(static_cast<std::size_t>(n));
    std::iota(q.begin(), q.end(), 0);
    return q;
}

/// Draws `shots` indices i.i.d. from the (unnormalized) weights and returns a
/// histogram over the drawn indices.
inline std::map<std::uint64_t, std::uint64_t> sample_indices(std::span<const double> weights, std::uint64_t shots,
                                                             Rng &rng) {
    std::vector<double> cumulative(weights.size());
    std::partial_sum(weights.begin(), weights.end(), cumulative.begin());
    std::map<std::uint64_t, std::uint64_t> hist;
    if (shots == 0) {
        return hist;
    }
    const double total = cumulative.empty() ? 0.0 : cumulative.back();
    if (!(total > 0.0)) {
        throw std::invalid_argument("cannot sample from zero total weight");
    }
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = rng.uniform() * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        // Skip zero-weight entries that share the cumulative value.
        std::size_t idx = static_cast<std::size_t>(it - cumulative.begin());
        if (idx >= cumulative.size()) {
            idx = cumulative.size() - 1;
            while (idx > 0 && weights[idx] == 0.0) {
                --idx;
            }
        }
        ++hist[idx];
    }
    return hist;
}

inline constexpr double kSamplingNormTolerance = 1e-6;

/// Samples measurement outcomes of a full state. `measured` defaults to all
/// qubits. The same state, shot count, and seed always give the same result.
template <typename Real>
CountsDistribution sample_dense(const BasicStateSlice<Real> &state, std::uint64_t shots, std::uint64_t seed,
                                std::vector<int> measured = {}) {
    if (shots < 1) {
        throw std::invalid_argument("shots must be at least 1");
    }
    if (measured.empty()) {
        measured = all_qubits(static_cast<int>(state.num_bits()));
    }
    std::vector<double> probs(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) {
        probs[i] = static_cast<double>(std::norm(state[i]));
    }
    const double norm = std::accumulate(probs.begin(), probs.end(), 0.0);
    if (std::abs(norm - 1.0) > kSamplingNormTolerance) {
        throw std::invalid_argument("state is not normalized (norm^2 = " + std::to_string(norm) + ")");
    }
    Rng rng(seed);
    CountsDistribution out;
    for (const auto &[idx, count] : sample_indices(probs, shots, rng)) {
        out.add(render_bitstring(idx, measured), static_cast<double>(count));
    }
    return out;
}

/// Exact outcome probabilities of a full state over `measured`.
template <typename Real>
CountsDistribution probabilities(const BasicStateSlice<Real> &state, std::vector<int> measured = {}) {
    if (measured.empty()) {
        measured = all_qubits(static_cast<int>(state.num_bits()));
    }
    CountsDistribution out;
    for (std::size_t i = 0; i < state.size(); ++i) {
        const double p = static_cast<double>(std::norm(state[i]));
        if (p > 0.0) {
            out.add(render_bitstring(i, measured), p);
        }
    }
    return out;
}

}  // namespace qsimfab
