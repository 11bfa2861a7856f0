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

#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qsimfab/circuits/qft.hpp"
#include "qsimfab/svcore/circuit.hpp"
#include "qsimfab/svcore/sampling.hpp"

namespace qsimfab::circuits {

/// Phase estimation of P(2 pi phi) with phi = numerator / 2^k.
struct QpeSpec {
    int k = 1;  // counting qubits
    std::uint64_t numerator = 0;

    double phase() const { return static_cast<double>(numerator) / static_cast<double>(1ULL << k); }
};

inline void validate(const QpeSpec &s) {
    if (s.k < 1 || s.k > 62) throw std::invalid_argument("QPE needs between 1 and 62 counting qubits");
    if (s.numerator >= (std::uint64_t{1} << s.k)) {
        throw std::invalid_argument("phase numerator " + std::to_string(s.numerator) + " does not fit in " +
                                    std::to_string(s.k) + " bits");
    }
}

/// Counting register on qubits 0..k-1, eigenstate |1> of the phase gate on
/// qubit k. Only the counting register is measured.
inline Circuit build_qpe(const QpeSpec &spec) {
    validate(spec);
    const int k = spec.k;
    Circuit c;
    c.num_qubits = k + 1;
    c.name = "qpe_k" + std::to_string(k) + "_m" + std::to_string(spec.numerator);
    c.ops.push_back(gates::x(k));
    for (int j = 0; j < k; ++j) c.ops.push_back(gates::h(j));
    for (int j = 0; j < k; ++j) {
        // U^(2^j) = P(2 pi phi 2^j); reduce the numerator first so the angle stays exact.
        const std::uint64_t m = (spec.numerator << j) & ((std::uint64_t{1} << k) - 1);
        const double angle = 2 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(1ULL << k);
        c.ops.push_back(gates::cp(angle, j, k));
    }
    std::vector<int> counting(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) counting[static_cast<std::size_t>(j)] = j;
    for (GateOp &g : build_inverse_qft(counting)) c.ops.push_back(std::move(g));
    c.measured_qubits = counting;
    return c;
}

/// Noiseless outcome distribution: all mass on the numerator.
inline CountsDistribution qpe_ideal(const QpeSpec &spec) {
    validate(spec);
    std::vector<int> counting(static_cast<std::size_t>(spec.k));
    for (int j = 0; j < spec.k; ++j) counting[static_cast<std::size_t>(j)] = j;
    CountsDistribution d;
    d.add(render_bitstring(spec.numerator, counting), 1.0);
    return d;
}

}  // namespace qsimfab::circuits
