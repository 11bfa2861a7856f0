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

#include "qsimfab/svcore/circuit.hpp"
#include "qsimfab/util/random.hpp"

namespace qsimfab::circuits {

/// Seeded uniform draw over {H, X, RZ, RX, CX, CZ, CP, SWAP}; two-qubit gates
/// pick two distinct qubits, angles are uniform in [0, 2*pi).
inline Circuit build_random_circuit(int n, int num_gates, std::uint64_t seed) {
    if (n < 2) {
        throw std::invalid_argument("random circuits need at least 2 qubits");
    }
    Rng rng(seed);
    Circuit c;
    c.num_qubits = n;
    c.name = "random_n" + std::to_string(n) + "_g" + std::to_string(num_gates) + "_s" + std::to_string(seed);
    c.ops.reserve(static_cast<std::size_t>(std::max(num_gates, 0)));
    auto qubit = [&] { return static_cast<int>(rng.index(static_cast<std::uint64_t>(n))); };
    auto pair = [&] {
        const int a = qubit();
        int b = static_cast<int>(rng.index(static_cast<std::uint64_t>(n - 1)));
        if (b >= a) ++b;
        return std::pair{a, b};
    };
    auto angle = [&] { return rng.uniform() * 2 * std::numbers::pi; };
    for (int i = 0; i < num_gates; ++i) {
        switch (rng.index(8)) {
            case 0: c.ops.push_back(gates::h(qubit())); break;
            case 1: c.ops.push_back(gates::x(qubit())); break;
            case 2: {
                const double a = angle();
                c.ops.push_back(gates::rz(a, qubit()));
                break;
            }
            case 3: {
                const double a = angle();
                c.ops.push_back(gates::rx(a, qubit()));
                break;
            }
            case 4: {
                auto [a, b] = pair();
                c.ops.push_back(gates::cx(a, b));
                break;
            }
            case 5: {
                auto [a, b] = pair();
                c.ops.push_back(gates::cz(a, b));
                break;
            }
            case 6: {
                const double t = angle();
                auto [a, b] = pair();
                c.ops.push_back(gates::cp(t, a, b));
                break;
            }
            default: {
                auto [a, b] = pair();
                c.ops.push_back(gates::swap(a, b));
                break;
            }
        }
    }
    c.measure_all();
    return c;
}

}  // namespace qsimfab::circuits
