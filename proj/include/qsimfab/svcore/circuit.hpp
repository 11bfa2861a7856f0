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
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsimfab/svcore/gate.hpp"

namespace qsimfab {

struct Circuit {
    int num_qubits = 0;
    std::vector<GateOp> ops;
    std::vector<int> measured_qubits;
    std::string name;

    /// Measures every qubit, lowest first.
    void measure_all() {
        measured_qubits.resize(static_cast<std::size_t>(num_qubits));
        std::iota(measured_qubits.begin(), measured_qubits.end(), 0);
    }

    friend bool operator==(const Circuit &, const Circuit &) = default;
};

inline void validate_circuit(const Circuit &c) {
    if (c.num_qubits < 1) {
        throw std::invalid_argument("circuit must have at least one qubit");
    }
    for (const GateOp &g : c.ops) {
        validate_gate(g, c.num_qubits);
    }
    std::vector<int> m = c.measured_qubits;
    for (int q : m) {
        if (q < 0 || q >= c.num_qubits) {
            throw std::out_of_range("measured qubit " + std::to_string(q) + " out of range");
        }
    }
    std::sort(m.begin(), m.end());
    if (std::adjacent_find(m.begin(), m.end()) != m.end()) {
        throw std::invalid_argument("duplicate measured qubit");
    }
}

/// Number of layers when gates on disjoint qubits share a layer.
inline int circuit_depth(const Circuit &c) {
    std::vector<int> level(static_cast<std::size_t>(c.num_qubits), 0);
    int depth = 0;
    for (const GateOp &g : c.ops) {
        int l = 0;
        for (int q : touched_qubits(g)) {
            l = std::max(l, level[static_cast<std::size_t>(q)]);
        }
        ++l;
        for (int q : touched_qubits(g)) {
            level[static_cast<std::size_t>(q)] = l;
        }
        depth = std::max(depth, l);
    }
    return depth;
}

}  // namespace qsimfab
