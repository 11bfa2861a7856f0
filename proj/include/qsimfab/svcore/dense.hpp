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
#include <stdexcept>
#include <string>

#include "qsimfab/svcore/apply.hpp"
#include "qsimfab/svcore/circuit.hpp"

namespace qsimfab {

/// Largest qubit count the single-address-space simulator will allocate.
inline constexpr int kDenseQubitCap = 26;

class CapacityError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// Reference simulator: every other execution path is checked against this.
template <typename Real = double>
BasicStateSlice<Real> dense_run(const Circuit &circuit, std::uint64_t initial = 0, int max_qubits = kDenseQubitCap) {
    if (circuit.num_qubits > max_qubits) {
        throw CapacityError("dense simulation of " + std::to_string(circuit.num_qubits) +
                            " qubits exceeds the cap of " + std::to_string(max_qubits));
    }
    validate_circuit(circuit);
    auto state = BasicStateSlice<Real>::basis(static_cast<unsigned>(circuit.num_qubits), initial);
    for (const GateOp &g : circuit.ops) {
        apply_gate(state, g);
    }
    return state;
}

}  // namespace qsimfab
