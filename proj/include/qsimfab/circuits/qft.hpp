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
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qsimfab/svcore/gate.hpp"

namespace qsimfab::circuits {

/// QFT on `qubits`, where qubits[0] is the least significant bit:
/// |x> -> 2^(-k/2) sum_y exp(2 pi i x y / 2^k) |y>. Ends with the
/// bit-reversal SWAP network.
inline std::vector<GateOp> build_qft(const std::vector<int> &qubits) {
    if (qubits.empty()) throw std::invalid_argument("QFT needs at least one qubit");
    const int k = static_cast<int>(qubits.size());
    std::vector<GateOp> ops;
    for (int j = k - 1; j >= 0; --j) {
        ops.push_back(gates::h(qubits[j]));
        for (int m = j - 1; m >= 0; --m) {
            ops.push_back(gates::cp(std::numbers::pi / static_cast<double>(1ULL << (j - m)), qubits[m], qubits[j]));
        }
    }
    for (int i = 0; i < k / 2; ++i) ops.push_back(gates::swap(qubits[i], qubits[k - 1 - i]));
    return ops;
}

/// Exact inverse of build_qft: reversed order, negated phases.
inline std::vector<GateOp> build_inverse_qft(const std::vector<int> &qubits) {
    std::vector<GateOp> ops = build_qft(qubits);
    std::reverse(ops.begin(), ops.end());
    for (GateOp &g : ops) {
        if (g.kind == GateKind::CP) g.params[0] = -g.params[0];
    }
    return ops;
}

}  // namespace qsimfab::circuits
