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
#include <stdexcept>
#include <vector>

#include "qsimfab/svcore/apply.hpp"
#include "qsimfab/svcore/circuit.hpp"

namespace qsimfab {

inline constexpr int kDefaultFusionWidth = 3;

namespace detail {

inline bool fusable(const GateOp &g, int max_width) {
    // SWAP stays standalone so the distributed engine can relabel it.
    if (g.kind == GateKind::SWAP && g.controls.empty()) {
        return false;
    }
    return static_cast<int>(touched_qubits(g).size()) <= max_width;
}

/// Unitary of a gate sequence over `qubits` (ascending; bit j = qubits[j]).
inline Matrix block_unitary(const std::vector<GateOp> &ops, const std::vector<int> &qubits) {
    auto local = [&](int q) {
        return static_cast<int>(std::lower_bound(qubits.begin(), qubits.end(), q) - qubits.begin());
    };
    std::vector<GateOp> remapped = ops;
    for (GateOp &g : remapped) {
        for (int &t : g.targets) t = local(t);
        for (int &c : g.controls) c = local(c);
    }
    const auto w = static_cast<unsigned>(qubits.size());
    const std::size_t dim = std::size_t{1} << w;
    Matrix m(dim);
    for (std::size_t col = 0; col < dim; ++col) {
        StateSlice column = StateSlice::basis(w, col);
        for (const GateOp &g : remapped) {
            apply_gate(column, g);
        }
        for (std::size_t row = 0; row < dim; ++row) {
            m(row, col) = column[row];
        }
    }
    return m;
}

}  // namespace detail

/// Greedy left-to-right gate fusion. Consecutive gates are merged while the
/// union of the qubits they touch stays within `max_width`; gates are never
/// reordered. A block holding a single gate is emitted unchanged, SWAPs and
/// gates wider than `max_width` pass through as-is.
inline Circuit fuse(const Circuit &circuit, int max_width = kDefaultFusionWidth) {
    if (max_width < 1 || max_width > kMaxFusionWidth) {
        throw std::invalid_argument("fusion width must be in [1, " + std::to_string(kMaxFusionWidth) + "]");
    }
    Circuit out = circuit;
    out.ops.clear();

    std::vector<GateOp> block;
    std::vector<int> block_qubits;
    auto flush = [&] {
        if (block.size() == 1) {
            out.ops.push_back(std::move(block.front()));
        } else if (block.size() > 1) {
            out.ops.push_back(gates::fused(block_qubits, detail::block_unitary(block, block_qubits)));
        }
        block.clear();
        block_qubits.clear();
    };

    for (const GateOp &g : circuit.ops) {
        if (!detail::fusable(g, max_width)) {
            flush();
            out.ops.push_back(g);
            continue;
        }
        std::vector<int> merged = block_qubits;
        for (int q : touched_qubits(g)) {
            if (!std::binary_search(block_qubits.begin(), block_qubits.end(), q)) {
                merged.push_back(q);
            }
        }
        std::sort(merged.begin(), merged.end());
        if (static_cast<int>(merged.size()) > max_width) {
            flush();
            merged = touched_qubits(g);
            std::sort(merged.begin(), merged.end());
        }
        block.push_back(g);
        block_qubits = std::move(merged);
    }
    flush();
    return out;
}

}  // namespace qsimfab
