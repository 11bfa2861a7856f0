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
#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "qsimfab/svcore/gate.hpp"
#include "qsimfab/svcore/types.hpp"

namespace qsimfab {

namespace detail {

/// Spreads the bits of `v` around zero bits inserted at `sorted_positions`.
inline std::uint64_t insert_zero_bits(std::uint64_t v, std::span<const int> sorted_positions) {
    for (int p : sorted_positions) {
        const std::uint64_t low = v & ((std::uint64_t{1} << p) - 1);
        v = ((v >> p) << (p + 1)) | low;
    }
    return v;
}

}  // namespace detail

/// Controlled-U on a slice. `target_pos[j]` is the index bit carrying bit j of
/// U's index; the update happens only where all `control_pos` bits are set.
template <typename Real>
void apply_controlled_matrix(std::span<std::complex<Real>> amps, const Matrix &u, std::span<const int> target_pos,
                             std::span<const int> control_pos) {
    using C = std::complex<Real>;
    const std::size_t t = target_pos.size();
    if (u.dim != (std::size_t{1} << t)) {
        throw std::invalid_argument("matrix dimension does not match target count");
    }
    std::vector<int> sorted(target_pos.begin(), target_pos.end());
    sorted.insert(sorted.end(), control_pos.begin(), control_pos.end());
    std::sort(sorted.begin(), sorted.end());
    const unsigned total_bits = static_cast<unsigned>(std::countr_zero(amps.size()));
    if (!sorted.empty() && sorted.back() >= static_cast<int>(total_bits)) {
        throw std::out_of_range("gate position outside slice");
    }
    std::uint64_t cmask = 0;
    for (int c : control_pos) {
        cmask |= std::uint64_t{1} << c;
    }
    const std::size_t dim = u.dim;
    std::vector<std::uint64_t> offsets(dim, 0);
    for (std::size_t j = 0; j < dim; ++j) {
        for (std::size_t b = 0; b < t; ++b) {
            if ((j >> b) & 1U) {
                offsets[j] |= std::uint64_t{1} << target_pos[b];
            }
        }
    }
    std::vector<C> m(u.data.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        m[i] = C(static_cast<Real>(u.data[i].real()), static_cast<Real>(u.data[i].imag()));
    }
    const std::uint64_t count = amps.size() >> sorted.size();

    if (t == 1) {
        const C m00 = m[0], m01 = m[1], m10 = m[2], m11 = m[3];
        const std::uint64_t off = offsets[1];
        for (std::uint64_t i = 0; i < count; ++i) {
            const std::uint64_t base = detail::insert_zero_bits(i, sorted) | cmask;
            const C a0 = amps[base];
            const C a1 = amps[base | off];
            amps[base] = m00 * a0 + m01 * a1;
            amps[base | off] = m10 * a0 + m11 * a1;
        }
        return;
    }

    std::vector<C> in(dim), out(dim);
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint64_t base = detail::insert_zero_bits(i, sorted) | cmask;
        for (std::size_t j = 0; j < dim; ++j) {
            in[j] = amps[base | offsets[j]];
        }
        for (std::size_t r = 0; r < dim; ++r) {
            C acc{0, 0};
            const C *row = &m[r * dim];
            for (std::size_t c = 0; c < dim; ++c) {
                acc += row[c] * in[c];
            }
            out[r] = acc;
        }
        for (std::size_t j = 0; j < dim; ++j) {
            amps[base | offsets[j]] = out[j];
        }
    }
}

/// Multiplies each amplitude by diag[d], where bit j of d is taken from index
/// bit `bit_source[j]` when that is >= 0, and from `fixed_bits` otherwise.
template <typename Real>
void apply_diagonal(std::span<std::complex<Real>> amps, std::span<const cplx> diag, std::span<const int> bit_source,
                    std::uint64_t fixed_bits) {
    using C = std::complex<Real>;
    if (diag.size() != (std::size_t{1} << bit_source.size())) {
        throw std::invalid_argument("diagonal length does not match bit sources");
    }
    std::vector<C> d(diag.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] = C(static_cast<Real>(diag[i].real()), static_cast<Real>(diag[i].imag()));
    }
    for (std::uint64_t i = 0; i < amps.size(); ++i) {
        std::uint64_t idx = fixed_bits;
        for (std::size_t j = 0; j < bit_source.size(); ++j) {
            if (bit_source[j] >= 0 && ((i >> bit_source[j]) & 1U)) {
                idx |= std::uint64_t{1} << j;
            }
        }
        amps[i] *= d[idx];
    }
}

inline std::vector<cplx> diagonal_of(const Matrix &m) {
    std::vector<cplx> d(m.dim);
    for (std::size_t i = 0; i < m.dim; ++i) {
        d[i] = m(i, i);
    }
    return d;
}

/// Applies `g` in place to a full state whose bit q is program qubit q.
template <typename Real>
void apply_gate(BasicStateSlice<Real> &state, const GateOp &g) {
    validate_gate(g, static_cast<int>(state.num_bits()));
    std::span<std::complex<Real>> amps(state.amps());
    if (is_diagonal(g)) {
        const std::vector<int> qs = touched_qubits(g);
        const std::vector<cplx> d = diagonal_of(full_matrix(g));
        apply_diagonal<Real>(amps, d, qs, 0);
    } else {
        apply_controlled_matrix<Real>(amps, target_matrix(g), g.targets, g.controls);
    }
}

/// Value-returning form of apply_gate.
template <typename Real>
BasicStateSlice<Real> apply_gate_dense(BasicStateSlice<Real> state, const GateOp &g) {
    apply_gate(state, g);
    return state;
}

}  // namespace qsimfab
