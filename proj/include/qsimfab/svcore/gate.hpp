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
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qsimfab/svcore/types.hpp"

namespace qsimfab {

/// Widest block the fusion pass (or a caller) may build.
inline constexpr int kMaxFusionWidth = 5;

enum class GateKind { H, X, Y, Z, RX, RZ, P, CX, CZ, CP, RZZ, SWAP, Fused };

inline std::string_view gate_name(GateKind k) {
    switch (k) {
        case GateKind::H: return "h";
        case GateKind::X: return "x";
        case GateKind::Y: return "y";
        case GateKind::Z: return "z";
        case GateKind::RX: return "rx";
        case GateKind::RZ: return "rz";
        case GateKind::P: return "p";
        case GateKind::CX: return "cx";
        case GateKind::CZ: return "cz";
        case GateKind::CP: return "cp";
        case GateKind::RZZ: return "rzz";
        case GateKind::SWAP: return "swap";
        case GateKind::Fused: return "fused";
    }
    return "?";
}

/// One gate instruction. The gate is controlled-U: U acts on `targets`
/// (targets[0] is the least significant bit of U's index) and is applied
/// only where every qubit in `controls` is 1.
struct GateOp {
    GateKind kind = GateKind::H;
    std::vector<int> targets;
    std::vector<int> controls;
    std::vector<double> params;
    Matrix matrix;  // only for Fused

    friend bool operator==(const GateOp &a, const GateOp &b) {
        return a.kind == b.kind && a.targets == b.targets && a.controls == b.controls &&
               a.params == b.params && a.matrix.dim == b.matrix.dim && a.matrix.data == b.matrix.data;
    }
};

namespace gates {

inline GateOp h(int q) { return {GateKind::H, {q}, {}, {}, {}}; }
inline GateOp x(int q) { return {GateKind::X, {q}, {}, {}, {}}; }
inline GateOp y(int q) { return {GateKind::Y, {q}, {}, {}, {}}; }
inline GateOp z(int q) { return {GateKind::Z, {q}, {}, {}, {}}; }
inline GateOp rx(double theta, int q) { return {GateKind::RX, {q}, {}, {theta}, {}}; }
inline GateOp rz(double theta, int q) { return {GateKind::RZ, {q}, {}, {theta}, {}}; }
inline GateOp p(double theta, int q) { return {GateKind::P, {q}, {}, {theta}, {}}; }
inline GateOp cx(int control, int target) { return {GateKind::CX, {target}, {control}, {}, {}}; }
inline GateOp cz(int control, int target) { return {GateKind::CZ, {target}, {control}, {}, {}}; }
inline GateOp cp(double theta, int control, int target) {
    return {GateKind::CP, {target}, {control}, {theta}, {}};
}
inline GateOp rzz(double theta, int a, int b) { return {GateKind::RZZ, {a, b}, {}, {theta}, {}}; }
inline GateOp swap(int a, int b) { return {GateKind::SWAP, {a, b}, {}, {}, {}}; }
inline GateOp fused(std::vector<int> qubits, Matrix m) {
    return {GateKind::Fused, std::move(qubits), {}, {}, std::move(m)};
}

}  // namespace gates

/// Matrix of U acting on the gate's targets (controls excluded).
inline Matrix target_matrix(const GateOp &g) {
    using std::cos;
    using std::exp;
    using std::sin;
    const cplx i{0.0, 1.0};
    const double s = 1.0 / std::numbers::sqrt2;
    auto param = [&](std::size_t idx) {
        if (g.params.size() <= idx) {
            throw std::invalid_argument(std::string(gate_name(g.kind)) + " gate missing angle parameter");
        }
        return g.params[idx];
    };
    switch (g.kind) {
        case GateKind::H: return Matrix(2, {s, s, s, -s});
        case GateKind::X:
        case GateKind::CX: return Matrix(2, {0.0, 1.0, 1.0, 0.0});
        case GateKind::Y: return Matrix(2, {0.0, -i, i, 0.0});
        case GateKind::Z:
        case GateKind::CZ: return Matrix(2, {1.0, 0.0, 0.0, -1.0});
        case GateKind::RX: {
            const double t = param(0) / 2;
            return Matrix(2, {cos(t), -i * sin(t), -i * sin(t), cos(t)});
        }
        case GateKind::RZ: {
            const double t = param(0) / 2;
            return Matrix(2, {exp(-i * t), 0.0, 0.0, exp(i * t)});
        }
        case GateKind::P:
        case GateKind::CP: return Matrix(2, {1.0, 0.0, 0.0, exp(i * param(0))});
        case GateKind::RZZ: {
            const double t = param(0) / 2;
            Matrix m(4);
            m(0, 0) = exp(-i * t);
            m(1, 1) = exp(i * t);
            m(2, 2) = exp(i * t);
            m(3, 3) = exp(-i * t);
            return m;
        }
        case GateKind::SWAP: {
            Matrix m(4);
            m(0, 0) = 1.0;
            m(1, 2) = 1.0;
            m(2, 1) = 1.0;
            m(3, 3) = 1.0;
            return m;
        }
        case GateKind::Fused: return g.matrix;
    }
    throw std::logic_error("unhandled gate kind");
}

/// Qubits touched by the gate: targets followed by controls.
inline std::vector<int> touched_qubits(const GateOp &g) {
    std::vector<int> q = g.targets;
    q.insert(q.end(), g.controls.begin(), g.controls.end());
    return q;
}

/// Matrix of the whole controlled gate over touched_qubits(g), index bit j
/// corresponding to touched_qubits(g)[j].
inline Matrix full_matrix(const GateOp &g) {
    const Matrix u = target_matrix(g);
    const std::size_t t = g.targets.size();
    const std::size_t dim = std::size_t{1} << (t + g.controls.size());
    const std::size_t tmask = (std::size_t{1} << t) - 1;
    const std::size_t cmask = (dim - 1) & ~tmask;
    Matrix m(dim);
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            if ((r & cmask) != (c & cmask)) {
                continue;
            }
            if ((r & cmask) == cmask) {
                m(r, c) = u(r & tmask, c & tmask);
            } else {
                m(r, c) = r == c ? 1.0 : 0.0;
            }
        }
    }
    return m;
}

inline bool is_diagonal(const GateOp &g) {
    switch (g.kind) {
        case GateKind::Z:
        case GateKind::RZ:
        case GateKind::P:
        case GateKind::CZ:
        case GateKind::CP:
        case GateKind::RZZ: return true;
        case GateKind::Fused: return g.matrix.is_diagonal();
        default: return false;
    }
}

/// Checks qubit indices and, for fused blocks, unitarity. Throws
/// std::out_of_range / std::invalid_argument.
inline void validate_gate(const GateOp &g, int num_qubits) {
    if (g.targets.empty()) {
        throw std::invalid_argument("gate has no targets");
    }
    std::vector<int> all = touched_qubits(g);
    for (int q : all) {
        if (q < 0 || q >= num_qubits) {
            throw std::out_of_range("qubit index " + std::to_string(q) + " out of range for " +
                                    std::to_string(num_qubits) + " qubits");
        }
    }
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
        throw std::invalid_argument("gate qubits must be distinct (targets and controls disjoint)");
    }
    std::size_t expect_targets = 1;
    switch (g.kind) {
        case GateKind::RZZ:
        case GateKind::SWAP: expect_targets = 2; break;
        case GateKind::Fused: expect_targets = g.targets.size(); break;
        default: break;
    }
    if (g.targets.size() != expect_targets) {
        throw std::invalid_argument(std::string(gate_name(g.kind)) + " gate has wrong number of targets");
    }
    if ((g.kind == GateKind::CX || g.kind == GateKind::CZ || g.kind == GateKind::CP) && g.controls.empty()) {
        throw std::invalid_argument(std::string(gate_name(g.kind)) + " gate requires a control");
    }
    if (g.kind == GateKind::Fused) {
        if (static_cast<int>(g.targets.size()) > kMaxFusionWidth) {
            throw std::invalid_argument("fused block wider than the fusion width cap");
        }
        if (g.matrix.dim != (std::size_t{1} << g.targets.size())) {
            throw std::invalid_argument("fused block matrix dimension does not match its qubits");
        }
        if (g.matrix.unitarity_error() > 1e-10) {
            throw std::invalid_argument("fused block matrix is not unitary");
        }
    }
}

inline std::string to_string(const GateOp &g) {
    std::ostringstream os;
    os << gate_name(g.kind);
    if (!g.params.empty()) {
        os << '[';
        for (std::size_t i = 0; i < g.params.size(); ++i) {
            os << (i ? "," : "") << g.params[i];
        }
        os << ']';
    }
    os << '(';
    bool first = true;
    for (int c : g.controls) {
        os << (first ? "" : ",") << 'c' << c;
        first = false;
    }
    for (int t : g.targets) {
        os << (first ? "" : ",") << t;
        first = false;
    }
    os << ')';
    return os.str();
}

}  // namespace qsimfab
