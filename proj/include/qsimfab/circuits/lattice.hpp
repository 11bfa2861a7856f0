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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qsimfab::circuits {

enum class LatticeKind { Square, Triangular };

inline LatticeKind parse_lattice_kind(std::string_view s) {
    if (s == "square") return LatticeKind::Square;
    if (s == "triangular") return LatticeKind::Triangular;
    throw std::invalid_argument("unknown lattice kind '" + std::string(s) + "' (expected square or triangular)");
}

inline std::string_view to_string(LatticeKind k) { return k == LatticeKind::Square ? "square" : "triangular"; }

struct LatticeSpec {
    int rows = 1;
    int cols = 1;
    LatticeKind kind = LatticeKind::Square;
    bool periodic = true;

    int sites() const { return rows * cols; }
};

using Edge = std::pair<int, int>;

/// Site (r, c) is r * cols + c. Each cell contributes its right and down
/// neighbours, plus the down-right diagonal on triangular lattices, wrapping
/// when periodic. Self-loops and repeated pairs are dropped; the first
/// occurrence keeps its place.
inline std::vector<Edge> generate_lattice(const LatticeSpec &spec) {
    if (spec.rows < 1 || spec.cols < 1) throw std::invalid_argument("lattice dimensions must be at least 1");
    std::vector<Edge> edges;
    std::vector<Edge> seen;  // normalized (min, max), kept sorted
    auto add = [&](int r, int c, int dr, int dc) {
        int r2 = r + dr, c2 = c + dc;
        if (spec.periodic) {
            r2 %= spec.rows;
            c2 %= spec.cols;
        } else if (r2 >= spec.rows || c2 >= spec.cols) {
            return;
        }
        const int a = r * spec.cols + c, b = r2 * spec.cols + c2;
        if (a == b) return;
        const Edge key{std::min(a, b), std::max(a, b)};
        auto it = std::lower_bound(seen.begin(), seen.end(), key);
        if (it != seen.end() && *it == key) return;
        seen.insert(it, key);
        edges.emplace_back(a, b);
    };
    for (int r = 0; r < spec.rows; ++r) {
        for (int c = 0; c < spec.cols; ++c) {
            add(r, c, 0, 1);
            add(r, c, 1, 0);
            if (spec.kind == LatticeKind::Triangular) add(r, c, 1, 1);
        }
    }
    return edges;
}

/// Default lattice for an N-site run: a periodic triangular grid whose row
/// count is the largest divisor of N not above sqrt(N). Prime N gives a ring.
inline LatticeSpec default_lattice(int sites) {
    if (sites < 1) throw std::invalid_argument("lattice needs at least one site");
    int rows = 1;
    for (int r = 1; r * r <= sites; ++r) {
        if (sites % r == 0) rows = r;
    }
    return {rows, sites / rows, LatticeKind::Triangular, true};
}

}  // namespace qsimfab::circuits
