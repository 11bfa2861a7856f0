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
#include <vector>

#include "qsimfab/circuits/lattice.hpp"
#include "qsimfab/svcore/circuit.hpp"
#include "qsimfab/util/kv_config.hpp"

namespace qsimfab::circuits {

/// Transverse-field Ising evolution under H = -J sum_edges ZZ - h sum_sites X.
struct TfimSpec {
    int sites = 1;
    std::vector<Edge> edges;
    double J = 1.0;
    double h = 1.0;
    double t_total = 1.0;
    int steps = 10;

    double dt() const { return t_total / steps; }
};

inline void validate(const TfimSpec &s) {
    if (s.sites < 1) throw std::invalid_argument("TFIM needs at least one site");
    if (s.steps < 1) throw std::invalid_argument("TFIM needs at least one Trotter step");
    std::vector<Edge> norm;
    for (const auto &[a, b] : s.edges) {
        if (a < 0 || b < 0 || a >= s.sites || b >= s.sites) {
            throw std::out_of_range("edge (" + std::to_string(a) + ", " + std::to_string(b) + ") references a missing site");
        }
        if (a == b) throw std::invalid_argument("edge on site " + std::to_string(a) + " is a self-loop");
        norm.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(norm.begin(), norm.end());
    if (std::adjacent_find(norm.begin(), norm.end()) != norm.end()) {
        throw std::invalid_argument("duplicate edge in TFIM spec");
    }
}

inline TfimSpec tfim_on_lattice(const LatticeSpec &lattice, double J, double h, double t_total, int steps) {
    return {lattice.sites(), generate_lattice(lattice), J, h, t_total, steps};
}

/// First-order Trotter circuit. Starts from |+>^N, then each step applies
/// RZZ(-2 J dt) on every edge in order followed by RX(-2 h dt) on every site.
inline Circuit build_tfim(const TfimSpec &spec) {
    validate(spec);
    Circuit c;
    c.num_qubits = spec.sites;
    c.name = "tfim_n" + std::to_string(spec.sites) + "_steps" + std::to_string(spec.steps);
    for (int q = 0; q < spec.sites; ++q) c.ops.push_back(gates::h(q));
    const double zz = -2 * spec.J * spec.dt();
    const double x = -2 * spec.h * spec.dt();
    for (int s = 0; s < spec.steps; ++s) {
        for (const auto &[a, b] : spec.edges) c.ops.push_back(gates::rzz(zz, a, b));
        for (int q = 0; q < spec.sites; ++q) c.ops.push_back(gates::rx(x, q));
    }
    c.measure_all();
    return c;
}

/// Reads a TFIM problem from a key=value file. Recognized keys: rows, cols,
/// lattice (square|triangular), periodic, J, h, t_total, steps. Missing
/// lattice keys fall back to default_lattice(sites).
inline TfimSpec tfim_from_config(const util::KvConfig &cfg, int sites, int steps) {
    LatticeSpec lattice = default_lattice(sites);
    if (cfg.has("rows") || cfg.has("cols")) {
        lattice.rows = static_cast<int>(cfg.get_int("rows", 1));
        lattice.cols = static_cast<int>(cfg.get_int("cols", 1));
    }
    if (auto k = cfg.get("lattice")) lattice.kind = parse_lattice_kind(*k);
    lattice.periodic = cfg.get_bool("periodic", lattice.periodic);
    if (lattice.sites() != sites) {
        throw std::invalid_argument(cfg.origin() + ": lattice " + std::to_string(lattice.rows) + "x" +
                                    std::to_string(lattice.cols) + " does not have " + std::to_string(sites) + " sites");
    }
    return tfim_on_lattice(lattice, cfg.get_double("J", 1.0), cfg.get_double("h", 1.0),
                           cfg.get_double("t_total", 1.0), static_cast<int>(cfg.get_int("steps", steps)));
}

}  // namespace qsimfab::circuits
