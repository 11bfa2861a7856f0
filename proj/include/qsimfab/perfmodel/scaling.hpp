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

#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsimfab/circuits/lattice.hpp"
#include "qsimfab/circuits/qpe.hpp"
#include "qsimfab/circuits/tfim.hpp"
#include "qsimfab/perfmodel/traffic.hpp"

namespace qsimfab::perfmodel {

/// Builds the circuit of a benchmark family at a given qubit count.
using CircuitFamily = std::function<Circuit(int n)>;

/// QPE with n - 1 counting qubits. The numerator only changes angles, so a
/// fixed odd value is used.
inline Circuit qpe_family(int n) { return circuits::build_qpe({n - 1, 1}); }

inline CircuitFamily tfim_family(int steps) {
    return [steps](int n) {
        return circuits::build_tfim(circuits::tfim_on_lattice(circuits::default_lattice(n), 1, 1, 1, steps));
    };
}

struct ScalingPoint {
    int ranks = 1;
    int n = 0;
    double seconds = 0;
    double efficiency = 1;
    double speedup = 1;
    TrafficProfile profile;
};

inline void require_rank_axis(int max_ranks, const Topology &topo) {
    if (max_ranks < 1 || !std::has_single_bit(static_cast<unsigned>(max_ranks))) {
        throw std::invalid_argument("max ranks must be a power of two");
    }
    if (max_ranks > topo.total_ranks()) {
        throw std::invalid_argument("topology '" + topo.name + "' has only " + std::to_string(topo.total_ranks()) +
                                    " ranks");
    }
}

/// One qubit more per doubling of ranks, so every rank keeps a slice of
/// base_n qubits. Efficiency is the memory-only time of the same run over
/// its full predicted time, i.e. the single-rank time rescaled to the
/// larger circuit's sweep count. Speedup is ranks * efficiency.
inline std::vector<ScalingPoint> weak_scaling_curve(int base_n, const CircuitFamily &family, const Topology &topo,
                                                    int max_ranks, const dist::RunOptions &opts = {}) {
    require_rank_axis(max_ranks, topo);
    std::vector<ScalingPoint> out;
    for (int p = 1, j = 0; p <= max_ranks; p *= 2, ++j) {
        ScalingPoint pt;
        pt.ranks = p;
        pt.n = base_n + j;
        pt.profile = schedule_traffic(family(pt.n), p, topo.precision, opts);
        const TimeBreakdown t = predict_breakdown(pt.profile, topo);
        pt.seconds = t.total();
        pt.efficiency = t.local_seconds / t.total();
        pt.speedup = p * pt.efficiency;
        out.push_back(std::move(pt));
    }
    return out;
}

/// Fixed circuit, growing rank count. Speedup is relative to one rank and
/// efficiency is speedup / ranks.
inline std::vector<ScalingPoint> strong_scaling_curve(const Circuit &circuit, const Topology &topo, int max_ranks,
                                                      const dist::RunOptions &opts = {}) {
    require_rank_axis(max_ranks, topo);
    std::vector<ScalingPoint> out;
    double t1 = 0;
    for (int p = 1; p <= max_ranks && p < (1 << std::min(circuit.num_qubits, 30)); p *= 2) {
        ScalingPoint pt;
        pt.ranks = p;
        pt.n = circuit.num_qubits;
        pt.profile = schedule_traffic(circuit, p, topo.precision, opts);
        pt.seconds = predict_time(pt.profile, topo);
        if (p == 1) t1 = pt.seconds;
        pt.speedup = t1 / pt.seconds;
        pt.efficiency = pt.speedup / p;
        out.push_back(std::move(pt));
    }
    return out;
}

struct NamedCurve {
    std::string name;
    std::vector<ScalingPoint> points;
};

/// Time ratios against the baseline curve, per rank count: baseline time
/// over each curve's time, so values above 1 mean faster than baseline.
inline std::map<std::string, std::vector<double>> compare_topologies(const std::vector<NamedCurve> &curves,
                                                                     const std::string &baseline) {
    const NamedCurve *base = nullptr;
    for (const auto &c : curves) {
        if (c.name == baseline) base = &c;
    }
    if (base == nullptr) throw std::invalid_argument("baseline curve '" + baseline + "' not found");
    std::map<std::string, std::vector<double>> out;
    for (const auto &c : curves) {
        if (c.points.size() != base->points.size()) throw std::invalid_argument("curves have different rank axes");
        std::vector<double> ratios;
        for (std::size_t i = 0; i < c.points.size(); ++i) {
            if (c.points[i].ranks != base->points[i].ranks || c.points[i].n != base->points[i].n) {
                throw std::invalid_argument("curves have different rank axes");
            }
            ratios.push_back(base->points[i].seconds / c.points[i].seconds);
        }
        out[c.name] = std::move(ratios);
    }
    return out;
}

/// Plot-ready CSV: one row per rank count.
inline void write_curve_csv(std::ostream &os, const std::vector<ScalingPoint> &curve) {
    os << "P,n,T_seconds,efficiency,speedup\n";
    const auto old = os.precision(17);
    for (const auto &p : curve) {
        os << p.ranks << ',' << p.n << ',' << p.seconds << ',' << p.efficiency << ',' << p.speedup << '\n';
    }
    os.precision(old);
}

}  // namespace qsimfab::perfmodel
