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
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "qsimfab/dist/layout.hpp"
#include "qsimfab/dist/planner.hpp"
#include "qsimfab/perfmodel/topology.hpp"
#include "qsimfab/svcore/circuit.hpp"

namespace qsimfab::perfmodel {

/// Per-rank data movement of one circuit run. Exchange maps are keyed by
/// rank-id bit and count one direction only.
struct TrafficProfile {
    int n = 0;
    int ranks = 1;
    PrecisionMode precision = PrecisionMode::Single;
    std::uint64_t sweeps = 0;
    std::uint64_t local_bytes = 0;
    std::map<int, std::uint64_t> exchange_bytes_per_level;
    std::map<int, std::uint64_t> swap_count_per_level;

    std::uint64_t exchange_bytes() const {
        std::uint64_t t = 0;
        for (const auto &[bit, b] : exchange_bytes_per_level) t += b;
        return t;
    }
    std::uint64_t swap_count() const {
        std::uint64_t t = 0;
        for (const auto &[bit, c] : swap_count_per_level) t += c;
        return t;
    }
};

/// Replays the distributed engine's dispatch on layouts alone. Each applied
/// gate is one read-and-write sweep of the slice; each relocalization sends
/// half a slice to the partner rank.
inline TrafficProfile schedule_traffic(const Circuit &circuit, int ranks, PrecisionMode precision,
                                       const dist::RunOptions &opts = {}) {
    if (ranks < 1 || !std::has_single_bit(static_cast<unsigned>(ranks))) {
        throw std::invalid_argument("rank count must be a power of two");
    }
    const int k = std::countr_zero(static_cast<unsigned>(ranks));
    dist::RankLayout layout = dist::RankLayout::identity(circuit.num_qubits, k);
    const int L = layout.local_bits();
    const std::uint64_t bpa = bytes_per_amplitude(precision);
    const std::uint64_t slice_bytes = (std::uint64_t{1} << L) * bpa;
    const std::uint64_t half = slice_bytes / 2;

    TrafficProfile prof;
    prof.n = circuit.num_qubits;
    prof.ranks = ranks;
    prof.precision = precision;
    const std::vector<GateOp> ops = dist::scheduled_ops(circuit, opts, L);
    const dist::Lookahead lookahead(ops, circuit.num_qubits);
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const dist::GatePlan plan = dist::plan_gate(layout, ops[i], lookahead, i);
        if (plan.action == dist::Action::Relabel) {
            layout.swap_positions(layout.position_of(ops[i].targets[0]), layout.position_of(ops[i].targets[1]));
            continue;
        }
        for (const dist::SwapStep &s : plan.swaps) {
            const int bit = layout.rank_bit(s.global_pos);
            prof.exchange_bytes_per_level[bit] += half;
            ++prof.swap_count_per_level[bit];
            layout.swap_positions(s.global_pos, s.local_pos);
        }
        ++prof.sweeps;
        prof.local_bytes += 2 * slice_bytes;
    }
    return prof;
}

/// Topology-flavoured overload: rank count and precision come from `topo`
/// unless `ranks` is given.
inline TrafficProfile schedule_traffic(const Circuit &circuit, const Topology &topo, int ranks,
                                       const dist::RunOptions &opts = {}) {
    return schedule_traffic(circuit, ranks, topo.precision, opts);
}

struct TimeBreakdown {
    double local_seconds = 0;
    double exchange_seconds = 0;
    double total() const { return local_seconds + exchange_seconds; }
};

/// Memory time at `mem_bw` plus, per rank bit, the exchanged bytes over
/// half the bidirectional bandwidth of the level that bit belongs to.
inline TimeBreakdown predict_breakdown(const TrafficProfile &prof, const Topology &topo) {
    TimeBreakdown t;
    t.local_seconds = static_cast<double>(prof.local_bytes) / topo.mem_bw;
    for (const auto &[bit, bytes] : prof.exchange_bytes_per_level) {
        const LinkModel &link = topo.levels.at(static_cast<std::size_t>(topo.level_of_bit(bit))).link;
        t.exchange_seconds += static_cast<double>(bytes) / link.per_direction_bw();
    }
    return t;
}

inline double predict_time(const TrafficProfile &prof, const Topology &topo) { return predict_breakdown(prof, topo).total(); }

}  // namespace qsimfab::perfmodel
