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

#include <cmath>

#include "gtest/gtest.h"

#include "qsimfab/circuits/random.hpp"
#include "qsimfab/dist.hpp"
#include "qsimfab/svcore.hpp"
#include "support/naive_sim.hpp"
#include "support/worlds.hpp"

using namespace qsimfab;
using namespace qsimfab::dist;
using fabric::Endpoint;
using fabric::TransportKind;
using testing_support::on_loopback;
using testing_support::on_world;

namespace {

Circuit ghz(int n) {
    Circuit c{n, {gates::h(0)}, {}, "ghz"};
    for (int q = 1; q < n; ++q) c.ops.push_back(gates::cx(q - 1, q));
    c.measure_all();
    return c;
}

// Where program basis index `idx` lives, recomputed from the position map by
// enumerating its bits.
std::pair<std::uint64_t, std::uint64_t> placement(std::uint64_t idx, const std::vector<int> &pos_of, int local_bits) {
    std::uint64_t positional = 0;
    for (std::size_t q = 0; q < pos_of.size(); ++q) {
        if ((idx >> q) & 1U) positional |= std::uint64_t{1} << pos_of[q];
    }
    return {positional >> local_bits, positional & ((std::uint64_t{1} << local_bits) - 1)};
}

fabric::TrafficLog traffic_of(Endpoint &ep) { return fabric::as_instrumented(ep)->log(); }

double gathered_error(const Circuit &c, int ranks, bool fusion) {
    const naive::Vec expect = naive::run(c);
    auto states = on_loopback(ranks, [&](Endpoint &ep) {
        RunOptions o;
        o.fusion = fusion;
        return run_distributed(c, ep, o).gather();
    });
    return naive::max_diff(expect, states[0].amps());
}

}  // namespace

TEST(Layout, memory_accounting) {
    EXPECT_EQ(memory_footprint(33, 1, PrecisionMode::Single).full_state_gib, 64.0);
    EXPECT_EQ(memory_footprint(34, 1, PrecisionMode::Single).full_state_gib, 128.0);
    EXPECT_EQ(memory_footprint(34, 4, PrecisionMode::Double).slice_bytes, std::uint64_t{64} << 30);
    for (int n = 27; n <= 40; ++n) {
        EXPECT_EQ(memory_footprint(n, 1, PrecisionMode::Single).full_state_gib, std::ldexp(1.0, n - 27));
    }
}

TEST(Layout, swap_positions_keeps_bijection) {
    RankLayout l = RankLayout::identity(5, 2);
    l.swap_positions(4, 0);
    EXPECT_EQ(l.position_of(4), 0);
    EXPECT_EQ(l.qubit_at(4), 0);
    EXPECT_TRUE(l.is_global(0));
    EXPECT_EQ(l.rank_bit(4), 1);
    EXPECT_THROW(RankLayout::identity(2, 2), std::invalid_argument);
}

TEST(Partition, four_amplitudes_per_rank) {
    auto slices = on_loopback(4, [](Endpoint &ep) { return partition(4, ep).slice(); });
    for (std::size_t r = 0; r < 4; ++r) {
        ASSERT_EQ(slices[r].size(), 4U);
        for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(slices[r][i], cplx(r == 0 && i == 0 ? 1.0 : 0.0, 0));
    }
}

TEST(Partition, rejects_too_few_qubits_and_big_slices) {
    EXPECT_THROW(on_loopback(4, [](Endpoint &ep) { partition(2, ep); }), std::invalid_argument);
    EXPECT_THROW(on_loopback(1, [](Endpoint &ep) { DistState<double>(40, ep, 0, 20); }), CapacityError);
    EXPECT_THROW(on_loopback(1, [](Endpoint &ep) { partition(3, ep, 8); }), std::out_of_range);
}

TEST(Gather, round_trip_is_delta_at_initial) {
    auto states = on_loopback(4, [](Endpoint &ep) { return partition(5, ep, 22).gather(); });
    for (const auto &s : states) EXPECT_EQ(s, StateSlice::basis(5, 22));
    auto single = on_loopback(1, [](Endpoint &ep) {
        auto st = partition(3, ep, 5);
        return st.gather() == st.slice();
    });
    EXPECT_TRUE(single[0]);
}

TEST(Relocalize, moves_amplitude_as_enumeration_predicts) {
    // |100> (qubit 2 set): program index 4.
    auto out = on_loopback(2, [](Endpoint &ep) {
        auto st = partition(3, ep, 4);
        st.relocalize(2, 0);
        return std::make_pair(st.layout(), st.slice());
    });
    const RankLayout &layout = out[0].first;
    EXPECT_EQ(layout.position_of(2), 0);
    const auto [rank, local] = placement(4, layout.positions(), 2);
    EXPECT_EQ(rank, 0U);
    EXPECT_EQ(local, 1U);
    EXPECT_EQ(out[0].second[1], cplx(1, 0));
    EXPECT_EQ(out[1].second.norm_squared(), 0.0);
}

TEST(Relocalize, every_index_lands_where_enumeration_predicts) {
    const Circuit c = circuits::build_random_circuit(6, 60, 8);
    const StateSlice full = dense_run(c);
    auto out = on_loopback(4, [&](Endpoint &ep) {
        RunOptions o;
        o.fusion = false;
        auto st = run_distributed(c, ep, o);
        st.relocalize(5, 1);
        st.relocalize(4, 3);
        return std::make_pair(st.layout(), st.slice());
    });
    const RankLayout &layout = out[0].first;
    for (std::uint64_t idx = 0; idx < full.size(); ++idx) {
        const auto [rank, local] = placement(idx, layout.positions(), 4);
        EXPECT_LE(std::abs(out[rank].second[local] - full[idx]), 1e-12) << idx;
    }
}

TEST(Relocalize, involution_is_bit_exact) {
    const Circuit c = circuits::build_random_circuit(7, 80, 3);
    auto same = on_loopback(4, [&](Endpoint &ep) {
        auto st = run_distributed(c, ep);
        const auto before = st.slice();
        const auto layout = st.layout();
        st.relocalize(6, 2);
        st.relocalize(6, 2);
        return before == st.slice() && layout == st.layout();
    });
    for (bool s : same) EXPECT_TRUE(s);
}

TEST(Relocalize, bytes_per_swap_follow_counting_formula) {
    // n=10, P=4: 2^(10-2-1) amplitudes of 16 bytes each way.
    auto logs = on_world(
        TransportKind::Loopback, 4,
        [](Endpoint &ep) {
            auto st = partition(10, ep);
            st.relocalize(9, 0);
            return traffic_of(ep);
        },
        true);
    for (const auto &log : logs) {
        EXPECT_EQ(log.level_bytes_sent.at(1), 2048U);
        EXPECT_EQ(log.level_bytes_received.at(1), 2048U);
        EXPECT_EQ(log.exchange_count(), 1U);
    }
    auto single = on_world(
        TransportKind::Loopback, 2,
        [](Endpoint &ep) {
            auto st = partition<float>(6, ep);
            st.relocalize(5, 4);
            return traffic_of(ep).exchange_bytes_sent();
        },
        true);
    EXPECT_EQ(single[0], 16U * 8U);
}

TEST(Apply, global_control_only_touches_ranks_with_control_set) {
    // n=4, P=2: qubit 3 is global. Start from the uniform superposition,
    // mix the local qubits, then CX with the global qubit as control.
    const std::vector<GateOp> local = {gates::rz(0.3, 0), gates::h(1), gates::rx(1.3, 2)};
    auto out = on_world(
        TransportKind::Loopback, 2,
        [&](Endpoint &ep) {
            DistState<double> st(4, ep);
            for (auto &a : st.slice().amps()) a = 0.25;
            for (const auto &g : local) st.apply(g);
            const auto before = st.slice();
            st.apply(gates::cx(3, 0));
            const bool changed = !(before == st.slice());
            return std::make_tuple(st.gather(), traffic_of(ep).exchange_bytes_sent(), changed);
        },
        true);
    naive::Vec expect(16, 0.25);
    for (const auto &g : local) expect = naive::apply(expect, g);
    expect = naive::apply(expect, gates::cx(3, 0));
    EXPECT_LE(naive::max_diff(expect, std::get<0>(out[0]).amps()), 1e-15);
    EXPECT_EQ(std::get<1>(out[0]), 0U);
    EXPECT_EQ(std::get<1>(out[1]), 0U);
    EXPECT_FALSE(std::get<2>(out[0]));
    EXPECT_TRUE(std::get<2>(out[1]));
}

TEST(Apply, global_control_predicate_skips_rank_zero) {
    // X on qubit 0 controlled by global qubit 3; rank 0 holds qubit3 = 0.
    auto slices = on_loopback(2, [](Endpoint &ep) {
        DistState<double> st(4, ep, 0b1000);  // rank 1 holds the amplitude
        auto before = st.slice();
        st.apply(gates::cx(3, 0));
        return std::make_pair(before, st.slice());
    });
    EXPECT_EQ(slices[0].first, slices[0].second);
    EXPECT_EQ(slices[1].second, StateSlice::basis(3, 1));
}

TEST(Apply, diagonal_gates_with_global_targets_are_free) {
    const std::vector<GateOp> diag = {gates::rz(0.7, 4), gates::rzz(0.3, 3, 4), gates::cp(1.1, 4, 3), gates::z(3),
                                      gates::p(0.2, 4), gates::cz(0, 4)};
    Circuit c{5, {}, {}, "diag"};
    for (int q = 0; q < 5; ++q) c.ops.push_back(gates::rx(0.3 + q, q));
    auto out = on_world(
        TransportKind::Loopback, 4,
        [&](Endpoint &ep) {
            RunOptions o;
            o.fusion = false;
            auto st = run_distributed(c, ep, o);
            // Push qubits 3 and 4 back onto global bits so the diagonals see global targets.
            for (int q : {3, 4}) {
                if (st.layout().is_global(q)) continue;
                for (int pos = 3; pos < 5; ++pos) {
                    const int held = st.layout().qubit_at(pos);
                    if (held != 3 && held != 4) {
                        st.relocalize(pos, st.layout().position_of(q));
                        break;
                    }
                }
            }
            const auto before = traffic_of(ep).exchange_bytes_sent();
            for (const auto &g : diag) {
                EXPECT_EQ(plan_gate(st.layout(), g).action, Action::Diagonal);
                st.apply(g);
            }
            return std::make_pair(st.gather(), traffic_of(ep).exchange_bytes_sent() - before);
        },
        true);
    Circuit full = c;
    full.ops.insert(full.ops.end(), diag.begin(), diag.end());
    EXPECT_LE(naive::max_diff(naive::run(full), out[0].first.amps()), 1e-13);
    for (const auto &o : out) EXPECT_EQ(o.second, 0U);
}

TEST(Apply, hadamard_on_global_qubit_is_one_swap) {
    auto out = on_world(
        TransportKind::Loopback, 2,
        [](Endpoint &ep) {
            DistState<double> st(4, ep);
            st.apply(gates::h(3));
            return std::make_pair(st.gather(), traffic_of(ep).exchange_count());
        },
        true);
    Circuit c{4, {gates::h(3)}, {}, "h"};
    EXPECT_LE(naive::max_diff(naive::run(c), out[0].first.amps()), 1e-15);
    EXPECT_EQ(out[0].second, 1U);
    EXPECT_EQ(out[1].second, 1U);
}

TEST(Apply, swap_gate_is_a_relabel) {
    Circuit c{4, {gates::h(0), gates::cx(0, 1), gates::swap(0, 3), gates::swap(1, 2)}, {}, "sw"};
    auto out = on_world(
        TransportKind::Loopback, 2,
        [&](Endpoint &ep) {
            RunOptions o;
            o.fusion = false;
            auto st = run_distributed(c, ep, o);
            return std::make_pair(st.gather(), traffic_of(ep).exchange_count());
        },
        true);
    EXPECT_LE(naive::max_diff(naive::run(c), out[0].first.amps()), 1e-15);
    EXPECT_EQ(out[0].second, 0U);
}

TEST(Apply, too_many_targets_for_slice) {
    // n=3 over 4 ranks leaves one local qubit; a two-target block cannot fit.
    const GateOp wide = gates::fused({0, 1}, target_matrix(gates::swap(0, 1)));
    EXPECT_THROW(on_loopback(4, [&](Endpoint &ep) { DistState<double>(3, ep).apply(wide); }), std::invalid_argument);
}

TEST(Planner, victim_is_qubit_needed_furthest_ahead) {
    // n=4, P=2: positions 0..2 local, qubit 3 global. Ops after H(3):
    // qubit 0 used at 1, qubit 2 at 2, qubit 1 never again.
    const std::vector<GateOp> ops = {gates::h(3), gates::x(0), gates::x(2)};
    const Lookahead look(ops, 4);
    const RankLayout layout = RankLayout::identity(4, 1);
    const GatePlan plan = plan_gate(layout, ops[0], look, 0);
    ASSERT_EQ(plan.action, Action::Swap);
    ASSERT_EQ(plan.swaps.size(), 1U);
    EXPECT_EQ(plan.swaps[0].global_pos, 3);
    EXPECT_EQ(plan.swaps[0].local_pos, 1);
}

TEST(Planner, ties_take_lowest_position_and_spare_controls) {
    const RankLayout layout = RankLayout::identity(4, 1);
    EXPECT_EQ(plan_gate(layout, gates::h(3)).swaps[0].local_pos, 0);
    EXPECT_EQ(plan_gate(layout, gates::cx(0, 3)).swaps[0].local_pos, 1);
    EXPECT_EQ(plan_gate(layout, gates::swap(0, 3)).action, Action::Relabel);
    EXPECT_EQ(plan_gate(layout, gates::rz(1, 3)).action, Action::Diagonal);
    EXPECT_EQ(plan_gate(layout, gates::h(2)).action, Action::Local);
}

TEST(RunDistributed, single_rank_matches_dense_run_exactly) {
    const Circuit c = circuits::build_random_circuit(7, 150, 21);
    auto st = on_loopback(1, [&](Endpoint &ep) {
        RunOptions o;
        o.fusion = false;
        return run_distributed(c, ep, o).gather();
    });
    EXPECT_EQ(st[0], dense_run(c));
}

TEST(RunDistributed, eight_qubit_random_circuit_over_ranks) {
    const Circuit c = circuits::build_random_circuit(8, 100, 77);
    for (int ranks : {2, 4, 8}) {
        EXPECT_LE(gathered_error(c, ranks, false), 1e-12) << ranks;
        EXPECT_LE(gathered_error(c, ranks, true), 1e-12) << ranks;
    }
}

TEST(RunDistributed, ghz_six_qubits_four_ranks) {
    auto states = on_loopback(4, [](Endpoint &ep) { return run_distributed(ghz(6), ep).gather(); });
    const double r = 1 / std::sqrt(2.0);
    for (std::size_t i = 0; i < 64; ++i) {
        const double expect = (i == 0 || i == 63) ? r : 0.0;
        EXPECT_NEAR(std::abs(states[0][i]), expect, 1e-15) << i;
    }
}

TEST(RunDistributed, oracle_equivalence_sweep) {
    // Smaller slice of the full acceptance sweep: 25 seeds here.
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        Rng pick(seed + 1000);
        const int n = 4 + static_cast<int>(pick.index(9));
        const int gates_count = 1 + static_cast<int>(pick.index(200));
        const Circuit c = circuits::build_random_circuit(n, gates_count, seed);
        for (int ranks : {1, 2, 4, 8}) {
            for (bool fusion : {false, true}) {
                ASSERT_LE(gathered_error(c, ranks, fusion), 1e-12) << seed << " P=" << ranks << " fusion=" << fusion;
            }
        }
    }
}

TEST(RunDistributed, norm_drift_over_thousand_gates) {
    const Circuit c = circuits::build_random_circuit(10, 1000, 5);
    auto norms = on_loopback(4, [&](Endpoint &ep) { return run_distributed(c, ep).norm_squared(); });
    for (double n : norms) EXPECT_NEAR(n, 1.0, 1e-9);
}

TEST(RunDistributed, tcp_and_loopback_agree_bit_for_bit) {
    const Circuit c = circuits::build_random_circuit(9, 150, 31);
    auto body = [&](Endpoint &ep) {
        auto st = run_distributed(c, ep);
        return std::make_pair(st.gather(), st.sample(2000, 99));
    };
    auto lo = on_world(TransportKind::Loopback, 4, body);
    auto tcp = on_world(TransportKind::Tcp, 4, body);
    EXPECT_EQ(lo[0].first, tcp[0].first);
    EXPECT_EQ(lo[0].second, tcp[0].second);
}

TEST(Sampling, delta_state_any_rank_count) {
    for (int ranks : {1, 2, 4, 8}) {
        auto counts = on_loopback(ranks, [](Endpoint &ep) { return partition(5, ep, 0b10110).sample(500, 7); });
        for (const auto &c : counts) {
            ASSERT_EQ(c.entries.size(), 1U);
            EXPECT_EQ(c.get("10110"), 500);
        }
    }
}

TEST(Sampling, bell_state_two_ranks) {
    Circuit c{2, {gates::h(0), gates::cx(0, 1)}, {}, "bell"};
    auto counts = on_loopback(2, [&](Endpoint &ep) {
        RunOptions o;
        o.fusion = false;
        return run_distributed(c, ep, o).sample(100000, 2024);
    });
    EXPECT_EQ(counts[0], counts[1]);
    EXPECT_EQ(counts[0].entries.size(), 2U);
    EXPECT_EQ(counts[0].get("00") + counts[0].get("11"), 100000);
    EXPECT_NEAR(counts[0].get("00"), 50000, 790.6);  // 5 sigma of Binomial(1e5, 1/2)
}

TEST(Sampling, single_rank_matches_dense_sampler) {
    // SWAPs would relabel the layout and reorder the local slice, so drop them.
    Circuit c = circuits::build_random_circuit(6, 40, 12);
    std::erase_if(c.ops, [](const GateOp &g) { return g.kind == GateKind::SWAP; });
    auto counts = on_loopback(1, [&](Endpoint &ep) {
        RunOptions o;
        o.fusion = false;
        return run_distributed(c, ep, o).sample(3000, 55);
    });
    EXPECT_EQ(counts[0], sample_dense(dense_run(c), 3000, 55));
}

TEST(Sampling, rank_counts_agree_statistically) {
    const Circuit c = circuits::build_random_circuit(4, 30, 19);
    const std::uint64_t shots = 20000;
    auto run = [&](int ranks) {
        return on_loopback(ranks, [&](Endpoint &ep) { return run_distributed(c, ep).sample(shots, 1234); })[0];
    };
    const CountsDistribution one = run(1), four = run(4);
    const CountsDistribution exact = probabilities(dense_run(c));
    for (const auto &[key, p] : exact.entries) {
        // Difference of two independent binomials: sd = sqrt(2 N p (1 - p)).
        const double sd = std::sqrt(2.0 * shots * p * (1 - p));
        EXPECT_LE(std::abs(one.get(key) - four.get(key)), 5 * sd + 1) << key;
    }
}

TEST(Sampling, measured_subset_and_errors) {
    auto counts = on_loopback(2, [](Endpoint &ep) { return partition(4, ep, 0b1001).sample(10, 1, {0, 3}); });
    EXPECT_EQ(counts[0].get("11"), 10);
    EXPECT_THROW(on_loopback(2, [](Endpoint &ep) { partition(3, ep).sample(0, 1); }), std::invalid_argument);
    EXPECT_THROW(on_loopback(2,
                             [](Endpoint &ep) {
                                 auto st = partition(3, ep);
                                 st.slice()[0] *= 2.0;
                                 st.sample(10, 1);
                             }),
                 std::invalid_argument);
}
