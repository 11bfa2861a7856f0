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

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsimfab/bench/config.hpp"
#include "qsimfab/bench/fidelity.hpp"
#include "qsimfab/bench/report.hpp"
#include "qsimfab/circuits.hpp"
#include "qsimfab/dist/engine.hpp"
#include "qsimfab/fabric/instrumented.hpp"
#include "qsimfab/svcore/dense.hpp"

namespace qsimfab::bench {

/// Monotonic time source in seconds. Tests substitute a scripted one.
using Clock = std::function<double()>;

inline double steady_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

class ConfigMismatch : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct TimingStats {
    std::uint64_t samples = 0;
    double mean = 0;
    double stddev = 0;  // sample standard deviation; 0 for a single sample
};

inline TimingStats timing_stats(const std::vector<double> &xs) {
    TimingStats s;
    s.samples = xs.size();
    if (xs.empty()) return s;
    double sum = 0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

/// Counting-register numerators for the QPE circuits: an odd stride from a
/// seeded offset, so consecutive circuits get distinct phases.
inline std::vector<std::uint64_t> qpe_numerators(int k, int count, std::uint64_t seed) {
    const std::uint64_t mask = (std::uint64_t{1} << k) - 1;
    Rng rng(seed);
    const std::uint64_t offset = rng.next() & mask;
    const std::uint64_t stride = (rng.next() & mask) | 1U;
    std::vector<std::uint64_t> out;
    for (int i = 0; i < count; ++i) out.push_back((offset + static_cast<std::uint64_t>(i) * stride) & mask);
    return out;
}

struct BenchCircuit {
    Circuit circuit;
    std::optional<CountsDistribution> ideal;
};

/// Builds the circuit list of a benchmark together with the ideal outcome
/// distribution of each, where one is available.
inline std::vector<BenchCircuit> build_circuits(const BenchmarkConfig &cfg) {
    std::vector<BenchCircuit> out;
    switch (cfg.benchmark) {
        case BenchmarkKind::Qpe: {
            for (std::uint64_t m : qpe_numerators(cfg.n - 1, cfg.num_circuits, cfg.seed)) {
                const circuits::QpeSpec spec{cfg.n - 1, m};
                out.push_back({circuits::build_qpe(spec), circuits::qpe_ideal(spec)});
            }
            break;
        }
        case BenchmarkKind::Tfim: {
            const circuits::TfimSpec spec =
                circuits::tfim_on_lattice(circuits::default_lattice(cfg.n), 1.0, 1.0, 1.0, cfg.steps);
            const Circuit c = circuits::build_tfim(spec);
            for (int i = 0; i < cfg.num_circuits; ++i) out.push_back({c, std::nullopt});
            break;
        }
        case BenchmarkKind::Random: {
            for (int i = 0; i < cfg.num_circuits; ++i) {
                Circuit c = circuits::build_random_circuit(cfg.n, cfg.random_gates, cfg.seed + static_cast<std::uint64_t>(i));
                c.measure_all();
                out.push_back({std::move(c), std::nullopt});
            }
            break;
        }
    }
    if (cfg.benchmark != BenchmarkKind::Qpe && cfg.n <= cfg.oracle_max_qubits) {
        std::optional<CountsDistribution> shared;
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (cfg.benchmark == BenchmarkKind::Tfim && shared) {
                out[i].ideal = shared;
                continue;
            }
            out[i].ideal = probabilities(dense_run(out[i].circuit), out[i].circuit.measured_qubits);
            shared = out[i].ideal;
        }
    }
    return out;
}

namespace detail {

inline void mark(fabric::Endpoint &ep, const std::string &label) {
    if (auto *inst = fabric::as_instrumented(ep)) inst->mark(label);
}

template <typename Real>
CountsDistribution run_and_sample(const Circuit &c, fabric::Endpoint &ep, const dist::RunOptions &opts,
                                  std::uint64_t shots, std::uint64_t seed) {
    dist::DistState<Real> st = dist::run_distributed<Real>(c, ep, opts);
    return st.sample(shots, seed, c.measured_qubits);
}

/// Every rank learns whether all ranks hold the leader's configuration.
inline void check_config_agreement(const BenchmarkConfig &cfg, fabric::Endpoint &ep) {
    fabric::Bytes mine;
    fabric::put_u64(mine, config_hash(cfg));
    const std::uint64_t leader = fabric::get_u64(ep.broadcast(0, mine), 0);
    const double differs = leader == config_hash(cfg) ? 0.0 : 1.0;
    const double mismatches = ep.allreduce_sum(std::vector<double>{differs})[0];
    if (mismatches > 0) {
        throw ConfigMismatch(std::to_string(static_cast<int>(mismatches)) +
                             " rank(s) hold a benchmark configuration that differs from rank 0's");
    }
}

}  // namespace detail

/// Runs a benchmark on this rank. Every rank of the world must call it with
/// the same configuration; all ranks return the same report apart from the
/// timing fields, which are each rank's own measurements.
///
/// Clock reads happen in this order: creation begin and end, then for each
/// circuit a read after the opening barrier and one after the closing one.
inline BenchmarkReport run_benchmark(const BenchmarkConfig &cfg, fabric::Endpoint &ep, const Clock &clock = steady_seconds) {
    validate(cfg);
    detail::check_config_agreement(cfg, ep);

    const double create_begin = clock();
    const std::vector<BenchCircuit> list = build_circuits(cfg);
    const double create_end = clock();

    BenchmarkReport report;
    report.config = cfg;
    report.ranks = ep.world_size();
    report.transport = std::string(fabric::to_string(ep.kind()));
    report.creation_time_seconds = create_end - create_begin;

    dist::RunOptions opts;
    opts.fusion = cfg.fusion;
    std::vector<double> timed;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const Circuit &c = list[i].circuit;
        const std::uint64_t seed = cfg.seed + i;

        ep.barrier();
        detail::mark(ep, "timed_begin " + std::to_string(i));
        const double t0 = clock();
        const CountsDistribution counts = cfg.precision == PrecisionMode::Single
                                              ? detail::run_and_sample<float>(c, ep, opts, cfg.shots, seed)
                                              : detail::run_and_sample<double>(c, ep, opts, cfg.shots, seed);
        ep.barrier();
        const double t1 = clock();
        detail::mark(ep, "timed_end " + std::to_string(i));

        CircuitResult r;
        r.name = c.name;
        r.num_qubits = c.num_qubits;
        r.gate_count = c.ops.size();
        r.wall_time_seconds = t1 - t0;
        r.warmup = cfg.exclude_warmup && i == 0;
        if (list[i].ideal) r.fidelity = fidelity(counts, *list[i].ideal);
        if (!r.warmup) timed.push_back(r.wall_time_seconds);
        report.circuits.push_back(std::move(r));
    }

    const TimingStats stats = timing_stats(timed);
    report.timed_samples = stats.samples;
    report.mean_seconds = stats.mean;
    report.std_seconds = stats.stddev;
    if (auto *inst = fabric::as_instrumented(ep)) {
        const fabric::TrafficLog &log = inst->log();
        report.traffic = TrafficSummary{log.exchange_bytes_sent(), log.exchange_count(), log.control_bytes, log.messages};
    }
    return report;
}

}  // namespace qsimfab::bench
