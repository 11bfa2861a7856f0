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

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qsimfab/fabric/endpoint.hpp"
#include "qsimfab/svcore/types.hpp"

namespace qsimfab::bench {

enum class BenchmarkKind { Qpe, Tfim, Random };

inline std::string_view to_string(BenchmarkKind k) {
    switch (k) {
        case BenchmarkKind::Qpe: return "qpe";
        case BenchmarkKind::Tfim: return "tfim";
        case BenchmarkKind::Random: return "random";
    }
    return "?";
}

inline BenchmarkKind parse_benchmark(std::string_view s) {
    if (s == "qpe") return BenchmarkKind::Qpe;
    if (s == "tfim") return BenchmarkKind::Tfim;
    if (s == "random") return BenchmarkKind::Random;
    throw std::invalid_argument("unknown benchmark '" + std::string(s) + "' (expected qpe, tfim or random)");
}

struct BenchmarkConfig {
    BenchmarkKind benchmark = BenchmarkKind::Qpe;
    int n = 10;  // total qubits; QPE uses n - 1 counting qubits
    std::uint64_t shots = 1000;
    int num_circuits = 10;
    bool exclude_warmup = true;
    int steps = 10;          // Trotter steps (tfim)
    int random_gates = 100;  // gates per random circuit
    std::uint64_t seed = 1;
    fabric::TransportKind fabric = fabric::TransportKind::Loopback;
    bool fusion = true;
    PrecisionMode precision = PrecisionMode::Double;
    int oracle_max_qubits = 20;  // largest n for which a dense ideal is computed

    friend bool operator==(const BenchmarkConfig &, const BenchmarkConfig &) = default;
};

inline void validate(const BenchmarkConfig &c) {
    if (c.shots < 1) throw std::invalid_argument("shots must be at least 1");
    if (c.num_circuits < 1) throw std::invalid_argument("need at least one circuit");
    if (c.exclude_warmup && c.num_circuits < 2) {
        throw std::invalid_argument("excluding the warm-up circuit needs at least 2 circuits");
    }
    if (c.benchmark == BenchmarkKind::Qpe && c.n < 2) throw std::invalid_argument("qpe needs at least 2 qubits");
    if (c.benchmark == BenchmarkKind::Random && c.n < 2) throw std::invalid_argument("random needs at least 2 qubits");
    if (c.n < 1 || c.n > 62) throw std::invalid_argument("qubit count must be between 1 and 62");
    if (c.steps < 1) throw std::invalid_argument("steps must be at least 1");
    if (c.random_gates < 0) throw std::invalid_argument("random gate count must be non-negative");
}

/// Canonical one-line rendering, used for hashing and echoed in reports.
inline std::string canonical(const BenchmarkConfig &c) {
    std::ostringstream os;
    os << "benchmark=" << to_string(c.benchmark) << ";n=" << c.n << ";shots=" << c.shots
       << ";num_circuits=" << c.num_circuits << ";exclude_warmup=" << c.exclude_warmup << ";steps=" << c.steps
       << ";random_gates=" << c.random_gates << ";seed=" << c.seed << ";fabric=" << fabric::to_string(c.fabric)
       << ";fusion=" << c.fusion << ";precision=" << to_string(c.precision)
       << ";oracle_max_qubits=" << c.oracle_max_qubits;
    return os.str();
}

/// 64-bit FNV-1a of the canonical rendering.
inline std::uint64_t config_hash(const BenchmarkConfig &c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical(c)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace qsimfab::bench
