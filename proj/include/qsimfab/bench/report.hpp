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
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qsimfab/bench/config.hpp"

namespace qsimfab::bench {

inline constexpr int kReportSchemaVersion = 1;

struct CircuitResult {
    std::string name;
    int num_qubits = 0;
    std::uint64_t gate_count = 0;
    double wall_time_seconds = 0;
    bool warmup = false;
    std::optional<double> fidelity;  // null when no ideal is available

    friend bool operator==(const CircuitResult &, const CircuitResult &) = default;
};

struct TrafficSummary {
    std::uint64_t exchange_bytes_sent = 0;
    std::uint64_t exchanges = 0;
    std::uint64_t control_bytes = 0;
    std::uint64_t messages = 0;

    friend bool operator==(const TrafficSummary &, const TrafficSummary &) = default;
};

struct BenchmarkReport {
    BenchmarkConfig config;
    int ranks = 1;
    std::string transport;
    double creation_time_seconds = 0;
    std::vector<CircuitResult> circuits;
    std::uint64_t timed_samples = 0;
    double mean_seconds = 0;
    double std_seconds = 0;
    std::optional<TrafficSummary> traffic;  // leader's view, instrumented runs only

    friend bool operator==(const BenchmarkReport &, const BenchmarkReport &) = default;
};

enum class ReportFormat { Json, Csv };

inline ReportFormat parse_format(std::string_view s) {
    if (s == "json") return ReportFormat::Json;
    if (s == "csv") return ReportFormat::Csv;
    throw std::invalid_argument("unknown report format '" + std::string(s) + "' (expected json or csv)");
}

using Json = nlohmann::ordered_json;

inline Json config_to_json(const BenchmarkConfig &c) {
    return Json{{"benchmark", to_string(c.benchmark)},
                {"n", c.n},
                {"shots", c.shots},
                {"num_circuits", c.num_circuits},
                {"exclude_warmup", c.exclude_warmup},
                {"steps", c.steps},
                {"random_gates", c.random_gates},
                {"seed", c.seed},
                {"fabric", fabric::to_string(c.fabric)},
                {"fusion", c.fusion},
                {"precision", to_string(c.precision)},
                {"oracle_max_qubits", c.oracle_max_qubits}};
}

inline BenchmarkConfig config_from_json(const Json &j) {
    BenchmarkConfig c;
    c.benchmark = parse_benchmark(j.at("benchmark").get<std::string>());
    c.n = j.at("n").get<int>();
    c.shots = j.at("shots").get<std::uint64_t>();
    c.num_circuits = j.at("num_circuits").get<int>();
    c.exclude_warmup = j.at("exclude_warmup").get<bool>();
    c.steps = j.at("steps").get<int>();
    c.random_gates = j.at("random_gates").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.fabric = fabric::parse_transport(j.at("fabric").get<std::string>());
    c.fusion = j.at("fusion").get<bool>();
    c.precision = parse_precision(j.at("precision").get<std::string>());
    c.oracle_max_qubits = j.at("oracle_max_qubits").get<int>();
    return c;
}

inline Json to_json(const BenchmarkReport &r) {
    Json circuits = Json::array();
    for (const CircuitResult &c : r.circuits) {
        circuits.push_back({{"name", c.name},
                            {"num_qubits", c.num_qubits},
                            {"gate_count", c.gate_count},
                            {"wall_time_seconds", c.wall_time_seconds},
                            {"warmup", c.warmup},
                            {"fidelity", c.fidelity ? Json(*c.fidelity) : Json(nullptr)}});
    }
    Json j{{"schema_version", kReportSchemaVersion},
           {"config", config_to_json(r.config)},
           {"ranks", r.ranks},
           {"transport", r.transport},
           {"creation_time_seconds", r.creation_time_seconds},
           {"circuits", std::move(circuits)},
           {"timed_samples", r.timed_samples},
           {"mean_seconds", r.mean_seconds},
           {"std_seconds", r.std_seconds}};
    if (r.traffic) {
        j["traffic"] = {{"exchange_bytes_sent", r.traffic->exchange_bytes_sent},
                        {"exchanges", r.traffic->exchanges},
                        {"control_bytes", r.traffic->control_bytes},
                        {"messages", r.traffic->messages}};
    } else {
        j["traffic"] = nullptr;
    }
    return j;
}

inline BenchmarkReport report_from_json(const Json &j) {
    if (j.at("schema_version").get<int>() != kReportSchemaVersion) {
        throw std::invalid_argument("unsupported report schema_version " + j.at("schema_version").dump());
    }
    BenchmarkReport r;
    r.config = config_from_json(j.at("config"));
    r.ranks = j.at("ranks").get<int>();
    r.transport = j.at("transport").get<std::string>();
    r.creation_time_seconds = j.at("creation_time_seconds").get<double>();
    for (const Json &c : j.at("circuits")) {
        CircuitResult cr;
        cr.name = c.at("name").get<std::string>();
        cr.num_qubits = c.at("num_qubits").get<int>();
        cr.gate_count = c.at("gate_count").get<std::uint64_t>();
        cr.wall_time_seconds = c.at("wall_time_seconds").get<double>();
        cr.warmup = c.at("warmup").get<bool>();
        if (!c.at("fidelity").is_null()) cr.fidelity = c.at("fidelity").get<double>();
        r.circuits.push_back(std::move(cr));
    }
    r.timed_samples = j.at("timed_samples").get<std::uint64_t>();
    r.mean_seconds = j.at("mean_seconds").get<double>();
    r.std_seconds = j.at("std_seconds").get<double>();
    if (const Json &t = j.at("traffic"); !t.is_null()) {
        r.traffic = TrafficSummary{t.at("exchange_bytes_sent").get<std::uint64_t>(), t.at("exchanges").get<std::uint64_t>(),
                                   t.at("control_bytes").get<std::uint64_t>(), t.at("messages").get<std::uint64_t>()};
    }
    return r;
}

/// One row per circuit, then a summary row carrying mean and std.
inline void write_report_csv(std::ostream &os, const BenchmarkReport &r) {
    os << "row,name,num_qubits,gate_count,wall_time_seconds,warmup,fidelity\n";
    os << std::setprecision(17);
    for (std::size_t i = 0; i < r.circuits.size(); ++i) {
        const CircuitResult &c = r.circuits[i];
        os << i << ',' << c.name << ',' << c.num_qubits << ',' << c.gate_count << ',' << c.wall_time_seconds << ','
           << (c.warmup ? 1 : 0) << ',';
        if (c.fidelity) os << *c.fidelity;
        os << '\n';
    }
    os << "summary,mean=" << r.mean_seconds << ";std=" << r.std_seconds << ";samples=" << r.timed_samples << ",,,"
       << r.mean_seconds << ",,\n";
}

inline void write_report(std::ostream &os, const BenchmarkReport &r, ReportFormat format) {
    if (format == ReportFormat::Json) {
        os << to_json(r).dump(2) << '\n';
    } else {
        write_report_csv(os, r);
    }
}

inline void emit_report(const BenchmarkReport &r, ReportFormat format, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_report(out, r, format);
    out.flush();
    if (!out) throw std::runtime_error("failed writing report to '" + path + "'");
}

}  // namespace qsimfab::bench
