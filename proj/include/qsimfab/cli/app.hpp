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

// Command-line frontend. Configuration resolves flag first, then the
// QSIM_FABRIC / QSIM_RENDEZVOUS / QSIM_SEED environment variables, then the
// built-in default.

#pragma once

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qsimfab/bench.hpp"
#include "qsimfab/circuits.hpp"
#include "qsimfab/fabric.hpp"
#include "qsimfab/perfmodel.hpp"

namespace qsimfab::cli {

using EnvLookup = std::function<std::optional<std::string>(const std::string &)>;

inline std::optional<std::string> process_env(const std::string &name) {
    const char *v = std::getenv(name.c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
}

class UsageError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Flag values exactly as given; empty optionals were not on the command line.
struct RawFlags {
    int qubits = 10;
    std::uint64_t shots = 1000;
    int circuits = 10;
    int steps = 10;
    int gates = 100;
    int ranks = 1;
    std::optional<std::string> fabric;
    std::optional<std::string> rendezvous;
    std::optional<int> rank;
    std::string fusion = "on";
    std::optional<std::string> seed;
    std::optional<std::string> out;
    std::string format = "json";
    std::optional<std::string> precision;
    bool include_warmup = false;
    bool instrument = false;
    int oracle_max_qubits = 20;
    double timeout_seconds = 30;

    // model
    std::string topology;
    std::string family = "qpe";
    int base_n = 0;
    std::optional<int> max_ranks;
    std::optional<int> model_ranks;

    // report
    std::string input;
};

struct ResolvedRun {
    bench::BenchmarkConfig config;
    int ranks = 1;
    std::optional<int> rank;
    std::optional<fabric::Address> rendezvous;
    std::optional<std::string> out;
    bench::ReportFormat format = bench::ReportFormat::Json;
    bool instrument = false;
    std::chrono::milliseconds timeout{30000};
};

namespace detail {

inline std::uint64_t parse_seed(const std::string &text, const std::string &source) {
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
        if (!text.empty() && text[0] != '-') v = std::stoull(text, &used, 10);
    } catch (const std::exception &) {
        used = 0;
    }
    if (text.empty() || used != text.size()) {
        throw UsageError(source + ": seed must be a non-negative integer (got '" + text + "')");
    }
    return v;
}

template <typename Fn>
auto from_env(const EnvLookup &env, const std::string &var, Fn parse) -> std::optional<decltype(parse(std::string{}))> {
    const auto v = env(var);
    if (!v) return std::nullopt;
    try {
        return parse(*v);
    } catch (const UsageError &) {
        throw;
    } catch (const std::exception &e) {
        throw UsageError(var + ": " + e.what());
    }
}

inline void require_power_of_two(int p, const std::string &flag) {
    if (p < 1 || (p & (p - 1)) != 0) {
        throw UsageError(flag + " must be a power of two (got " + std::to_string(p) + ")");
    }
}

}  // namespace detail

/// Applies environment overrides and checks flag combinations.
inline ResolvedRun resolve_bench(bench::BenchmarkKind kind, const RawFlags &f, const EnvLookup &env) {
    ResolvedRun r;
    bench::BenchmarkConfig &c = r.config;
    c.benchmark = kind;
    c.n = f.qubits;
    c.shots = f.shots;
    c.num_circuits = f.circuits;
    c.exclude_warmup = !f.include_warmup;
    c.steps = f.steps;
    c.random_gates = f.gates;
    c.fusion = f.fusion == "on";
    c.oracle_max_qubits = f.oracle_max_qubits;
    c.precision = f.precision ? parse_precision(*f.precision) : PrecisionMode::Double;

    if (f.fabric) {
        c.fabric = fabric::parse_transport(*f.fabric);
    } else if (auto e = detail::from_env(env, "QSIM_FABRIC", [](const std::string &s) { return fabric::parse_transport(s); })) {
        c.fabric = *e;
    }
    if (f.seed) {
        c.seed = detail::parse_seed(*f.seed, "--seed");
    } else if (auto e = detail::from_env(env, "QSIM_SEED", [](const std::string &s) { return detail::parse_seed(s, "QSIM_SEED"); })) {
        c.seed = *e;
    }
    if (f.rendezvous) {
        r.rendezvous = fabric::Address::parse(*f.rendezvous);
    } else {
        r.rendezvous = detail::from_env(env, "QSIM_RENDEZVOUS", [](const std::string &s) { return fabric::Address::parse(s); });
    }

    detail::require_power_of_two(f.ranks, "--ranks");
    r.ranks = f.ranks;
    r.rank = f.rank;
    r.out = f.out;
    r.format = bench::parse_format(f.format);
    r.instrument = f.instrument;
    r.timeout = std::chrono::milliseconds(static_cast<long long>(f.timeout_seconds * 1000));

    if (c.fabric == fabric::TransportKind::Tcp) {
        if (!r.rank) throw UsageError("tcp fabric runs one rank per process: --rank is required");
        if (!r.rendezvous) throw UsageError("tcp fabric needs --rendezvous or QSIM_RENDEZVOUS");
        if (*r.rank < 0 || *r.rank >= r.ranks) {
            throw UsageError("--rank " + std::to_string(*r.rank) + " is outside [0, " + std::to_string(r.ranks) + ")");
        }
    } else if (r.rank) {
        throw UsageError("--rank is only valid with --fabric tcp");
    }
    bench::validate(c);
    return r;
}

namespace detail {

inline void write_leader_report(fabric::Endpoint &ep, const bench::BenchmarkReport &report, const ResolvedRun &run,
                                std::ostream &out, std::ostream &err) {
    bench::OutputPolicy policy = bench::leader_only_output(ep, out, err);
    if (!policy.is_leader()) return;
    if (run.out) {
        bench::emit_report(report, run.format, *run.out);
    } else {
        bench::write_report(policy.out(), report, run.format);
    }
}

}  // namespace detail

inline void run_bench(const ResolvedRun &run, std::ostream &out, std::ostream &err) {
    auto body = [&](fabric::Endpoint &ep) {
        const bench::BenchmarkReport report = bench::run_benchmark(run.config, ep);
        detail::write_leader_report(ep, report, run, out, err);
    };
    if (run.config.fabric == fabric::TransportKind::Tcp) {
        fabric::TcpOptions t;
        t.timeout = run.timeout;
        std::unique_ptr<fabric::Endpoint> ep = fabric::connect_tcp(*run.rank, run.ranks, *run.rendezvous, t);
        if (run.instrument) ep = std::make_unique<fabric::InstrumentedEndpoint>(std::move(ep));
        try {
            body(*ep);
        } catch (...) {
            ep->close();
            throw;
        }
        ep->close();
        return;
    }
    fabric::WorldOptions o;
    o.timeout = run.timeout;
    o.instrumented = run.instrument;
    auto eps = fabric::create_world(fabric::TransportKind::Loopback, run.ranks, o);
    fabric::spmd_run(eps, body);
}

namespace detail {

inline perfmodel::Topology load_topology_for(const RawFlags &f) {
    if (f.topology.empty()) throw UsageError("--topology is required");
    perfmodel::Topology t = perfmodel::load_topology(f.topology);
    if (f.precision) t.precision = parse_precision(*f.precision);
    return t;
}

inline dist::RunOptions model_run_options(const RawFlags &f) {
    dist::RunOptions o;
    o.fusion = f.fusion == "on";
    return o;
}

inline Circuit model_circuit(const RawFlags &f, const EnvLookup &env, int n) {
    if (f.family == "qpe") return perfmodel::qpe_family(n);
    if (f.family == "tfim") return perfmodel::tfim_family(f.steps)(n);
    std::uint64_t seed = 1;
    if (f.seed) {
        seed = parse_seed(*f.seed, "--seed");
    } else if (auto e = from_env(env, "QSIM_SEED", [](const std::string &s) { return parse_seed(s, "QSIM_SEED"); })) {
        seed = *e;
    }
    return circuits::build_random_circuit(n, f.gates, seed);
}

inline perfmodel::CircuitFamily model_family(const RawFlags &f) {
    if (f.family == "qpe") return perfmodel::qpe_family;
    if (f.family == "tfim") return perfmodel::tfim_family(f.steps);
    throw UsageError("scaling curves support --circuit qpe or tfim");
}

class OutputTarget {
   public:
    OutputTarget(const std::optional<std::string> &path, std::ostream &fallback) : os_(&fallback) {
        if (path) {
            file_.open(*path, std::ios::binary);
            if (!file_) throw std::runtime_error("cannot open '" + *path + "' for writing");
            os_ = &file_;
        }
    }
    std::ostream &stream() { return *os_; }

   private:
    std::ofstream file_;
    std::ostream *os_;
};

}  // namespace detail

inline void run_model_predict(const RawFlags &f, const EnvLookup &env, std::ostream &out) {
    const perfmodel::Topology topo = detail::load_topology_for(f);
    const int ranks = f.model_ranks.value_or(topo.total_ranks());
    detail::require_power_of_two(ranks, "--ranks");
    const Circuit c = detail::model_circuit(f, env, f.qubits);
    const perfmodel::TrafficProfile prof =
        perfmodel::schedule_traffic(c, ranks, topo.precision, detail::model_run_options(f));
    const perfmodel::TimeBreakdown t = perfmodel::predict_breakdown(prof, topo);

    nlohmann::ordered_json per_level = nlohmann::ordered_json::object();
    for (const auto &[bit, bytes] : prof.exchange_bytes_per_level) {
        per_level[std::to_string(bit)] = {{"level", topo.level_of_bit(bit)},
                                          {"bytes", bytes},
                                          {"swaps", prof.swap_count_per_level.at(bit)}};
    }
    const nlohmann::ordered_json j{{"topology", topo.name},
                                   {"circuit", c.name},
                                   {"n", c.num_qubits},
                                   {"ranks", ranks},
                                   {"precision", to_string(topo.precision)},
                                   {"fusion", f.fusion == "on"},
                                   {"sweeps", prof.sweeps},
                                   {"local_bytes", prof.local_bytes},
                                   {"exchange_bytes", prof.exchange_bytes()},
                                   {"swaps", prof.swap_count()},
                                   {"per_rank_bit", per_level},
                                   {"local_seconds", t.local_seconds},
                                   {"exchange_seconds", t.exchange_seconds},
                                   {"total_seconds", t.total()}};
    detail::OutputTarget target(f.out, out);
    target.stream() << j.dump(2) << '\n';
}

inline void run_model_curve(bool weak, const RawFlags &f, std::ostream &out) {
    const perfmodel::Topology topo = detail::load_topology_for(f);
    const int max_ranks = f.max_ranks.value_or(topo.total_ranks());
    detail::require_power_of_two(max_ranks, "--max-ranks");
    const dist::RunOptions opts = detail::model_run_options(f);
    std::vector<perfmodel::ScalingPoint> curve;
    if (weak) {
        if (f.base_n < 1) throw UsageError("--base-n is required for weak scaling");
        curve = perfmodel::weak_scaling_curve(f.base_n, detail::model_family(f), topo, max_ranks, opts);
    } else {
        curve = perfmodel::strong_scaling_curve(detail::model_family(f)(f.qubits), topo, max_ranks, opts);
    }
    detail::OutputTarget target(f.out, out);
    perfmodel::write_curve_csv(target.stream(), curve);
}

/// Re-renders a saved JSON report.
inline void run_report(const RawFlags &f, std::ostream &out) {
    std::ifstream in(f.input);
    if (!in) throw std::runtime_error("cannot open report '" + f.input + "'");
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw std::runtime_error("'" + f.input + "' is not valid JSON: " + e.what());
    }
    const bench::BenchmarkReport report = bench::report_from_json(j);
    detail::OutputTarget target(f.out, out);
    bench::write_report(target.stream(), report, bench::parse_format(f.format));
}

/// Parses argv and runs the chosen subcommand. Returns the process exit code;
/// every failure prints a single "error: ..." line on `err`.
inline int parse_and_run(int argc, const char *const *argv, std::ostream &out = std::cout,
                         std::ostream &err = std::cerr, const EnvLookup &env = process_env) {
    CLI::App app{"Distributed state-vector simulator benchmarks and interconnect model", "qsimfab"};
    app.require_subcommand(1);
    RawFlags f;

    auto add_fusion = [&](CLI::App *sub) {
        sub->add_option("--fusion", f.fusion, "gate fusion")->check(CLI::IsMember({"on", "off"}))->capture_default_str();
    };
    auto add_out = [&](CLI::App *sub) { sub->add_option("--out", f.out, "write output to this file instead of stdout"); };

    CLI::App *bench_cmd = app.add_subcommand("bench", "run a benchmark");
    bench_cmd->require_subcommand(1);
    std::map<std::string, bench::BenchmarkKind> picked;
    for (bench::BenchmarkKind kind : {bench::BenchmarkKind::Qpe, bench::BenchmarkKind::Tfim, bench::BenchmarkKind::Random}) {
        const std::string name(bench::to_string(kind));
        CLI::App *sub = bench_cmd->add_subcommand(name, name + " benchmark");
        sub->add_option("-n,--qubits", f.qubits, "total qubits")->capture_default_str();
        sub->add_option("-s,--shots", f.shots, "shots per circuit")->capture_default_str();
        sub->add_option("-c,--circuits", f.circuits, "circuits to run")->capture_default_str();
        sub->add_option("--steps", f.steps, "Trotter steps (tfim)")->capture_default_str();
        sub->add_option("--gates", f.gates, "gates per random circuit")->capture_default_str();
        sub->add_option("--ranks", f.ranks, "world size P (power of two)")->capture_default_str();
        sub->add_option("--fabric", f.fabric, "loopback or tcp (env QSIM_FABRIC)");
        sub->add_option("--rendezvous", f.rendezvous, "host:port of rank 0 (env QSIM_RENDEZVOUS)");
        sub->add_option("--rank", f.rank, "this process's rank (tcp only)");
        add_fusion(sub);
        sub->add_option("--seed", f.seed, "base seed (env QSIM_SEED)");
        add_out(sub);
        sub->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
        sub->add_option("--precision", f.precision, "single or double")->check(CLI::IsMember({"single", "double"}));
        sub->add_flag("--include-warmup", f.include_warmup, "keep the first circuit in the statistics");
        sub->add_flag("--instrument", f.instrument, "record fabric traffic into the report");
        sub->add_option("--oracle-max-qubits", f.oracle_max_qubits, "largest n given a dense ideal")->capture_default_str();
        sub->add_option("--timeout", f.timeout_seconds, "fabric timeout in seconds")->capture_default_str();
        sub->callback([&, kind] { picked["bench"] = kind; });
    }

    CLI::App *model_cmd = app.add_subcommand("model", "interconnect performance model");
    model_cmd->require_subcommand(1);
    std::string model_mode;
    for (const char *mode : {"predict", "weak", "strong"}) {
        CLI::App *sub = model_cmd->add_subcommand(mode, std::string(mode) + (std::string(mode) == "predict" ? " one run" : " scaling curve"));
        sub->add_option("--topology", f.topology, "topology config file")->required();
        sub->add_option("--circuit", f.family, "qpe, tfim or random")->check(CLI::IsMember({"qpe", "tfim", "random"}))->capture_default_str();
        sub->add_option("--steps", f.steps, "Trotter steps (tfim)")->capture_default_str();
        sub->add_option("--precision", f.precision, "override the topology's precision")->check(CLI::IsMember({"single", "double"}));
        add_fusion(sub);
        add_out(sub);
        if (std::string(mode) == "weak") {
            sub->add_option("--base-n", f.base_n, "qubits at P = 1")->required();
        } else {
            sub->add_option("-n,--qubits", f.qubits, "qubits")->required();
        }
        if (std::string(mode) == "predict") {
            sub->add_option("--ranks", f.model_ranks, "rank count (default: whole topology)");
            sub->add_option("--gates", f.gates, "gates per random circuit")->capture_default_str();
            sub->add_option("--seed", f.seed, "random circuit seed (env QSIM_SEED)");
        } else {
            sub->add_option("--max-ranks", f.max_ranks, "largest P (default: whole topology)");
        }
        sub->callback([&, mode] { model_mode = mode; });
    }

    CLI::App *report_cmd = app.add_subcommand("report", "re-render a saved JSON report");
    report_cmd->add_option("input", f.input, "report file")->required();
    report_cmd->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    add_out(report_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << '\n';
        return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
    }

    try {
        if (picked.count("bench")) {
            run_bench(resolve_bench(picked["bench"], f, env), out, err);
        } else if (model_mode == "predict") {
            run_model_predict(f, env, out);
        } else if (!model_mode.empty()) {
            run_model_curve(model_mode == "weak", f, out);
        } else {
            run_report(f, out);
        }
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace qsimfab::cli
