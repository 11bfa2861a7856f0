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

#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "qsimfab/fabric/endpoint.hpp"
#include "qsimfab/fabric/instrumented.hpp"
#include "qsimfab/fabric/loopback.hpp"
#include "qsimfab/fabric/tcp.hpp"

namespace qsimfab::fabric {

struct WorldOptions {
    std::chrono::milliseconds timeout = kDefaultTimeout;
    /// Required for tcp; ignored for loopback.
    std::optional<Address> rendezvous;
    bool instrumented = false;
};

/// Builds all P endpoints of a world inside this process.
inline std::vector<std::unique_ptr<Endpoint>> create_world(TransportKind kind, int world_size,
                                                           const WorldOptions &opts = {}) {
    require_power_of_two_world(world_size);
    std::vector<std::unique_ptr<Endpoint>> eps;
    if (kind == TransportKind::Loopback) {
        eps = make_loopback_world(world_size, {opts.timeout});
    } else {
        const Address addr = opts.rendezvous ? *opts.rendezvous : Address{"127.0.0.1", pick_free_port()};
        TcpOptions t;
        t.timeout = opts.timeout;
        eps = make_tcp_world(world_size, addr, t);
    }
    return opts.instrumented ? instrument(std::move(eps)) : std::move(eps);
}

/// Runs `body(endpoint)` on one thread per rank and returns the per-rank
/// results. If any rank throws, every endpoint is closed so blocked peers
/// fail fast, and the earliest exception is rethrown after all threads join.
template <typename Body>
auto spmd_run(std::vector<std::unique_ptr<Endpoint>> &eps, Body body) {
    using R = std::invoke_result_t<Body, Endpoint &>;
    constexpr bool kVoid = std::is_void_v<R>;
    using Slot = std::conditional_t<kVoid, int, std::optional<R>>;
    std::vector<Slot> results(eps.size());
    std::mutex mu;
    std::exception_ptr first;
    std::vector<std::thread> threads;
    threads.reserve(eps.size());
    for (std::size_t r = 0; r < eps.size(); ++r) {
        threads.emplace_back([&, r] {
            try {
                if constexpr (kVoid) {
                    body(*eps[r]);
                } else {
                    results[r].emplace(body(*eps[r]));
                }
            } catch (...) {
                {
                    std::lock_guard lock(mu);
                    if (!first) first = std::current_exception();
                }
                for (auto &ep : eps) ep->close();
            }
        });
    }
    for (auto &t : threads) t.join();
    if (first) std::rethrow_exception(first);
    if constexpr (!kVoid) {
        std::vector<R> out;
        out.reserve(results.size());
        for (auto &slot : results) out.push_back(std::move(*slot));
        return out;
    }
}

}  // namespace qsimfab::fabric
