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
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qsimfab/fabric/endpoint.hpp"

namespace qsimfab::fabric {

enum class EventKind { Exchange, BarrierEnter, BarrierExit, Mark };

struct TrafficEvent {
    EventKind kind;
    int peer = -1;
    std::uint64_t bytes = 0;
    int level = kControlTraffic;
    std::string label;
};

/// Counters seen by one rank. Level keys are global index bits
/// (0 = lowest rank bit); control traffic (collectives) is kept apart.
struct TrafficLog {
    std::vector<std::uint64_t> bytes_sent_to;      // indexed by peer
    std::vector<std::uint64_t> bytes_received_from;
    std::map<int, std::uint64_t> level_bytes_sent;
    std::map<int, std::uint64_t> level_bytes_received;
    std::map<int, std::uint64_t> level_exchanges;
    std::uint64_t control_bytes = 0;
    std::uint64_t messages = 0;
    std::vector<TrafficEvent> events;

    explicit TrafficLog(int world_size = 1)
        : bytes_sent_to(static_cast<std::size_t>(world_size), 0),
          bytes_received_from(static_cast<std::size_t>(world_size), 0) {}

    /// Data-movement bytes sent, summed over levels.
    std::uint64_t exchange_bytes_sent() const {
        std::uint64_t total = 0;
        for (const auto &[level, b] : level_bytes_sent) total += b;
        return total;
    }
    std::uint64_t exchange_count() const {
        std::uint64_t total = 0;
        for (const auto &[level, c] : level_exchanges) total += c;
        return total;
    }
    std::uint64_t total_bytes_sent() const {
        std::uint64_t total = 0;
        for (auto b : bytes_sent_to) total += b;
        return total;
    }
};

/// Wraps another endpoint and records every message that passes through.
class InstrumentedEndpoint final : public Endpoint {
   public:
    explicit InstrumentedEndpoint(std::unique_ptr<Endpoint> inner)
        : Endpoint(inner->rank(), inner->world_size()), inner_(std::move(inner)), log_(world_size()) {}

    TransportKind kind() const override { return inner_->kind(); }
    const TrafficLog &log() const { return log_; }
    Endpoint &inner() { return *inner_; }

    void reset_log() { log_ = TrafficLog(world_size()); }

    /// Appends a labelled marker to the event stream.
    void mark(std::string label) { log_.events.push_back({EventKind::Mark, -1, 0, kControlTraffic, std::move(label)}); }

    void barrier() override {
        log_.events.push_back({EventKind::BarrierEnter, -1, 0, kControlTraffic, {}});
        Endpoint::barrier();
        log_.events.push_back({EventKind::BarrierExit, -1, 0, kControlTraffic, {}});
    }

    void close() override { inner_->close(); }

   protected:
    Bytes do_exchange(int peer, std::span<const std::byte> data, int level) override {
        Bytes got = inner_->exchange(peer, data, level);
        const auto p = static_cast<std::size_t>(peer);
        log_.bytes_sent_to[p] += data.size();
        log_.bytes_received_from[p] += got.size();
        ++log_.messages;
        if (level == kControlTraffic) {
            log_.control_bytes += data.size();
        } else {
            log_.level_bytes_sent[level] += data.size();
            log_.level_bytes_received[level] += got.size();
            ++log_.level_exchanges[level];
        }
        log_.events.push_back({EventKind::Exchange, peer, data.size(), level, {}});
        return got;
    }

   private:
    std::unique_ptr<Endpoint> inner_;
    TrafficLog log_;
};

/// Returns the instrumenting wrapper if `ep` is one, else nullptr.
inline InstrumentedEndpoint *as_instrumented(Endpoint &ep) { return dynamic_cast<InstrumentedEndpoint *>(&ep); }

inline std::vector<std::unique_ptr<Endpoint>> instrument(std::vector<std::unique_ptr<Endpoint>> eps) {
    for (auto &ep : eps) ep = std::make_unique<InstrumentedEndpoint>(std::move(ep));
    return eps;
}

}  // namespace qsimfab::fabric
