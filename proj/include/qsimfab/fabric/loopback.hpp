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
#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "qsimfab/fabric/endpoint.hpp"

namespace qsimfab::fabric {

inline constexpr std::chrono::milliseconds kDefaultTimeout{30000};

struct LoopbackOptions {
    std::chrono::milliseconds timeout = kDefaultTimeout;
};

namespace detail {

// Mailboxes for every ordered rank pair, shared by all endpoints of a world.
struct LoopbackHub {
    explicit LoopbackHub(int p, std::chrono::milliseconds t)
        : world_size(p), timeout(t), boxes(static_cast<std::size_t>(p * p)), closed(static_cast<std::size_t>(p), false) {}

    std::deque<Bytes> &box(int src, int dst) { return boxes[static_cast<std::size_t>(src * world_size + dst)]; }

    const int world_size;
    const std::chrono::milliseconds timeout;
    std::mutex mu;
    std::condition_variable cv;
    std::vector<std::deque<Bytes>> boxes;
    std::vector<bool> closed;
};

}  // namespace detail

/// In-process transport: ranks are threads, messages are moved through
/// per-pair mailboxes.
class LoopbackEndpoint final : public Endpoint {
   public:
    LoopbackEndpoint(int rank, std::shared_ptr<detail::LoopbackHub> hub)
        : Endpoint(rank, hub->world_size), hub_(std::move(hub)) {}
    ~LoopbackEndpoint() override { close(); }

    TransportKind kind() const override { return TransportKind::Loopback; }

    void close() override {
        std::lock_guard lock(hub_->mu);
        hub_->closed[static_cast<std::size_t>(rank())] = true;
        hub_->cv.notify_all();
    }

   protected:
    Bytes do_exchange(int peer, std::span<const std::byte> data, int) override {
        std::unique_lock lock(hub_->mu);
        hub_->box(rank(), peer).emplace_back(data.begin(), data.end());
        hub_->cv.notify_all();
        auto &inbox = hub_->box(peer, rank());
        const auto deadline = std::chrono::steady_clock::now() + hub_->timeout;
        const bool ready = hub_->cv.wait_until(lock, deadline, [&] {
            return !inbox.empty() || hub_->closed[static_cast<std::size_t>(peer)];
        });
        if (!ready) {
            throw FabricTimeout("rank " + std::to_string(rank()) + " timed out waiting for rank " +
                                std::to_string(peer));
        }
        if (inbox.empty()) {
            throw PeerDisconnected("rank " + std::to_string(peer) + " disconnected");
        }
        Bytes got = std::move(inbox.front());
        inbox.pop_front();
        if (got.size() != data.size()) {
            throw FramingError("length mismatch: sent " + std::to_string(data.size()) + " bytes, peer sent " +
                               std::to_string(got.size()));
        }
        return got;
    }

   private:
    std::shared_ptr<detail::LoopbackHub> hub_;
};

inline std::vector<std::unique_ptr<Endpoint>> make_loopback_world(int world_size, LoopbackOptions opts = {}) {
    require_power_of_two_world(world_size);
    auto hub = std::make_shared<detail::LoopbackHub>(world_size, opts.timeout);
    std::vector<std::unique_ptr<Endpoint>> eps;
    eps.reserve(static_cast<std::size_t>(world_size));
    for (int r = 0; r < world_size; ++r) {
        eps.push_back(std::make_unique<LoopbackEndpoint>(r, hub));
    }
    return eps;
}

}  // namespace qsimfab::fabric
