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

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qsimfab::fabric {

using Bytes = std::vector<std::byte>;

/// Level tag for traffic that is not an index-bit relocalization.
inline constexpr int kControlTraffic = -1;

enum class TransportKind { Loopback, Tcp };

inline std::string_view to_string(TransportKind k) { return k == TransportKind::Loopback ? "loopback" : "tcp"; }

inline TransportKind parse_transport(std::string_view s) {
    if (s == "loopback") return TransportKind::Loopback;
    if (s == "tcp") return TransportKind::Tcp;
    throw std::invalid_argument("unknown fabric '" + std::string(s) + "' (expected loopback or tcp)");
}

class FabricError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

class FabricTimeout : public FabricError {
   public:
    using FabricError::FabricError;
};

class PeerDisconnected : public FabricError {
   public:
    using FabricError::FabricError;
};

class FramingError : public FabricError {
   public:
    using FabricError::FabricError;
};

inline void require_power_of_two_world(int world_size) {
    if (world_size < 1 || !std::has_single_bit(static_cast<unsigned>(world_size))) {
        throw std::invalid_argument("world size must be a power of two (got " + std::to_string(world_size) + ")");
    }
}

inline void put_u64(Bytes &out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFFU));
    }
}

inline std::uint64_t get_u64(std::span<const std::byte> in, std::size_t offset) {
    if (offset + 8 > in.size()) {
        throw FramingError("truncated integer field");
    }
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(in[offset + static_cast<std::size_t>(i)]) << (8 * i);
    }
    return v;
}

template <typename T>
Bytes to_bytes(std::span<const T> values) {
    Bytes out(values.size_bytes());
    if (!out.empty()) std::memcpy(out.data(), values.data(), out.size());
    return out;
}

template <typename T>
std::vector<T> from_bytes(std::span<const std::byte> bytes) {
    if (bytes.size() % sizeof(T) != 0) {
        throw FramingError("payload size is not a multiple of the element size");
    }
    std::vector<T> out(bytes.size() / sizeof(T));
    if (!out.empty()) std::memcpy(out.data(), bytes.data(), bytes.size());
    return out;
}

/// One rank's connection to a world of 2^k ranks. Transports implement
/// pairwise exchange; collectives are built on it with recursive doubling,
/// so every collective takes log2(P) rounds. An endpoint is used by one
/// thread at a time.
class Endpoint {
   public:
    Endpoint(int rank, int world_size) : rank_(rank), world_size_(world_size) {
        require_power_of_two_world(world_size);
        if (rank < 0 || rank >= world_size) {
            throw std::invalid_argument("rank out of range");
        }
    }
    virtual ~Endpoint() = default;
    Endpoint(const Endpoint &) = delete;
    Endpoint &operator=(const Endpoint &) = delete;

    int rank() const { return rank_; }
    int world_size() const { return world_size_; }
    int log2_world() const { return std::countr_zero(static_cast<unsigned>(world_size_)); }
    bool is_leader() const { return rank_ == 0; }
    virtual TransportKind kind() const = 0;

    /// Symmetric swap: sends `data` to `peer` and returns what the peer sent.
    /// Both sides must pass buffers of equal length. `level` tags the
    /// traffic for instrumentation (a global index bit, or kControlTraffic).
    Bytes exchange(int peer, std::span<const std::byte> data, int level = kControlTraffic) {
        if (peer == rank_) {
            throw FabricError("rank " + std::to_string(rank_) + " cannot exchange with itself");
        }
        if (peer < 0 || peer >= world_size_) {
            throw FabricError("peer rank " + std::to_string(peer) + " out of range");
        }
        return do_exchange(peer, data, level);
    }

    virtual void barrier() {
        for (int bit = 0; bit < log2_world(); ++bit) {
            exchange(rank_ ^ (1 << bit), {});
        }
    }

    /// Every rank returns root's buffer.
    Bytes broadcast(int root, std::span<const std::byte> data) {
        if (root < 0 || root >= world_size_) {
            throw FabricError("broadcast root " + std::to_string(root) + " out of range");
        }
        Bytes held;
        const int relative = rank_ ^ root;
        if (relative == 0) held.assign(data.begin(), data.end());
        for (int bit = 0; bit < log2_world(); ++bit) {
            const int span = 1 << bit;
            if (relative >= 2 * span) continue;  // not yet part of the tree
            const int peer = rank_ ^ span;
            if (relative < span) {
                exchange_varlen(peer, held);
            } else {
                held = exchange_varlen(peer, {});
            }
        }
        return held;
    }

    /// Every rank returns all ranks' buffers, indexed by rank.
    std::vector<Bytes> allgather(std::span<const std::byte> data) {
        std::vector<Bytes> blocks(static_cast<std::size_t>(world_size_));
        blocks[static_cast<std::size_t>(rank_)].assign(data.begin(), data.end());
        for (int bit = 0; bit < log2_world(); ++bit) {
            const int span = 1 << bit;
            const int first = rank_ & ~(span - 1);  // my current group [first, first + span)
            Bytes packed;
            for (int r = first; r < first + span; ++r) {
                const Bytes &b = blocks[static_cast<std::size_t>(r)];
                put_u64(packed, b.size());
                packed.insert(packed.end(), b.begin(), b.end());
            }
            const Bytes got = exchange_varlen(rank_ ^ span, packed);
            std::size_t off = 0;
            const int peer_first = first ^ span;
            for (int r = peer_first; r < peer_first + span; ++r) {
                const std::uint64_t len = get_u64(got, off);
                off += 8;
                if (off + len > got.size()) throw FramingError("truncated allgather block");
                blocks[static_cast<std::size_t>(r)].assign(got.begin() + static_cast<std::ptrdiff_t>(off),
                                                           got.begin() + static_cast<std::ptrdiff_t>(off + len));
                off += len;
            }
        }
        return blocks;
    }

    /// Elementwise sum; every rank adds contributions in rank order, so all
    /// ranks hold bit-identical results.
    std::vector<double> allreduce_sum(std::span<const double> values) {
        const std::vector<Bytes> all = allgather(to_bytes(values));
        std::vector<double> sum(values.size(), 0.0);
        for (const Bytes &b : all) {
            if (b.size() != values.size_bytes()) {
                throw FabricError("allreduce length mismatch across ranks");
            }
            const std::vector<double> v = from_bytes<double>(b);
            for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += v[i];
        }
        return sum;
    }

    /// Releases transport resources; peers blocked on this rank fail fast.
    virtual void close() {}

   protected:
    virtual Bytes do_exchange(int peer, std::span<const std::byte> data, int level) = 0;

    /// Exchange of possibly different-length buffers: sizes first, then both
    /// sides send zero-padded buffers of the larger size.
    Bytes exchange_varlen(int peer, std::span<const std::byte> data) {
        Bytes size;
        put_u64(size, data.size());
        const std::uint64_t peer_size = get_u64(exchange(peer, size), 0);
        Bytes padded(std::max<std::uint64_t>(peer_size, data.size()));
        std::copy(data.begin(), data.end(), padded.begin());
        Bytes got = exchange(peer, padded);
        got.resize(peer_size);
        return got;
    }

   private:
    int rank_;
    int world_size_;
};

}  // namespace qsimfab::fabric
