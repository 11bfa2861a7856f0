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

// Localhost socket transport, one OS process (or thread) per rank.
//
// Wire format: every message is an 8-byte little-endian payload length
// followed by the raw payload. Each rank pair has a dedicated connection.
// Bootstrap: rank 0 listens on the rendezvous address; every other rank
// opens its own listener, connects to rank 0 and sends a hello frame
// (rank u64, listen port u64). Rank 0 replies with the address table, one
// "host:port" line per rank. Rank j then connects to the listeners of
// ranks 1..j-1 and sends a hello naming itself; the rendezvous connection
// doubles as the (0, j) link.

#pragma once

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <exception>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "qsimfab/fabric/endpoint.hpp"
#include "qsimfab/fabric/loopback.hpp"

namespace qsimfab::fabric {

struct Address {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;

    static Address parse(std::string_view s) {
        const auto colon = s.rfind(':');
        if (colon == std::string_view::npos || colon == 0 || colon + 1 == s.size()) {
            throw std::invalid_argument("rendezvous address must be host:port (got '" + std::string(s) + "')");
        }
        Address a;
        a.host = std::string(s.substr(0, colon));
        if (a.host == "localhost") a.host = "127.0.0.1";
        const std::string port(s.substr(colon + 1));
        std::size_t used = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(port, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used != port.size() || v > 65535) {
            throw std::invalid_argument("invalid port in rendezvous address '" + std::string(s) + "'");
        }
        a.port = static_cast<std::uint16_t>(v);
        return a;
    }

    std::string to_string() const { return host + ":" + std::to_string(port); }
};

struct TcpOptions {
    std::chrono::milliseconds timeout = kDefaultTimeout;
    /// Frames announcing more than this many bytes are rejected as corrupt.
    std::uint64_t max_frame_bytes = std::uint64_t{1} << 40;
};

inline std::array<std::byte, 8> encode_frame_header(std::uint64_t length) {
    std::array<std::byte, 8> h{};
    for (int i = 0; i < 8; ++i) h[static_cast<std::size_t>(i)] = static_cast<std::byte>((length >> (8 * i)) & 0xFFU);
    return h;
}

inline std::uint64_t decode_frame_header(std::span<const std::byte, 8> h) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(h[static_cast<std::size_t>(i)]) << (8 * i);
    return v;
}

namespace detail {

using Clock = std::chrono::steady_clock;

class Socket {
   public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    ~Socket() { reset(); }
    Socket(Socket &&o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
    Socket &operator=(Socket &&o) noexcept {
        if (this != &o) {
            reset();
            fd_ = std::exchange(o.fd_, -1);
        }
        return *this;
    }
    int fd() const { return fd_; }
    bool valid() const { return fd_ >= 0; }
    void reset() {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }
    void shutdown() {
        if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
    }

   private:
    int fd_ = -1;
};

[[noreturn]] inline void throw_errno(const std::string &what) {
    throw FabricError(what + ": " + std::strerror(errno));
}

inline int remaining_ms(Clock::time_point deadline) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    return left < 0 ? 0 : static_cast<int>(std::min<long long>(left, 1 << 30));
}

inline void set_nonblocking(int fd) {
    const int flags = ::fcntl(fd, F_GETFL, 0);
    if (flags < 0 || ::fcntl(fd, F_SETFL, flags | O_NONBLOCK) < 0) throw_errno("fcntl");
}

inline void tune(int fd) {
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    set_nonblocking(fd);
}

inline sockaddr_in make_sockaddr(const std::string &host, std::uint16_t port) {
    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &sa.sin_addr) != 1) {
        throw FabricError("cannot parse IPv4 host '" + host + "'");
    }
    return sa;
}

inline Socket listen_on(const std::string &host, std::uint16_t port, int backlog) {
    Socket s(::socket(AF_INET, SOCK_STREAM, 0));
    if (!s.valid()) throw_errno("socket");
    int one = 1;
    ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in sa = make_sockaddr(host, port);
    if (::bind(s.fd(), reinterpret_cast<sockaddr *>(&sa), sizeof(sa)) < 0) {
        throw_errno("bind " + host + ":" + std::to_string(port));
    }
    if (::listen(s.fd(), backlog) < 0) throw_errno("listen");
    return s;
}

inline std::uint16_t local_port(const Socket &s) {
    sockaddr_in sa{};
    socklen_t len = sizeof(sa);
    if (::getsockname(s.fd(), reinterpret_cast<sockaddr *>(&sa), &len) < 0) throw_errno("getsockname");
    return ntohs(sa.sin_port);
}

inline std::string peer_host(const Socket &s) {
    sockaddr_in sa{};
    socklen_t len = sizeof(sa);
    if (::getpeername(s.fd(), reinterpret_cast<sockaddr *>(&sa), &len) < 0) throw_errno("getpeername");
    char buf[INET_ADDRSTRLEN] = {};
    ::inet_ntop(AF_INET, &sa.sin_addr, buf, sizeof(buf));
    return buf;
}

inline Socket accept_before(const Socket &listener, Clock::time_point deadline, const std::string &what) {
    pollfd p{listener.fd(), POLLIN, 0};
    for (;;) {
        const int rc = ::poll(&p, 1, remaining_ms(deadline));
        if (rc < 0 && errno == EINTR) continue;
        if (rc < 0) throw_errno("poll");
        if (rc == 0) throw FabricTimeout("rendezvous timeout: " + what);
        Socket s(::accept(listener.fd(), nullptr, nullptr));
        if (!s.valid()) throw_errno("accept");
        tune(s.fd());
        return s;
    }
}

inline Socket connect_before(const Address &addr, Clock::time_point deadline) {
    for (;;) {
        Socket s(::socket(AF_INET, SOCK_STREAM, 0));
        if (!s.valid()) throw_errno("socket");
        sockaddr_in sa = make_sockaddr(addr.host, addr.port);
        if (::connect(s.fd(), reinterpret_cast<sockaddr *>(&sa), sizeof(sa)) == 0) {
            tune(s.fd());
            return s;
        }
        if (errno != ECONNREFUSED && errno != EINTR && errno != ETIMEDOUT && errno != EAGAIN) {
            throw_errno("connect " + addr.to_string());
        }
        if (Clock::now() >= deadline) {
            throw FabricTimeout("rendezvous timeout connecting to " + addr.to_string());
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
}

/// Sends one frame and receives one frame concurrently on `fd`. The
/// received length must equal `expect_len` unless it is negative.
inline Bytes duplex_frame(int fd, std::span<const std::byte> payload, long long expect_len, Clock::time_point deadline,
                          std::uint64_t max_frame, const std::string &who) {
    const auto header = encode_frame_header(payload.size());
    std::size_t sent = 0;
    const std::size_t to_send = 8 + payload.size();
    auto out_byte_ptr = [&](std::size_t pos) -> const std::byte * {
        return pos < 8 ? header.data() + pos : payload.data() + (pos - 8);
    };
    auto out_chunk = [&](std::size_t pos) { return pos < 8 ? 8 - pos : to_send - pos; };

    std::array<std::byte, 8> in_header{};
    std::size_t header_got = 0;
    Bytes body;
    std::size_t body_got = 0;
    bool have_len = false;

    auto done_receiving = [&] { return have_len && body_got == body.size(); };
    while (sent < to_send || !done_receiving()) {
        pollfd p{fd, static_cast<short>(POLLIN | (sent < to_send ? POLLOUT : 0)), 0};
        const int rc = ::poll(&p, 1, remaining_ms(deadline));
        if (rc < 0 && errno == EINTR) continue;
        if (rc < 0) throw_errno("poll");
        if (rc == 0) throw FabricTimeout("timed out exchanging with " + who);
        if ((p.revents & POLLOUT) && sent < to_send) {
            const ssize_t n = ::send(fd, out_byte_ptr(sent), out_chunk(sent), MSG_NOSIGNAL);
            if (n < 0 && errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR) {
                if (errno == EPIPE || errno == ECONNRESET) throw PeerDisconnected(who + " disconnected");
                throw_errno("send");
            }
            if (n > 0) sent += static_cast<std::size_t>(n);
        }
        if ((p.revents & (POLLIN | POLLHUP | POLLERR)) && !done_receiving()) {
            ssize_t n = 0;
            if (!have_len) {
                n = ::recv(fd, in_header.data() + header_got, 8 - header_got, 0);
            } else {
                n = ::recv(fd, body.data() + body_got, body.size() - body_got, 0);
            }
            if (n == 0) throw PeerDisconnected(who + " disconnected");
            if (n < 0) {
                if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR) continue;
                if (errno == ECONNRESET) throw PeerDisconnected(who + " disconnected");
                throw_errno("recv");
            }
            if (!have_len) {
                header_got += static_cast<std::size_t>(n);
                if (header_got == 8) {
                    const std::uint64_t len = decode_frame_header(in_header);
                    if (len > max_frame) {
                        throw FramingError("frame from " + who + " announces " + std::to_string(len) + " bytes");
                    }
                    if (expect_len >= 0 && len != static_cast<std::uint64_t>(expect_len)) {
                        throw FramingError("length mismatch: expected " + std::to_string(expect_len) + " bytes from " +
                                           who + ", frame announces " + std::to_string(len));
                    }
                    body.resize(len);
                    have_len = true;
                }
            } else {
                body_got += static_cast<std::size_t>(n);
            }
        }
    }
    return body;
}

inline void send_frame(int fd, std::span<const std::byte> payload, Clock::time_point deadline, const std::string &who) {
    const auto header = encode_frame_header(payload.size());
    Bytes all(header.begin(), header.end());
    all.insert(all.end(), payload.begin(), payload.end());
    std::size_t sent = 0;
    while (sent < all.size()) {
        pollfd p{fd, POLLOUT, 0};
        const int rc = ::poll(&p, 1, remaining_ms(deadline));
        if (rc < 0 && errno == EINTR) continue;
        if (rc < 0) throw_errno("poll");
        if (rc == 0) throw FabricTimeout("timed out sending to " + who);
        const ssize_t n = ::send(fd, all.data() + sent, all.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR) continue;
            throw PeerDisconnected(who + " disconnected");
        }
        sent += static_cast<std::size_t>(n);
    }
}

inline Bytes recv_frame(int fd, Clock::time_point deadline, std::uint64_t max_frame, const std::string &who) {
    auto read_exact = [&](std::byte *dst, std::size_t len) {
        std::size_t got = 0;
        while (got < len) {
            pollfd p{fd, POLLIN, 0};
            const int rc = ::poll(&p, 1, remaining_ms(deadline));
            if (rc < 0 && errno == EINTR) continue;
            if (rc < 0) throw_errno("poll");
            if (rc == 0) throw FabricTimeout("timed out receiving from " + who);
            const ssize_t n = ::recv(fd, dst + got, len - got, 0);
            if (n == 0) throw PeerDisconnected(who + " disconnected");
            if (n < 0) {
                if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR) continue;
                throw PeerDisconnected(who + " disconnected");
            }
            got += static_cast<std::size_t>(n);
        }
    };
    std::array<std::byte, 8> h{};
    read_exact(h.data(), 8);
    const std::uint64_t len = decode_frame_header(h);
    if (len > max_frame) throw FramingError("frame from " + who + " announces " + std::to_string(len) + " bytes");
    Bytes body(len);
    read_exact(body.data(), body.size());
    return body;
}

inline Bytes hello_payload(int rank, std::uint16_t port) {
    Bytes b;
    put_u64(b, static_cast<std::uint64_t>(rank));
    put_u64(b, port);
    return b;
}

}  // namespace detail

class TcpEndpoint final : public Endpoint {
   public:
    TcpEndpoint(int rank, int world_size, std::vector<detail::Socket> links, TcpOptions opts)
        : Endpoint(rank, world_size), links_(std::move(links)), opts_(opts) {}
    ~TcpEndpoint() override { close(); }

    TransportKind kind() const override { return TransportKind::Tcp; }

    void close() override {
        for (auto &s : links_) s.shutdown();
    }

    /// Raw socket for the link to `peer`; lets tests inject malformed frames.
    int native_handle(int peer) const { return links_.at(static_cast<std::size_t>(peer)).fd(); }

   protected:
    Bytes do_exchange(int peer, std::span<const std::byte> data, int) override {
        const auto deadline = detail::Clock::now() + opts_.timeout;
        return detail::duplex_frame(links_[static_cast<std::size_t>(peer)].fd(), data,
                                    static_cast<long long>(data.size()), deadline, opts_.max_frame_bytes,
                                    "rank " + std::to_string(peer));
    }

   private:
    std::vector<detail::Socket> links_;
    TcpOptions opts_;
};

/// Joins a socket world as `rank`. Rank 0 listens on `rendezvous`; the call
/// returns once the full mesh is connected and a barrier has passed.
inline std::unique_ptr<TcpEndpoint> connect_tcp(int rank, int world_size, const Address &rendezvous,
                                                TcpOptions opts = {}) {
    using namespace detail;
    require_power_of_two_world(world_size);
    if (rank < 0 || rank >= world_size) throw std::invalid_argument("rank out of range");
    const auto deadline = Clock::now() + opts.timeout;
    std::vector<Socket> links(static_cast<std::size_t>(world_size));
    if (world_size == 1) {
        return std::make_unique<TcpEndpoint>(rank, world_size, std::move(links), opts);
    }

    if (rank == 0) {
        Socket listener = listen_on(rendezvous.host, rendezvous.port, world_size);
        std::vector<std::string> table(static_cast<std::size_t>(world_size));
        table[0] = rendezvous.to_string();
        for (int i = 1; i < world_size; ++i) {
            Socket s = accept_before(listener, deadline, "waiting for ranks to join at " + rendezvous.to_string());
            const Bytes hello = recv_frame(s.fd(), deadline, 64, "joining rank");
            const auto r = static_cast<int>(get_u64(hello, 0));
            const auto port = static_cast<std::uint16_t>(get_u64(hello, 8));
            if (r <= 0 || r >= world_size || links[static_cast<std::size_t>(r)].valid()) {
                throw FabricError("bad or duplicate rank " + std::to_string(r) + " in rendezvous hello");
            }
            table[static_cast<std::size_t>(r)] = peer_host(s) + ":" + std::to_string(port);
            links[static_cast<std::size_t>(r)] = std::move(s);
        }
        std::string text;
        for (const auto &line : table) text += line + "\n";
        const auto *p = reinterpret_cast<const std::byte *>(text.data());
        for (int r = 1; r < world_size; ++r) {
            send_frame(links[static_cast<std::size_t>(r)].fd(), {p, text.size()}, deadline, "rank " + std::to_string(r));
        }
    } else {
        Socket listener = listen_on(rendezvous.host, 0, world_size);
        Socket root = connect_before(rendezvous, deadline);
        send_frame(root.fd(), hello_payload(rank, local_port(listener)), deadline, "rank 0");
        const Bytes table_bytes = recv_frame(root.fd(), deadline, 1 << 20, "rank 0");
        links[0] = std::move(root);
        std::vector<Address> table;
        std::istringstream in(std::string(reinterpret_cast<const char *>(table_bytes.data()), table_bytes.size()));
        for (std::string line; std::getline(in, line);) {
            if (!line.empty()) table.push_back(Address::parse(line));
        }
        if (static_cast<int>(table.size()) != world_size) throw FabricError("malformed rendezvous address table");
        for (int peer = 1; peer < rank; ++peer) {
            Socket s = connect_before(table[static_cast<std::size_t>(peer)], deadline);
            send_frame(s.fd(), hello_payload(rank, 0), deadline, "rank " + std::to_string(peer));
            links[static_cast<std::size_t>(peer)] = std::move(s);
        }
        for (int i = rank + 1; i < world_size; ++i) {
            Socket s = accept_before(listener, deadline, "waiting for higher ranks to connect");
            const Bytes hello = recv_frame(s.fd(), deadline, 64, "connecting rank");
            const auto r = static_cast<int>(get_u64(hello, 0));
            if (r <= rank || r >= world_size || links[static_cast<std::size_t>(r)].valid()) {
                throw FabricError("unexpected hello from rank " + std::to_string(r));
            }
            links[static_cast<std::size_t>(r)] = std::move(s);
        }
    }
    auto ep = std::make_unique<TcpEndpoint>(rank, world_size, std::move(links), opts);
    ep->barrier();
    return ep;
}

/// All ranks of a socket world inside this process, one connecting thread
/// per rank. Used by tests and by single-command tcp runs.
inline std::vector<std::unique_ptr<Endpoint>> make_tcp_world(int world_size, const Address &rendezvous,
                                                             TcpOptions opts = {}) {
    require_power_of_two_world(world_size);
    std::vector<std::unique_ptr<Endpoint>> eps(static_cast<std::size_t>(world_size));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(world_size));
    std::vector<std::thread> threads;
    for (int r = 0; r < world_size; ++r) {
        threads.emplace_back([&, r] {
            try {
                eps[static_cast<std::size_t>(r)] = connect_tcp(r, world_size, rendezvous, opts);
            } catch (...) {
                errors[static_cast<std::size_t>(r)] = std::current_exception();
            }
        });
    }
    for (auto &t : threads) t.join();
    for (auto &e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return eps;
}

/// Asks the OS for a currently free localhost port.
inline std::uint16_t pick_free_port() {
    detail::Socket s = detail::listen_on("127.0.0.1", 0, 1);
    return detail::local_port(s);
}

}  // namespace qsimfab::fabric
