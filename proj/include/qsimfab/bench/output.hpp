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

#include <iostream>
#include <ostream>
#include <streambuf>

#include "qsimfab/fabric/endpoint.hpp"

namespace qsimfab::bench {

namespace detail {

class NullBuffer final : public std::streambuf {
   protected:
    int_type overflow(int_type c) override { return traits_type::not_eof(c); }
    std::streamsize xsputn(const char *, std::streamsize n) override { return n; }
};

}  // namespace detail

/// Where a rank writes. Only the leader's report stream reaches the real
/// sink; every rank keeps its error stream.
class OutputPolicy {
   public:
    OutputPolicy(bool leader, std::ostream &out, std::ostream &err)
        : leader_(leader), out_(leader ? &out : &null_), err_(&err) {}

    OutputPolicy(const OutputPolicy &) = delete;
    OutputPolicy &operator=(const OutputPolicy &) = delete;

    bool is_leader() const { return leader_; }
    std::ostream &out() { return *out_; }
    std::ostream &err() { return *err_; }

   private:
    detail::NullBuffer buf_;
    std::ostream null_{&buf_};
    bool leader_;
    std::ostream *out_;
    std::ostream *err_;
};

inline OutputPolicy leader_only_output(const fabric::Endpoint &ep, std::ostream &out = std::cout,
                                       std::ostream &err = std::cerr) {
    return OutputPolicy(ep.is_leader(), out, err);
}

}  // namespace qsimfab::bench
