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
#include <cstdint>
#include <random>

namespace qsimfab {

/// Seeded generator whose derived draws do not depend on the standard
/// library's distribution implementations, so streams are reproducible
/// across toolchains.
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, n).
    std::uint64_t index(std::uint64_t n) {
        const auto v = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
        return std::min(v, n - 1);
    }

   private:
    std::mt19937_64 engine_;
};

}  // namespace qsimfab
