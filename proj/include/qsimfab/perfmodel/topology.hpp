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

#include <bit>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsimfab/perfmodel/catalog.hpp"
#include "qsimfab/svcore/types.hpp"
#include "qsimfab/util/kv_config.hpp"

namespace qsimfab::perfmodel {

struct TopologyLevel {
    int domain_size = 1;  // ranks joined by this level, per enclosing domain
    LinkModel link;
};

/// Nested communication domains. Level 0 spans the lowest log2(size0)
/// rank-id bits, level 1 the next log2(size1) bits, and so on.
struct Topology {
    std::string name;
    std::vector<TopologyLevel> levels;
    double mem_bw = 0;  // bytes per second
    PrecisionMode precision = PrecisionMode::Single;

    int total_ranks() const {
        int p = 1;
        for (const auto &l : levels) p *= l.domain_size;
        return p;
    }

    /// Level whose link carries a swap across rank-id bit `bit`.
    int level_of_bit(int bit) const {
        int first = 0;
        for (std::size_t i = 0; i < levels.size(); ++i) {
            first += std::countr_zero(static_cast<unsigned>(levels[i].domain_size));
            if (bit < first) return static_cast<int>(i);
        }
        throw std::out_of_range("rank bit " + std::to_string(bit) + " lies outside topology '" + name + "'");
    }

    /// Same topology with every bandwidth multiplied by `factor`.
    Topology scaled(double factor) const {
        Topology t = *this;
        t.mem_bw *= factor;
        for (auto &l : t.levels) l.link.bidir_bw *= factor;
        return t;
    }
};

inline void validate(const Topology &t) {
    if (!(t.mem_bw > 0)) throw std::invalid_argument("topology '" + t.name + "' needs a positive memory bandwidth");
    for (const auto &l : t.levels) {
        if (l.domain_size < 2 || !std::has_single_bit(static_cast<unsigned>(l.domain_size))) {
            throw std::invalid_argument("topology '" + t.name + "': domain sizes must be powers of two >= 2");
        }
        if (!(l.link.bidir_bw > 0)) throw std::invalid_argument("topology '" + t.name + "': link bandwidth must be positive");
    }
}

/// Reads keys: name, mem_bw_gbs, precision (single|double), and for
/// N = 0, 1, ...: levelN.size plus either levelN.link (catalog name) or
/// levelN.bw_gbs (bidirectional GB/s).
inline Topology parse_topology(const util::KvConfig &cfg) {
    Topology t;
    t.name = cfg.get_or("name", cfg.origin());
    t.mem_bw = cfg.to_double("mem_bw_gbs", cfg.require("mem_bw_gbs")) * kGBps;
    t.precision = parse_precision(cfg.get_or("precision", "single"));
    for (int i = 0;; ++i) {
        const std::string prefix = "level" + std::to_string(i) + ".";
        if (!cfg.has(prefix + "size")) break;
        TopologyLevel level;
        level.domain_size = static_cast<int>(cfg.get_int(prefix + "size", 0));
        if (auto link = cfg.get(prefix + "link")) {
            level.link = lookup_link(*link);
        }
        if (cfg.has(prefix + "bw_gbs")) {
            level.link.bidir_bw = cfg.get_double(prefix + "bw_gbs", 0) * kGBps;
            if (level.link.name.empty()) level.link.name = "custom";
        }
        if (level.link.name.empty()) {
            throw util::ConfigError(cfg.origin() + ": " + prefix + "link or " + prefix + "bw_gbs is required");
        }
        t.levels.push_back(level);
    }
    validate(t);
    return t;
}

inline Topology load_topology(const std::string &path) { return parse_topology(util::KvConfig::load(path)); }

}  // namespace qsimfab::perfmodel
