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

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qsimfab::perfmodel {

/// 1 GB/s, decimal as quoted by link vendors.
inline constexpr double kGBps = 1e9;

struct LinkModel {
    std::string name;
    double bidir_bw = 0;  // bytes per second, both directions together

    double per_direction_bw() const { return bidir_bw / 2; }
};

/// Peak bidirectional bandwidths of common device and node interconnects.
inline const std::vector<LinkModel> &catalog() {
    static const std::vector<LinkModel> links = {
        {"PCIe 4.0", 64 * kGBps},        {"PCIe 5.0", 128 * kGBps},     {"PCIe 6.0", 256 * kGBps},
        {"NVLink 3", 600 * kGBps},       {"NVLink 4", 900 * kGBps},     {"NVLink C2C", 900 * kGBps},
        {"Infinity Fabric", 153.6 * kGBps}, {"Slingshot 11", 25 * kGBps}, {"ConnectX-7", 50 * kGBps},
        {"NVLink 5", 1800 * kGBps},
    };
    return links;
}

inline const LinkModel &lookup_link(std::string_view name) {
    for (const LinkModel &l : catalog()) {
        if (l.name == name) return l;
    }
    throw std::invalid_argument("unknown interconnect '" + std::string(name) + "'");
}

}  // namespace qsimfab::perfmodel
