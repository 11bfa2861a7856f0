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


// Plain-text "key = value" configuration files. Blank lines and lines
// starting with '#' are ignored; keys are case-sensitive and unique.

#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qsimfab::util {

class ConfigError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

class KvConfig {
   public:
    static KvConfig parse(std::string_view text, const std::string &origin = "<config>") {
        KvConfig cfg;
        cfg.origin_ = origin;
        std::istringstream in{std::string(text)};
        int lineno = 0;
        for (std::string line; std::getline(in, line);) {
            ++lineno;
            const std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            const auto eq = t.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
            }
            const std::string key = trim(t.substr(0, eq));
            const std::string value = trim(t.substr(eq + 1));
            if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
            if (!cfg.values_.emplace(key, value).second) {
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
            }
        }
        return cfg;
    }

    static KvConfig load(const std::string &path) {
        std::ifstream f(path);
        if (!f) throw ConfigError("cannot open config file '" + path + "'");
        std::stringstream buf;
        buf << f.rdbuf();
        return parse(buf.str(), path);
    }

    bool has(const std::string &key) const { return values_.count(key) != 0; }

    std::optional<std::string> get(const std::string &key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    std::string require(const std::string &key) const {
        auto v = get(key);
        if (!v) throw ConfigError(origin_ + ": missing key '" + key + "'");
        return *v;
    }

    std::string get_or(const std::string &key, const std::string &fallback) const { return get(key).value_or(fallback); }

    double get_double(const std::string &key, double fallback) const {
        auto v = get(key);
        return v ? to_double(key, *v) : fallback;
    }

    long long get_int(const std::string &key, long long fallback) const {
        auto v = get(key);
        if (!v) return fallback;
        long long out = 0;
        const auto *end = v->data() + v->size();
        auto [p, ec] = std::from_chars(v->data(), end, out);
        if (ec != std::errc{} || p != end) bad_value(key, *v, "an integer");
        return out;
    }

    bool get_bool(const std::string &key, bool fallback) const {
        auto v = get(key);
        if (!v) return fallback;
        if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
        if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
        bad_value(key, *v, "a boolean");
    }

    double to_double(const std::string &key, const std::string &v) const {
        std::size_t used = 0;
        double out = 0;
        try {
            out = std::stod(v, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used == 0 || used != v.size()) bad_value(key, v, "a number");
        return out;
    }

    const std::map<std::string, std::string> &values() const { return values_; }
    const std::string &origin() const { return origin_; }

   private:
    static std::string trim(const std::string &s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    [[noreturn]] void bad_value(const std::string &key, const std::string &v, const char *what) const {
        throw ConfigError(origin_ + ": value '" + v + "' for '" + key + "' is not " + what);
    }

    std::map<std::string, std::string> values_;
    std::string origin_;
};

}  // namespace qsimfab::util
