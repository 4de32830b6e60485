// SPDX-License-Identifier: Apache-2.0
//
// qcslab: quantized compressed sensing laboratory
// Copyright (C) 2026 qcslab developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace qcs {

/// Flat key/value configuration with dotted keys, one `key = value` per
/// line; `#` and `;` start comment lines. Lists are comma separated.
///
/// Every typed getter marks its key as consumed so that a loader can
/// reject keys nobody asked for (usually typos).
class FlatConfig {
public:
    static FlatConfig parse(const std::string& text);
    static FlatConfig load(const std::string& path);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;
    std::optional<std::string> raw(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::size_t get_size(const std::string& key, std::size_t fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<std::size_t> get_sizes(const std::string& key, const std::vector<std::size_t>& fallback) const;
    std::vector<std::uint64_t> get_u64s(const std::string& key, const std::vector<std::uint64_t>& fallback) const;
    std::vector<std::string> get_strings(const std::string& key, const std::vector<std::string>& fallback) const;

    /// Throws ConfigError naming every key no getter has read.
    void require_all_consumed() const;
    /// Sorted `key = value` lines; parse(to_text()) reproduces the entries.
    std::string to_text() const;
    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> consumed_;
};

double parse_double(const std::string& text, const std::string& what);
std::uint64_t parse_u64(const std::string& text, const std::string& what);
std::vector<std::string> split_list(const std::string& text);
std::string format_double(double v);

} // namespace qcs
