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

#include "qcs/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qcs/errors.hpp"

namespace qcs {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

double parse_double(const std::string& text, const std::string& what)
{
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ConfigError(what + ": not a number: '" + text + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& text, const std::string& what)
{
    const std::string t = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ConfigError(what + ": not a non-negative integer: '" + text + "'");
    return v;
}

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

std::string format_double(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

FlatConfig FlatConfig::parse(const std::string& text)
{
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("config parse error at line " + std::to_string(e.line()) + ": " + e.message());
    }
    FlatConfig cfg;
    for (const auto& [key, node] : tree) {
        if (!node.empty())
            throw ConfigError("config sections are not supported ('[" + key + "]'); use dotted keys");
        cfg.values_[key] = trim(node.data());
    }
    return cfg;
}

FlatConfig FlatConfig::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void FlatConfig::set(const std::string& key, const std::string& value)
{
    if (trim(key).empty())
        throw ConfigError("empty config key");
    values_[trim(key)] = trim(value);
}

bool FlatConfig::has(const std::string& key) const
{
    return values_.count(key) != 0;
}

std::optional<std::string> FlatConfig::raw(const std::string& key) const
{
    const auto it = values_.find(key);
    if (it == values_.end())
        return std::nullopt;
    consumed_.insert(key);
    return it->second;
}

std::string FlatConfig::get_string(const std::string& key, const std::string& fallback) const
{
    return raw(key).value_or(fallback);
}

double FlatConfig::get_double(const std::string& key, double fallback) const
{
    const auto v = raw(key);
    return v ? parse_double(*v, key) : fallback;
}

std::size_t FlatConfig::get_size(const std::string& key, std::size_t fallback) const
{
    const auto v = raw(key);
    return v ? static_cast<std::size_t>(parse_u64(*v, key)) : fallback;
}

std::uint64_t FlatConfig::get_u64(const std::string& key, std::uint64_t fallback) const
{
    const auto v = raw(key);
    return v ? parse_u64(*v, key) : fallback;
}

bool FlatConfig::get_bool(const std::string& key, bool fallback) const
{
    const auto v = raw(key);
    if (!v)
        return fallback;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on")
        return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off")
        return false;
    throw ConfigError(key + ": not a boolean: '" + *v + "'");
}

std::vector<double> FlatConfig::get_doubles(const std::string& key, const std::vector<double>& fallback) const
{
    const auto v = raw(key);
    if (!v)
        return fallback;
    std::vector<double> out;
    for (const auto& item : split_list(*v))
        out.push_back(parse_double(item, key));
    return out;
}

std::vector<std::size_t> FlatConfig::get_sizes(const std::string& key,
                                               const std::vector<std::size_t>& fallback) const
{
    const auto v = raw(key);
    if (!v)
        return fallback;
    std::vector<std::size_t> out;
    for (const auto& item : split_list(*v))
        out.push_back(static_cast<std::size_t>(parse_u64(item, key)));
    return out;
}

std::vector<std::uint64_t> FlatConfig::get_u64s(const std::string& key,
                                                const std::vector<std::uint64_t>& fallback) const
{
    const auto v = raw(key);
    if (!v)
        return fallback;
    std::vector<std::uint64_t> out;
    for (const auto& item : split_list(*v))
        out.push_back(parse_u64(item, key));
    return out;
}

std::vector<std::string> FlatConfig::get_strings(const std::string& key,
                                                 const std::vector<std::string>& fallback) const
{
    const auto v = raw(key);
    return v ? split_list(*v) : fallback;
}

void FlatConfig::require_all_consumed() const
{
    std::string unknown;
    for (const auto& [key, value] : values_) {
        (void)value;
        if (!consumed_.count(key))
            unknown += (unknown.empty() ? "" : ", ") + key;
    }
    if (!unknown.empty())
        throw ConfigError("unknown config keys: " + unknown);
}

std::string FlatConfig::to_text() const
{
    std::string out;
    for (const auto& [key, value] : values_)
        out += key + " = " + value + "\n";
    return out;
}

} // namespace qcs
