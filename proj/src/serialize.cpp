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

#include "qcs/serialize.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "qcs/errors.hpp"

namespace qcs {

namespace {

constexpr std::array<char, 8> kDataMagic{'Q', 'C', 'S', 'D', 'A', 'T', 'A', '\0'};
constexpr std::array<char, 8> kCkptMagic{'Q', 'C', 'S', 'C', 'K', 'P', 'T', '\0'};
constexpr std::array<char, 8> kBookMagic{'Q', 'C', 'S', 'B', 'O', 'O', 'K', '\0'};

// Generous bound that rejects corrupt headers before a huge allocation.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 34;

std::uint64_t to_le(std::uint64_t v)
{
    if constexpr (std::endian::native == std::endian::big)
        return __builtin_bswap64(v);
    return v;
}

void put_u64(std::ostream& out, std::uint64_t v)
{
    v = to_le(v);
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_f64(std::ostream& out, double d)
{
    put_u64(out, std::bit_cast<std::uint64_t>(d));
}

std::uint64_t get_u64(std::istream& in)
{
    std::uint64_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
        throw FormatError("unexpected end of file");
    return to_le(v);
}

double get_f64(std::istream& in)
{
    return std::bit_cast<double>(get_u64(in));
}

std::size_t get_count(std::istream& in, const char* what)
{
    const std::uint64_t v = get_u64(in);
    if (v > kMaxElements)
        throw FormatError(std::string("implausible ") + what + " in header");
    return static_cast<std::size_t>(v);
}

void put_magic(std::ostream& out, const std::array<char, 8>& magic)
{
    out.write(magic.data(), magic.size());
    put_u64(out, kFormatVersion);
}

void expect_magic(std::istream& in, const std::array<char, 8>& magic, const char* kind)
{
    std::array<char, 8> got{};
    if (!in.read(got.data(), got.size()) || got != magic)
        throw FormatError(std::string("not a ") + kind + " file (bad magic)");
    const std::uint64_t version = get_u64(in);
    if (version != kFormatVersion)
        throw FormatError(std::string("unsupported ") + kind + " version " + std::to_string(version));
}

// Column-major dim x count storage is sample-major on disk.
void put_columns(std::ostream& out, const Eigen::MatrixXd& m)
{
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            put_f64(out, m(i, j));
}

Eigen::MatrixXd get_columns(std::istream& in, std::size_t rows, std::size_t cols)
{
    if (rows != 0 && cols > kMaxElements / rows)
        throw FormatError("implausible matrix size in header");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            m(i, j) = get_f64(in);
    return m;
}

void put_vector(std::ostream& out, const Eigen::VectorXd& v)
{
    for (Eigen::Index i = 0; i < v.size(); ++i)
        put_f64(out, v(i));
}

Eigen::VectorXd get_vector(std::istream& in, std::size_t n)
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v(i) = get_f64(in);
    return v;
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path + " for writing");
    return out;
}

std::ifstream open_in(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);
    return in;
}

void finish(std::ostream& out, const std::string& path)
{
    out.flush();
    if (!out)
        throw IoError("write failed for " + path);
}

} // namespace

// ------------------------------------------------------------ dataset

void write_dataset(std::ostream& out, const Dataset& data)
{
    if (data.measurements.cols() != data.sources.cols())
        throw ShapeError("dataset sources and measurements differ in count");
    put_magic(out, kDataMagic);
    put_u64(out, data.n_dim());
    put_u64(out, data.m_dim());
    put_u64(out, data.sparsity);
    put_f64(out, data.noise_variance);
    put_u64(out, data.count());
    put_u64(out, data.seed);
    put_columns(out, data.sources);
    put_columns(out, data.measurements);
}

Dataset read_dataset(std::istream& in)
{
    expect_magic(in, kDataMagic, "dataset");
    const std::size_t n = get_count(in, "N");
    const std::size_t m = get_count(in, "M");
    Dataset d;
    d.sparsity = get_count(in, "S");
    d.noise_variance = get_f64(in);
    const std::size_t count = get_count(in, "count");
    d.seed = get_u64(in);
    if (d.sparsity > n)
        throw FormatError("dataset header has S > N");
    d.sources = get_columns(in, n, count);
    d.measurements = get_columns(in, m, count);
    return d;
}

void save_dataset(const Dataset& data, const std::string& path)
{
    auto out = open_out(path);
    write_dataset(out, data);
    finish(out, path);
}

Dataset load_dataset(const std::string& path)
{
    auto in = open_in(path);
    return read_dataset(in);
}

// ---------------------------------------------------------------- net

void write_net(std::ostream& out, const FeedforwardNet& net)
{
    put_u64(out, net.depth());
    for (std::size_t w : net.widths)
        put_u64(out, w);
    for (Activation a : net.activations)
        put_u64(out, static_cast<std::uint64_t>(a));
    for (std::size_t l = 0; l + 1 < net.depth(); ++l) {
        const Eigen::MatrixXd& w = net.weights[l];
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j)
                put_f64(out, w(i, j));
        put_vector(out, net.biases[l]);
    }
}

namespace {

FeedforwardNet read_net_body(std::istream& in, std::size_t depth)
{
    if (depth < 2)
        throw FormatError("network needs at least an input and an output layer");
    FeedforwardNet net;
    for (std::size_t l = 0; l < depth; ++l) {
        const std::size_t w = get_count(in, "layer width");
        if (w == 0)
            throw FormatError("zero layer width");
        net.widths.push_back(w);
    }
    for (std::size_t l = 0; l < depth; ++l) {
        const std::uint64_t tag = get_u64(in);
        if (tag > 1)
            throw FormatError("unknown activation tag " + std::to_string(tag));
        net.activations.push_back(static_cast<Activation>(tag));
    }
    if (net.activations.front() != Activation::identity)
        throw FormatError("input layer must use the identity activation");
    for (std::size_t l = 0; l + 1 < depth; ++l) {
        const auto rows = static_cast<Eigen::Index>(net.widths[l + 1]);
        const auto cols = static_cast<Eigen::Index>(net.widths[l]);
        Eigen::MatrixXd w(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j)
                w(i, j) = get_f64(in);
        net.weights.push_back(std::move(w));
        net.biases.push_back(get_vector(in, net.widths[l + 1]));
    }
    return net;
}

} // namespace

FeedforwardNet read_net(std::istream& in)
{
    return read_net_body(in, get_count(in, "depth"));
}

// --------------------------------------------------------- checkpoint

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt)
{
    ckpt.model.validate();
    put_magic(out, kCkptMagic);
    put_u64(out, ckpt.iteration);
    put_u64(out, ckpt.config_echo.size());
    out.write(ckpt.config_echo.data(), static_cast<std::streamsize>(ckpt.config_echo.size()));

    if (ckpt.model.enc_net) {
        write_net(out, *ckpt.model.enc_net);
    } else {
        put_u64(out, 0);
        put_u64(out, ckpt.model.m_dim());
    }

    const ShqLayer& shq = ckpt.model.shq;
    put_u64(out, shq.num_levels());
    put_vector(out, shq.levels_v);
    put_vector(out, shq.shifts_s);
    put_f64(out, shq.steepness_h);

    if (ckpt.model.hard_q) {
        const ScalarQuantizer& q = *ckpt.model.hard_q;
        put_u64(out, 1);
        put_u64(out, q.num_levels());
        for (double t : q.thresholds)
            put_f64(out, t);
        for (double g : q.levels)
            put_f64(out, g);
    } else {
        put_u64(out, 0);
    }
    write_net(out, ckpt.model.dec_net);
}

Checkpoint read_checkpoint(std::istream& in)
{
    expect_magic(in, kCkptMagic, "checkpoint");
    Checkpoint ckpt;
    ckpt.iteration = get_u64(in);
    const std::size_t echo_len = get_count(in, "config echo length");
    ckpt.config_echo.resize(echo_len);
    if (echo_len && !in.read(ckpt.config_echo.data(), static_cast<std::streamsize>(echo_len)))
        throw FormatError("unexpected end of file in config echo");

    const std::size_t enc_depth = get_count(in, "encoder depth");
    std::size_t passthrough_width = 0;
    if (enc_depth == 0)
        passthrough_width = get_count(in, "pass-through width");
    else
        ckpt.model.enc_net = read_net_body(in, enc_depth);

    const std::size_t levels = get_count(in, "SHQ levels");
    if (levels < 2)
        throw FormatError("SHQ layer needs at least two levels");
    ckpt.model.shq.levels_v = get_vector(in, levels - 1);
    ckpt.model.shq.shifts_s = get_vector(in, levels - 1);
    ckpt.model.shq.steepness_h = get_f64(in);

    const std::uint64_t has_q = get_u64(in);
    if (has_q > 1)
        throw FormatError("bad quantizer flag");
    if (has_q) {
        const std::size_t q_levels = get_count(in, "quantizer levels");
        if (q_levels < 1)
            throw FormatError("quantizer needs at least one level");
        ScalarQuantizer q;
        for (std::size_t i = 0; i + 1 < q_levels; ++i)
            q.thresholds.push_back(get_f64(in));
        for (std::size_t i = 0; i < q_levels; ++i)
            q.levels.push_back(get_f64(in));
        try {
            q.validate();
        } catch (const ConfigError& e) {
            throw FormatError(std::string("stored quantizer is invalid: ") + e.what());
        }
        ckpt.model.hard_q = std::move(q);
    }
    ckpt.model.dec_net = read_net(in);
    if (!ckpt.model.enc_net && passthrough_width != ckpt.model.dec_net.input_width())
        throw FormatError("pass-through width does not match the decoder input");
    try {
        ckpt.model.validate();
    } catch (const Error& e) {
        throw FormatError(std::string("inconsistent checkpoint: ") + e.what());
    }
    return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path)
{
    auto out = open_out(path);
    write_checkpoint(out, ckpt);
    finish(out, path);
}

Checkpoint load_checkpoint(const std::string& path)
{
    auto in = open_in(path);
    return read_checkpoint(in);
}

// ----------------------------------------------------------- codebook

void save_codebook(const VectorCodebook& book, const std::string& path)
{
    auto out = open_out(path);
    put_magic(out, kBookMagic);
    put_u64(out, book.size());
    put_u64(out, book.dim());
    put_columns(out, book.codewords);
    finish(out, path);
}

VectorCodebook load_codebook(const std::string& path)
{
    auto in = open_in(path);
    expect_magic(in, kBookMagic, "codebook");
    const std::size_t size = get_count(in, "codebook size");
    const std::size_t dim = get_count(in, "codeword dimension");
    VectorCodebook book;
    book.codewords = get_columns(in, dim, size);
    return book;
}

} // namespace qcs
