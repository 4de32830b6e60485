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

#include <cstdint>
#include <iosfwd>
#include <string>

#include "qcs/quantizer.hpp"
#include "qcs/signal_model.hpp"
#include "qcs/trainer.hpp"

namespace qcs {

// All containers are little-endian: 8-byte magic, u64 version, then
// u64 / f64 fields. Matrices are written row-major with one sample,
// codeword or output neuron per row.

inline constexpr std::uint64_t kFormatVersion = 1;

/// Header: magic "QCSDATA\0", version, N, M, S, noise variance, count, seed;
/// then count x N sources followed by count x M measurements.
void save_dataset(const Dataset& data, const std::string& path);
Dataset load_dataset(const std::string& path);
void write_dataset(std::ostream& out, const Dataset& data);
Dataset read_dataset(std::istream& in);

struct Checkpoint {
    DeepVqcsModel model;
    std::uint64_t iteration = 0;
    std::string config_echo;  ///< free text, typically FlatConfig::to_text()
};

/// Magic "QCSCKPT\0", version, iteration, config echo (u64 length + bytes),
/// encoder net (depth 0 for a pass-through encoder, then the input width),
/// SHQ layer, hard quantizer (u64 present flag first), decoder net.
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);
void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);

/// Net segment: depth, widths, activation tags (0 identity, 1 tanh),
/// then for each layer the weight matrix and the bias vector.
void write_net(std::ostream& out, const FeedforwardNet& net);
FeedforwardNet read_net(std::istream& in);

/// Magic "QCSBOOK\0", version, size, dim, then size x dim codewords.
void save_codebook(const VectorCodebook& book, const std::string& path);
VectorCodebook load_codebook(const std::string& path);

} // namespace qcs
