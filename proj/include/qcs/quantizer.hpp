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
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qcs/rng.hpp"

namespace qcs {

/// Scalar quantizer with right-closed regions
///   R_1 = (-inf, t_1], R_i = (t_{i-1}, t_i], R_I = (t_{I-1}, +inf).
/// Region indices are 1-based, i in 1..I.
struct ScalarQuantizer {
    std::vector<double> thresholds;  ///< I - 1 entries, nondecreasing
    std::vector<double> levels;      ///< I reproduction levels

    std::size_t num_levels() const { return levels.size(); }
    /// Throws ConfigError if the invariants do not hold.
    void validate() const;
};

using QuantIndex = std::uint32_t;

QuantIndex sq_encode(const ScalarQuantizer& q, double value);
double sq_decode(const ScalarQuantizer& q, QuantIndex index);

/// I equal-width cells over [lo, hi], levels at the cell midpoints.
ScalarQuantizer uniform_sq(double lo, double hi, std::size_t levels);

struct LloydOptions {
    double tol = 1e-6;           ///< stop when relative distortion drop < tol
    std::size_t max_iters = 500;
};

struct LloydScalarResult {
    ScalarQuantizer quantizer;
    std::vector<double> distortion_history;  ///< mean squared error per iteration
    std::size_t iterations = 0;
    std::size_t reseeded_cells = 0;
};

/// Lloyd-Max design on empirical samples. Seeds are placed at the
/// (i + 1/2)/I sample quantiles; an empty cell is re-seeded at the sample
/// with the largest current quantization error.
LloydScalarResult lloyd_max_sq(std::span<const double> samples, std::size_t levels,
                               const LloydOptions& options = {});

/// Codewords stored one per column.
struct VectorCodebook {
    Eigen::MatrixXd codewords;  ///< dim x size

    std::size_t size() const { return static_cast<std::size_t>(codewords.cols()); }
    std::size_t dim() const { return static_cast<std::size_t>(codewords.rows()); }
};

struct LloydVectorResult {
    VectorCodebook codebook;
    std::vector<double> distortion_history;  ///< mean squared error per sample
    std::size_t iterations = 0;
    std::size_t reseeded_cells = 0;
};

/// k-means (generalized Lloyd) design with k-means++ seeding.
/// `samples` holds one training vector per column.
LloydVectorResult lloyd_vq(const Eigen::MatrixXd& samples, std::size_t size,
                           const LloydOptions& options, CounterRng& rng);

struct VqMatch {
    std::size_t index = 0;  ///< 0-based codeword position
    double squared_distance = 0.0;
};

/// Euclidean nearest codeword; ties go to the lowest index.
VqMatch vq_quantize(const VectorCodebook& book, const Eigen::VectorXd& v);

/// Batch nearest-codeword search producing the same answers as vq_quantize.
std::vector<VqMatch> vq_quantize_all(const VectorCodebook& book, const Eigen::MatrixXd& samples);

} // namespace qcs
