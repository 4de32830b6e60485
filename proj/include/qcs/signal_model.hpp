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
#include <vector>

#include <Eigen/Dense>

#include "qcs/rng.hpp"

namespace qcs {

/// Reported for a perfect reconstruction instead of minus infinity.
inline constexpr double kPerfectNmseDb = -1e9;

/// y = phi x + n with a fixed partial-DCT sensing matrix.
struct MeasurementModel {
    Eigen::MatrixXd phi;          ///< m_dim x n_dim, unit-norm columns
    double noise_variance = 0.0;  ///< per-entry variance of n
    std::size_t n_dim = 0;
    std::size_t m_dim = 0;
};

/// Sources with a uniformly drawn support and N(0, nonzero_variance) values.
struct SparseSourceSpec {
    std::size_t n_dim = 0;
    std::size_t sparsity = 0;
    double nonzero_variance = 1.0;
    /// When false the support size is itself uniform on {0..sparsity}.
    bool exact_sparsity = true;
};

/// Paired samples, one column per sample. Column-major storage makes each
/// sample contiguous, matching the sample-major on-disk layout.
struct Dataset {
    Eigen::MatrixXd sources;       ///< n_dim x count
    Eigen::MatrixXd measurements;  ///< m_dim x count
    std::size_t sparsity = 0;
    double noise_variance = 0.0;
    std::uint64_t seed = 0;

    std::size_t count() const { return static_cast<std::size_t>(sources.cols()); }
    std::size_t n_dim() const { return static_cast<std::size_t>(sources.rows()); }
    std::size_t m_dim() const { return static_cast<std::size_t>(measurements.rows()); }
};

/// Orthonormal DCT-II basis, n x n. Row k is the k-th cosine atom.
Eigen::MatrixXd dct2_matrix(std::size_t n);

/// First m_dim rows of the n_dim-point DCT-II with columns rescaled to unit
/// Euclidean norm. The returned model has zero noise variance.
MeasurementModel make_measurement_matrix(std::size_t n_dim, std::size_t m_dim);

Eigen::VectorXd sample_source(const SparseSourceSpec& spec, CounterRng& rng);

/// Sample k draws its source and noise from stream k of `seed`.
Dataset sample_dataset(const MeasurementModel& model, const SparseSourceSpec& spec,
                       std::size_t count, std::uint64_t seed);

/// 10 log10(sum |x - xhat|^2 / sum |x|^2) over all samples (columns).
double nmse_db(const Eigen::MatrixXd& estimates, const Eigen::MatrixXd& truths);

/// Same metric from already accumulated error and energy sums.
double nmse_db_from_sums(double squared_error, double signal_energy);

/// Bits per source entry for K indices of ceil(log2 levels) bits each.
double rate_bits(std::size_t k_width, std::size_t levels, std::size_t n_dim);

/// ceil(log2 levels) computed exactly on integers.
unsigned index_bits(std::size_t levels);

} // namespace qcs
