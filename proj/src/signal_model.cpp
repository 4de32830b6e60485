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

#include "qcs/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "qcs/errors.hpp"

namespace qcs {

Eigen::MatrixXd dct2_matrix(std::size_t n)
{
    if (n == 0)
        throw ConfigError("dct2_matrix: size must be positive");
    const double nd = static_cast<double>(n);
    Eigen::MatrixXd c(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double scale = k == 0 ? std::sqrt(1.0 / nd) : std::sqrt(2.0 / nd);
        for (std::size_t j = 0; j < n; ++j)
            c(k, j) = scale * std::cos(std::numbers::pi * (2.0 * j + 1.0) * k / (2.0 * nd));
    }
    return c;
}

MeasurementModel make_measurement_matrix(std::size_t n_dim, std::size_t m_dim)
{
    if (m_dim < 1 || m_dim > n_dim)
        throw ConfigError("measurement matrix needs 1 <= M <= N, got N=" + std::to_string(n_dim) +
                          " M=" + std::to_string(m_dim));
    MeasurementModel model;
    model.n_dim = n_dim;
    model.m_dim = m_dim;
    model.phi = dct2_matrix(n_dim).topRows(m_dim);
    for (Eigen::Index j = 0; j < model.phi.cols(); ++j)
        model.phi.col(j) /= model.phi.col(j).norm();
    return model;
}

Eigen::VectorXd sample_source(const SparseSourceSpec& spec, CounterRng& rng)
{
    if (spec.sparsity > spec.n_dim)
        throw ConfigError("sparsity " + std::to_string(spec.sparsity) + " exceeds N=" +
                          std::to_string(spec.n_dim));
    if (!(spec.nonzero_variance > 0.0))
        throw ConfigError("nonzero variance must be positive");

    std::size_t support = spec.sparsity;
    if (!spec.exact_sparsity)
        support = rng.below(spec.sparsity + 1);

    // Partial Fisher-Yates: the first `support` slots form a uniform subset.
    std::vector<std::size_t> index(spec.n_dim);
    std::iota(index.begin(), index.end(), std::size_t{0});
    for (std::size_t i = 0; i < support; ++i) {
        const std::size_t j = i + rng.below(spec.n_dim - i);
        std::swap(index[i], index[j]);
    }
    std::sort(index.begin(), index.begin() + static_cast<std::ptrdiff_t>(support));

    const double sd = std::sqrt(spec.nonzero_variance);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.n_dim));
    for (std::size_t i = 0; i < support; ++i)
        x(static_cast<Eigen::Index>(index[i])) = sd * rng.normal();
    return x;
}

Dataset sample_dataset(const MeasurementModel& model, const SparseSourceSpec& spec,
                       std::size_t count, std::uint64_t seed)
{
    if (count < 1)
        throw ConfigError("dataset count must be at least 1");
    if (spec.n_dim != model.n_dim)
        throw ShapeError("source dimension does not match the measurement matrix");
    if (model.noise_variance < 0.0)
        throw ConfigError("noise variance must be non-negative");

    Dataset data;
    data.sparsity = spec.sparsity;
    data.noise_variance = model.noise_variance;
    data.seed = seed;
    data.sources.resize(static_cast<Eigen::Index>(model.n_dim), static_cast<Eigen::Index>(count));
    data.measurements.resize(static_cast<Eigen::Index>(model.m_dim), static_cast<Eigen::Index>(count));

    const double noise_sd = std::sqrt(model.noise_variance);
    for (std::size_t k = 0; k < count; ++k) {
        CounterRng rng(seed, k);
        const Eigen::VectorXd x = sample_source(spec, rng);
        Eigen::VectorXd y = model.phi * x;
        if (noise_sd > 0.0)
            for (Eigen::Index i = 0; i < y.size(); ++i)
                y(i) += noise_sd * rng.normal();
        const auto col = static_cast<Eigen::Index>(k);
        data.sources.col(col) = x;
        data.measurements.col(col) = y;
    }
    return data;
}

double nmse_db_from_sums(double squared_error, double signal_energy)
{
    if (!(signal_energy > 0.0))
        throw DomainError("nmse undefined: all reference signals are zero");
    if (squared_error == 0.0)
        return kPerfectNmseDb;
    return 10.0 * std::log10(squared_error / signal_energy);
}

double nmse_db(const Eigen::MatrixXd& estimates, const Eigen::MatrixXd& truths)
{
    if (estimates.rows() != truths.rows() || estimates.cols() != truths.cols())
        throw ShapeError("nmse: estimates and truths differ in shape");
    if (truths.size() == 0)
        throw ShapeError("nmse: empty input");
    double err = 0.0;
    double energy = 0.0;
    for (Eigen::Index k = 0; k < truths.cols(); ++k) {
        err += (estimates.col(k) - truths.col(k)).squaredNorm();
        energy += truths.col(k).squaredNorm();
    }
    return nmse_db_from_sums(err, energy);
}

unsigned index_bits(std::size_t levels)
{
    if (levels < 1)
        throw ConfigError("quantizer needs at least one level");
    unsigned bits = 0;
    while ((std::size_t{1} << bits) < levels)
        ++bits;
    return bits;
}

double rate_bits(std::size_t k_width, std::size_t levels, std::size_t n_dim)
{
    if (k_width < 1 || n_dim < 1)
        throw ConfigError("rate needs positive K and N");
    if (levels < 2)
        throw ConfigError("rate needs at least two quantization levels");
    return static_cast<double>(k_width * index_bits(levels)) / static_cast<double>(n_dim);
}

} // namespace qcs
