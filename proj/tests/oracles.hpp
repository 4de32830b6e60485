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

// Independent reference computations used by the tests. Nothing here calls
// the library's numerical kernels.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "qcs/nnet.hpp"
#include "qcs/quantizer.hpp"

namespace oracle {

/// Orthonormal DCT-II entry written from its closed form.
inline double dct_entry(std::size_t n, std::size_t k, std::size_t j)
{
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(n));
    return scale * std::cos(std::numbers::pi * (2.0 * static_cast<double>(j) + 1.0) * static_cast<double>(k) /
                            (2.0 * static_cast<double>(n)));
}

/// Loop-based forward pass.
inline Eigen::VectorXd forward(const qcs::FeedforwardNet& net, const Eigen::VectorXd& input)
{
    std::vector<double> a(input.data(), input.data() + input.size());
    for (std::size_t l = 0; l + 1 < net.depth(); ++l) {
        std::vector<double> next(net.widths[l + 1]);
        for (std::size_t i = 0; i < next.size(); ++i) {
            double z = net.biases[l](static_cast<Eigen::Index>(i));
            for (std::size_t j = 0; j < a.size(); ++j)
                z += net.weights[l](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * a[j];
            next[i] = net.activations[l + 1] == qcs::Activation::tanh ? std::tanh(z) : z;
        }
        a = std::move(next);
    }
    return Eigen::Map<Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
}

inline double shq(const std::vector<double>& v, const std::vector<double>& s, double h, double a)
{
    double out = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        out += v[i] * std::tanh(h * a - s[i]);
    return out;
}

/// Region index by linear scan over right-closed regions, 1-based.
inline std::uint32_t encode(const qcs::ScalarQuantizer& q, double value)
{
    for (std::size_t i = 0; i < q.thresholds.size(); ++i)
        if (value <= q.thresholds[i])
            return static_cast<std::uint32_t>(i + 1);
    return static_cast<std::uint32_t>(q.levels.size());
}

struct NearestResult {
    std::size_t index;
    double distance;
};

/// Brute-force nearest codeword; strict comparison keeps the lowest index.
inline NearestResult nearest(const Eigen::MatrixXd& codewords, const Eigen::VectorXd& v)
{
    NearestResult best{0, std::numeric_limits<double>::infinity()};
    for (Eigen::Index c = 0; c < codewords.cols(); ++c) {
        double d = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i)
            d += (v(i) - codewords(i, c)) * (v(i) - codewords(i, c));
        if (d < best.distance)
            best = {static_cast<std::size_t>(c), d};
    }
    return best;
}

/// Exhaustive l0 search over single-atom supports with a least-squares
/// coefficient; returns the minimizing N-vector.
inline Eigen::VectorXd l0_single_atom(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y)
{
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(phi.cols());
    for (Eigen::Index j = 0; j < phi.cols(); ++j) {
        const double c = phi.col(j).dot(y) / phi.col(j).squaredNorm();
        const double r = (y - c * phi.col(j)).squaredNorm();
        if (r < best) {
            best = r;
            out.setZero();
            out(j) = c;
        }
    }
    return out;
}

inline double central_difference(const std::function<double(double)>& f, double x, double step = 1e-6)
{
    return (f(x + step) - f(x - step)) / (2.0 * step);
}

/// |a - b| / max(|a|, |b|, floor); the floor keeps near-zero entries
/// from dominating.
inline double relative_error(double a, double b, double floor = 1e-4)
{
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

} // namespace oracle
