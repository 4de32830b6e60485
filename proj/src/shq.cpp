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

#include "qcs/shq.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qcs/errors.hpp"

namespace qcs {

namespace {

void check_layer(const ShqLayer& layer)
{
    if (layer.levels_v.size() != layer.shifts_s.size())
        throw ShapeError("SHQ level and shift coefficient counts differ");
    if (layer.levels_v.size() < 1)
        throw ConfigError("SHQ layer needs at least two quantization levels");
}

} // namespace

void AnnealSchedule::validate() const
{
    if (!(h_init > 0.0) || !(h_max > 0.0) || h_init > h_max)
        throw ConfigError("steepness schedule needs 0 < h_init <= h_max");
    if (alpha < 0.0 || beta < 0.0)
        throw ConfigError("schedule rates must be non-negative");
}

ShqLayer make_shq_layer(std::size_t num_levels, double steepness)
{
    if (num_levels < 2)
        throw ConfigError("SHQ layer needs at least two quantization levels");
    ShqLayer layer;
    layer.levels_v = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(num_levels - 1),
                                               0.8 / static_cast<double>(num_levels - 1));
    layer.shifts_s = shifts_at(num_levels, steepness);
    layer.steepness_h = steepness;
    return layer;
}

double sech2(double u)
{
    const double e = std::exp(-2.0 * std::abs(u));
    const double d = 1.0 + e;
    return 4.0 * e / (d * d);
}

Eigen::MatrixXd shq_forward(const ShqLayer& layer, const Eigen::MatrixXd& a)
{
    check_layer(layer);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows(), a.cols());
    const Eigen::ArrayXXd ha = layer.steepness_h * a.array();
    for (Eigen::Index i = 0; i < layer.levels_v.size(); ++i)
        out.array() += layer.levels_v(i) * (ha - layer.shifts_s(i)).tanh();
    return out;
}

Eigen::VectorXd shq_forward(const ShqLayer& layer, const Eigen::VectorXd& a)
{
    return shq_forward(layer, Eigen::MatrixXd(a));
}

double shq_forward(const ShqLayer& layer, double a)
{
    check_layer(layer);
    double out = 0.0;
    for (Eigen::Index i = 0; i < layer.levels_v.size(); ++i)
        out += layer.levels_v(i) * std::tanh(layer.steepness_h * a - layer.shifts_s(i));
    return out;
}

Eigen::MatrixXd shq_derivative(const ShqLayer& layer, const Eigen::MatrixXd& a)
{
    check_layer(layer);
    const double h = layer.steepness_h;
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(a.rows(), a.cols());
    for (Eigen::Index c = 0; c < a.cols(); ++c)
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < layer.levels_v.size(); ++i)
                acc += layer.levels_v(i) * sech2(h * a(r, c) - layer.shifts_s(i));
            d(r, c) = h * acc;
        }
    return d;
}

ShqGradients shq_backward(const ShqLayer& layer, const Eigen::MatrixXd& a,
                          const Eigen::MatrixXd& delta1, double beta_t)
{
    check_layer(layer);
    if (!(beta_t >= 0.0 && beta_t <= 1.0))
        throw ConfigError("gradient blend beta must lie in [0, 1]");
    if (a.rows() != delta1.rows() || a.cols() != delta1.cols())
        throw ShapeError("SHQ input and upstream gradient shapes differ");

    const double h = layer.steepness_h;
    const double bound = layer.output_bound();
    const Eigen::Index levels = layer.levels_v.size();

    ShqGradients g;
    g.xi.resize(a.rows(), a.cols());
    g.grad_v = Eigen::VectorXd::Zero(levels);
    g.grad_s = Eigen::VectorXd::Zero(levels);
    for (Eigen::Index c = 0; c < a.cols(); ++c)
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
            const double x = a(r, c);
            const double d = delta1(r, c);
            double slope = 0.0;
            for (Eigen::Index i = 0; i < levels; ++i) {
                const double u = h * x - layer.shifts_s(i);
                const double s2 = sech2(u);
                slope += layer.levels_v(i) * s2;
                g.grad_v(i) += d * std::tanh(u);
                g.grad_s(i) -= d * layer.levels_v(i) * s2;
            }
            const double pass = std::abs(x) <= bound ? d : 0.0;
            g.xi(r, c) = (1.0 - beta_t) * pass + beta_t * d * h * slope;
        }
    return g;
}

double steepness_at(const AnnealSchedule& sched, std::uint64_t t)
{
    const double td = static_cast<double>(t);
    double increment = 0.0;
    switch (sched.rule) {
    case SteepnessRule::linear:
        increment = sched.alpha * td;
        break;
    case SteepnessRule::stepped100:
        increment = sched.alpha * std::ceil(td / 100.0);
        break;
    }
    return std::min(sched.h_init + increment, sched.h_max);
}

double blend_at(const AnnealSchedule& sched, std::uint64_t t)
{
    return std::min(sched.beta * static_cast<double>(t), 1.0);
}

Eigen::VectorXd shifts_at(std::size_t num_levels, double h)
{
    if (num_levels < 2)
        throw ConfigError("shift schedule needs at least two quantization levels");
    if (num_levels == 2)
        return Eigen::VectorXd::Zero(1);
    const auto count = static_cast<Eigen::Index>(num_levels - 1);
    const double step = 1.6 / static_cast<double>(num_levels - 2);
    Eigen::VectorXd s(count);
    for (Eigen::Index i = 0; i < count; ++i)
        s(i) = h * (-0.8 + static_cast<double>(i) * step);
    s(count - 1) = 0.8 * h;
    return s;
}

ScalarQuantizer build_quantizer(const ShqLayer& layer)
{
    check_layer(layer);
    if (!(layer.steepness_h > 0.0))
        throw ConfigError("cannot build a quantizer at non-positive steepness");
    if ((layer.levels_v.array() < 0.0).any())
        throw ConfigError("SHQ level coefficients must be non-negative");

    const auto count = static_cast<std::size_t>(layer.levels_v.size());
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return layer.shifts_s(static_cast<Eigen::Index>(x)) < layer.shifts_s(static_cast<Eigen::Index>(y));
    });

    std::vector<double> v(count);
    ScalarQuantizer q;
    for (std::size_t i = 0; i < count; ++i) {
        v[i] = layer.levels_v(static_cast<Eigen::Index>(order[i]));
        q.thresholds.push_back(layer.shifts_s(static_cast<Eigen::Index>(order[i])) / layer.steepness_h);
    }

    // tail[i] = sum_{i' >= i} v_i'
    std::vector<double> tail(count + 1, 0.0);
    for (std::size_t i = count; i-- > 0;)
        tail[i] = tail[i + 1] + v[i];
    const double total = tail[0];
    q.levels.push_back(-total);
    for (std::size_t i = 1; i < count; ++i)
        q.levels.push_back(total - 2.0 * tail[i]);
    q.levels.push_back(total);
    return q;
}

} // namespace qcs
