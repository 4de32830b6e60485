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

#include <Eigen/Dense>

#include "qcs/quantizer.hpp"

namespace qcs {

/// Soft-to-hard quantization layer
///   out_n = sum_i v_i tanh(h a_n - s_i),  i = 1..I-1,
/// a smooth surrogate of an I-level scalar quantizer whose plateaus sit at
/// the reproduction levels and whose steps sit at a = s_i / h.
struct ShqLayer {
    Eigen::VectorXd levels_v;  ///< I - 1 non-negative level coefficients
    Eigen::VectorXd shifts_s;  ///< I - 1 shift coefficients
    double steepness_h = 1.0;

    std::size_t num_levels() const { return static_cast<std::size_t>(levels_v.size()) + 1; }
    /// Saturation bound sum_i v_i; the output lies in [-bound, +bound].
    double output_bound() const { return levels_v.sum(); }
};

/// Gradients of a scalar loss through the layer. xi is dLoss/d(input),
/// per sample (column); grad_v and grad_s are summed over every entry.
struct ShqGradients {
    Eigen::MatrixXd xi;
    Eigen::VectorXd grad_v;
    Eigen::VectorXd grad_s;
};

/// How the steepness increment grows with the iteration count.
enum class SteepnessRule : std::uint8_t {
    linear = 0,     ///< alpha * t
    stepped100 = 1  ///< alpha * ceil(t / 100)
};

/// Steepness and gradient-blend schedules:
///   h(t) = min(h_init + increment(t), h_max),  beta(t) = min(beta * t, 1).
struct AnnealSchedule {
    double h_init = 5.0;
    double h_max = 300.0;
    double alpha = 1e-5;
    double beta = 1e-7;
    SteepnessRule rule = SteepnessRule::linear;

    void validate() const;
};

/// Level coefficients 0.8/(I-1) and shifts_at(I, h).
ShqLayer make_shq_layer(std::size_t num_levels, double steepness);

Eigen::MatrixXd shq_forward(const ShqLayer& layer, const Eigen::MatrixXd& a);
Eigen::VectorXd shq_forward(const ShqLayer& layer, const Eigen::VectorXd& a);
double shq_forward(const ShqLayer& layer, double a);

/// Derivative of the layer output with respect to its input, elementwise.
Eigen::MatrixXd shq_derivative(const ShqLayer& layer, const Eigen::MatrixXd& a);

/// Backward pass. xi blends the saturation-masked pass-through (weight
/// 1 - beta_t) with the true derivative (weight beta_t):
///   xi = (1 - beta) delta1 * 1{|a| <= sum v} + beta delta1 * shq'(a).
/// grad_v_i = sum_n delta1_n tanh(h a_n - s_i),
/// grad_s_i = -sum_n delta1_n v_i sech^2(h a_n - s_i).
ShqGradients shq_backward(const ShqLayer& layer, const Eigen::MatrixXd& a,
                          const Eigen::MatrixXd& delta1, double beta_t);

/// sech^2(u) = 4 / (e^u + e^-u)^2 without overflow for large |u|.
double sech2(double u);

double steepness_at(const AnnealSchedule& sched, std::uint64_t t);
double blend_at(const AnnealSchedule& sched, std::uint64_t t);

/// I = 2 gives the single shift 0; otherwise h * (-0.8, -0.8 + 1.6/(I-2), ..., 0.8).
Eigen::VectorXd shifts_at(std::size_t num_levels, double h);

/// Hard quantizer matching the layer's plateaus and step positions:
///   g_i = sum v - 2 sum_{i' >= i} v_i',  t_i = s_i / h.
/// (v_i, s_i) pairs are sorted by shift first, since each v_i belongs to
/// the step at s_i.
ScalarQuantizer build_quantizer(const ShqLayer& layer);

} // namespace qcs
