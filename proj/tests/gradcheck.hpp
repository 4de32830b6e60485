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

// Parameter flattening and an independent cost for gradient checks.
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "qcs/trainer.hpp"

namespace gradcheck {

// Every trainable scalar of a model, for finite differences.
inline std::vector<double*> parameters(qcs::DeepVqcsModel& m)
{
    std::vector<double*> out;
    auto add_net = [&](qcs::FeedforwardNet& net) {
        for (auto& w : net.weights)
            for (Eigen::Index i = 0; i < w.size(); ++i)
                out.push_back(w.data() + i);
        for (auto& b : net.biases)
            for (Eigen::Index i = 0; i < b.size(); ++i)
                out.push_back(b.data() + i);
    };
    if (m.enc_net)
        add_net(*m.enc_net);
    for (Eigen::Index i = 0; i < m.shq.levels_v.size(); ++i)
        out.push_back(m.shq.levels_v.data() + i);
    for (Eigen::Index i = 0; i < m.shq.shifts_s.size(); ++i)
        out.push_back(m.shq.shifts_s.data() + i);
    add_net(m.dec_net);
    return out;
}

inline std::vector<double> analytic(const qcs::ModelGradients& g)
{
    std::vector<double> out;
    auto add = [&](const qcs::GradientSet& s) {
        for (const auto& w : s.weight_grads)
            out.insert(out.end(), w.data(), w.data() + w.size());
        for (const auto& b : s.bias_grads)
            out.insert(out.end(), b.data(), b.data() + b.size());
    };
    if (g.enc)
        add(*g.enc);
    out.insert(out.end(), g.shq.grad_v.data(), g.shq.grad_v.data() + g.shq.grad_v.size());
    out.insert(out.end(), g.shq.grad_s.data(), g.shq.grad_s.data() + g.shq.grad_s.size());
    add(g.dec);
    return out;
}

// Independent cost: loop-based nets and the tanh-sum layer.
inline double reference_cost(const qcs::DeepVqcsModel& m, const Eigen::MatrixXd& y, const Eigen::MatrixXd& x)
{
    const std::vector<double> v(m.shq.levels_v.data(), m.shq.levels_v.data() + m.shq.levels_v.size());
    const std::vector<double> s(m.shq.shifts_s.data(), m.shq.shifts_s.data() + m.shq.shifts_s.size());
    double cost = 0.0;
    for (Eigen::Index c = 0; c < y.cols(); ++c) {
        Eigen::VectorXd a = m.enc_net ? oracle::forward(*m.enc_net, y.col(c)) : Eigen::VectorXd(y.col(c));
        for (Eigen::Index i = 0; i < a.size(); ++i)
            a(i) = oracle::shq(v, s, m.shq.steepness_h, a(i));
        cost += (oracle::forward(m.dec_net, a) - x.col(c)).squaredNorm();
    }
    return cost / static_cast<double>(y.cols());
}

/// Cost as a function of the encoder output, for the layer input gradient.
inline double cost_from_encoder_output(const qcs::DeepVqcsModel& m, const Eigen::MatrixXd& a, const Eigen::MatrixXd& x)
{
    const std::vector<double> v(m.shq.levels_v.data(), m.shq.levels_v.data() + m.shq.levels_v.size());
    const std::vector<double> s(m.shq.shifts_s.data(), m.shq.shifts_s.data() + m.shq.shifts_s.size());
    double cost = 0.0;
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        Eigen::VectorXd q(a.rows());
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            q(i) = oracle::shq(v, s, m.shq.steepness_h, a(i, c));
        cost += (oracle::forward(m.dec_net, q) - x.col(c)).squaredNorm();
    }
    return cost / static_cast<double>(a.cols());
}

} // namespace gradcheck
