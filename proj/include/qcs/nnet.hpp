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

enum class Activation : std::uint8_t { identity = 0, tanh = 1 };

/// Fully connected feedforward network.
///
/// Layer 0 is the input layer and always uses the identity activation.
/// weights[l] and biases[l] connect layer l to layer l + 1, so
/// weights[l] has shape widths[l + 1] x widths[l].
struct FeedforwardNet {
    std::vector<std::size_t> widths;
    std::vector<Activation> activations;
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    std::size_t depth() const { return widths.size(); }
    std::size_t input_width() const { return widths.front(); }
    std::size_t output_width() const { return widths.back(); }
    std::size_t parameter_count() const;
};

/// Per-layer cached quantities of a forward pass; columns are samples.
/// weighted_inputs[0] and outputs[0] both hold the network input.
struct LayerTrace {
    std::vector<Eigen::MatrixXd> weighted_inputs;
    std::vector<Eigen::MatrixXd> outputs;

    const Eigen::MatrixXd& result() const { return outputs.back(); }
};

/// Parameter gradients summed over the samples of a trace, plus the
/// per-sample gradient with respect to the network input.
struct GradientSet {
    std::vector<Eigen::MatrixXd> weight_grads;
    std::vector<Eigen::VectorXd> bias_grads;
    Eigen::MatrixXd input_grad;
};

/// Diminishing step scale max(eta_min, eta_init / sqrt(t)).
struct StepScale {
    double eta_init = 1e-2;
    double eta_min = 1e-4;

    double at(std::uint64_t t) const;
};

struct AdamHyper {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// One bias-corrected Adam update of a flat parameter block:
/// param -= scale * mhat / (sqrt(vhat) + epsilon).
void adam_update(Eigen::Ref<Eigen::ArrayXd> param, const Eigen::Ref<const Eigen::ArrayXd>& grad,
                 Eigen::Ref<Eigen::ArrayXd> first, Eigen::Ref<Eigen::ArrayXd> second,
                 std::uint64_t t, double scale, const AdamHyper& hyper);

/// Adam moments for a single vector-valued parameter group.
struct VectorAdamState {
    Eigen::ArrayXd first;
    Eigen::ArrayXd second;
    std::uint64_t step_count = 0;
    AdamHyper hyper;
    StepScale schedule;

    explicit VectorAdamState(std::size_t size = 0, StepScale schedule = {});
    void step(Eigen::VectorXd& param, const Eigen::VectorXd& grad, std::uint64_t t);
};

/// Adam moments mirroring every weight and bias of a FeedforwardNet.
struct AdamState {
    std::vector<Eigen::MatrixXd> weight_first, weight_second;
    std::vector<Eigen::VectorXd> bias_first, bias_second;
    std::uint64_t step_count = 0;
    AdamHyper hyper;
    StepScale schedule;
};

AdamState make_adam_state(const FeedforwardNet& net, StepScale schedule);

/// Xavier-style init: weights i.i.d. N(0, 1 / fan_in), biases zero.
FeedforwardNet init_net(const std::vector<std::size_t>& widths,
                        const std::vector<Activation>& activations, CounterRng& rng);

/// Forward pass over a batch (one sample per column).
LayerTrace forward(const FeedforwardNet& net, const Eigen::MatrixXd& inputs);
LayerTrace forward(const FeedforwardNet& net, const Eigen::VectorXd& input);

/// Output only, for the online path. No trace is kept.
Eigen::VectorXd evaluate(const FeedforwardNet& net, const Eigen::VectorXd& input);

/// Backpropagates output_grad (dLoss/d output, one column per sample in
/// the trace). Parameter gradients are summed across columns.
GradientSet backprop(const FeedforwardNet& net, const LayerTrace& trace,
                     const Eigen::MatrixXd& output_grad);

/// Applies one Adam step with the state's diminishing scale at iteration t.
/// Throws DivergenceError (leaving net and state untouched) on non-finite
/// gradient entries.
void adam_step(AdamState& state, FeedforwardNet& net, const GradientSet& grads, std::uint64_t t);

bool all_finite(const GradientSet& grads);

} // namespace qcs
