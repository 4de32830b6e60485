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

#include "qcs/nnet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qcs/errors.hpp"

namespace qcs {

namespace {

void apply_activation(Activation act, const Eigen::MatrixXd& weighted, Eigen::MatrixXd& out)
{
    switch (act) {
    case Activation::identity:
        out = weighted;
        break;
    case Activation::tanh:
        out = weighted.array().tanh().matrix();
        break;
    }
}

// Derivative expressed through the cached output: tanh' = 1 - a^2.
void scale_by_derivative(Activation act, const Eigen::MatrixXd& output, Eigen::MatrixXd& grad)
{
    if (act == Activation::tanh)
        grad.array() *= 1.0 - output.array().square();
}

Eigen::Map<Eigen::ArrayXd> flat(Eigen::MatrixXd& m)
{
    return {m.data(), m.size()};
}

Eigen::Map<const Eigen::ArrayXd> flat(const Eigen::MatrixXd& m)
{
    return {m.data(), m.size()};
}

void check_layout(const FeedforwardNet& net)
{
    if (net.widths.size() < 2 || net.activations.size() != net.widths.size() ||
        net.weights.size() + 1 != net.widths.size() || net.biases.size() + 1 != net.widths.size())
        throw ShapeError("feedforward net has an inconsistent layer layout");
}

} // namespace

std::size_t FeedforwardNet::parameter_count() const
{
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l)
        n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
    return n;
}

double StepScale::at(std::uint64_t t) const
{
    return std::max(eta_min, eta_init / std::sqrt(static_cast<double>(t)));
}

void adam_update(Eigen::Ref<Eigen::ArrayXd> param, const Eigen::Ref<const Eigen::ArrayXd>& grad,
                 Eigen::Ref<Eigen::ArrayXd> first, Eigen::Ref<Eigen::ArrayXd> second,
                 std::uint64_t t, double scale, const AdamHyper& hyper)
{
    const double td = static_cast<double>(t);
    const double c1 = 1.0 - std::pow(hyper.beta1, td);
    const double c2 = 1.0 - std::pow(hyper.beta2, td);
    first = hyper.beta1 * first + (1.0 - hyper.beta1) * grad;
    second = hyper.beta2 * second + (1.0 - hyper.beta2) * grad.square();
    param -= scale * (first / c1) / ((second / c2).sqrt() + hyper.epsilon);
}

VectorAdamState::VectorAdamState(std::size_t size, StepScale sched)
    : first(Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(size))),
      second(Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(size))),
      schedule(sched)
{
}

void VectorAdamState::step(Eigen::VectorXd& param, const Eigen::VectorXd& grad, std::uint64_t t)
{
    if (t < 1)
        throw ConfigError("adam iteration index starts at 1");
    if (param.size() != grad.size() || param.size() != first.size())
        throw ShapeError("adam: parameter and gradient sizes differ");
    if (!grad.allFinite())
        throw DivergenceError("non-finite gradient entries");
    adam_update(param.array(), grad.array(), first, second, t, schedule.at(t), hyper);
    step_count = t;
}

AdamState make_adam_state(const FeedforwardNet& net, StepScale schedule)
{
    AdamState s;
    s.schedule = schedule;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        s.weight_first.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
        s.weight_second.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
        s.bias_first.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
        s.bias_second.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
    }
    return s;
}

FeedforwardNet init_net(const std::vector<std::size_t>& widths,
                        const std::vector<Activation>& activations, CounterRng& rng)
{
    if (widths.size() < 2)
        throw ConfigError("a network needs at least an input and an output layer");
    if (activations.size() != widths.size())
        throw ConfigError("activation list length " + std::to_string(activations.size()) +
                          " does not match width list length " + std::to_string(widths.size()));
    if (activations.front() != Activation::identity)
        throw ConfigError("the input layer must use the identity activation");
    if (std::any_of(widths.begin(), widths.end(), [](std::size_t w) { return w == 0; }))
        throw ConfigError("layer widths must be positive");

    FeedforwardNet net;
    net.widths = widths;
    net.activations = activations;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const auto rows = static_cast<Eigen::Index>(widths[l + 1]);
        const auto cols = static_cast<Eigen::Index>(widths[l]);
        const double sd = 1.0 / std::sqrt(static_cast<double>(widths[l]));
        Eigen::MatrixXd w(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c)
                w(r, c) = sd * rng.normal();
        net.weights.push_back(std::move(w));
        net.biases.push_back(Eigen::VectorXd::Zero(rows));
    }
    return net;
}

LayerTrace forward(const FeedforwardNet& net, const Eigen::MatrixXd& inputs)
{
    check_layout(net);
    if (static_cast<std::size_t>(inputs.rows()) != net.input_width())
        throw ShapeError("forward: input has " + std::to_string(inputs.rows()) +
                         " rows, network expects " + std::to_string(net.input_width()));
    LayerTrace trace;
    trace.weighted_inputs.resize(net.depth());
    trace.outputs.resize(net.depth());
    trace.weighted_inputs[0] = inputs;
    trace.outputs[0] = inputs;
    for (std::size_t l = 1; l < net.depth(); ++l) {
        Eigen::MatrixXd z = net.weights[l - 1] * trace.outputs[l - 1];
        z.colwise() += net.biases[l - 1];
        apply_activation(net.activations[l], z, trace.outputs[l]);
        trace.weighted_inputs[l] = std::move(z);
    }
    return trace;
}

LayerTrace forward(const FeedforwardNet& net, const Eigen::VectorXd& input)
{
    return forward(net, Eigen::MatrixXd(input));
}

Eigen::VectorXd evaluate(const FeedforwardNet& net, const Eigen::VectorXd& input)
{
    check_layout(net);
    if (static_cast<std::size_t>(input.size()) != net.input_width())
        throw ShapeError("evaluate: input length does not match the network input width");
    Eigen::VectorXd a = input;
    for (std::size_t l = 1; l < net.depth(); ++l) {
        Eigen::VectorXd z = net.weights[l - 1] * a;
        z += net.biases[l - 1];
        if (net.activations[l] == Activation::tanh)
            a = z.array().tanh().matrix();
        else
            a = std::move(z);
    }
    return a;
}

GradientSet backprop(const FeedforwardNet& net, const LayerTrace& trace,
                     const Eigen::MatrixXd& output_grad)
{
    check_layout(net);
    if (trace.outputs.size() != net.depth())
        throw ShapeError("backprop: trace depth does not match the network");
    if (output_grad.rows() != trace.result().rows() || output_grad.cols() != trace.result().cols())
        throw ShapeError("backprop: output gradient shape does not match the trace");

    const std::size_t last = net.depth() - 1;
    GradientSet g;
    g.weight_grads.resize(net.weights.size());
    g.bias_grads.resize(net.biases.size());

    // delta holds dLoss/d(weighted input) of the current layer.
    Eigen::MatrixXd delta = output_grad;
    scale_by_derivative(net.activations[last], trace.outputs[last], delta);
    for (std::size_t l = last; l >= 1; --l) {
        g.weight_grads[l - 1] = delta * trace.outputs[l - 1].transpose();
        g.bias_grads[l - 1] = delta.rowwise().sum();
        Eigen::MatrixXd prev = net.weights[l - 1].transpose() * delta;
        scale_by_derivative(net.activations[l - 1], trace.outputs[l - 1], prev);
        delta = std::move(prev);
    }
    g.input_grad = std::move(delta);
    return g;
}

bool all_finite(const GradientSet& grads)
{
    for (const auto& w : grads.weight_grads)
        if (!w.allFinite())
            return false;
    for (const auto& b : grads.bias_grads)
        if (!b.allFinite())
            return false;
    return true;
}

void adam_step(AdamState& state, FeedforwardNet& net, const GradientSet& grads, std::uint64_t t)
{
    if (t < 1)
        throw ConfigError("adam iteration index starts at 1");
    if (grads.weight_grads.size() != net.weights.size() || state.weight_first.size() != net.weights.size())
        throw ShapeError("adam: gradient set does not mirror the network");
    if (!all_finite(grads))
        throw DivergenceError("non-finite gradient entries");

    const double scale = state.schedule.at(t);
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        adam_update(flat(net.weights[l]), flat(grads.weight_grads[l]), flat(state.weight_first[l]),
                    flat(state.weight_second[l]), t, scale, state.hyper);
        adam_update(net.biases[l].array(), grads.bias_grads[l].array(), state.bias_first[l].array(),
                    state.bias_second[l].array(), t, scale, state.hyper);
    }
    state.step_count = t;
}

} // namespace qcs
