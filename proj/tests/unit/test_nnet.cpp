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

#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "qcs/errors.hpp"
#include "qcs/nnet.hpp"

namespace {

using qcs::Activation;

qcs::FeedforwardNet random_net(std::uint64_t seed)
{
    qcs::CounterRng rng(seed);
    auto net = qcs::init_net({4, 6, 5, 3}, {Activation::identity, Activation::tanh, Activation::tanh,
                                            Activation::identity},
                             rng);
    for (auto& b : net.biases)
        for (Eigen::Index i = 0; i < b.size(); ++i)
            b(i) = 0.3 * rng.normal();
    return net;
}

// Loss 0.5 |f(x) - t|^2 summed over columns.
double loss(const qcs::FeedforwardNet& net, const Eigen::MatrixXd& x, const Eigen::MatrixXd& target)
{
    double l = 0.0;
    for (Eigen::Index c = 0; c < x.cols(); ++c)
        l += 0.5 * (oracle::forward(net, x.col(c)) - target.col(c)).squaredNorm();
    return l;
}

} // namespace

TEST_SUITE("nnet") {

TEST_CASE("forward matches the loop oracle")
{
    const auto net = random_net(1);
    qcs::CounterRng rng(2);
    Eigen::MatrixXd x(4, 7);
    for (Eigen::Index i = 0; i < x.size(); ++i)
        x(i) = rng.normal();
    const auto trace = qcs::forward(net, x);
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        const Eigen::VectorXd ref = oracle::forward(net, x.col(c));
        CHECK((trace.result().col(c) - ref).cwiseAbs().maxCoeff() < 1e-13);
        CHECK((qcs::evaluate(net, x.col(c)) - ref).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("backprop matches central differences")
{
    auto net = random_net(3);
    qcs::CounterRng rng(4);
    Eigen::MatrixXd x(4, 5), t(3, 5);
    for (Eigen::Index i = 0; i < x.size(); ++i)
        x(i) = rng.normal();
    for (Eigen::Index i = 0; i < t.size(); ++i)
        t(i) = rng.normal();
    const auto trace = qcs::forward(net, x);
    const auto g = qcs::backprop(net, trace, trace.result() - t);

    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        for (Eigen::Index i = 0; i < net.weights[l].size(); ++i) {
            double& w = net.weights[l].data()[i];
            const double saved = w;
            const double fd = oracle::central_difference(
                [&](double v) {
                    w = v;
                    return loss(net, x, t);
                },
                saved);
            w = saved;
            CHECK(oracle::relative_error(g.weight_grads[l].data()[i], fd) < 1e-6);
        }
        for (Eigen::Index i = 0; i < net.biases[l].size(); ++i) {
            double& b = net.biases[l](i);
            const double saved = b;
            const double fd = oracle::central_difference(
                [&](double v) {
                    b = v;
                    return loss(net, x, t);
                },
                saved);
            b = saved;
            CHECK(oracle::relative_error(g.bias_grads[l](i), fd) < 1e-6);
        }
    }
    for (Eigen::Index c = 0; c < x.cols(); ++c)
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const double saved = x(i, c);
            const double fd = oracle::central_difference(
                [&](double v) {
                    x(i, c) = v;
                    return loss(net, x, t);
                },
                saved);
            x(i, c) = saved;
            CHECK(oracle::relative_error(g.input_grad(i, c), fd) < 1e-6);
        }
}

TEST_CASE("init follows the fan-in variance and rejects bad layouts")
{
    qcs::CounterRng rng(5);
    const auto net = qcs::init_net({200, 300}, {Activation::identity, Activation::tanh}, rng);
    const double var = net.weights[0].array().square().mean();
    CHECK(var == doctest::Approx(1.0 / 200).epsilon(0.02));
    CHECK(net.biases[0].isZero());
    CHECK_THROWS_AS(qcs::init_net({3, 4}, {Activation::identity}, rng), qcs::ConfigError);
    CHECK_THROWS_AS(qcs::init_net({3, 4}, {Activation::tanh, Activation::tanh}, rng), qcs::ConfigError);
    CHECK_THROWS_AS(qcs::init_net({3, 0}, {Activation::identity, Activation::tanh}, rng), qcs::ConfigError);
    CHECK_THROWS_AS(qcs::init_net({3}, {Activation::identity}, rng), qcs::ConfigError);
}

TEST_CASE("forward rejects a wrong input width")
{
    const auto net = random_net(6);
    CHECK_THROWS_AS(qcs::forward(net, Eigen::MatrixXd(Eigen::MatrixXd::Zero(5, 2))), qcs::ShapeError);
}

TEST_CASE("step scale decays as 1/sqrt(t) down to its floor")
{
    const qcs::StepScale s{1e-2, 1e-4};
    CHECK(s.at(1) == doctest::Approx(1e-2));
    CHECK(s.at(4) == doctest::Approx(5e-3));
    CHECK(s.at(100000000) == doctest::Approx(1e-4));
}

TEST_CASE("adam's first step moves each entry by the step scale against the gradient sign")
{
    Eigen::ArrayXd p(3), g(3), m = Eigen::ArrayXd::Zero(3), v = Eigen::ArrayXd::Zero(3);
    p << 1.0, -2.0, 0.5;
    g << 3.0, -0.1, 0.0;
    qcs::adam_update(p, g, m, v, 1, 0.01, {});
    CHECK(p(0) == doctest::Approx(0.99).epsilon(1e-6));
    CHECK(p(1) == doctest::Approx(-1.99).epsilon(1e-6));
    CHECK(p(2) == 0.5);
}

TEST_CASE("adam rejects non-finite gradients")
{
    qcs::VectorAdamState st(2, {1e-2, 1e-4});
    Eigen::VectorXd p = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd g(2);
    g << 1.0, std::nan("");
    CHECK_THROWS_AS(st.step(p, g, 1), qcs::DivergenceError);
}

}
