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
#include "qcs/signal_model.hpp"

TEST_SUITE("signal_model") {

TEST_CASE("DCT matrix matches the closed form")
{
    for (std::size_t n : {1u, 2u, 7u, 20u}) {
        const Eigen::MatrixXd d = qcs::dct2_matrix(n);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j)
                CHECK(std::abs(d(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) -
                               oracle::dct_entry(n, k, j)) < 1e-14);
        CHECK((d * d.transpose() - Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                                               static_cast<Eigen::Index>(n)))
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
    }
}

TEST_CASE("measurement matrix keeps the leading DCT rows with unit-norm columns")
{
    const auto model = qcs::make_measurement_matrix(20, 10);
    REQUIRE(model.phi.rows() == 10);
    REQUIRE(model.phi.cols() == 20);
    for (Eigen::Index j = 0; j < 20; ++j) {
        CHECK(std::abs(model.phi.col(j).norm() - 1.0) < 1e-12);
        double norm = 0.0;
        for (std::size_t k = 0; k < 10; ++k)
            norm += std::pow(oracle::dct_entry(20, k, static_cast<std::size_t>(j)), 2);
        for (std::size_t k = 0; k < 10; ++k)
            CHECK(std::abs(model.phi(static_cast<Eigen::Index>(k), j) -
                           oracle::dct_entry(20, k, static_cast<std::size_t>(j)) / std::sqrt(norm)) < 1e-13);
    }
}

TEST_CASE("measurement matrix rejects invalid dimensions")
{
    CHECK_THROWS_AS(qcs::make_measurement_matrix(10, 11), qcs::ConfigError);
    CHECK_THROWS_AS(qcs::make_measurement_matrix(10, 0), qcs::ConfigError);
}

TEST_CASE("sources have exactly S nonzeros")
{
    qcs::SparseSourceSpec spec{20, 3};
    qcs::CounterRng rng(5);
    for (int i = 0; i < 500; ++i) {
        const Eigen::VectorXd x = qcs::sample_source(spec, rng);
        CHECK((x.array() != 0.0).count() == 3);
    }
    spec.sparsity = 21;
    CHECK_THROWS_AS(qcs::sample_source(spec, rng), qcs::ConfigError);
}

TEST_CASE("supports are uniform over coordinates")
{
    qcs::SparseSourceSpec spec{10, 2};
    qcs::CounterRng rng(6);
    std::vector<int> hits(10, 0);
    const int trials = 50000;
    for (int i = 0; i < trials; ++i) {
        const Eigen::VectorXd x = qcs::sample_source(spec, rng);
        for (int j = 0; j < 10; ++j)
            hits[static_cast<std::size_t>(j)] += x(j) != 0.0;
    }
    for (int h : hits)
        CHECK(std::abs(h - trials / 5) < 600);
}

TEST_CASE("datasets are reproducible and order independent")
{
    auto model = qcs::make_measurement_matrix(12, 6);
    model.noise_variance = 0.01;
    const qcs::SparseSourceSpec spec{12, 2};
    const auto a = qcs::sample_dataset(model, spec, 50, 99);
    const auto b = qcs::sample_dataset(model, spec, 50, 99);
    CHECK(a.sources == b.sources);
    CHECK(a.measurements == b.measurements);
    const auto prefix = qcs::sample_dataset(model, spec, 20, 99);
    CHECK(prefix.sources == a.sources.leftCols(20));
    const auto other = qcs::sample_dataset(model, spec, 50, 100);
    CHECK(other.sources != a.sources);
}

TEST_CASE("measurements follow y = phi x + n")
{
    auto model = qcs::make_measurement_matrix(12, 6);
    model.noise_variance = 0.0;
    const auto d = qcs::sample_dataset(model, {12, 2}, 30, 1);
    CHECK((d.measurements - model.phi * d.sources).cwiseAbs().maxCoeff() < 1e-14);

    model.noise_variance = 0.25;
    const auto noisy = qcs::sample_dataset(model, {12, 2}, 20000, 1);
    const Eigen::MatrixXd n = noisy.measurements - model.phi * noisy.sources;
    CHECK(n.array().square().mean() == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("NMSE in dB and the perfect-reconstruction sentinel")
{
    Eigen::MatrixXd x(2, 2);
    x << 1, 0, 0, 1;
    CHECK(qcs::nmse_db(x, x) == qcs::kPerfectNmseDb);
    CHECK(qcs::nmse_db(0.1 * x, x) == doctest::Approx(10 * std::log10(0.81)));
    CHECK(qcs::nmse_db(Eigen::MatrixXd::Zero(2, 2), x) == doctest::Approx(0.0));
    CHECK_THROWS_AS(qcs::nmse_db(x, Eigen::MatrixXd::Zero(2, 2)), qcs::DomainError);
}

TEST_CASE("rate accounting")
{
    CHECK(qcs::index_bits(2) == 1);
    CHECK(qcs::index_bits(3) == 2);
    CHECK(qcs::index_bits(4) == 2);
    CHECK(qcs::index_bits(5) == 3);
    CHECK(qcs::index_bits(32) == 5);
    CHECK(qcs::rate_bits(10, 4, 20) == 1.0);
    CHECK(qcs::rate_bits(10, 32, 20) == 2.5);
    CHECK(qcs::rate_bits(15, 3, 20) == 1.5);
}

}
