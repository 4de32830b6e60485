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

#include <algorithm>
#include <cmath>

#include "../oracles.hpp"
#include "qcs/baselines.hpp"
#include "qcs/errors.hpp"

namespace {

qcs::MeasurementModel model_of(std::size_t n, std::size_t m, double noise)
{
    auto model = qcs::make_measurement_matrix(n, m);
    model.noise_variance = noise;
    return model;
}

} // namespace

TEST_SUITE("baselines") {

TEST_CASE("OMP recovers a single atom exactly")
{
    const auto model = model_of(20, 10, 0.0);
    for (Eigen::Index j = 0; j < 20; ++j) {
        const Eigen::VectorXd y = -1.7 * model.phi.col(j);
        const auto r = qcs::omp(model.phi, y, 1);
        REQUIRE(r.support.size() == 1);
        CHECK(r.support[0] == static_cast<std::size_t>(j));
        CHECK(std::abs(r.x(j) + 1.7) < 1e-10);
        CHECK(r.x.cwiseAbs().sum() == doctest::Approx(1.7));
    }
}

TEST_CASE("OMP residual is orthogonal to the selected columns and runs exactly S rounds")
{
    const auto model = model_of(20, 10, 0.01);
    const auto d = qcs::sample_dataset(model, {20, 3}, 50, 5);
    for (Eigen::Index c = 0; c < d.measurements.cols(); ++c) {
        for (std::size_t s = 1; s <= 4; ++s) {
            const auto r = qcs::omp(model.phi, d.measurements.col(c), s);
            CHECK(r.support.size() == s);
            CHECK((r.x.array() != 0.0).count() <= static_cast<Eigen::Index>(s));
            const Eigen::VectorXd res = d.measurements.col(c) - model.phi * r.x;
            for (std::size_t j : r.support)
                CHECK(std::abs(model.phi.col(static_cast<Eigen::Index>(j)).dot(res)) < 1e-10);
        }
    }
}

TEST_CASE("OMP recovers every support meeting the exact recovery condition")
{
    const auto model = model_of(20, 10, 0.0);
    const auto d = qcs::sample_dataset(model, {20, 2}, 1000, 9);
    int covered = 0;
    for (Eigen::Index c = 0; c < d.sources.cols(); ++c) {
        std::vector<Eigen::Index> support;
        for (Eigen::Index i = 0; i < 20; ++i)
            if (d.sources(i, c) != 0.0)
                support.push_back(i);
        Eigen::MatrixXd sub(10, static_cast<Eigen::Index>(support.size()));
        for (std::size_t a = 0; a < support.size(); ++a)
            sub.col(static_cast<Eigen::Index>(a)) = model.phi.col(support[a]);
        const Eigen::MatrixXd pinv = sub.completeOrthogonalDecomposition().pseudoInverse();
        double erc = 0.0;
        for (Eigen::Index j = 0; j < 20; ++j)
            if (std::find(support.begin(), support.end(), j) == support.end())
                erc = std::max(erc, (pinv * model.phi.col(j)).lpNorm<1>());
        if (erc >= 1.0)
            continue;
        ++covered;
        const auto r = qcs::omp(model.phi, d.measurements.col(c), 2);
        CHECK((r.x - d.sources.col(c)).norm() <= 1e-10 * d.sources.col(c).norm());
    }
    MESSAGE("instances meeting the condition: " << covered << " / 1000");
    CHECK(covered > 0);
}

TEST_CASE("OMP argument checks and ridge fallback")
{
    const auto model = model_of(8, 4, 0.0);
    CHECK_THROWS_AS(qcs::omp(model.phi, Eigen::VectorXd::Zero(4), 0), qcs::ConfigError);
    CHECK_THROWS_AS(qcs::omp(model.phi, Eigen::VectorXd::Zero(4), 5), qcs::ConfigError);
    CHECK_THROWS_AS(qcs::omp(model.phi, Eigen::VectorXd::Zero(3), 1), qcs::ShapeError);
    Eigen::MatrixXd dup(3, 2);
    dup << 1, 1, 0, 0, 0, 0;
    const auto r = qcs::omp(dup, Eigen::Vector3d(2, 0, 0), 2);
    CHECK(r.regularized);
    CHECK((dup * r.x - Eigen::Vector3d(2, 0, 0)).norm() < 1e-6);
}

TEST_CASE("FISTA objective never increases and zero data gives zero")
{
    const auto model = model_of(20, 10, 0.01);
    const auto d = qcs::sample_dataset(model, {20, 2}, 20, 3);
    for (Eigen::Index c = 0; c < d.measurements.cols(); ++c) {
        const qcs::PenalizedLeastSquares p(model.phi, d.measurements.col(c));
        for (double lambda : {1e-3, 1e-1, 1.0}) {
            const auto r = qcs::fista(p, lambda, Eigen::VectorXd::Zero(20), {}, true);
            CHECK(r.converged);
            for (std::size_t i = 1; i < r.objective_trace.size(); ++i)
                CHECK(r.objective_trace[i] <= r.objective_trace[i - 1]);
        }
    }
    const qcs::PenalizedLeastSquares zero(model.phi, Eigen::VectorXd::Zero(10));
    CHECK(qcs::fista(zero, 0.5, Eigen::VectorXd::Zero(20), {}).x.isZero());
    CHECK(qcs::bpdn({model.phi, Eigen::VectorXd::Zero(10), 0.1}).x.isZero());
}

TEST_CASE("FISTA solution satisfies the l1 optimality conditions")
{
    const auto model = model_of(20, 10, 0.01);
    const auto d = qcs::sample_dataset(model, {20, 2}, 10, 4);
    const double lambda = 0.05;
    for (Eigen::Index c = 0; c < d.measurements.cols(); ++c) {
        const qcs::PenalizedLeastSquares p(model.phi, d.measurements.col(c));
        const auto r = qcs::fista(p, lambda, Eigen::VectorXd::Zero(20), {});
        const Eigen::VectorXd corr = 2.0 * model.phi.transpose() * (d.measurements.col(c) - model.phi * r.x);
        for (Eigen::Index j = 0; j < 20; ++j) {
            if (r.x(j) != 0.0)
                CHECK(std::abs(corr(j) - lambda * (r.x(j) > 0 ? 1.0 : -1.0)) < 1e-6);
            else
                CHECK(std::abs(corr(j)) <= lambda + 1e-6);
        }
    }
}

TEST_CASE("BPDN meets the residual target within 1 percent")
{
    const auto model = model_of(20, 10, 0.01);
    const auto d = qcs::sample_dataset(model, {20, 2}, 30, 6);
    for (Eigen::Index c = 0; c < d.measurements.cols(); ++c) {
        const Eigen::VectorXd y = d.measurements.col(c);
        const double eps = 0.3 * y.norm();
        const auto r = qcs::bpdn({model.phi, y, eps});
        CHECK(r.residual_target == doctest::Approx(eps));
        CHECK(std::abs((y - model.phi * r.x).norm() - eps) <= 0.01 * eps);
        CHECK(std::abs(r.residual_norm - (y - model.phi * r.x).norm()) < 1e-12);
    }
}

TEST_CASE("BPDN with a radius above |y| returns zero")
{
    const auto model = model_of(10, 5, 0.0);
    const Eigen::VectorXd y = model.phi.col(2);
    CHECK(qcs::bpdn({model.phi, y, 2.0}).x.isZero());
    CHECK_THROWS_AS(qcs::bpdn({model.phi, y, -1.0}), qcs::ConfigError);
}

TEST_CASE("BPDN matches exhaustive l0 search on single-atom instances")
{
    const auto model = model_of(8, 5, 0.0);
    const auto d = qcs::sample_dataset(model, {8, 1}, 100, 7);
    for (Eigen::Index c = 0; c < d.measurements.cols(); ++c) {
        const Eigen::VectorXd y = d.measurements.col(c);
        const Eigen::VectorXd ref = oracle::l0_single_atom(model.phi, y);
        const auto r = qcs::bpdn({model.phi, y, 0.0});
        CHECK((r.x - ref).norm() <= 1e-4 * ref.norm());
    }
}

TEST_CASE("constraint radius rule")
{
    CHECK(qcs::mu_qc(1e-4, 4) == doctest::Approx(0.1 * 1.25));
    CHECK(qcs::mu_qc(0.0, 4) == 0.0);
    CHECK_THROWS_AS(qcs::mu_qc(-1.0, 4), qcs::ConfigError);
}

TEST_CASE("binomial coefficients")
{
    CHECK(qcs::binomial(7, 1) == 7);
    CHECK(qcs::binomial(20, 2) == 190);
    CHECK(qcs::binomial(40, 20) == 137846528820ull);
    CHECK(qcs::binomial(3, 5) == 0);
}

TEST_CASE("MMSE of zero data is zero and its support count is C(N, S)")
{
    const auto model = model_of(7, 4, 0.01);
    const qcs::MmseEstimator est(model, 2);
    CHECK(est.support_count() == 21);
    CHECK(est.estimate(Eigen::VectorXd::Zero(4)).isZero());
}

TEST_CASE("MMSE concentrates on the true atom at tiny noise")
{
    const auto model = model_of(7, 4, 1e-12);
    const qcs::MmseEstimator est(model, 1);
    for (Eigen::Index j = 0; j < 7; ++j) {
        const Eigen::VectorXd x = est.estimate(0.8 * model.phi.col(j));
        CHECK(x(j) == doctest::Approx(0.8).epsilon(1e-6));
        CHECK((x.array().abs().sum() - std::abs(x(j))) < 1e-6);
    }
}

TEST_CASE("MMSE matches a direct M x M evidence computation")
{
    const auto model = model_of(6, 3, 0.05);
    const auto d = qcs::sample_dataset(model, {6, 2}, 5, 8);
    const qcs::MmseEstimator est(model, 2);
    for (Eigen::Index c = 0; c < d.measurements.cols(); ++c) {
        const Eigen::VectorXd y = d.measurements.col(c);
        Eigen::VectorXd num = Eigen::VectorXd::Zero(6);
        double den = 0.0;
        for (int a = 0; a < 6; ++a)
            for (int b = a + 1; b < 6; ++b) {
                Eigen::MatrixXd pt(3, 2);
                pt.col(0) = model.phi.col(a);
                pt.col(1) = model.phi.col(b);
                const Eigen::MatrixXd cov = pt * pt.transpose() + 0.05 * Eigen::MatrixXd::Identity(3, 3);
                const double w = std::exp(-0.5 * y.dot(cov.inverse() * y)) / std::sqrt(cov.determinant());
                const Eigen::VectorXd mean = pt.transpose() * cov.inverse() * y;
                num(a) += w * mean(0);
                num(b) += w * mean(1);
                den += w;
            }
        CHECK((est.estimate(y) - num / den).norm() < 1e-10);
    }
}

TEST_CASE("MMSE beats OMP, BPDN and the zero estimator in mean squared error")
{
    const auto model = model_of(7, 4, 0.01);
    const auto d = qcs::sample_dataset(model, {7, 1}, 3000, 10);
    const qcs::MmseEstimator est(model, 1);
    double e_mmse = 0, e_omp = 0, e_bp = 0, e_zero = 0;
    for (Eigen::Index c = 0; c < d.sources.cols(); ++c) {
        const Eigen::VectorXd y = d.measurements.col(c);
        const Eigen::VectorXd x = d.sources.col(c);
        e_mmse += (est.estimate(y) - x).squaredNorm();
        e_omp += (qcs::omp(model.phi, y, 1).x - x).squaredNorm();
        e_bp += (qcs::bpdn({model.phi, y, qcs::mu_qc(0.01, 1u << 20)}).x - x).squaredNorm();
        e_zero += x.squaredNorm();
    }
    MESSAGE("MSE mmse " << e_mmse << " omp " << e_omp << " bpdn " << e_bp << " zero " << e_zero);
    CHECK(e_mmse <= e_omp);
    CHECK(e_mmse <= e_bp);
    CHECK(e_mmse <= e_zero);
}

TEST_CASE("MMSE guard and noise requirement")
{
    CHECK_THROWS_AS(qcs::MmseEstimator(model_of(40, 20, 0.01), 5), qcs::ConfigError);
    CHECK_THROWS_AS(qcs::MmseEstimator(model_of(7, 4, 0.0), 1), qcs::ConfigError);
}

TEST_CASE("compress-and-estimate rates and near-lossless washout")
{
    const auto model = model_of(20, 10, 0.0);
    const auto train = qcs::sample_dataset(model, {20, 2}, 2000, 1);
    const auto test = qcs::sample_dataset(model, {20, 2}, 500, 2);
    qcs::CePipelineSpec spec;
    spec.levels = 4;
    CHECK(qcs::CePipeline(spec, model, train).rate() == 1.0);

    spec.levels = 1u << 16;
    const auto fine = qcs::run_ce_baseline(spec, model, test, train);
    double err = 0, energy = 0;
    for (Eigen::Index c = 0; c < test.sources.cols(); ++c) {
        err += (qcs::omp(model.phi, test.measurements.col(c), 2).x - test.sources.col(c)).squaredNorm();
        energy += test.sources.col(c).squaredNorm();
    }
    const double unquantized = 10 * std::log10(err / energy);
    MESSAGE("near-lossless " << fine.nmse_db << " dB, unquantized " << unquantized << " dB");
    CHECK(std::abs(fine.nmse_db - unquantized) < 0.1);
    CHECK(fine.rate == 16.0 * 10 / 20);
}

TEST_CASE("compress-and-estimate indices and the VQ variant")
{
    const auto model = model_of(8, 4, 0.01);
    const auto train = qcs::sample_dataset(model, {8, 1}, 3000, 1);
    qcs::CePipelineSpec spec;
    spec.quantizer = qcs::CeQuantizerKind::lloyd_sq;
    spec.decoder = qcs::CeDecoderKind::bpdn;
    spec.levels = 3;
    const qcs::CePipeline sq(spec, model, train);
    const auto idx = sq.encode(train.measurements.col(0));
    CHECK(idx.size() == 4);
    for (auto i : idx)
        CHECK((i >= 1 && i <= 3));
    CHECK(sq.constraint_radius() == doctest::Approx(qcs::mu_qc(0.01, 3)));

    spec.quantizer = qcs::CeQuantizerKind::lloyd_vq;
    spec.codebook_bits = 6;
    const qcs::CePipeline vq(spec, model, train);
    CHECK(vq.rate() == 6.0 / 8.0);
    const auto code = vq.encode(train.measurements.col(3));
    REQUIRE(code.size() == 1);
    CHECK(code[0] < 64);
    CHECK(vq.constraint_radius() == doctest::Approx(qcs::mu_qc(0.01, 64)));
    const std::vector<qcs::QuantIndex> bad{64};
    CHECK_THROWS_AS(vq.dequantize(bad), qcs::ProtocolError);
}

TEST_CASE("EC-VQ zero-bit limit is the constant mean estimator")
{
    const auto model = model_of(7, 4, 0.01);
    const auto train = qcs::sample_dataset(model, {7, 1}, 2000, 1);
    const auto test = qcs::sample_dataset(model, {7, 1}, 1000, 2);
    const auto r = qcs::run_ec_vq(model, train, test, 0);
    CHECK(r.rate == 0.0);
    const qcs::MmseEstimator est(model, 1);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(7);
    for (Eigen::Index c = 0; c < train.measurements.cols(); ++c)
        mean += est.estimate(train.measurements.col(c));
    mean /= static_cast<double>(train.count());
    double err = 0, energy = 0;
    for (Eigen::Index c = 0; c < test.sources.cols(); ++c) {
        err += (mean - test.sources.col(c)).squaredNorm();
        energy += test.sources.col(c).squaredNorm();
    }
    CHECK(r.nmse_db == doctest::Approx(10 * std::log10(err / energy)).epsilon(1e-9));
}

TEST_CASE("EC-VQ approaches the unquantized MMSE at high rate")
{
    const auto model = model_of(7, 4, 0.01);
    const auto train = qcs::sample_dataset(model, {7, 1}, 40000, 1);
    const auto test = qcs::sample_dataset(model, {7, 1}, 4000, 2);
    qcs::EcVqOptions opt;
    opt.lloyd = {1e-5, 60};
    const auto r = qcs::run_ec_vq(model, train, test, 12, opt);
    const qcs::MmseEstimator est(model, 1);
    double err = 0, energy = 0;
    for (Eigen::Index c = 0; c < test.sources.cols(); ++c) {
        err += (est.estimate(test.measurements.col(c)) - test.sources.col(c)).squaredNorm();
        energy += test.sources.col(c).squaredNorm();
    }
    const double mmse_db = 10 * std::log10(err / energy);
    MESSAGE("EC-VQ 12 bits " << r.nmse_db << " dB, MMSE " << mmse_db << " dB");
    CHECK(r.nmse_db - mmse_db < 0.5);
}

}
