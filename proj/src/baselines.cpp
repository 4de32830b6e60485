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

#include "qcs/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "qcs/errors.hpp"

namespace qcs {

// ---------------------------------------------------------------- OMP

OmpResult omp(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y, std::size_t sparsity)
{
    const auto m = static_cast<std::size_t>(phi.rows());
    const auto n = static_cast<std::size_t>(phi.cols());
    if (static_cast<std::size_t>(y.size()) != m)
        throw ShapeError("omp: measurement length does not match the matrix");
    if (sparsity < 1 || sparsity > m)
        throw ConfigError("omp needs 1 <= S <= M");
    if (sparsity > n)
        throw ConfigError("omp sparsity exceeds the number of atoms");

    OmpResult out;
    std::vector<bool> chosen(n, false);
    Eigen::VectorXd residual = y;
    Eigen::VectorXd coef;
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(m), 0);
    for (std::size_t round = 0; round < sparsity; ++round) {
        const Eigen::VectorXd corr = phi.transpose() * residual;
        std::size_t best = n;
        double best_val = -1.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (chosen[j])
                continue;
            const double c = std::abs(corr(static_cast<Eigen::Index>(j)));
            if (c > best_val) {
                best_val = c;
                best = j;
            }
        }
        chosen[best] = true;
        out.support.push_back(best);
        sub.conservativeResize(Eigen::NoChange, sub.cols() + 1);
        sub.col(sub.cols() - 1) = phi.col(static_cast<Eigen::Index>(best));

        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
        if (static_cast<Eigen::Index>(qr.rank()) < sub.cols()) {
            const Eigen::MatrixXd normal =
                sub.transpose() * sub + 1e-12 * Eigen::MatrixXd::Identity(sub.cols(), sub.cols());
            coef = normal.ldlt().solve(sub.transpose() * y);
            out.regularized = true;
        } else {
            coef = qr.solve(y);
        }
        residual = y - sub * coef;
    }
    out.x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < out.support.size(); ++i)
        out.x(static_cast<Eigen::Index>(out.support[i])) = coef(static_cast<Eigen::Index>(i));
    return out;
}

// --------------------------------------------------------------- BPDN

namespace {

double spectral_norm_sq(const Eigen::MatrixXd& gram)
{
    if (gram.size() == 0)
        return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().maxCoeff();
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double tau)
{
    return v.unaryExpr([tau](double a) {
        if (a > tau)
            return a - tau;
        if (a < -tau)
            return a + tau;
        return 0.0;
    });
}

// Solves the penalized problem exactly on the sign pattern of `pattern` when the optimality conditions
// confirm it; returns nullopt otherwise.
std::optional<Eigen::VectorXd> polish_on_support(const PenalizedLeastSquares& p, const Eigen::VectorXd& pattern,
                                                 double lambda)
{
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < pattern.size(); ++i)
        if (pattern(i) != 0.0)
            support.push_back(i);
    if (support.empty() || support.size() > static_cast<std::size_t>(p.phi.rows()))
        return std::nullopt;
    const auto s = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXd g(s, s);
    Eigen::VectorXd rhs(s);
    for (Eigen::Index a = 0; a < s; ++a) {
        rhs(a) = p.phi_t_y(support[a]) - 0.5 * lambda * (pattern(support[a]) > 0.0 ? 1.0 : -1.0);
        for (Eigen::Index b = 0; b < s; ++b)
            g(a, b) = p.gram(support[a], support[b]);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success)
        return std::nullopt;
    const Eigen::VectorXd coef = llt.solve(rhs);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(pattern.size());
    for (Eigen::Index a = 0; a < s; ++a) {
        if ((coef(a) > 0.0) != (pattern(support[a]) > 0.0))
            return std::nullopt;
        out(support[a]) = coef(a);
    }
    // Off-support subgradient condition |2 phi_j^T r| <= lambda.
    const Eigen::VectorXd corr = 2.0 * (p.phi_t_y - p.gram * out);
    for (Eigen::Index j = 0; j < pattern.size(); ++j)
        if (out(j) == 0.0 && std::abs(corr(j)) > lambda * (1.0 + 1e-9))
            return std::nullopt;
    return out;
}

Eigen::VectorXd solve_penalized(const PenalizedLeastSquares& p, double lambda, const Eigen::VectorXd& start,
                                const BpdnOptions& options, std::size_t& iterations, bool& missed)
{
    // The previous solution's sign pattern often stays optimal.
    if (auto kept = polish_on_support(p, start, lambda))
        return *kept;
    FistaResult f = fista(p, lambda, start, options);
    iterations += f.iterations;
    // Candidate supports: every nonzero, then the k largest entries.
    const double fo = p.objective(f.x, lambda);
    auto accept = [&](const std::optional<Eigen::VectorXd>& c) {
        return c && p.objective(*c, lambda) <= fo + 1e-14 * std::max(1.0, std::abs(fo));
    };
    if (auto polished = polish_on_support(p, f.x, lambda); accept(polished))
        return *polished;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(f.x.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return std::abs(f.x(a)) > std::abs(f.x(b)); });
    Eigen::VectorXd pattern = Eigen::VectorXd::Zero(f.x.size());
    for (Eigen::Index k = 0; k < std::min(p.phi.rows(), f.x.size()); ++k) {
        const Eigen::Index j = order[static_cast<std::size_t>(k)];
        if (f.x(j) == 0.0)
            break;
        pattern(j) = f.x(j);
        if (auto polished = polish_on_support(p, pattern, lambda); accept(polished))
            return *polished;
    }
    missed = missed || !f.converged;
    return f.x;
}

BpdnResult bpdn_solve(const PenalizedLeastSquares& p, double epsilon, const BpdnOptions& options)
{
    if (!(epsilon >= 0.0))
        throw ConfigError("bpdn constraint radius must be non-negative");
    if (!p.y.allFinite() || !p.phi.allFinite())
        throw DomainError("bpdn inputs must be finite");

    const Eigen::Index n = p.phi.cols();
    BpdnResult out;
    const double y_norm = p.y.norm();
    const double lambda_max = 2.0 * p.phi_t_y.cwiseAbs().maxCoeff();
    if (y_norm <= epsilon || lambda_max == 0.0) {
        out.x = Eigen::VectorXd::Zero(n);
        out.lambda = lambda_max;
        out.residual_norm = y_norm;
        out.residual_target = epsilon;
        return out;
    }

    // The residual cannot drop below the least-squares residual.
    const Eigen::VectorXd ls = p.phi.completeOrthogonalDecomposition().solve(p.y);
    const double ls_residual = (p.y - p.phi * ls).norm();
    const double target = std::max(epsilon, ls_residual);
    out.residual_target = target;

    auto residual_of = [&](const Eigen::VectorXd& x) { return (p.y - p.phi * x).norm(); };

    double lo = lambda_max * 1e-14;
    double hi = lambda_max;
    Eigen::VectorXd warm = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd best_x = warm;
    double best_lambda = hi;
    double best_gap = std::abs(y_norm - target);
    double best_residual = y_norm;
    for (std::size_t step = 0; step < options.max_bisections; ++step) {
        ++out.bisections;
        const double mid = std::sqrt(lo * hi);
        const Eigen::VectorXd x = solve_penalized(p, mid, warm, options, out.inner_iterations, out.tolerance_missed);
        const double rho = residual_of(x);
        const double gap = std::abs(rho - target);
        if (gap < best_gap) {
            best_gap = gap;
            best_x = x;
            best_lambda = mid;
            best_residual = rho;
        }
        if (gap <= options.residual_tol * target)
            break;
        if (rho > target)
            hi = mid;
        else
            lo = mid;
        warm = x;
        if (hi / lo < 1.0 + 1e-12)
            break;
    }
    out.x = best_x;
    out.lambda = best_lambda;
    out.residual_norm = best_residual;
    return out;
}

} // namespace

PenalizedLeastSquares::PenalizedLeastSquares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b)
    : phi(a), y(b), gram(a.transpose() * a), phi_t_y(a.transpose() * b)
{
    if (a.rows() != b.size())
        throw ShapeError("bpdn: measurement length does not match the matrix");
    lipschitz = 2.0 * spectral_norm_sq(gram);
}

PenalizedLeastSquares::PenalizedLeastSquares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                             const Eigen::MatrixXd& g, double lip)
    : phi(a), y(b), gram(g), phi_t_y(a.transpose() * b), lipschitz(lip)
{
    if (a.rows() != b.size())
        throw ShapeError("bpdn: measurement length does not match the matrix");
}

double PenalizedLeastSquares::objective(const Eigen::VectorXd& x, double lambda) const
{
    return lambda * x.lpNorm<1>() + (y - phi * x).squaredNorm();
}

FistaResult fista(const PenalizedLeastSquares& p, double lambda, const Eigen::VectorXd& start,
                  const BpdnOptions& options, bool record_objective)
{
    if (start.size() != p.phi.cols())
        throw ShapeError("fista: start point has the wrong length");
    FistaResult out;
    out.x = start;
    if (p.lipschitz <= 0.0) {
        out.converged = true;
        return out;
    }
    const double step = 1.0 / p.lipschitz;
    const double tau = lambda * step;

    Eigen::VectorXd x = start;
    Eigen::VectorXd z = start;
    double fx = p.objective(x, lambda);
    if (record_objective)
        out.objective_trace.push_back(fx);
    double momentum = 1.0;
    int rejected_in_row = 0;
    for (std::size_t k = 0; k < options.max_inner_iters; ++k) {
        ++out.iterations;
        const Eigen::VectorXd grad = 2.0 * (p.gram * z - p.phi_t_y);
        const Eigen::VectorXd u = soft_threshold(z - step * grad, tau);
        const double fu = p.objective(u, lambda);
        const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        if (fu <= fx) {
            const Eigen::VectorXd prev = x;
            x = u;
            const double change = (x - prev).norm();
            fx = fu;
            z = x + ((momentum - 1.0) / next_momentum) * (x - prev);
            momentum = next_momentum;
            rejected_in_row = 0;
            if (record_objective)
                out.objective_trace.push_back(fx);
            if (change <= options.inner_tol * std::max(1.0, x.norm())) {
                out.converged = true;
                break;
            }
        } else {
            // Adaptive restart: drop the momentum and retry from x.
            momentum = 1.0;
            z = x;
            if (record_objective)
                out.objective_trace.push_back(fx);
            if (++rejected_in_row >= 2) {
                out.converged = true;
                break;
            }
        }
    }
    out.x = x;
    return out;
}

BpdnResult bpdn(const BpdnProblem& problem, const BpdnOptions& options)
{
    const PenalizedLeastSquares p(problem.phi, problem.y_tilde);
    return bpdn_solve(p, problem.epsilon, options);
}

double mu_qc(double noise_variance, std::size_t levels)
{
    if (noise_variance < 0.0 || levels < 1)
        throw ConfigError("mu_qc needs a non-negative noise variance and at least one level");
    return std::sqrt(std::sqrt(noise_variance)) * (1.0 + 1.0 / static_cast<double>(levels));
}

// --------------------------------------------------------------- MMSE

std::size_t binomial(std::size_t n, std::size_t k)
{
    if (k > n)
        return 0;
    k = std::min(k, n - k);
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        const std::size_t num = n - k + i;
        if (r > std::numeric_limits<std::size_t>::max() / num)
            return std::numeric_limits<std::size_t>::max();
        r = r * num / i;
    }
    return r;
}

MmseEstimator::MmseEstimator(const MeasurementModel& model, std::size_t sparsity)
    : n_dim_(static_cast<std::size_t>(model.phi.cols())),
      m_dim_(static_cast<std::size_t>(model.phi.rows())),
      noise_variance_(model.noise_variance)
{
    if (!(noise_variance_ > 0.0))
        throw ConfigError("exhaustive MMSE needs a positive noise variance");
    if (sparsity > n_dim_)
        throw ConfigError("sparsity exceeds N");
    const std::size_t count = binomial(n_dim_, sparsity);
    if (count > kMaxSupports)
        throw ConfigError("exhaustive MMSE refused: C(" + std::to_string(n_dim_) + ", " +
                          std::to_string(sparsity) + ") = " + std::to_string(count) +
                          " supports exceeds the guard of " + std::to_string(kMaxSupports));

    const auto s = static_cast<Eigen::Index>(sparsity);
    const double log_var = std::log(noise_variance_);
    std::vector<Eigen::Index> cols(sparsity);
    std::iota(cols.begin(), cols.end(), Eigen::Index{0});
    supports_.reserve(count);
    while (true) {
        Support sup;
        sup.columns = cols;
        sup.phi_t.resize(static_cast<Eigen::Index>(m_dim_), s);
        for (Eigen::Index a = 0; a < s; ++a)
            sup.phi_t.col(a) = model.phi.col(cols[static_cast<std::size_t>(a)]);
        const Eigen::MatrixXd inner =
            noise_variance_ * Eigen::MatrixXd::Identity(s, s) + sup.phi_t.transpose() * sup.phi_t;
        sup.inner.compute(inner);
        double log_det_inner = 0.0;
        for (Eigen::Index a = 0; a < s; ++a)
            log_det_inner += 2.0 * std::log(sup.inner.matrixL()(a, a));
        sup.log_det = static_cast<double>(static_cast<Eigen::Index>(m_dim_) - s) * log_var + log_det_inner;
        supports_.push_back(std::move(sup));

        // Next combination in lexicographic order.
        std::size_t i = sparsity;
        while (i > 0 && static_cast<std::size_t>(cols[i - 1]) == n_dim_ - sparsity + i - 1)
            --i;
        if (i == 0)
            break;
        ++cols[i - 1];
        for (std::size_t j = i; j < sparsity; ++j)
            cols[j] = cols[j - 1] + 1;
    }
}

Eigen::VectorXd MmseEstimator::estimate(const Eigen::VectorXd& y) const
{
    if (static_cast<std::size_t>(y.size()) != m_dim_)
        throw ShapeError("mmse: measurement length does not match the model");
    const double yy = y.squaredNorm();
    std::vector<double> log_w(supports_.size());
    std::vector<Eigen::VectorXd> means(supports_.size());
    for (std::size_t t = 0; t < supports_.size(); ++t) {
        const Support& sup = supports_[t];
        if (sup.columns.empty()) {
            log_w[t] = -0.5 * (yy / noise_variance_ + sup.log_det);
            continue;
        }
        const Eigen::VectorXd b = sup.phi_t.transpose() * y;
        means[t] = sup.inner.solve(b);
        const double quad = (yy - b.dot(means[t])) / noise_variance_;
        log_w[t] = -0.5 * (quad + sup.log_det);
    }
    const double top = *std::max_element(log_w.begin(), log_w.end());
    double total = 0.0;
    for (double& w : log_w) {
        w = std::exp(w - top);
        total += w;
    }
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_dim_));
    for (std::size_t t = 0; t < supports_.size(); ++t) {
        const Support& sup = supports_[t];
        const double w = log_w[t] / total;
        for (std::size_t a = 0; a < sup.columns.size(); ++a)
            x(sup.columns[a]) += w * means[t](static_cast<Eigen::Index>(a));
    }
    return x;
}

Eigen::VectorXd mmse_exhaustive(const MeasurementModel& model, const Eigen::VectorXd& y, std::size_t sparsity)
{
    return MmseEstimator(model, sparsity).estimate(y);
}

// ---------------------------------------------------- QCS pipelines

namespace {

Eigen::MatrixXd leading_columns(const Eigen::MatrixXd& m, std::size_t count)
{
    if (count == 0 || count >= static_cast<std::size_t>(m.cols()))
        return m;
    return m.leftCols(static_cast<Eigen::Index>(count));
}

} // namespace

CePipeline::CePipeline(const CePipelineSpec& spec, const MeasurementModel& model, const Dataset& train,
                       const Dataset* validation)
    : spec_(spec), model_(model), sparsity_(train.sparsity)
{
    if (train.m_dim() != model.m_dim || train.n_dim() != model.n_dim)
        throw ShapeError("training split does not match the measurement model");
    const auto m = static_cast<Eigen::Index>(model.m_dim);

    std::size_t radius_levels = spec.levels;
    switch (spec.quantizer) {
    case CeQuantizerKind::uniform_sq:
    case CeQuantizerKind::lloyd_sq:
        if (spec.levels < 1)
            throw ConfigError("scalar quantizer needs at least one level");
        if (spec.decoder == CeDecoderKind::decnet)
            break;
        for (Eigen::Index i = 0; i < m; ++i) {
            const Eigen::VectorXd row = train.measurements.row(i).transpose();
            if (spec.quantizer == CeQuantizerKind::uniform_sq) {
                const double mean = row.mean();
                const double sd = std::sqrt((row.array() - mean).square().mean());
                const double half = spec.usq_range_sigmas * std::max(sd, 1e-12);
                scalar_.push_back(uniform_sq(mean - half, mean + half, spec.levels));
            } else {
                scalar_.push_back(
                    lloyd_max_sq(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())),
                                 spec.levels, spec.lloyd)
                        .quantizer);
            }
        }
        break;
    case CeQuantizerKind::lloyd_vq: {
        if (spec.decoder == CeDecoderKind::decnet)
            throw ConfigError("the DecNet decoder pairs with scalar quantizers only");
        if (spec.codebook_bits >= 8 * sizeof(std::size_t) - 1)
            throw ConfigError("codebook too large");
        const std::size_t size = std::size_t{1} << spec.codebook_bits;
        CounterRng rng(derive_seed(spec.seed, 0xc0de));
        codebook_ = lloyd_vq(leading_columns(train.measurements, spec.vq_train_size), size, spec.lloyd, rng).codebook;
        radius_levels = size;
        break;
    }
    }

    if (spec.decoder == CeDecoderKind::decnet) {
        TrainConfig cfg = spec.decnet;
        cfg.model.m_dim = model.m_dim;
        cfg.model.n_dim = model.n_dim;
        cfg.model.k_width = model.m_dim;
        cfg.model.num_levels = spec.levels;
        cfg.model.encoder_passthrough = true;
        cfg.model.enc_hidden.clear();
        const Dataset& val = validation ? *validation : train;
        decnet_ = qcs::train(cfg, train, val).model;
    }
    if (spec.decoder == CeDecoderKind::omp && (sparsity_ < 1 || sparsity_ > model.m_dim))
        throw ConfigError("OMP decoding needs 1 <= S <= M");

    epsilon_ = spec.mu_qc_override ? *spec.mu_qc_override : mu_qc(model.noise_variance, radius_levels);
    gram_ = model.phi.transpose() * model.phi;
    lipschitz_ = 2.0 * spectral_norm_sq(gram_);
}

double CePipeline::rate() const
{
    if (spec_.quantizer == CeQuantizerKind::lloyd_vq)
        return static_cast<double>(spec_.codebook_bits) / static_cast<double>(model_.n_dim);
    return rate_bits(model_.m_dim, spec_.levels, model_.n_dim);
}

std::vector<QuantIndex> CePipeline::encode(const Eigen::VectorXd& y) const
{
    if (static_cast<std::size_t>(y.size()) != model_.m_dim)
        throw ShapeError("measurement length does not match the model");
    if (spec_.quantizer == CeQuantizerKind::lloyd_vq)
        return {static_cast<QuantIndex>(vq_quantize(codebook_, y).index)};
    if (decnet_)
        return compress(*decnet_, y);
    std::vector<QuantIndex> out(static_cast<std::size_t>(y.size()));
    for (Eigen::Index i = 0; i < y.size(); ++i)
        out[static_cast<std::size_t>(i)] = sq_encode(scalar_[static_cast<std::size_t>(i)], y(i));
    return out;
}

Eigen::VectorXd CePipeline::dequantize(std::span<const QuantIndex> indices) const
{
    if (spec_.quantizer == CeQuantizerKind::lloyd_vq) {
        if (indices.size() != 1 || indices[0] >= codebook_.size())
            throw ProtocolError("invalid codeword index");
        return codebook_.codewords.col(static_cast<Eigen::Index>(indices[0]));
    }
    if (indices.size() != model_.m_dim)
        throw ShapeError("expected one index per measurement");
    Eigen::VectorXd y(static_cast<Eigen::Index>(indices.size()));
    for (std::size_t i = 0; i < indices.size(); ++i)
        y(static_cast<Eigen::Index>(i)) =
            decnet_ ? sq_decode(*decnet_->hard_q, indices[i]) : sq_decode(scalar_[i], indices[i]);
    return y;
}

Eigen::VectorXd CePipeline::decode(std::span<const QuantIndex> indices) const
{
    if (decnet_)
        return reconstruct(*decnet_, indices);
    const Eigen::VectorXd y_tilde = dequantize(indices);
    switch (spec_.decoder) {
    case CeDecoderKind::omp:
        return omp(model_.phi, y_tilde, sparsity_).x;
    case CeDecoderKind::bpdn: {
        const PenalizedLeastSquares p(model_.phi, y_tilde, gram_, lipschitz_);
        return bpdn_solve(p, epsilon_, spec_.bpdn).x;
    }
    case CeDecoderKind::decnet:
        break;
    }
    throw StateError("decoder not configured");
}

PipelineResult run_ce_baseline(const CePipelineSpec& spec, const MeasurementModel& model, const Dataset& test,
                               const Dataset& train, const Dataset* validation)
{
    if (test.m_dim() != model.m_dim || test.n_dim() != model.n_dim)
        throw ShapeError("test split does not match the measurement model");
    const CePipeline pipe(spec, model, train, validation);
    using clock = std::chrono::steady_clock;
    PipelineResult r;
    r.rate = pipe.rate();
    double err = 0.0;
    double energy = 0.0;
    double enc = 0.0;
    double dec = 0.0;
    for (Eigen::Index k = 0; k < test.measurements.cols(); ++k) {
        const auto t0 = clock::now();
        const auto idx = pipe.encode(test.measurements.col(k));
        const auto t1 = clock::now();
        const Eigen::VectorXd xhat = pipe.decode(idx);
        const auto t2 = clock::now();
        enc += std::chrono::duration<double>(t1 - t0).count();
        dec += std::chrono::duration<double>(t2 - t1).count();
        err += (xhat - test.sources.col(k)).squaredNorm();
        energy += test.sources.col(k).squaredNorm();
    }
    const auto count = static_cast<double>(test.count());
    r.nmse_db = nmse_db_from_sums(err, energy);
    r.encode_seconds = enc / count;
    r.decode_seconds = dec / count;
    return r;
}

EcVqPipeline::EcVqPipeline(const MeasurementModel& model, std::size_t sparsity, const Dataset& train,
                           unsigned codebook_bits, const EcVqOptions& options)
    : mmse_(model, sparsity), bits_(codebook_bits), n_dim_(model.n_dim)
{
    if (train.m_dim() != model.m_dim || train.n_dim() != model.n_dim)
        throw ShapeError("training split does not match the measurement model");
    if (codebook_bits >= 8 * sizeof(std::size_t) - 1)
        throw ConfigError("codebook too large");
    const Eigen::MatrixXd y = leading_columns(train.measurements, options.train_size);
    Eigen::MatrixXd estimates(static_cast<Eigen::Index>(model.n_dim), y.cols());
    for (Eigen::Index k = 0; k < y.cols(); ++k)
        estimates.col(k) = mmse_.estimate(y.col(k));
    CounterRng rng(derive_seed(options.seed, 0xec));
    codebook_ = lloyd_vq(estimates, std::size_t{1} << codebook_bits, options.lloyd, rng).codebook;
}

double EcVqPipeline::rate() const
{
    return static_cast<double>(bits_) / static_cast<double>(n_dim_);
}

std::size_t EcVqPipeline::encode(const Eigen::VectorXd& y) const
{
    return vq_quantize(codebook_, mmse_.estimate(y)).index;
}

Eigen::VectorXd EcVqPipeline::decode(std::size_t index) const
{
    if (index >= codebook_.size())
        throw ProtocolError("codeword index out of range");
    return codebook_.codewords.col(static_cast<Eigen::Index>(index));
}

PipelineResult run_ec_vq(const MeasurementModel& model, const Dataset& train, const Dataset& test,
                         unsigned codebook_bits, const EcVqOptions& options)
{
    if (test.m_dim() != model.m_dim || test.n_dim() != model.n_dim)
        throw ShapeError("test split does not match the measurement model");
    const EcVqPipeline pipe(model, train.sparsity, train, codebook_bits, options);
    using clock = std::chrono::steady_clock;
    PipelineResult r;
    r.rate = pipe.rate();
    double err = 0.0;
    double energy = 0.0;
    double enc = 0.0;
    double dec = 0.0;
    for (Eigen::Index k = 0; k < test.measurements.cols(); ++k) {
        const auto t0 = clock::now();
        const std::size_t idx = pipe.encode(test.measurements.col(k));
        const auto t1 = clock::now();
        const Eigen::VectorXd xhat = pipe.decode(idx);
        const auto t2 = clock::now();
        enc += std::chrono::duration<double>(t1 - t0).count();
        dec += std::chrono::duration<double>(t2 - t1).count();
        err += (xhat - test.sources.col(k)).squaredNorm();
        energy += test.sources.col(k).squaredNorm();
    }
    const auto count = static_cast<double>(test.count());
    r.nmse_db = nmse_db_from_sums(err, energy);
    r.encode_seconds = enc / count;
    r.decode_seconds = dec / count;
    return r;
}

} // namespace qcs
