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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcs/quantizer.hpp"
#include "qcs/signal_model.hpp"
#include "qcs/trainer.hpp"

namespace qcs {

// ---------------------------------------------------------------- OMP

struct OmpResult {
    Eigen::VectorXd x;
    std::vector<std::size_t> support;  ///< in selection order
    bool regularized = false;          ///< a 1e-12 ridge was needed for a refit
};

/// Orthogonal matching pursuit: exactly `sparsity` greedy selections by
/// largest absolute residual correlation, each followed by a least-squares
/// refit on the selected columns.
OmpResult omp(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y, std::size_t sparsity);

// --------------------------------------------------------------- BPDN

/// min |x|_1 s.t. |y - phi x|_2 <= epsilon, solved through the penalized
/// form lambda |x|_1 + |y - phi x|_2^2.
struct BpdnProblem {
    Eigen::MatrixXd phi;
    Eigen::VectorXd y_tilde;
    double epsilon = 0.0;
};

struct BpdnOptions {
    std::size_t max_inner_iters = 10000;
    double inner_tol = 1e-12;        ///< relative iterate change
    std::size_t max_bisections = 200;
    double residual_tol = 0.01;      ///< relative to the residual target
};

struct BpdnResult {
    Eigen::VectorXd x;
    double lambda = 0.0;
    double residual_norm = 0.0;
    double residual_target = 0.0;
    std::size_t inner_iterations = 0;  ///< summed over every lambda tried
    std::size_t bisections = 0;
    bool tolerance_missed = false;     ///< some inner solve hit max_inner_iters
};

/// Gram-form data shared by every penalized solve on the same (phi, y).
struct PenalizedLeastSquares {
    Eigen::MatrixXd phi;
    Eigen::VectorXd y;
    Eigen::MatrixXd gram;     ///< phi^T phi
    Eigen::VectorXd phi_t_y;  ///< phi^T y
    double lipschitz = 0.0;   ///< of the gradient of |y - phi x|^2

    PenalizedLeastSquares(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y);
    PenalizedLeastSquares(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y,
                          const Eigen::MatrixXd& gram, double lipschitz);
    double objective(const Eigen::VectorXd& x, double lambda) const;
};

struct FistaResult {
    Eigen::VectorXd x;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace;  ///< filled when requested
};

/// Monotone FISTA with adaptive restart for the penalized objective. The
/// objective of the returned iterates never increases.
FistaResult fista(const PenalizedLeastSquares& problem, double lambda, const Eigen::VectorXd& start,
                  const BpdnOptions& options, bool record_objective = false);

BpdnResult bpdn(const BpdnProblem& problem, const BpdnOptions& options = {});

/// Constraint radius sqrt(sigma_n) (1 + 1/I), sigma_n being the noise
/// standard deviation.
double mu_qc(double noise_variance, std::size_t levels);

// --------------------------------------------------------------- MMSE

/// Posterior mean of x given y for supports drawn uniformly among the
/// size-S subsets, N(0, 1) nonzeros and N(0, sigma^2) noise. Per support T
/// the evidence is N(y; 0, phi_T phi_T^T + sigma^2 I) and the conditional
/// mean is (sigma^2 I + phi_T^T phi_T)^{-1} phi_T^T y; everything reduces
/// to S x S systems through the matrix inversion lemma.
class MmseEstimator {
public:
    static constexpr std::size_t kMaxSupports = 100000;

    MmseEstimator(const MeasurementModel& model, std::size_t sparsity);

    Eigen::VectorXd estimate(const Eigen::VectorXd& y) const;
    std::size_t support_count() const { return supports_.size(); }

private:
    struct Support {
        std::vector<Eigen::Index> columns;
        Eigen::MatrixXd phi_t;       ///< M x S
        Eigen::LLT<Eigen::MatrixXd> inner;  ///< sigma^2 I + phi_T^T phi_T
        double log_det = 0.0;        ///< log det of the M x M evidence covariance
    };
    std::size_t n_dim_ = 0;
    std::size_t m_dim_ = 0;
    double noise_variance_ = 0.0;
    std::vector<Support> supports_;
};

Eigen::VectorXd mmse_exhaustive(const MeasurementModel& model, const Eigen::VectorXd& y,
                                std::size_t sparsity);

/// Number of size-k subsets of n items, saturating at SIZE_MAX.
std::size_t binomial(std::size_t n, std::size_t k);

// ---------------------------------------------------- QCS pipelines

enum class CeQuantizerKind { uniform_sq, lloyd_sq, lloyd_vq };
enum class CeDecoderKind { omp, bpdn, decnet };

struct CePipelineSpec {
    CeQuantizerKind quantizer = CeQuantizerKind::uniform_sq;
    CeDecoderKind decoder = CeDecoderKind::omp;
    std::size_t levels = 2;          ///< per-measurement levels I (SQ kinds)
    unsigned codebook_bits = 0;      ///< total bits per y (lloyd_vq)
    double usq_range_sigmas = 4.0;   ///< uniform SQ range mu +/- k sigma
    /// Overrides the sqrt(sigma_n)(1 + 1/I) rule when set.
    std::optional<double> mu_qc_override;
    LloydOptions lloyd;
    std::size_t vq_train_size = 0;   ///< 0 uses the whole training split
    BpdnOptions bpdn;
    TrainConfig decnet;              ///< used by the decnet decoder
    std::uint64_t seed = 7;
};

struct PipelineResult {
    double rate = 0.0;
    double nmse_db = 0.0;
    double encode_seconds = 0.0;  ///< mean per test vector
    double decode_seconds = 0.0;  ///< mean per test vector
};

/// Compress-and-estimate: the encoder quantizes y without regard to x; the
/// decoder estimates x from the dequantized measurements.
class CePipeline {
public:
    CePipeline(const CePipelineSpec& spec, const MeasurementModel& model, const Dataset& train,
               const Dataset* validation = nullptr);

    double rate() const;
    std::vector<QuantIndex> encode(const Eigen::VectorXd& y) const;
    Eigen::VectorXd dequantize(std::span<const QuantIndex> indices) const;
    Eigen::VectorXd decode(std::span<const QuantIndex> indices) const;
    const CePipelineSpec& spec() const { return spec_; }
    double constraint_radius() const { return epsilon_; }

private:
    CePipelineSpec spec_;
    MeasurementModel model_;
    std::size_t sparsity_ = 0;
    std::vector<ScalarQuantizer> scalar_;  ///< one per measurement coordinate
    VectorCodebook codebook_;
    std::optional<DeepVqcsModel> decnet_;
    double epsilon_ = 0.0;
    Eigen::MatrixXd gram_;
    double lipschitz_ = 0.0;
};

PipelineResult run_ce_baseline(const CePipelineSpec& spec, const MeasurementModel& model,
                               const Dataset& test, const Dataset& train,
                               const Dataset* validation = nullptr);

struct EcVqOptions {
    LloydOptions lloyd{1e-6, 100};
    std::size_t train_size = 0;  ///< 0 uses the whole training split
    std::uint64_t seed = 11;
};

/// Estimate-and-compress: exhaustive MMSE estimate at the encoder, then a
/// Lloyd VQ with 2^bits codewords trained on training-split estimates.
class EcVqPipeline {
public:
    EcVqPipeline(const MeasurementModel& model, std::size_t sparsity, const Dataset& train,
                 unsigned codebook_bits, const EcVqOptions& options = {});

    double rate() const;
    std::size_t encode(const Eigen::VectorXd& y) const;
    Eigen::VectorXd decode(std::size_t index) const;
    const VectorCodebook& codebook() const { return codebook_; }
    const MmseEstimator& estimator() const { return mmse_; }

private:
    MmseEstimator mmse_;
    VectorCodebook codebook_;
    unsigned bits_ = 0;
    std::size_t n_dim_ = 0;
};

PipelineResult run_ec_vq(const MeasurementModel& model, const Dataset& train, const Dataset& test,
                         unsigned codebook_bits, const EcVqOptions& options = {});

} // namespace qcs
