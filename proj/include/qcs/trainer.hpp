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
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcs/errors.hpp"
#include "qcs/nnet.hpp"
#include "qcs/quantizer.hpp"
#include "qcs/shq.hpp"
#include "qcs/signal_model.hpp"

namespace qcs {

/// Architecture of the encoder network, SHQ layer and decoder network.
struct ModelSpec {
    std::size_t m_dim = 0;       ///< encoder input width (measurements)
    std::size_t n_dim = 0;       ///< decoder output width (source)
    std::size_t k_width = 0;     ///< encoder output width = number of scalar quantizers
    std::size_t num_levels = 2;  ///< I
    std::vector<std::size_t> enc_hidden;
    std::vector<std::size_t> dec_hidden;
    /// Drops the encoder network; the SHQ layer acts directly on y (K = M).
    bool encoder_passthrough = false;

    void validate() const;
};

/// Encoder hidden width 5K, three decoder hidden layers of width 4N.
ModelSpec default_model_spec(std::size_t n_dim, std::size_t m_dim, std::size_t k_width,
                             std::size_t num_levels);

struct DeepVqcsModel {
    std::optional<FeedforwardNet> enc_net;  ///< empty for a pass-through encoder
    ShqLayer shq;
    FeedforwardNet dec_net;
    std::optional<ScalarQuantizer> hard_q;

    std::size_t m_dim() const;
    std::size_t k_width() const { return dec_net.input_width(); }
    std::size_t n_dim() const { return dec_net.output_width(); }
    std::size_t num_levels() const { return shq.num_levels(); }
    /// Throws ShapeError when the widths do not chain.
    void validate() const;
};

/// Encoder activations: identity input, tanh elsewhere. Decoder: identity
/// at input and output, tanh on hidden layers. SHQ starts at the given h.
DeepVqcsModel init_model(const ModelSpec& spec, double initial_steepness, std::uint64_t seed);

struct TrainConfig {
    ModelSpec model;
    std::size_t batch_size = 100;
    std::uint64_t max_iters = 200000;
    AnnealSchedule anneal;
    StepScale weight_steps{1e-2, 1e-4};
    StepScale level_steps{5e-5, 5e-7};
    StepScale shift_steps{5e-5, 5e-7};
    bool learn_shifts = false;
    std::uint64_t validation_period = 1000;
    std::size_t patience = 20;
    double min_improvement_db = 0.05;
    std::uint64_t seed = 1;

    void validate() const;
};

struct TrainRecord {
    std::uint64_t iteration = 0;
    double steepness = 0.0;
    double blend = 0.0;
    double train_cost = 0.0;      ///< mean minibatch cost since the previous record, soft layer
    double val_nmse_db = 0.0;     ///< validation NMSE with the hard quantizer
    double wall_seconds = 0.0;
};

struct TrainReport {
    std::vector<TrainRecord> records;
    std::uint64_t iterations_run = 0;
    std::uint64_t best_iteration = 0;
    double best_val_nmse_db = 0.0;
    std::string stop_reason;
};

struct TrainResult {
    DeepVqcsModel model;  ///< validation-best parameters with hard_q set
    TrainReport report;
};

using TrainObserver = std::function<void(const TrainRecord&)>;

/// Raised when the minibatch cost or a gradient becomes non-finite. Carries
/// the last validated model (or the initial one before any validation).
class TrainingDiverged : public DivergenceError {
public:
    TrainingDiverged(const std::string& what, std::uint64_t iteration,
                     std::shared_ptr<const DeepVqcsModel> last_good)
        : DivergenceError(what), iteration_(iteration), last_good_(std::move(last_good))
    {
    }
    std::uint64_t iteration() const { return iteration_; }
    const std::shared_ptr<const DeepVqcsModel>& last_good() const { return last_good_; }

private:
    std::uint64_t iteration_;
    std::shared_ptr<const DeepVqcsModel> last_good_;
};

/// Cost (1/B) sum_b |p_b - x_b|^2 of one minibatch through the soft layer
/// and its gradients; columns of y and x are samples.
struct ModelGradients {
    double cost = 0.0;
    GradientSet dec;
    std::optional<GradientSet> enc;
    ShqGradients shq;  ///< xi is the gradient at the encoder output
};

ModelGradients model_gradients(const DeepVqcsModel& model, const Eigen::MatrixXd& y, const Eigen::MatrixXd& x,
                               double beta);

/// Mini-batch training with steepness annealing and gradient blending.
TrainResult train(const TrainConfig& config, const Dataset& train_set, const Dataset& val_set,
                  const TrainObserver& observer = {});

/// Same, starting from an existing model (its SHQ layer and nets are updated).
TrainResult train(DeepVqcsModel initial, const TrainConfig& config, const Dataset& train_set,
                  const Dataset& val_set, const TrainObserver& observer = {});

/// Minibatch-free soft evaluation: mean squared error through the SHQ layer.
double soft_nmse_db(const DeepVqcsModel& model, const Dataset& data);

/// NMSE with the hard quantizer in place of the SHQ layer; each sample goes
/// through compress and reconstruct.
double validate_hard(const DeepVqcsModel& model, const Dataset& data);

/// Encoder network output (or y itself for a pass-through encoder).
Eigen::VectorXd encoder_output(const DeepVqcsModel& model, const Eigen::VectorXd& y);

/// One encoder pass and K scalar encodes; indices lie in 1..I.
std::vector<QuantIndex> compress(const DeepVqcsModel& model, const Eigen::VectorXd& y);

/// K scalar decodes and one decoder pass.
Eigen::VectorXd reconstruct(const DeepVqcsModel& model, std::span<const QuantIndex> indices);

} // namespace qcs
