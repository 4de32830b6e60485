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

#include "qcs/trainer.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace qcs {

void ModelSpec::validate() const
{
    if (m_dim < 1 || n_dim < 1 || k_width < 1)
        throw ConfigError("model dimensions must be positive");
    if (num_levels < 2)
        throw ConfigError("model needs at least two quantization levels");
    if (encoder_passthrough && k_width != m_dim)
        throw ConfigError("a pass-through encoder requires K = M");
    for (std::size_t w : enc_hidden)
        if (w == 0)
            throw ConfigError("encoder hidden widths must be positive");
    for (std::size_t w : dec_hidden)
        if (w == 0)
            throw ConfigError("decoder hidden widths must be positive");
}

ModelSpec default_model_spec(std::size_t n_dim, std::size_t m_dim, std::size_t k_width,
                             std::size_t num_levels)
{
    ModelSpec spec;
    spec.n_dim = n_dim;
    spec.m_dim = m_dim;
    spec.k_width = k_width;
    spec.num_levels = num_levels;
    spec.enc_hidden = {5 * k_width};
    spec.dec_hidden = {4 * n_dim, 4 * n_dim, 4 * n_dim};
    return spec;
}

std::size_t DeepVqcsModel::m_dim() const
{
    return enc_net ? enc_net->input_width() : dec_net.input_width();
}

void DeepVqcsModel::validate() const
{
    const std::size_t k = enc_net ? enc_net->output_width() : dec_net.input_width();
    if (k != dec_net.input_width())
        throw ShapeError("encoder output width does not match the decoder input width");
    if (shq.levels_v.size() != shq.shifts_s.size() || shq.levels_v.size() < 1)
        throw ShapeError("SHQ layer is malformed");
    if (hard_q && hard_q->num_levels() != shq.num_levels())
        throw ShapeError("hard quantizer level count does not match the SHQ layer");
}

DeepVqcsModel init_model(const ModelSpec& spec, double initial_steepness, std::uint64_t seed)
{
    spec.validate();
    CounterRng rng(derive_seed(seed, 0x1417));
    DeepVqcsModel model;
    if (!spec.encoder_passthrough) {
        std::vector<std::size_t> widths{spec.m_dim};
        widths.insert(widths.end(), spec.enc_hidden.begin(), spec.enc_hidden.end());
        widths.push_back(spec.k_width);
        std::vector<Activation> acts(widths.size(), Activation::tanh);
        acts.front() = Activation::identity;
        model.enc_net = init_net(widths, acts, rng);
    }
    model.shq = make_shq_layer(spec.num_levels, initial_steepness);

    std::vector<std::size_t> widths{spec.k_width};
    widths.insert(widths.end(), spec.dec_hidden.begin(), spec.dec_hidden.end());
    widths.push_back(spec.n_dim);
    std::vector<Activation> acts(widths.size(), Activation::tanh);
    acts.front() = Activation::identity;
    acts.back() = Activation::identity;
    model.dec_net = init_net(widths, acts, rng);
    return model;
}

void TrainConfig::validate() const
{
    model.validate();
    anneal.validate();
    if (batch_size < 1)
        throw ConfigError("batch size must be positive");
    if (max_iters < 1)
        throw ConfigError("max_iters must be positive");
    if (validation_period < 1)
        throw ConfigError("validation period must be positive");
}

Eigen::VectorXd encoder_output(const DeepVqcsModel& model, const Eigen::VectorXd& y)
{
    if (static_cast<std::size_t>(y.size()) != model.m_dim())
        throw ShapeError("measurement length " + std::to_string(y.size()) + " does not match M=" +
                         std::to_string(model.m_dim()));
    return model.enc_net ? evaluate(*model.enc_net, y) : y;
}

std::vector<QuantIndex> compress(const DeepVqcsModel& model, const Eigen::VectorXd& y)
{
    if (!model.hard_q)
        throw StateError("model has no hard quantizer; build it before compressing");
    const Eigen::VectorXd a = encoder_output(model, y);
    std::vector<QuantIndex> indices(static_cast<std::size_t>(a.size()));
    for (Eigen::Index n = 0; n < a.size(); ++n)
        indices[static_cast<std::size_t>(n)] = sq_encode(*model.hard_q, a(n));
    return indices;
}

Eigen::VectorXd reconstruct(const DeepVqcsModel& model, std::span<const QuantIndex> indices)
{
    if (!model.hard_q)
        throw StateError("model has no hard quantizer; build it before reconstructing");
    if (indices.size() != model.k_width())
        throw ShapeError("expected " + std::to_string(model.k_width()) + " indices, got " +
                         std::to_string(indices.size()));
    Eigen::VectorXd g(static_cast<Eigen::Index>(indices.size()));
    for (std::size_t n = 0; n < indices.size(); ++n)
        g(static_cast<Eigen::Index>(n)) = sq_decode(*model.hard_q, indices[n]);
    return evaluate(model.dec_net, g);
}

double validate_hard(const DeepVqcsModel& model, const Dataset& data)
{
    if (!model.hard_q)
        throw StateError("validation needs the hard quantizer");
    if (data.m_dim() != model.m_dim() || data.n_dim() != model.n_dim())
        throw ShapeError("dataset dimensions do not match the model");
    double err = 0.0;
    double energy = 0.0;
    for (Eigen::Index k = 0; k < data.measurements.cols(); ++k) {
        const auto idx = compress(model, data.measurements.col(k));
        const Eigen::VectorXd xhat = reconstruct(model, idx);
        err += (xhat - data.sources.col(k)).squaredNorm();
        energy += data.sources.col(k).squaredNorm();
    }
    return nmse_db_from_sums(err, energy);
}

double soft_nmse_db(const DeepVqcsModel& model, const Dataset& data)
{
    if (data.m_dim() != model.m_dim() || data.n_dim() != model.n_dim())
        throw ShapeError("dataset dimensions do not match the model");
    double err = 0.0;
    double energy = 0.0;
    for (Eigen::Index k = 0; k < data.measurements.cols(); ++k) {
        const Eigen::VectorXd a = encoder_output(model, data.measurements.col(k));
        const Eigen::VectorXd xhat = evaluate(model.dec_net, shq_forward(model.shq, a));
        err += (xhat - data.sources.col(k)).squaredNorm();
        energy += data.sources.col(k).squaredNorm();
    }
    return nmse_db_from_sums(err, energy);
}

ModelGradients model_gradients(const DeepVqcsModel& model, const Eigen::MatrixXd& y, const Eigen::MatrixXd& x,
                               double beta)
{
    if (y.cols() != x.cols() || y.cols() == 0)
        throw ShapeError("minibatch needs matching, non-empty source and measurement columns");
    if (static_cast<std::size_t>(y.rows()) != model.m_dim() || static_cast<std::size_t>(x.rows()) != model.n_dim())
        throw ShapeError("minibatch dimensions do not match the model");
    const auto batch = static_cast<double>(x.cols());

    std::optional<LayerTrace> enc_trace;
    if (model.enc_net)
        enc_trace = forward(*model.enc_net, y);
    const Eigen::MatrixXd& a_enc = enc_trace ? enc_trace->result() : y;
    const Eigen::MatrixXd p1 = shq_forward(model.shq, a_enc);
    const LayerTrace dec_trace = forward(model.dec_net, p1);
    const Eigen::MatrixXd residual = dec_trace.result() - x;

    ModelGradients g;
    g.cost = residual.squaredNorm() / batch;
    g.dec = backprop(model.dec_net, dec_trace, (2.0 / batch) * residual);
    g.shq = shq_backward(model.shq, a_enc, g.dec.input_grad, beta);
    if (model.enc_net)
        g.enc = backprop(*model.enc_net, *enc_trace, g.shq.xi);
    return g;
}

TrainResult train(const TrainConfig& config, const Dataset& train_set, const Dataset& val_set,
                  const TrainObserver& observer)
{
    config.validate();
    DeepVqcsModel model = init_model(config.model, steepness_at(config.anneal, 0), config.seed);
    return train(std::move(model), config, train_set, val_set, observer);
}

TrainResult train(DeepVqcsModel model, const TrainConfig& config, const Dataset& train_set,
                  const Dataset& val_set, const TrainObserver& observer)
{
    config.validate();
    model.validate();
    if (train_set.m_dim() != model.m_dim() || train_set.n_dim() != model.n_dim() ||
        val_set.m_dim() != model.m_dim() || val_set.n_dim() != model.n_dim())
        throw ShapeError("dataset dimensions do not match the model");
    if (train_set.count() < config.batch_size)
        throw ConfigError("batch size exceeds the training set size");

    using clock = std::chrono::steady_clock;
    const auto started = clock::now();
    const std::size_t levels = model.num_levels();
    const std::size_t batch = config.batch_size;
    const auto b = static_cast<Eigen::Index>(batch);

    AdamState dec_adam = make_adam_state(model.dec_net, config.weight_steps);
    std::optional<AdamState> enc_adam;
    if (model.enc_net)
        enc_adam = make_adam_state(*model.enc_net, config.weight_steps);
    VectorAdamState level_adam(levels - 1, config.level_steps);
    VectorAdamState shift_adam(levels - 1, config.shift_steps);

    CounterRng batch_rng(derive_seed(config.seed, 0xba7c));
    Eigen::MatrixXd xb(static_cast<Eigen::Index>(model.n_dim()), b);
    Eigen::MatrixXd yb(static_cast<Eigen::Index>(model.m_dim()), b);

    TrainResult result;
    auto last_good = std::make_shared<const DeepVqcsModel>(model);
    double best_db = 0.0;
    double reference_db = 0.0;
    bool have_best = false;
    std::size_t stale_checks = 0;
    double last_cost = 0.0;
    double window_cost = 0.0;
    std::size_t window_count = 0;

    auto fail = [&](const std::string& why, std::uint64_t t) {
        throw TrainingDiverged(why + " at iteration " + std::to_string(t), t, last_good);
    };

    std::uint64_t t = 1;
    for (; t <= config.max_iters; ++t) {
        const double h = steepness_at(config.anneal, t);
        const double beta = blend_at(config.anneal, t);
        model.shq.steepness_h = h;
        if (!config.learn_shifts)
            model.shq.shifts_s = shifts_at(levels, h);

        for (Eigen::Index j = 0; j < b; ++j) {
            const auto k = static_cast<Eigen::Index>(batch_rng.below(train_set.count()));
            xb.col(j) = train_set.sources.col(k);
            yb.col(j) = train_set.measurements.col(k);
        }

        const ModelGradients g = model_gradients(model, yb, xb, beta);
        last_cost = g.cost;
        if (!std::isfinite(last_cost))
            fail("non-finite training cost", t);
        if (!all_finite(g.dec) || (g.enc && !all_finite(*g.enc)) || !g.shq.grad_v.allFinite() ||
            !g.shq.grad_s.allFinite())
            fail("non-finite gradient", t);
        window_cost += last_cost;
        ++window_count;

        adam_step(dec_adam, model.dec_net, g.dec, t);
        if (model.enc_net)
            adam_step(*enc_adam, *model.enc_net, *g.enc, t);
        level_adam.step(model.shq.levels_v, g.shq.grad_v, t);
        model.shq.levels_v = model.shq.levels_v.cwiseMax(0.0);
        if (config.learn_shifts)
            shift_adam.step(model.shq.shifts_s, g.shq.grad_s, t);

        const bool last_iter = t == config.max_iters;
        if (t % config.validation_period == 0 || last_iter) {
            model.hard_q = build_quantizer(model.shq);
            TrainRecord rec;
            rec.iteration = t;
            rec.steepness = h;
            rec.blend = beta;
            rec.train_cost = window_cost / static_cast<double>(window_count);
            window_cost = 0.0;
            window_count = 0;
            rec.val_nmse_db = validate_hard(model, val_set);
            rec.wall_seconds = std::chrono::duration<double>(clock::now() - started).count();
            result.report.records.push_back(rec);
            if (observer)
                observer(rec);

            if (!have_best || rec.val_nmse_db < best_db) {
                best_db = rec.val_nmse_db;
                result.report.best_iteration = t;
                last_good = std::make_shared<const DeepVqcsModel>(model);
            }
            if (!have_best || rec.val_nmse_db < reference_db - config.min_improvement_db) {
                reference_db = rec.val_nmse_db;
                stale_checks = 0;
            } else if (++stale_checks >= config.patience) {
                result.report.stop_reason = "patience";
                break;
            }
            have_best = true;
        }
    }
    result.report.iterations_run = std::min<std::uint64_t>(t, config.max_iters);
    if (result.report.stop_reason.empty())
        result.report.stop_reason = "max_iters";
    result.report.best_val_nmse_db = best_db;
    result.model = *last_good;
    return result;
}

} // namespace qcs
