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

#include "qcs.h"

#include <cstring>
#include <exception>
#include <fstream>
#include <string>
#include <vector>

#include "qcs/config.hpp"
#include "qcs/errors.hpp"
#include "qcs/experiment.hpp"
#include "qcs/serialize.hpp"

struct qcs_config {
    qcs::FlatConfig flat;
};

struct qcs_dataset {
    qcs::Dataset data;
};

struct qcs_model {
    qcs::Checkpoint ckpt;
};

namespace {

thread_local std::string g_last_error;

struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

qcs_status fail(qcs_status status, const char* message)
{
    g_last_error = message;
    return status;
}

template <typename F>
qcs_status guarded(F&& body) noexcept
{
    try {
        g_last_error.clear();
        body();
        return QCS_OK;
    } catch (const ArgumentError& e) {
        return fail(QCS_ERR_ARGUMENT, e.what());
    } catch (const qcs::ConfigError& e) {
        return fail(QCS_ERR_CONFIG, e.what());
    } catch (const qcs::ShapeError& e) {
        return fail(QCS_ERR_SHAPE, e.what());
    } catch (const qcs::DomainError& e) {
        return fail(QCS_ERR_DOMAIN, e.what());
    } catch (const qcs::ProtocolError& e) {
        return fail(QCS_ERR_PROTOCOL, e.what());
    } catch (const qcs::StateError& e) {
        return fail(QCS_ERR_STATE, e.what());
    } catch (const qcs::DivergenceError& e) {
        return fail(QCS_ERR_DIVERGED, e.what());
    } catch (const qcs::IoError& e) {
        return fail(QCS_ERR_IO, e.what());
    } catch (const qcs::FormatError& e) {
        return fail(QCS_ERR_FORMAT, e.what());
    } catch (const std::exception& e) {
        return fail(QCS_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(QCS_ERR_INTERNAL, "unknown error");
    }
}

void need(const void* p, const char* what)
{
    if (!p)
        throw ArgumentError(std::string(what) + " must not be NULL");
}

qcs::ProgressLog make_log(qcs_log_fn fn, void* user)
{
    if (!fn)
        return {};
    return [fn, user](const std::string& msg) { fn(msg.c_str(), user); };
}

qcs::ExperimentConfig experiment_of(const qcs_config* cfg)
{
    need(cfg, "config");
    return qcs::experiment_config_from(cfg->flat);
}

} // namespace

extern "C" {

const char* qcs_version(void)
{
    return QCS_VERSION_STRING;
}

const char* qcs_status_string(qcs_status status)
{
    switch (status) {
    case QCS_OK: return "ok";
    case QCS_ERR_CONFIG: return "configuration error";
    case QCS_ERR_SHAPE: return "shape error";
    case QCS_ERR_DOMAIN: return "domain error";
    case QCS_ERR_PROTOCOL: return "protocol error";
    case QCS_ERR_STATE: return "state error";
    case QCS_ERR_DIVERGED: return "training diverged";
    case QCS_ERR_IO: return "i/o error";
    case QCS_ERR_FORMAT: return "format error";
    case QCS_ERR_ARGUMENT: return "invalid argument";
    case QCS_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* qcs_last_error(void)
{
    return g_last_error.c_str();
}

// ------------------------------------------------------------- config

qcs_status qcs_config_load(const char* path, qcs_config** out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new qcs_config{qcs::FlatConfig::load(path)};
    });
}

qcs_status qcs_config_parse(const char* text, qcs_config** out)
{
    return guarded([&] {
        need(text, "text");
        need(out, "out");
        *out = new qcs_config{qcs::FlatConfig::parse(text)};
    });
}

qcs_status qcs_config_set(qcs_config* cfg, const char* key, const char* value)
{
    return guarded([&] {
        need(cfg, "config");
        need(key, "key");
        need(value, "value");
        cfg->flat.set(key, value);
    });
}

qcs_status qcs_config_get(const qcs_config* cfg, const char* key, char* buf, size_t cap, size_t* needed)
{
    return guarded([&] {
        need(cfg, "config");
        need(key, "key");
        const auto it = cfg->flat.entries().find(key);
        if (it == cfg->flat.entries().end())
            throw qcs::ConfigError(std::string("no such key: ") + key);
        const std::string& v = it->second;
        if (needed)
            *needed = v.size() + 1;
        if (!buf || cap < v.size() + 1)
            throw ArgumentError("buffer too small for the value of " + std::string(key));
        std::memcpy(buf, v.c_str(), v.size() + 1);
    });
}

qcs_status qcs_config_validate(const qcs_config* cfg)
{
    return guarded([&] { (void)experiment_of(cfg); });
}

void qcs_config_free(qcs_config* cfg)
{
    delete cfg;
}

// ------------------------------------------------------------ dataset

qcs_status qcs_dataset_generate(const qcs_config* cfg, const char* split, qcs_dataset** out)
{
    return guarded([&] {
        need(split, "split");
        need(out, "out");
        const qcs::ExperimentConfig ec = experiment_of(cfg);
        *out = new qcs_dataset{qcs::make_split(ec, split, ec.seeds.front())};
    });
}

qcs_status qcs_dataset_load(const char* path, qcs_dataset** out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new qcs_dataset{qcs::load_dataset(path)};
    });
}

qcs_status qcs_dataset_save(const qcs_dataset* data, const char* path)
{
    return guarded([&] {
        need(data, "dataset");
        need(path, "path");
        qcs::save_dataset(data->data, path);
    });
}

qcs_status qcs_dataset_info(const qcs_dataset* data, size_t* n, size_t* m, size_t* s, size_t* count)
{
    return guarded([&] {
        need(data, "dataset");
        if (n)
            *n = data->data.n_dim();
        if (m)
            *m = data->data.m_dim();
        if (s)
            *s = data->data.sparsity;
        if (count)
            *count = data->data.count();
    });
}

qcs_status qcs_dataset_sample(const qcs_dataset* data, size_t k, double* x_out, double* y_out)
{
    return guarded([&] {
        need(data, "dataset");
        if (k >= data->data.count())
            throw qcs::ShapeError("sample index out of range");
        const auto col = static_cast<Eigen::Index>(k);
        if (x_out)
            Eigen::Map<Eigen::VectorXd>(x_out, data->data.sources.rows()) = data->data.sources.col(col);
        if (y_out)
            Eigen::Map<Eigen::VectorXd>(y_out, data->data.measurements.rows()) = data->data.measurements.col(col);
    });
}

void qcs_dataset_free(qcs_dataset* data)
{
    delete data;
}

// -------------------------------------------------------------- model

qcs_status qcs_train(const qcs_config* cfg, const char* method, size_t k, size_t levels, qcs_log_fn log,
                     void* user, qcs_model** out)
{
    return guarded([&] {
        need(method, "method");
        need(out, "out");
        const qcs::ExperimentConfig ec = experiment_of(cfg);
        const qcs::Method m = qcs::parse_method(method);
        if (!qcs::is_learned(m))
            throw qcs::ConfigError(std::string(method) + " is not a trained method");

        qcs::RatePoint p;
        p.method = m;
        p.k_width = m == qcs::Method::ce_decnet ? ec.m_dim : (k ? k : ec.deep_k.front());
        p.levels = levels;
        if (levels == 0) {
            qcs::ExperimentConfig one = ec;
            one.deep_k = {p.k_width};
            const auto points = qcs::rate_points(one, m);
            if (points.empty())
                throw qcs::ConfigError("no rate point configured; set experiment.rates or pass levels");
            p = points.front();
        }
        p.rate = qcs::rate_bits(p.k_width, p.levels, ec.n_dim);

        qcs::TrainConfig tc = m == qcs::Method::deepvqcs
                                  ? ec.deep_train
                                  : (m == qcs::Method::deepvqcs_ste ? ec.ste_train : ec.decnet_train);
        qcs::ModelSpec spec = qcs::default_model_spec(ec.n_dim, ec.m_dim, p.k_width, p.levels);
        if (!tc.model.enc_hidden.empty())
            spec.enc_hidden = tc.model.enc_hidden;
        if (!tc.model.dec_hidden.empty())
            spec.dec_hidden = tc.model.dec_hidden;
        if (m == qcs::Method::ce_decnet) {
            spec.encoder_passthrough = true;
            spec.enc_hidden.clear();
        }
        tc.model = spec;
        const std::uint64_t seed = ec.seeds.front();
        tc.seed = qcs::derive_seed(seed, tc.seed * 0x10000 + p.k_width * 0x100 + p.levels);

        const qcs::Splits splits = qcs::make_splits(ec, seed);
        qcs::TrainObserver observer;
        if (log)
            observer = [&](const qcs::TrainRecord& r) {
                const std::string msg = "it=" + std::to_string(r.iteration) + " h=" + std::to_string(r.steepness) +
                                        " beta=" + std::to_string(r.blend) + " cost=" + std::to_string(r.train_cost) +
                                        " val=" + std::to_string(r.val_nmse_db) + " dB";
                log(msg.c_str(), user);
            };
        qcs::TrainResult tr = qcs::train(tc, splits.train, splits.validation, observer);
        *out = new qcs_model{qcs::Checkpoint{std::move(tr.model), tr.report.best_iteration, ec.source_text}};
    });
}

qcs_status qcs_model_load(const char* path, qcs_model** out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new qcs_model{qcs::load_checkpoint(path)};
    });
}

qcs_status qcs_model_save(const qcs_model* model, const char* path)
{
    return guarded([&] {
        need(model, "model");
        need(path, "path");
        qcs::save_checkpoint(model->ckpt, path);
    });
}

qcs_status qcs_model_info(const qcs_model* model, size_t* m, size_t* k, size_t* n, size_t* levels)
{
    return guarded([&] {
        need(model, "model");
        const qcs::DeepVqcsModel& md = model->ckpt.model;
        if (m)
            *m = md.m_dim();
        if (k)
            *k = md.k_width();
        if (n)
            *n = md.n_dim();
        if (levels)
            *levels = md.num_levels();
    });
}

qcs_status qcs_model_compress(const qcs_model* model, const double* y, size_t m, uint32_t* indices, size_t k)
{
    return guarded([&] {
        need(model, "model");
        need(y, "y");
        need(indices, "indices");
        const qcs::DeepVqcsModel& md = model->ckpt.model;
        if (k != md.k_width())
            throw qcs::ShapeError("index buffer length must equal K = " + std::to_string(md.k_width()));
        const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(y, static_cast<Eigen::Index>(m));
        const auto idx = qcs::compress(md, v);
        std::copy(idx.begin(), idx.end(), indices);
    });
}

qcs_status qcs_model_reconstruct(const qcs_model* model, const uint32_t* indices, size_t k, double* x, size_t n)
{
    return guarded([&] {
        need(model, "model");
        need(indices, "indices");
        need(x, "x");
        const qcs::DeepVqcsModel& md = model->ckpt.model;
        if (n != md.n_dim())
            throw qcs::ShapeError("output buffer length must equal N = " + std::to_string(md.n_dim()));
        const Eigen::VectorXd out = qcs::reconstruct(md, std::span<const uint32_t>(indices, k));
        Eigen::Map<Eigen::VectorXd>(x, out.size()) = out;
    });
}

qcs_status qcs_model_evaluate(const qcs_model* model, const qcs_dataset* data, double* nmse_db)
{
    return guarded([&] {
        need(model, "model");
        need(data, "dataset");
        need(nmse_db, "nmse_db");
        *nmse_db = qcs::validate_hard(model->ckpt.model, data->data);
    });
}

qcs_status qcs_evaluate_to_csv(const qcs_model* model, const qcs_dataset* data, const char* ckpt_path,
                               const char* csv_path)
{
    return guarded([&] {
        need(model, "model");
        need(data, "dataset");
        need(csv_path, "csv_path");
        const qcs::DeepVqcsModel& md = model->ckpt.model;
        const qcs::PipelineResult r = qcs::evaluate_model(md, data->data);
        qcs::ResultRow row;
        row.method = md.enc_net ? "DeepVQCS" : "CE-DecNet";
        row.n_dim = md.n_dim();
        row.m_dim = md.m_dim();
        row.sparsity = data->data.sparsity;
        row.rate = r.rate;
        row.nmse_db = r.nmse_db;
        row.encode_time = r.encode_seconds;
        row.decode_time = r.decode_seconds;
        row.total_time = r.encode_seconds + r.decode_seconds;
        row.seed = data->data.seed;
        row.checkpoint = ckpt_path ? ckpt_path : "";
        qcs::write_results_csv(csv_path, {row});
    });
}

void qcs_model_free(qcs_model* model)
{
    delete model;
}

// -------------------------------------------------------- experiments

qcs_status qcs_run_baselines(const qcs_config* cfg, const char* csv_path, qcs_log_fn log, void* user)
{
    return guarded([&] {
        qcs::ExperimentConfig ec = experiment_of(cfg);
        std::erase_if(ec.methods, qcs::is_learned);
        if (ec.methods.empty())
            throw qcs::ConfigError("no baseline methods configured");
        if (csv_path)
            ec.csv_path = csv_path;
        (void)qcs::run_experiment(ec, make_log(log, user));
    });
}

qcs_status qcs_run_sweep(const qcs_config* cfg, const char* csv_path, qcs_log_fn log, void* user)
{
    return guarded([&] {
        qcs::ExperimentConfig ec = experiment_of(cfg);
        if (ec.methods.empty())
            throw qcs::ConfigError("no methods configured");
        if (csv_path)
            ec.csv_path = csv_path;
        (void)qcs::run_experiment(ec, make_log(log, user));
    });
}

qcs_status qcs_bench_time(const qcs_config* cfg, const char* const* ckpt_paths, size_t count, const char* csv_path,
                          qcs_log_fn log, void* user)
{
    return guarded([&] {
        need(csv_path, "csv_path");
        if (count)
            need(ckpt_paths, "ckpt_paths");
        const qcs::ExperimentConfig ec = experiment_of(cfg);
        std::vector<std::string> paths;
        for (size_t i = 0; i < count; ++i) {
            need(ckpt_paths[i], "checkpoint path");
            paths.emplace_back(ckpt_paths[i]);
        }
        qcs::write_timing_csv(csv_path, qcs::bench_runtime(ec, paths, make_log(log, user)));
    });
}

qcs_status qcs_rate_bits(size_t k, size_t levels, size_t n, double* out)
{
    return guarded([&] {
        need(out, "out");
        *out = qcs::rate_bits(k, levels, n);
    });
}

} // extern "C"
