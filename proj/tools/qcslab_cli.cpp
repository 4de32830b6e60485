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

// Command-line front end; talks to the library only through qcs.h.

#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "qcs.h"

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::vector<std::string> overrides;
    bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c, bool config_required)
{
    auto* opt = cmd->add_option("--config", c.config, "Configuration file (flat dotted keys)");
    if (config_required)
        opt->required()->check(CLI::ExistingFile);
    else
        opt->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.seed, "Replaces experiment.seeds with this single seed");
    cmd->add_option("--set", c.overrides, "Override a config entry, key=value (repeatable)");
    cmd->add_flag("-q,--quiet", c.quiet, "Suppress progress messages");
}

void print_log(const char* message, void*)
{
    std::fprintf(stderr, "%s\n", message);
}

class Failure : public std::exception {
public:
    explicit Failure(qcs_status s) : status(s) {}
    qcs_status status;
};

void check(qcs_status s)
{
    if (s != QCS_OK)
        throw Failure(s);
}

struct Config {
    qcs_config* handle = nullptr;
    ~Config() { qcs_config_free(handle); }
};

void open_config(const Common& c, Config& cfg)
{
    if (c.config.empty())
        check(qcs_config_parse("", &cfg.handle));
    else
        check(qcs_config_load(c.config.c_str(), &cfg.handle));
    for (const auto& kv : c.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--set", "expected key=value, got '" + kv + "'");
        check(qcs_config_set(cfg.handle, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
    }
    if (c.seed)
        check(qcs_config_set(cfg.handle, "experiment.seeds", std::to_string(*c.seed).c_str()));
}

qcs_log_fn logger(const Common& c)
{
    return c.quiet ? nullptr : print_log;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"qcslab: quantized compressed sensing experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(qcs_version()));

    Common gen, tr, ev, base, sweep, bench;

    std::string split = "train";
    auto* gen_cmd = app.add_subcommand("gen-data", "Generate a dataset split");
    add_common(gen_cmd, gen, true);
    gen_cmd->add_option("--split", split, "train, val or test")->check(CLI::IsMember({"train", "val", "test"}));
    gen_cmd->add_option("--out", gen.out, "Dataset file")->required();

    std::string method = "deepvqcs";
    std::size_t k = 0;
    std::size_t levels = 0;
    auto* train_cmd = app.add_subcommand("train", "Train a DeepVQCS or CE-DecNet model");
    add_common(train_cmd, tr, true);
    train_cmd->add_option("--method", method, "deepvqcs, deepvqcs-ste or ce-decnet");
    train_cmd->add_option("--k", k, "Encoder output width (default: first deepvqcs.k)");
    train_cmd->add_option("--levels", levels, "Quantizer levels I (default: first rate point)");
    train_cmd->add_option("--out", tr.out, "Checkpoint file")->required();

    std::string ckpt;
    std::string data;
    auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a checkpoint on a dataset");
    add_common(eval_cmd, ev, false);
    eval_cmd->add_option("--ckpt", ckpt, "Checkpoint file")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--data", data, "Dataset file (default: test split from --config)");
    eval_cmd->add_option("--csv,--out", ev.out, "Results CSV")->required();

    auto* base_cmd = app.add_subcommand("baseline", "Run the configured classical baselines");
    add_common(base_cmd, base, true);
    base_cmd->add_option("--out", base.out, "Results CSV");

    auto* sweep_cmd = app.add_subcommand("sweep", "Run every configured method at every rate");
    add_common(sweep_cmd, sweep, true);
    sweep_cmd->add_option("--out", sweep.out, "Results CSV");

    std::vector<std::string> ckpts;
    auto* bench_cmd = app.add_subcommand("bench-time", "Online-phase timing table");
    add_common(bench_cmd, bench, true);
    bench_cmd->add_option("--ckpt", ckpts, "Checkpoints of trained models (repeatable)");
    bench_cmd->add_option("--out", bench.out, "Timing CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        Config cfg;
        if (gen_cmd->parsed()) {
            open_config(gen, cfg);
            qcs_dataset* d = nullptr;
            check(qcs_dataset_generate(cfg.handle, split.c_str(), &d));
            const qcs_status s = qcs_dataset_save(d, gen.out.c_str());
            qcs_dataset_free(d);
            check(s);
        } else if (train_cmd->parsed()) {
            open_config(tr, cfg);
            qcs_model* m = nullptr;
            check(qcs_train(cfg.handle, method.c_str(), k, levels, logger(tr), nullptr, &m));
            const qcs_status s = qcs_model_save(m, tr.out.c_str());
            qcs_model_free(m);
            check(s);
        } else if (eval_cmd->parsed()) {
            qcs_model* m = nullptr;
            qcs_dataset* d = nullptr;
            check(qcs_model_load(ckpt.c_str(), &m));
            qcs_status s = QCS_OK;
            if (!data.empty()) {
                s = qcs_dataset_load(data.c_str(), &d);
            } else if (!ev.config.empty()) {
                open_config(ev, cfg);
                s = qcs_dataset_generate(cfg.handle, "test", &d);
            } else {
                std::fprintf(stderr, "evaluate needs --data or --config\n");
                qcs_model_free(m);
                return 2;
            }
            if (s == QCS_OK)
                s = qcs_evaluate_to_csv(m, d, ckpt.c_str(), ev.out.c_str());
            qcs_dataset_free(d);
            qcs_model_free(m);
            check(s);
        } else if (base_cmd->parsed()) {
            open_config(base, cfg);
            check(qcs_run_baselines(cfg.handle, base.out.empty() ? nullptr : base.out.c_str(), logger(base),
                                    nullptr));
        } else if (sweep_cmd->parsed()) {
            open_config(sweep, cfg);
            check(qcs_run_sweep(cfg.handle, sweep.out.empty() ? nullptr : sweep.out.c_str(), logger(sweep),
                                nullptr));
        } else if (bench_cmd->parsed()) {
            open_config(bench, cfg);
            std::vector<const char*> paths;
            for (const auto& p : ckpts)
                paths.push_back(p.c_str());
            check(qcs_bench_time(cfg.handle, paths.data(), paths.size(), bench.out.c_str(), logger(bench),
                                 nullptr));
        }
    } catch (const Failure& f) {
        std::fprintf(stderr, "error (%s): %s\n", qcs_status_string(f.status), qcs_last_error());
        return static_cast<int>(f.status);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    }
    return 0;
}
