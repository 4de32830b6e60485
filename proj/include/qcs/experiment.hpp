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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qcs/baselines.hpp"
#include "qcs/config.hpp"
#include "qcs/signal_model.hpp"
#include "qcs/trainer.hpp"

namespace qcs {

/// Method identifiers accepted in `methods = ...`.
enum class Method {
    deepvqcs,
    deepvqcs_ste,  ///< fixed h = 400, pure straight-through gradient
    ce_usq_omp,
    ce_usq_l1,
    ce_sq_l1,      ///< Lloyd-Max scalar quantizers, BPDN decoder
    ce_vq_l1,      ///< Lloyd VQ on raw measurements, BPDN decoder
    ce_decnet,
    ec_vq
};

std::string method_key(Method m);    ///< config spelling, e.g. "ce-usq-l1"
std::string method_label(Method m);  ///< CSV spelling, e.g. "CE-USQ-L1"
Method parse_method(const std::string& key);
bool is_learned(Method m);

/// One (method, rate) design point with its resolution.
struct RatePoint {
    Method method = Method::deepvqcs;
    double rate = 0.0;
    std::size_t k_width = 0;   ///< number of scalar indices (0 for VQ rows)
    std::size_t levels = 0;    ///< I (0 for VQ rows)
    unsigned codebook_bits = 0;
};

struct ExperimentConfig {
    std::size_t n_dim = 20;
    std::size_t m_dim = 10;
    std::size_t sparsity = 2;
    double noise_variance = 1e-4;
    bool exact_sparsity = true;

    std::size_t train_size = 20000;
    std::size_t val_size = 2000;
    std::size_t test_size = 10000;
    std::vector<std::uint64_t> seeds{1};

    std::vector<Method> methods;
    std::vector<double> rates;

    /// DeepVQCS encoder output widths; one row per K at every rate.
    std::vector<std::size_t> deep_k;
    /// Explicit level counts replacing the rate axis for a method family.
    std::vector<std::size_t> deep_levels;
    std::vector<std::size_t> ce_levels;
    std::vector<unsigned> vq_bits;

    TrainConfig deep_train;
    TrainConfig ste_train;
    TrainConfig decnet_train;

    double usq_sigmas = 4.0;
    std::optional<double> mu_qc;
    LloydOptions lloyd;
    std::size_t vq_train_size = 0;
    BpdnOptions bpdn;
    EcVqOptions ecvq;

    std::string csv_path;
    std::string checkpoint_dir;

    std::size_t bench_repetitions = 100;
    std::size_t bench_warmup = 10;
    double bench_rate = 1.0;
    std::vector<Method> bench_methods;

    std::string source_text;  ///< the parsed configuration, echoed into checkpoints

    /// Throws ConfigError for inconsistent settings, including rate points
    /// that no integer resolution reaches exactly.
    void validate() const;
};

/// Reads every known key; unknown keys raise ConfigError.
ExperimentConfig experiment_config_from(const FlatConfig& cfg);
ExperimentConfig load_experiment_config(const std::string& path);

/// Trainer settings for `prefix` ("deepvqcs", "ce-decnet", ...): a key
/// `<prefix>.<name>` overrides `train.<name>`.
TrainConfig train_config_from(const FlatConfig& cfg, const std::string& prefix, TrainConfig base);

/// Design points of one method over the configured rate axis.
std::vector<RatePoint> rate_points(const ExperimentConfig& cfg, Method m);

struct Splits {
    MeasurementModel model;
    Dataset train;
    Dataset validation;
    Dataset test;
};

/// Splits drawn from independent streams derived from `seed`.
Splits make_splits(const ExperimentConfig& cfg, std::uint64_t seed);
/// Same, for one named split ("train", "val" or "test").
Dataset make_split(const ExperimentConfig& cfg, const std::string& split, std::uint64_t seed);
MeasurementModel make_model(const ExperimentConfig& cfg);

struct ResultRow {
    std::string method;
    std::size_t n_dim = 0;
    std::size_t m_dim = 0;
    std::size_t sparsity = 0;
    double rate = 0.0;
    double nmse_db = 0.0;
    double encode_time = 0.0;  ///< seconds per measurement vector
    double decode_time = 0.0;
    double total_time = 0.0;
    std::uint64_t seed = 0;
    std::string checkpoint;    ///< path, empty, or "failed:<reason>"

    // Not written to CSV.
    std::size_t k_width = 0;
    std::size_t levels = 0;
    unsigned codebook_bits = 0;

    bool failed() const { return checkpoint.rfind("failed:", 0) == 0; }
};

/// Fixed CSV column order.
const std::vector<std::string>& result_columns();
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const ResultRow& row);
void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(const std::string& path);
std::vector<ResultRow> parse_results_csv(std::istream& in);

/// Per-sample compress and reconstruct over the whole split.
PipelineResult evaluate_model(const DeepVqcsModel& model, const Dataset& data);

using ProgressLog = std::function<void(const std::string&)>;

/// Trains or designs every configured method at every rate point on the
/// shared splits of each seed. A failing point yields a failed row and the
/// run continues. Writes the CSV when csv_path is set.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, const ProgressLog& log = {});

/// Runs one design point on prepared splits.
ResultRow run_point(const ExperimentConfig& cfg, const RatePoint& point, const Splits& splits,
                    std::uint64_t seed, const ProgressLog& log = {});

struct TimingRow {
    std::string method;
    double encode_median = 0.0;
    double decode_median = 0.0;
    double total_median = 0.0;
    double encode_ratio = 0.0;  ///< relative to the DeepVQCS row, NaN without one
    double decode_ratio = 0.0;
    double total_ratio = 0.0;
};

/// Median single-vector times over `repetitions` after `warmup` passes.
struct TimingSample {
    double encode = 0.0;
    double decode = 0.0;
    double total = 0.0;
};
TimingSample median_timing(const std::function<void(std::size_t)>& encode_step,
                           const std::function<void(std::size_t)>& decode_step, std::size_t repetitions,
                           std::size_t warmup);

/// Online-phase timing table. Learned methods come from checkpoints (a
/// pass-through encoder marks a CE-DecNet checkpoint); missing or unreadable
/// checkpoints are skipped with a warning through `log`. Classical decoders
/// are designed on the training split at bench_rate.
std::vector<TimingRow> bench_runtime(const ExperimentConfig& cfg, const std::vector<std::string>& ckpt_paths,
                                     const ProgressLog& log = {});
void write_timing_csv(const std::string& path, const std::vector<TimingRow>& rows);

} // namespace qcs
