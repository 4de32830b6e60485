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

#include "qcs/experiment.hpp"

#include <boost/tokenizer.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "qcs/errors.hpp"
#include "qcs/serialize.hpp"

namespace qcs {

namespace {

struct MethodName {
    Method method;
    const char* key;
    const char* label;
};

constexpr MethodName kMethods[] = {
    {Method::deepvqcs, "deepvqcs", "DeepVQCS"},
    {Method::deepvqcs_ste, "deepvqcs-ste", "DeepVQCS-STE"},
    {Method::ce_usq_omp, "ce-usq-omp", "CE-USQ-OMP"},
    {Method::ce_usq_l1, "ce-usq-l1", "CE-USQ-L1"},
    {Method::ce_sq_l1, "ce-sq-l1", "CE-SQ-L1"},
    {Method::ce_vq_l1, "ce-vq-l1", "CE-VQ-L1"},
    {Method::ce_decnet, "ce-decnet", "CE-DecNet"},
    {Method::ec_vq, "ec-vq", "EC-VQ"},
};

const MethodName& name_of(Method m)
{
    for (const auto& n : kMethods)
        if (n.method == m)
            return n;
    throw ConfigError("unknown method");
}

bool uses_vq_rate(Method m)
{
    return m == Method::ce_vq_l1 || m == Method::ec_vq;
}

// Level count 2^b reaching `rate` with k indices, or nullopt.
std::optional<std::size_t> levels_for_rate(double rate, std::size_t k, std::size_t n)
{
    const double bits = rate * static_cast<double>(n) / static_cast<double>(k);
    const double rounded = std::round(bits);
    if (rounded < 1.0 || rounded > 30.0 || std::abs(bits - rounded) > 1e-9)
        return std::nullopt;
    const std::size_t levels = std::size_t{1} << static_cast<unsigned>(rounded);
    if (rate_bits(k, levels, n) != rate)
        return std::nullopt;
    return levels;
}

std::string rate_text(double r)
{
    return format_double(r);
}

std::vector<Method> parse_methods(const std::vector<std::string>& keys)
{
    std::vector<Method> out;
    for (const auto& k : keys)
        out.push_back(parse_method(k));
    return out;
}

SteepnessRule parse_rule(const std::string& s)
{
    if (s == "linear")
        return SteepnessRule::linear;
    if (s == "stepped100")
        return SteepnessRule::stepped100;
    throw ConfigError("steepness_rule must be linear or stepped100, got '" + s + "'");
}

// CSV fields use backslash escapes inside double quotes.
std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\\\n\r") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        if (c == '\n' || c == '\r')
            c = ' ';
        out += c;
    }
    return out + "\"";
}

double elapsed(std::chrono::steady_clock::time_point a, std::chrono::steady_clock::time_point b)
{
    return std::chrono::duration<double>(b - a).count();
}

double median(std::vector<double> v)
{
    if (v.empty())
        return std::numeric_limits<double>::quiet_NaN();
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2)
        return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

ModelSpec learned_spec(const ExperimentConfig& cfg, const TrainConfig& tc, const RatePoint& p)
{
    ModelSpec spec = default_model_spec(cfg.n_dim, cfg.m_dim, p.k_width, p.levels);
    if (!tc.model.enc_hidden.empty())
        spec.enc_hidden = tc.model.enc_hidden;
    if (!tc.model.dec_hidden.empty())
        spec.dec_hidden = tc.model.dec_hidden;
    if (p.method == Method::ce_decnet) {
        spec.encoder_passthrough = true;
        spec.enc_hidden.clear();
    }
    return spec;
}

CePipelineSpec ce_spec(const ExperimentConfig& cfg, const RatePoint& p, std::uint64_t seed)
{
    CePipelineSpec s;
    switch (p.method) {
    case Method::ce_usq_omp:
        s.quantizer = CeQuantizerKind::uniform_sq;
        s.decoder = CeDecoderKind::omp;
        break;
    case Method::ce_usq_l1:
        s.quantizer = CeQuantizerKind::uniform_sq;
        s.decoder = CeDecoderKind::bpdn;
        break;
    case Method::ce_sq_l1:
        s.quantizer = CeQuantizerKind::lloyd_sq;
        s.decoder = CeDecoderKind::bpdn;
        break;
    case Method::ce_vq_l1:
        s.quantizer = CeQuantizerKind::lloyd_vq;
        s.decoder = CeDecoderKind::bpdn;
        break;
    default:
        throw ConfigError("not a compress-and-estimate method: " + method_key(p.method));
    }
    s.levels = p.levels;
    s.codebook_bits = p.codebook_bits;
    s.usq_range_sigmas = cfg.usq_sigmas;
    s.mu_qc_override = cfg.mu_qc;
    s.lloyd = cfg.lloyd;
    s.vq_train_size = cfg.vq_train_size;
    s.bpdn = cfg.bpdn;
    s.seed = derive_seed(seed, 0x5eed);
    return s;
}

} // namespace

std::string method_key(Method m)
{
    return name_of(m).key;
}

std::string method_label(Method m)
{
    return name_of(m).label;
}

Method parse_method(const std::string& key)
{
    for (const auto& n : kMethods)
        if (key == n.key)
            return n.method;
    std::string known;
    for (const auto& n : kMethods)
        known += std::string(known.empty() ? "" : ", ") + n.key;
    throw ConfigError("unknown method '" + key + "' (known: " + known + ")");
}

bool is_learned(Method m)
{
    return m == Method::deepvqcs || m == Method::deepvqcs_ste || m == Method::ce_decnet;
}

// ------------------------------------------------------------- config

TrainConfig train_config_from(const FlatConfig& cfg, const std::string& prefix, TrainConfig base)
{
    auto key = [&](const std::string& name) {
        const std::string own = prefix + "." + name;
        const std::string global = "train." + name;
        // Read both so neither is reported as unknown.
        const bool has_own = cfg.has(own);
        if (cfg.has(global) && has_own)
            (void)cfg.raw(global);
        return has_own ? own : global;
    };
    TrainConfig t = base;
    t.batch_size = cfg.get_size(key("batch_size"), t.batch_size);
    t.max_iters = cfg.get_u64(key("max_iters"), t.max_iters);
    t.anneal.h_init = cfg.get_double(key("h_init"), t.anneal.h_init);
    t.anneal.h_max = cfg.get_double(key("h_max"), t.anneal.h_max);
    t.anneal.alpha = cfg.get_double(key("alpha"), t.anneal.alpha);
    t.anneal.beta = cfg.get_double(key("beta"), t.anneal.beta);
    if (const auto rule = cfg.raw(key("steepness_rule")))
        t.anneal.rule = parse_rule(*rule);
    t.weight_steps.eta_init = cfg.get_double(key("eta_w"), t.weight_steps.eta_init);
    t.weight_steps.eta_min = cfg.get_double(key("eta_w_min"), t.weight_steps.eta_min);
    t.level_steps.eta_init = cfg.get_double(key("eta_v"), t.level_steps.eta_init);
    t.level_steps.eta_min = cfg.get_double(key("eta_v_min"), t.level_steps.eta_min);
    t.shift_steps.eta_init = cfg.get_double(key("eta_s"), t.shift_steps.eta_init);
    t.shift_steps.eta_min = cfg.get_double(key("eta_s_min"), t.shift_steps.eta_min);
    t.learn_shifts = cfg.get_bool(key("learn_shifts"), t.learn_shifts);
    t.validation_period = cfg.get_u64(key("validation_period"), t.validation_period);
    t.patience = cfg.get_size(key("patience"), t.patience);
    t.min_improvement_db = cfg.get_double(key("min_improvement_db"), t.min_improvement_db);
    t.seed = cfg.get_u64(key("seed"), t.seed);
    t.model.enc_hidden = cfg.get_sizes(key("enc_hidden"), t.model.enc_hidden);
    t.model.dec_hidden = cfg.get_sizes(key("dec_hidden"), t.model.dec_hidden);
    return t;
}

ExperimentConfig experiment_config_from(const FlatConfig& f)
{
    ExperimentConfig c;
    c.source_text = f.to_text();
    c.n_dim = f.get_size("signal.n", c.n_dim);
    c.m_dim = f.get_size("signal.m", c.m_dim);
    c.sparsity = f.get_size("signal.s", c.sparsity);
    c.noise_variance = f.get_double("signal.noise_variance", c.noise_variance);
    c.exact_sparsity = f.get_bool("signal.exact_sparsity", c.exact_sparsity);

    c.train_size = f.get_size("data.train_size", c.train_size);
    c.val_size = f.get_size("data.val_size", c.val_size);
    c.test_size = f.get_size("data.test_size", c.test_size);
    c.seeds = f.get_u64s("experiment.seeds", c.seeds);

    c.methods = parse_methods(f.get_strings("experiment.methods", {}));
    c.rates = f.get_doubles("experiment.rates", c.rates);

    c.deep_k = f.get_sizes("deepvqcs.k", {c.m_dim});
    c.deep_levels = f.get_sizes("deepvqcs.levels", {});
    c.ce_levels = f.get_sizes("ce.levels", {});
    for (std::size_t b : f.get_sizes("vq.bits", {}))
        c.vq_bits.push_back(static_cast<unsigned>(b));

    c.deep_train = train_config_from(f, "deepvqcs", TrainConfig{});
    TrainConfig ste = train_config_from(f, "deepvqcs-ste", TrainConfig{});
    if (!f.has("deepvqcs-ste.h_init"))
        ste.anneal.h_init = 400.0;
    if (!f.has("deepvqcs-ste.h_max"))
        ste.anneal.h_max = 400.0;
    if (!f.has("deepvqcs-ste.alpha"))
        ste.anneal.alpha = 0.0;
    if (!f.has("deepvqcs-ste.beta"))
        ste.anneal.beta = 0.0;
    c.ste_train = ste;
    c.decnet_train = train_config_from(f, "ce-decnet", TrainConfig{});

    c.usq_sigmas = f.get_double("ce.usq_sigmas", c.usq_sigmas);
    if (const auto mu = f.raw("ce.mu_qc"); mu && *mu != "auto")
        c.mu_qc = parse_double(*mu, "ce.mu_qc");
    c.lloyd.tol = f.get_double("lloyd.tol", c.lloyd.tol);
    c.lloyd.max_iters = f.get_size("lloyd.max_iters", c.lloyd.max_iters);
    c.vq_train_size = f.get_size("vq.train_size", c.vq_train_size);
    c.bpdn.max_inner_iters = f.get_size("bpdn.max_inner_iters", c.bpdn.max_inner_iters);
    c.bpdn.inner_tol = f.get_double("bpdn.inner_tol", c.bpdn.inner_tol);
    c.bpdn.max_bisections = f.get_size("bpdn.max_bisections", c.bpdn.max_bisections);
    c.bpdn.residual_tol = f.get_double("bpdn.residual_tol", c.bpdn.residual_tol);
    c.ecvq.train_size = f.get_size("ec-vq.train_size", c.ecvq.train_size);
    c.ecvq.lloyd.tol = f.get_double("ec-vq.lloyd_tol", c.ecvq.lloyd.tol);
    c.ecvq.lloyd.max_iters = f.get_size("ec-vq.lloyd_max_iters", c.ecvq.lloyd.max_iters);

    c.csv_path = f.get_string("output.csv", c.csv_path);
    c.checkpoint_dir = f.get_string("output.checkpoint_dir", c.checkpoint_dir);

    c.bench_repetitions = f.get_size("bench.repetitions", c.bench_repetitions);
    c.bench_warmup = f.get_size("bench.warmup", c.bench_warmup);
    c.bench_rate = f.get_double("bench.rate", c.bench_rate);
    c.bench_methods = parse_methods(f.get_strings("bench.methods", {"ce-usq-omp", "ce-usq-l1"}));

    f.require_all_consumed();
    c.validate();
    return c;
}

ExperimentConfig load_experiment_config(const std::string& path)
{
    return experiment_config_from(FlatConfig::load(path));
}

void ExperimentConfig::validate() const
{
    if (n_dim == 0 || m_dim == 0)
        throw ConfigError("signal.n and signal.m must be positive");
    if (m_dim > n_dim)
        throw ConfigError("signal.m must not exceed signal.n");
    if (sparsity > n_dim)
        throw ConfigError("signal.s must not exceed signal.n");
    if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance))
        throw ConfigError("signal.noise_variance must be a finite non-negative number");
    if (train_size == 0 || val_size == 0 || test_size == 0)
        throw ConfigError("dataset sizes must be positive");
    if (seeds.empty())
        throw ConfigError("experiment.seeds must list at least one seed");
    for (double r : rates)
        if (!(r > 0.0))
            throw ConfigError("rates must be positive");
    if (bench_repetitions < 100)
        throw ConfigError("bench.repetitions must be at least 100");
    for (Method m : methods) {
        if (is_learned(m)) {
            const TrainConfig& t =
                m == Method::deepvqcs ? deep_train : (m == Method::deepvqcs_ste ? ste_train : decnet_train);
            if (t.batch_size == 0 || t.batch_size > train_size)
                throw ConfigError("batch size must lie in 1..data.train_size for " + method_key(m));
            t.anneal.validate();
        }
        (void)rate_points(*this, m);
    }
}

std::vector<RatePoint> rate_points(const ExperimentConfig& cfg, Method m)
{
    std::vector<RatePoint> out;
    if (uses_vq_rate(m)) {
        std::vector<unsigned> bits = cfg.vq_bits;
        if (bits.empty()) {
            for (double r : cfg.rates) {
                const double b = r * static_cast<double>(cfg.n_dim);
                const double rounded = std::round(b);
                if (std::abs(b - rounded) > 1e-9 || rounded > 40.0 ||
                    rounded / static_cast<double>(cfg.n_dim) != r)
                    throw ConfigError("rate " + rate_text(r) + " needs a whole number of codebook bits for " +
                                      method_key(m));
                bits.push_back(static_cast<unsigned>(rounded));
            }
        }
        for (unsigned b : bits) {
            RatePoint p;
            p.method = m;
            p.codebook_bits = b;
            p.rate = static_cast<double>(b) / static_cast<double>(cfg.n_dim);
            if (!(p.rate > 0.0))
                throw ConfigError("codebook bits must be positive for " + method_key(m));
            out.push_back(p);
        }
        return out;
    }

    const bool deep = m == Method::deepvqcs || m == Method::deepvqcs_ste;
    const std::vector<std::size_t> widths = deep ? cfg.deep_k : std::vector<std::size_t>{cfg.m_dim};
    const std::vector<std::size_t>& levels = deep ? cfg.deep_levels : cfg.ce_levels;
    for (std::size_t k : widths) {
        if (k == 0)
            throw ConfigError("deepvqcs.k must be positive");
        auto push = [&](std::size_t i) {
            if (i < 2)
                throw ConfigError("level counts must be at least 2 for " + method_key(m));
            RatePoint p;
            p.method = m;
            p.k_width = k;
            p.levels = i;
            p.rate = rate_bits(k, i, cfg.n_dim);
            out.push_back(p);
        };
        if (!levels.empty()) {
            for (std::size_t i : levels)
                push(i);
            continue;
        }
        for (double r : cfg.rates) {
            const auto i = levels_for_rate(r, k, cfg.n_dim);
            if (!i)
                throw ConfigError("rate " + rate_text(r) + " is not reachable as K ceil(log2 I) / N with K = " +
                                  std::to_string(k) + " for " + method_key(m));
            push(*i);
        }
    }
    return out;
}

// ------------------------------------------------------------- splits

MeasurementModel make_model(const ExperimentConfig& cfg)
{
    MeasurementModel model = make_measurement_matrix(cfg.n_dim, cfg.m_dim);
    model.noise_variance = cfg.noise_variance;
    return model;
}

namespace {

std::uint64_t split_tag(const std::string& split)
{
    if (split == "train")
        return 0x7261696e;
    if (split == "val")
        return 0x76616c;
    if (split == "test")
        return 0x74657374;
    throw ConfigError("split must be train, val or test, got '" + split + "'");
}

Dataset draw(const ExperimentConfig& cfg, const MeasurementModel& model, const std::string& split,
             std::uint64_t seed)
{
    SparseSourceSpec spec;
    spec.n_dim = cfg.n_dim;
    spec.sparsity = cfg.sparsity;
    spec.exact_sparsity = cfg.exact_sparsity;
    const std::size_t count =
        split == "train" ? cfg.train_size : (split == "val" ? cfg.val_size : cfg.test_size);
    return sample_dataset(model, spec, count, derive_seed(seed, split_tag(split)));
}

} // namespace

Dataset make_split(const ExperimentConfig& cfg, const std::string& split, std::uint64_t seed)
{
    return draw(cfg, make_model(cfg), split, seed);
}

Splits make_splits(const ExperimentConfig& cfg, std::uint64_t seed)
{
    Splits s;
    s.model = make_model(cfg);
    s.train = draw(cfg, s.model, "train", seed);
    s.validation = draw(cfg, s.model, "val", seed);
    s.test = draw(cfg, s.model, "test", seed);
    return s;
}

// ---------------------------------------------------------------- CSV

const std::vector<std::string>& result_columns()
{
    static const std::vector<std::string> cols{"method",      "n",           "m",          "s",
                                               "rate",        "nmse_db",     "encode_time", "decode_time",
                                               "total_time",  "seed",        "checkpoint"};
    return cols;
}

void write_csv_header(std::ostream& out)
{
    const auto& cols = result_columns();
    for (std::size_t i = 0; i < cols.size(); ++i)
        out << (i ? "," : "") << cols[i];
    out << '\n';
}

void write_csv_row(std::ostream& out, const ResultRow& r)
{
    out << csv_field(r.method) << ',' << r.n_dim << ',' << r.m_dim << ',' << r.sparsity << ','
        << format_double(r.rate) << ',' << format_double(r.nmse_db) << ',' << format_double(r.encode_time) << ','
        << format_double(r.decode_time) << ',' << format_double(r.total_time) << ',' << r.seed << ','
        << csv_field(r.checkpoint) << '\n';
}

void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path + " for writing");
    write_csv_header(out);
    for (const auto& r : rows)
        write_csv_row(out, r);
    out.flush();
    if (!out)
        throw IoError("write failed for " + path);
}

std::vector<ResultRow> parse_results_csv(std::istream& in)
{
    using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;
    std::vector<ResultRow> rows;
    std::string line;
    std::size_t line_no = 0;
    const std::size_t ncols = result_columns().size();
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::vector<std::string> f;
        try {
            Tokenizer tok(line);
            f.assign(tok.begin(), tok.end());
        } catch (const boost::escaped_list_error& e) {
            throw FormatError("CSV line " + std::to_string(line_no) + ": " + e.what());
        }
        if (f.size() != ncols)
            throw FormatError("CSV line " + std::to_string(line_no) + ": expected " + std::to_string(ncols) +
                              " fields, got " + std::to_string(f.size()));
        if (line_no == 1) {
            if (f != result_columns())
                throw FormatError("CSV header does not match the result schema");
            continue;
        }
        const std::string where = "CSV line " + std::to_string(line_no);
        try {
            ResultRow r;
            r.method = f[0];
            r.n_dim = static_cast<std::size_t>(parse_u64(f[1], where));
            r.m_dim = static_cast<std::size_t>(parse_u64(f[2], where));
            r.sparsity = static_cast<std::size_t>(parse_u64(f[3], where));
            r.rate = parse_double(f[4], where);
            r.nmse_db = parse_double(f[5], where);
            r.encode_time = parse_double(f[6], where);
            r.decode_time = parse_double(f[7], where);
            r.total_time = parse_double(f[8], where);
            r.seed = parse_u64(f[9], where);
            r.checkpoint = f[10];
            rows.push_back(std::move(r));
        } catch (const ConfigError& e) {
            throw FormatError(e.what());
        }
    }
    if (line_no == 0)
        throw FormatError("empty CSV");
    return rows;
}

std::vector<ResultRow> read_results_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path);
    return parse_results_csv(in);
}

// --------------------------------------------------------- evaluation

PipelineResult evaluate_model(const DeepVqcsModel& model, const Dataset& data)
{
    if (data.m_dim() != model.m_dim() || data.n_dim() != model.n_dim())
        throw ShapeError("dataset does not match the model dimensions");
    using clock = std::chrono::steady_clock;
    PipelineResult r;
    r.rate = rate_bits(model.k_width(), model.num_levels(), model.n_dim());
    double err = 0.0;
    double energy = 0.0;
    for (Eigen::Index k = 0; k < data.measurements.cols(); ++k) {
        const auto t0 = clock::now();
        const auto idx = compress(model, data.measurements.col(k));
        const auto t1 = clock::now();
        const Eigen::VectorXd xhat = reconstruct(model, idx);
        const auto t2 = clock::now();
        r.encode_seconds += elapsed(t0, t1);
        r.decode_seconds += elapsed(t1, t2);
        err += (xhat - data.sources.col(k)).squaredNorm();
        energy += data.sources.col(k).squaredNorm();
    }
    const auto count = static_cast<double>(data.count());
    r.nmse_db = nmse_db_from_sums(err, energy);
    r.encode_seconds /= count;
    r.decode_seconds /= count;
    return r;
}

ResultRow run_point(const ExperimentConfig& cfg, const RatePoint& point, const Splits& splits, std::uint64_t seed,
                    const ProgressLog& log)
{
    ResultRow row;
    row.method = method_label(point.method);
    if ((point.method == Method::deepvqcs || point.method == Method::deepvqcs_ste) && cfg.deep_k.size() > 1)
        row.method += "-K" + std::to_string(point.k_width);
    row.n_dim = cfg.n_dim;
    row.m_dim = cfg.m_dim;
    row.sparsity = cfg.sparsity;
    row.rate = point.rate;
    row.seed = seed;
    row.k_width = point.k_width;
    row.levels = point.levels;
    row.codebook_bits = point.codebook_bits;

    try {
        PipelineResult res;
        if (is_learned(point.method)) {
            TrainConfig tc = point.method == Method::deepvqcs
                                 ? cfg.deep_train
                                 : (point.method == Method::deepvqcs_ste ? cfg.ste_train : cfg.decnet_train);
            tc.model = learned_spec(cfg, tc, point);
            tc.seed = derive_seed(seed, tc.seed * 0x10000 + point.k_width * 0x100 + point.levels);
            TrainObserver observer;
            if (log)
                observer = [&](const TrainRecord& rec) {
                    std::ostringstream msg;
                    msg << row.method << " R=" << rate_text(point.rate) << " it=" << rec.iteration
                        << " h=" << rec.steepness << " beta=" << rec.blend << " cost=" << rec.train_cost
                        << " val=" << rec.val_nmse_db << " dB";
                    log(msg.str());
                };
            TrainResult tr = train(tc, splits.train, splits.validation, observer);
            res = evaluate_model(tr.model, splits.test);
            if (!cfg.checkpoint_dir.empty()) {
                std::filesystem::create_directories(cfg.checkpoint_dir);
                const std::string path = cfg.checkpoint_dir + "/" + method_key(point.method) + "_k" +
                                         std::to_string(point.k_width) + "_i" + std::to_string(point.levels) +
                                         "_s" + std::to_string(seed) + ".ckpt";
                save_checkpoint(Checkpoint{tr.model, tr.report.best_iteration, cfg.source_text}, path);
                row.checkpoint = path;
            }
        } else if (point.method == Method::ec_vq) {
            res = run_ec_vq(splits.model, splits.train, splits.test, point.codebook_bits, cfg.ecvq);
        } else {
            res = run_ce_baseline(ce_spec(cfg, point, seed), splits.model, splits.test, splits.train,
                                  &splits.validation);
        }
        row.nmse_db = res.nmse_db;
        row.encode_time = res.encode_seconds;
        row.decode_time = res.decode_seconds;
        row.total_time = res.encode_seconds + res.decode_seconds;
    } catch (const std::exception& e) {
        row.nmse_db = std::numeric_limits<double>::quiet_NaN();
        row.encode_time = row.decode_time = row.total_time = 0.0;
        row.checkpoint = std::string("failed:") + e.what();
    }
    if (log) {
        std::ostringstream msg;
        msg << row.method << " R=" << rate_text(row.rate) << " seed=" << seed << " NMSE=" << row.nmse_db << " dB"
            << (row.failed() ? " (" + row.checkpoint + ")" : "");
        log(msg.str());
    }
    return row;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, const ProgressLog& log)
{
    cfg.validate();
    std::vector<ResultRow> rows;
    for (std::uint64_t seed : cfg.seeds) {
        const Splits splits = make_splits(cfg, seed);
        for (Method m : cfg.methods)
            for (const RatePoint& p : rate_points(cfg, m))
                rows.push_back(run_point(cfg, p, splits, seed, log));
    }
    if (!cfg.csv_path.empty())
        write_results_csv(cfg.csv_path, rows);
    return rows;
}

// ------------------------------------------------------------- timing

TimingSample median_timing(const std::function<void(std::size_t)>& encode_step,
                           const std::function<void(std::size_t)>& decode_step, std::size_t repetitions,
                           std::size_t warmup)
{
    using clock = std::chrono::steady_clock;
    for (std::size_t i = 0; i < warmup; ++i) {
        encode_step(i);
        decode_step(i);
    }
    std::vector<double> enc(repetitions), dec(repetitions), tot(repetitions);
    for (std::size_t i = 0; i < repetitions; ++i) {
        const auto t0 = clock::now();
        encode_step(i);
        const auto t1 = clock::now();
        decode_step(i);
        const auto t2 = clock::now();
        enc[i] = elapsed(t0, t1);
        dec[i] = elapsed(t1, t2);
        tot[i] = elapsed(t0, t2);
    }
    return {median(enc), median(dec), median(tot)};
}

std::vector<TimingRow> bench_runtime(const ExperimentConfig& cfg, const std::vector<std::string>& ckpt_paths,
                                     const ProgressLog& log)
{
    const Splits splits = make_splits(cfg, cfg.seeds.front());
    const Dataset& test = splits.test;
    const std::size_t count = test.count();
    volatile double sink = 0.0;
    std::vector<TimingRow> rows;

    for (const std::string& path : ckpt_paths) {
        Checkpoint ckpt;
        try {
            ckpt = load_checkpoint(path);
            if (ckpt.model.m_dim() != cfg.m_dim || ckpt.model.n_dim() != cfg.n_dim)
                throw ShapeError("checkpoint dimensions do not match the configuration");
            if (!ckpt.model.hard_q)
                throw StateError("checkpoint has no hard quantizer");
        } catch (const std::exception& e) {
            if (log)
                log("warning: skipping " + path + ": " + e.what());
            continue;
        }
        const DeepVqcsModel& model = ckpt.model;
        std::vector<QuantIndex> idx;
        const TimingSample t = median_timing(
            [&](std::size_t i) { idx = compress(model, test.measurements.col(static_cast<Eigen::Index>(i % count))); },
            [&](std::size_t) { sink = sink + reconstruct(model, idx)(0); }, cfg.bench_repetitions,
            cfg.bench_warmup);
        rows.push_back({model.enc_net ? "DeepVQCS" : "CE-DecNet", t.encode, t.decode, t.total, 0, 0, 0});
    }

    for (Method m : cfg.bench_methods) {
        if (is_learned(m)) {
            if (log)
                log("warning: " + method_key(m) + " is timed from checkpoints only; pass --ckpt");
            continue;
        }
        ExperimentConfig at = cfg;
        at.rates = {cfg.bench_rate};
        at.ce_levels.clear();
        at.vq_bits.clear();
        try {
            const RatePoint p = rate_points(at, m).front();
            TimingSample t;
            if (m == Method::ec_vq) {
                const EcVqPipeline pipe(splits.model, splits.train.sparsity, splits.train, p.codebook_bits, cfg.ecvq);
                std::size_t code = 0;
                t = median_timing(
                    [&](std::size_t i) { code = pipe.encode(test.measurements.col(static_cast<Eigen::Index>(i % count))); },
                    [&](std::size_t) { sink = sink + pipe.decode(code)(0); }, cfg.bench_repetitions, cfg.bench_warmup);
            } else {
                const CePipeline pipe(ce_spec(cfg, p, cfg.seeds.front()), splits.model, splits.train,
                                      &splits.validation);
                std::vector<QuantIndex> idx;
                t = median_timing(
                    [&](std::size_t i) { idx = pipe.encode(test.measurements.col(static_cast<Eigen::Index>(i % count))); },
                    [&](std::size_t) { sink = sink + pipe.decode(idx)(0); }, cfg.bench_repetitions, cfg.bench_warmup);
            }
            rows.push_back({method_label(m), t.encode, t.decode, t.total, 0, 0, 0});
        } catch (const std::exception& e) {
            if (log)
                log("warning: skipping " + method_key(m) + ": " + e.what());
        }
    }

    const auto ref = std::find_if(rows.begin(), rows.end(), [](const TimingRow& r) { return r.method == "DeepVQCS"; });
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const TimingRow base = ref != rows.end() ? *ref : TimingRow{"", nan, nan, nan, 0, 0, 0};
    for (TimingRow& r : rows) {
        r.encode_ratio = r.encode_median / base.encode_median;
        r.decode_ratio = r.decode_median / base.decode_median;
        r.total_ratio = r.total_median / base.total_median;
    }
    return rows;
}

void write_timing_csv(const std::string& path, const std::vector<TimingRow>& rows)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path + " for writing");
    out << "method,encode_median,decode_median,total_median,encode_ratio,decode_ratio,total_ratio\n";
    for (const auto& r : rows)
        out << csv_field(r.method) << ',' << format_double(r.encode_median) << ',' << format_double(r.decode_median)
            << ',' << format_double(r.total_median) << ',' << format_double(r.encode_ratio) << ','
            << format_double(r.decode_ratio) << ',' << format_double(r.total_ratio) << '\n';
    out.flush();
    if (!out)
        throw IoError("write failed for " + path);
}

} // namespace qcs
