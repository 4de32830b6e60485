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
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qcs/config.hpp"
#include "qcs/errors.hpp"
#include "qcs/experiment.hpp"
#include "qcs/serialize.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "qcslab_unit";
    fs::create_directories(dir);
    return dir / name;
}

const char* kSmall = R"(
# tiny experiment
signal.n = 8
signal.m = 4
signal.s = 1
signal.noise_variance = 0.01
data.train_size = 400
data.val_size = 100
data.test_size = 200
experiment.seeds = 5
experiment.methods = ce-usq-omp
experiment.rates = 1, 2, 3
)";

} // namespace

TEST_SUITE("config") {

TEST_CASE("flat config parses dotted keys, comments and lists")
{
    const auto c = qcs::FlatConfig::parse("a.b = 3\n; note\n# other\nlist = 1, 2.5 ,4\nflag = yes\n");
    CHECK(c.get_size("a.b", 0) == 3);
    CHECK(c.get_doubles("list", {}) == std::vector<double>{1.0, 2.5, 4.0});
    CHECK(c.get_bool("flag", false));
    CHECK(c.get_double("missing", 7.5) == 7.5);
    CHECK_NOTHROW(c.require_all_consumed());
    const auto round = qcs::FlatConfig::parse(c.to_text());
    CHECK(round.entries() == c.entries());
}

TEST_CASE("flat config errors")
{
    CHECK_THROWS_AS(qcs::FlatConfig::parse("a = 1\na = 2\n"), qcs::ConfigError);
    CHECK_THROWS_AS(qcs::FlatConfig::parse("[section]\na = 1\n"), qcs::ConfigError);
    const auto c = qcs::FlatConfig::parse("x = abc\ny = 1\n");
    CHECK_THROWS_AS(c.get_double("x", 0), qcs::ConfigError);
    CHECK_THROWS_AS(c.get_bool("x", false), qcs::ConfigError);
    CHECK_THROWS_AS(c.require_all_consumed(), qcs::ConfigError);
    CHECK_THROWS_AS(qcs::FlatConfig::load("/nonexistent/file.cfg"), qcs::IoError);
}

TEST_CASE("experiment config rejects unknown keys and unreachable rates")
{
    auto f = qcs::FlatConfig::parse(kSmall);
    CHECK_NOTHROW(qcs::experiment_config_from(f));
    auto typo = qcs::FlatConfig::parse(kSmall);
    typo.set("signal.nn", "3");
    CHECK_THROWS_AS(qcs::experiment_config_from(typo), qcs::ConfigError);
    auto bad_rate = qcs::FlatConfig::parse(kSmall);
    bad_rate.set("experiment.rates", "1.1");
    CHECK_THROWS_AS(qcs::experiment_config_from(bad_rate), qcs::ConfigError);
    auto bad_method = qcs::FlatConfig::parse(kSmall);
    bad_method.set("experiment.methods", "lasso");
    CHECK_THROWS_AS(qcs::experiment_config_from(bad_method), qcs::ConfigError);
}

TEST_CASE("method-specific trainer keys override the shared ones")
{
    auto f = qcs::FlatConfig::parse(kSmall);
    f.set("train.alpha", "0.5");
    f.set("train.max_iters", "77");
    f.set("ce-decnet.alpha", "0.25");
    f.set("deepvqcs.dec_hidden", "9, 9");
    const auto c = qcs::experiment_config_from(f);
    CHECK(c.deep_train.anneal.alpha == 0.5);
    CHECK(c.decnet_train.anneal.alpha == 0.25);
    CHECK(c.decnet_train.max_iters == 77);
    CHECK(c.deep_train.model.dec_hidden == std::vector<std::size_t>{9, 9});
    CHECK(c.ste_train.anneal.h_init == 400.0);
    CHECK(c.ste_train.anneal.beta == 0.0);
}

TEST_CASE("rate points follow K ceil(log2 I) / N")
{
    auto f = qcs::FlatConfig::parse(kSmall);
    f.set("experiment.methods", "deepvqcs, ce-usq-l1, ec-vq");
    f.set("deepvqcs.k", "4, 8");
    const auto c = qcs::experiment_config_from(f);
    const auto deep = qcs::rate_points(c, qcs::Method::deepvqcs);
    REQUIRE(deep.size() == 6);
    CHECK(deep[0].k_width == 4);
    CHECK(deep[0].levels == 4);
    CHECK(deep[3].k_width == 8);
    CHECK(deep[3].levels == 2);
    for (const auto& p : deep)
        CHECK(p.rate == qcs::rate_bits(p.k_width, p.levels, 8));
    const auto vq = qcs::rate_points(c, qcs::Method::ec_vq);
    REQUIRE(vq.size() == 3);
    CHECK(vq[1].codebook_bits == 16);
    CHECK(vq[1].rate == 2.0);
}

}

TEST_SUITE("serialize") {

TEST_CASE("dataset round trip is bit exact")
{
    auto model = qcs::make_measurement_matrix(9, 5);
    model.noise_variance = 0.02;
    const auto d = qcs::sample_dataset(model, {9, 2}, 33, 77);
    const auto path = scratch("d.qcsdata").string();
    qcs::save_dataset(d, path);
    const auto e = qcs::load_dataset(path);
    CHECK(e.sources == d.sources);
    CHECK(e.measurements == d.measurements);
    CHECK(e.sparsity == 2);
    CHECK(e.noise_variance == 0.02);
    CHECK(e.seed == 77);
    CHECK(fs::file_size(path) == 8 * 8 + 33 * 14 * 8);
}

TEST_CASE("dataset header layout is little-endian u64 fields")
{
    auto model = qcs::make_measurement_matrix(3, 2);
    const auto d = qcs::sample_dataset(model, {3, 1}, 2, 5);
    std::ostringstream out;
    qcs::write_dataset(out, d);
    const std::string bytes = out.str();
    CHECK(bytes.substr(0, 8) == std::string("QCSDATA\0", 8));
    auto u64_at = [&](std::size_t off) {
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i)
            v = (v << 8) | static_cast<unsigned char>(bytes[off + static_cast<std::size_t>(i)]);
        return v;
    };
    CHECK(u64_at(8) == 1);
    CHECK(u64_at(16) == 3);
    CHECK(u64_at(24) == 2);
    CHECK(u64_at(32) == 1);
    CHECK(u64_at(48) == 2);
    CHECK(u64_at(56) == 5);
}

TEST_CASE("corrupt files are rejected")
{
    const auto path = scratch("bad.bin").string();
    {
        std::ofstream out(path, std::ios::binary);
        out << "NOTADATASETFILE";
    }
    CHECK_THROWS_AS(qcs::load_dataset(path), qcs::FormatError);
    CHECK_THROWS_AS(qcs::load_checkpoint(path), qcs::FormatError);
    CHECK_THROWS_AS(qcs::load_dataset(scratch("missing.bin").string()), qcs::IoError);

    auto model = qcs::make_measurement_matrix(4, 2);
    std::ostringstream out;
    qcs::write_dataset(out, qcs::sample_dataset(model, {4, 1}, 3, 1));
    std::istringstream truncated(out.str().substr(0, out.str().size() - 5));
    CHECK_THROWS_AS(qcs::read_dataset(truncated), qcs::FormatError);
}

TEST_CASE("checkpoint round trip preserves the online path")
{
    auto m = qcs::init_model(qcs::default_model_spec(6, 4, 3, 4), 7.0, 3);
    m.hard_q = qcs::build_quantizer(m.shq);
    const qcs::Checkpoint ck{m, 1234, "signal.n = 6\n"};
    const auto path = scratch("m.ckpt").string();
    qcs::save_checkpoint(ck, path);
    const auto back = qcs::load_checkpoint(path);
    CHECK(back.iteration == 1234);
    CHECK(back.config_echo == "signal.n = 6\n");
    CHECK(back.model.enc_net->weights[1] == m.enc_net->weights[1]);
    CHECK(back.model.dec_net.biases[2] == m.dec_net.biases[2]);
    CHECK(back.model.shq.shifts_s == m.shq.shifts_s);
    CHECK(back.model.hard_q->levels == m.hard_q->levels);
    qcs::CounterRng rng(1);
    for (int i = 0; i < 20; ++i) {
        Eigen::VectorXd y(4);
        for (Eigen::Index j = 0; j < 4; ++j)
            y(j) = rng.normal();
        const auto idx = qcs::compress(m, y);
        CHECK(idx == qcs::compress(back.model, y));
        CHECK(qcs::reconstruct(m, idx) == qcs::reconstruct(back.model, idx));
    }
}

TEST_CASE("pass-through checkpoints")
{
    auto spec = qcs::default_model_spec(6, 4, 4, 2);
    spec.encoder_passthrough = true;
    spec.enc_hidden.clear();
    auto m = qcs::init_model(spec, 7.0, 3);
    std::stringstream io;
    qcs::write_checkpoint(io, {m, 0, ""});
    const auto back = qcs::read_checkpoint(io);
    CHECK_FALSE(back.model.enc_net.has_value());
    CHECK_FALSE(back.model.hard_q.has_value());
    CHECK(back.model.m_dim() == 4);
}

TEST_CASE("codebook round trip")
{
    qcs::VectorCodebook b;
    b.codewords = Eigen::MatrixXd::Random(3, 5);
    const auto path = scratch("b.book").string();
    qcs::save_codebook(b, path);
    CHECK(qcs::load_codebook(path).codewords == b.codewords);
}

}

TEST_SUITE("experiment") {

TEST_CASE("results CSV round trips every field")
{
    qcs::ResultRow r;
    r.method = "CE-USQ-L1";
    r.n_dim = 20;
    r.m_dim = 10;
    r.sparsity = 2;
    r.rate = 2.5;
    r.nmse_db = -13.123456789012345;
    r.encode_time = 1.5e-6;
    r.decode_time = 3.25e-3;
    r.total_time = r.encode_time + r.decode_time;
    r.seed = 18446744073709551615ull;
    qcs::ResultRow failed = r;
    failed.nmse_db = std::nan("");
    failed.checkpoint = "failed:bad, \"quoted\" reason";
    const auto path = scratch("r.csv").string();
    qcs::write_results_csv(path, {r, failed});
    const auto back = qcs::read_results_csv(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].method == r.method);
    CHECK(back[0].rate == r.rate);
    CHECK(back[0].nmse_db == r.nmse_db);
    CHECK(back[0].decode_time == r.decode_time);
    CHECK(back[0].seed == r.seed);
    CHECK(back[1].failed());
    CHECK(std::isnan(back[1].nmse_db));
    CHECK(back[1].checkpoint == failed.checkpoint);

    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "method,n,m,s,rate,nmse_db,encode_time,decode_time,total_time,seed,checkpoint");
}

TEST_CASE("CE-USQ-OMP sweep is monotone in rate and deterministic")
{
    auto f = qcs::FlatConfig::parse(kSmall);
    f.set("signal.n", "20");
    f.set("signal.m", "10");
    f.set("signal.s", "2");
    f.set("signal.noise_variance", "1e-4");
    f.set("data.test_size", "2000");
    f.set("data.train_size", "2000");
    f.set("experiment.rates", "1, 2.5, 4");
    const auto cfg = qcs::experiment_config_from(f);
    const auto rows = qcs::run_experiment(cfg);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].nmse_db >= rows[1].nmse_db);
    CHECK(rows[1].nmse_db >= rows[2].nmse_db);
    for (const auto& r : rows) {
        CHECK_FALSE(r.failed());
        CHECK(r.rate == qcs::rate_bits(r.k_width, r.levels, r.n_dim));
        CHECK(r.total_time >= 0.0);
    }
    const auto again = qcs::run_experiment(cfg);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(again[i].nmse_db == rows[i].nmse_db);
        CHECK(again[i].rate == rows[i].rate);
    }
}

TEST_CASE("a failing method yields a failed row and the run continues")
{
    auto f = qcs::FlatConfig::parse(kSmall);
    f.set("signal.n", "40");
    f.set("signal.m", "20");
    f.set("signal.s", "5");
    f.set("experiment.methods", "ec-vq, ce-usq-omp");
    f.set("experiment.rates", "0.5");
    const auto rows = qcs::run_experiment(qcs::experiment_config_from(f));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].failed());
    CHECK(std::isnan(rows[0].nmse_db));
    CHECK(rows[0].checkpoint.find("guard") != std::string::npos);
    CHECK_FALSE(rows[1].failed());
}

TEST_CASE("K sweep rows share the rate rule")
{
    auto f = qcs::FlatConfig::parse(kSmall);
    f.set("signal.n", "20");
    f.set("signal.m", "10");
    f.set("signal.s", "2");
    f.set("experiment.methods", "deepvqcs");
    f.set("experiment.rates", "3");
    f.set("deepvqcs.k", "10, 15, 20");
    f.set("train.max_iters", "20");
    f.set("train.validation_period", "10");
    f.set("train.batch_size", "20");
    const auto rows = qcs::run_experiment(qcs::experiment_config_from(f));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].method == "DeepVQCS-K10");
    CHECK(rows[1].method == "DeepVQCS-K15");
    CHECK(rows[2].method == "DeepVQCS-K20");
    for (const auto& r : rows) {
        CHECK_FALSE(r.failed());
        CHECK(r.rate == 3.0);
        CHECK(r.rate == qcs::rate_bits(r.k_width, r.levels, 20));
    }
    CHECK(rows[0].levels == 64);
    CHECK(rows[1].levels == 16);
    CHECK(rows[2].levels == 8);
}

TEST_CASE("median timing and normalization")
{
    std::size_t calls = 0;
    const auto t = qcs::median_timing([&](std::size_t) { ++calls; }, [&](std::size_t) { ++calls; }, 100, 10);
    CHECK(calls == 220);
    CHECK(t.encode >= 0.0);
    CHECK(t.total >= t.encode);
}

TEST_CASE("bench table normalizes against DeepVQCS and skips missing artifacts")
{
    auto f = qcs::FlatConfig::parse(kSmall);
    f.set("bench.rate", "1");
    f.set("bench.methods", "ce-usq-omp, ce-usq-l1, deepvqcs");
    const auto cfg = qcs::experiment_config_from(f);
    auto m = qcs::init_model(qcs::default_model_spec(8, 4, 4, 4), 7.0, 3);
    m.hard_q = qcs::build_quantizer(m.shq);
    const auto path = scratch("bench.ckpt").string();
    qcs::save_checkpoint({m, 0, ""}, path);
    std::vector<std::string> warnings;
    const auto rows = qcs::bench_runtime(cfg, {path, scratch("nothing.ckpt").string()},
                                         [&](const std::string& w) { warnings.push_back(w); });
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].method == "DeepVQCS");
    CHECK(rows[0].encode_ratio == 1.0);
    CHECK(rows[0].decode_ratio == 1.0);
    CHECK(rows[0].total_ratio == 1.0);
    for (const auto& r : rows)
        CHECK(r.decode_ratio == doctest::Approx(r.decode_median / rows[0].decode_median));
    CHECK(warnings.size() == 2);
}

}
