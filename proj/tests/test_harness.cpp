// SPDX-License-Identifier: Apache-2.0
//
// rrmimo - reduced-rank channel estimation library for large-scale MIMO uplinks
// Copyright (C) 2026 rrmimo contributors
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

#include <catch2/catch_amalgamated.hpp>

#include <rrmimo/harness/config.hpp>
#include <rrmimo/harness/result.hpp>
#include <rrmimo/harness/runner.hpp>

using namespace rrmimo;
using namespace rrmimo::harness;

namespace
{

// Small sweep that exercises the full pipeline in well under a second.
ExperimentConfig tiny_sweep()
{
    ExperimentConfig cfg;
    cfg.name = "tiny";
    cfg.kind = ExperimentKind::mse_sweep;
    cfg.antennas = 16;
    cfg.pilot_symbols = 4;
    cfg.scenarios = {{ClusterParams{30.0, 7.2, 20, "uniform"}}};
    cfg.bases = {BasisKind::dct2};
    cfg.eta = {0.99};
    cfg.alpha_db = {0.0, 10.0};
    cfg.orders = {4, 16};
    cfg.trials = 60;
    cfg.seed = 99;
    return cfg;
}

} // namespace

TEST_CASE("batch ranges partition the trials contiguously")
{
    const auto r = batch_ranges(103);
    REQUIRE(r.size() == 10);
    CHECK(r.front().first == 0);
    CHECK(r.back().second == 103);
    int total = 0;
    for (size_t i = 0; i < r.size(); ++i)
    {
        CHECK(r[i].second > r[i].first);
        if (i)
            CHECK(r[i].first == r[i - 1].second);
        total += r[i].second - r[i].first;
    }
    CHECK(total == 103);
    CHECK(batch_ranges(3).size() == 3); // never more batches than trials
}

TEST_CASE("batch statistics")
{
    const auto st = batch_stat({2.0, 4.0}, {2, 2});
    CHECK_THAT(st.mean, Catch::Matchers::WithinAbs(1.5, 1e-12));
    // sd of batch means {1, 2} is sqrt(0.5); SE = sd / sqrt(2) = 0.5.
    CHECK_THAT(st.std_err, Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK(batch_stat({5.0}, {5}).std_err == 0.0);
}

TEST_CASE("result table format and ordering")
{
    ResultTable t;
    t.add("e", "b", "m2", 2.0, 0.1, 7, "deadbeefdeadbeef");
    t.add("e", "a", "m1", 1.0, 0.0, 7, "deadbeefdeadbeef");
    t.sort();
    CHECK(t.rows[0].cell == "a");
    const std::string csv = t.to_csv();
    CHECK(csv.rfind("experiment,cell,metric,value,std_err,seed,config_hash\n", 0) == 0);
    CHECK(csv.find("e,a,m1,1,0,7,deadbeefdeadbeef\n") != std::string::npos);
    CHECK(t.at("a", "m1").value == 1.0);
    CHECK(t.has("b", "m2"));
    CHECK_FALSE(t.has("b", "m3"));
    CHECK_THROWS_AS(t.at("zz", "m1"), std::out_of_range);
}

TEST_CASE("presets resolve and validate")
{
    for (const auto &name : preset_names())
    {
        const auto cfg = resolve_config(name);
        CHECK(cfg.name == name);
        CHECK_NOTHROW(validate(cfg));
    }
    CHECK_THROWS_AS(resolve_config("no_such_preset"), ConfigError);
}

TEST_CASE("config validation rejects bad inputs")
{
    auto cfg = tiny_sweep();
    cfg.alpha_db.clear();
    CHECK_THROWS_AS(validate(cfg), ConfigError);

    cfg = tiny_sweep();
    cfg.scenarios[0][0].mean_aoa_deg = 95.0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);

    cfg = tiny_sweep();
    cfg.eta = {1.5};
    CHECK_THROWS_AS(validate(cfg), ConfigError);

    cfg = tiny_sweep();
    cfg.orders = {17}; // above the antenna count
    CHECK_THROWS_AS(validate(cfg), ConfigError);

    cfg = tiny_sweep();
    cfg.correlation = "identity"; // identity demands an empty cluster list
    CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("config hash ignores the seed and nothing else")
{
    auto a = tiny_sweep();
    auto b = tiny_sweep();
    b.seed = 12345;
    CHECK(config_hash(a) == config_hash(b));
    b = tiny_sweep();
    b.trials = 61;
    CHECK(config_hash(a) != config_hash(b));
    CHECK(config_hash(a).size() == 16);
}

TEST_CASE("config JSON round trip")
{
    const auto a = tiny_sweep();
    const auto j = to_json(a);
    const auto b = parse_config(j, "tiny");
    CHECK(config_hash(a) == config_hash(b));
    CHECK(b.kind == ExperimentKind::mse_sweep);
    CHECK(b.orders == a.orders);
}

TEST_CASE("sweep output is reproducible and thread-count invariant")
{
    const auto cfg = tiny_sweep();
    RunOptions one;
    one.threads = 1;
    RunOptions four;
    four.threads = 4;
    const std::string a = run_mse_sweep(cfg, one).to_csv();
    const std::string b = run_mse_sweep(cfg, one).to_csv();
    const std::string c = run_mse_sweep(cfg, four).to_csv();
    CHECK(a == b);
    CHECK(a == c);
}

TEST_CASE("seed changes move the simulated rows only")
{
    auto cfg = tiny_sweep();
    const auto t1 = run_mse_sweep(cfg, {});
    cfg.seed = 100;
    const auto t2 = run_mse_sweep(cfg, {});
    const std::string cell = "scen=0;as=7.2;aoa=30;alpha_db=10";
    CHECK(t1.at(cell, "nmse_ls").value != t2.at(cell, "nmse_ls").value);
    CHECK(t1.at(cell, "nmse_theory_ls").value == t2.at(cell, "nmse_theory_ls").value);
}

TEST_CASE("simulated rows track the closed forms on the tiny sweep")
{
    const auto cfg = tiny_sweep();
    const auto table = run_mse_sweep(cfg, {});
    CHECK(run_checks(cfg, table).empty());
    // Full-order truncation rows coincide with least squares.
    const std::string cell = "scen=0;as=7.2;aoa=30;alpha_db=0";
    CHECK_THAT(table.at(cell + ";basis=dct2;m=16", "nmse_rr").value,
               Catch::Matchers::WithinRel(table.at(cell, "nmse_ls").value, 1e-12));
}

TEST_CASE("spectrum report emits aligned and regular spectra")
{
    ExperimentConfig cfg;
    cfg.name = "spec";
    cfg.kind = ExperimentKind::spectrum_report;
    cfg.antennas = 32;
    cfg.scenarios = {{ClusterParams{45.0, 7.2, 20, "uniform"}}};
    cfg.bases = {BasisKind::dct2, BasisKind::klt};
    cfg.eta = {0.9};
    cfg.alpha_db = {0.0};
    cfg.trials = 1;
    const auto table = run_experiment(cfg, {});
    CHECK(run_checks(cfg, table).empty());
    const std::string tag = "scen=0;as=7.2;aoa=45;basis=dct2";
    double sum = 0.0;
    for (int i = 0; i < 32; ++i)
        sum += table.at(tag + ";index=" + std::to_string(i), "spectrum_aligned").value;
    CHECK_THAT(sum, Catch::Matchers::WithinAbs(32.0, 1e-8));
    CHECK(table.at(tag + ";eta=0.9", "m_eta").value <=
          table.at(tag + ";eta=0.9", "m_eta_unaligned").value);
    // The eigenbasis needs no more coordinates than the fixed transform.
    CHECK(table.at("scen=0;as=7.2;aoa=45;basis=klt;eta=0.9", "m_eta").value <=
          table.at(tag + ";eta=0.9", "m_eta").value);
}

TEST_CASE("unknown gain and angle rows carry their error metrics")
{
    auto cfg = tiny_sweep();
    cfg.known_beta = false;
    cfg.known_phi = false;
    cfg.orders = {4};
    cfg.trials = 30;
    const auto table = run_mse_sweep(cfg, {});
    const std::string cell = "scen=0;as=7.2;aoa=30;alpha_db=10";
    CHECK(table.has(cell, "beta_rel_err"));
    CHECK(table.has(cell + ";basis=dct2;m=4", "phi_err_deg"));
    CHECK_FALSE(table.has(cell, "nmse_theory_ls"));
    CHECK(table.at(cell, "beta_rel_err").value < 1.0);
}
