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

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <rrmimo/harness/config.hpp>
#include <rrmimo/harness/runner.hpp>

namespace
{

std::string preset_list()
{
    std::string out;
    for (const auto &name : rrmimo::harness::preset_names())
    {
        if (!out.empty())
            out += ", ";
        out += name;
    }
    return out;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"rrmimo: reduced-rank pilot-aided channel estimation experiments"};
    app.require_subcommand(1);

    auto *run = app.add_subcommand("run", "Run a named preset or a JSON config file");
    std::string target;
    run->add_option("target", target, "Preset name (" + preset_list() + ") or config path")
        ->required();
    std::uint64_t seed = 0;
    bool seed_set = false;
    run->add_option("--seed", seed, "Master seed override")
        ->each([&](const std::string &) { seed_set = true; });
    int trials = 0;
    run->add_option("--trials", trials, "Trial count override")->check(CLI::PositiveNumber);
    std::string out_dir;
    run->add_option("--out", out_dir, "Output directory (default: config, $RRMIMO_OUT, cwd)");
    int threads = 1;
    run->add_option("--threads", threads, "Worker threads (results are thread-count invariant)")
        ->check(CLI::PositiveNumber);
    bool check = false;
    run->add_flag("--check", check, "Assert preset invariants; exit 2 on failure");

    CLI11_PARSE(app, argc, argv);

    rrmimo::harness::ExperimentConfig cfg;
    try
    {
        cfg = rrmimo::harness::resolve_config(target);
        if (seed_set)
            cfg.seed = seed;
        if (trials > 0)
            cfg.trials = trials;
        rrmimo::harness::validate(cfg);
    }
    catch (const std::exception &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    std::filesystem::path dir;
    if (!out_dir.empty())
        dir = out_dir;
    else if (!cfg.out.empty())
        dir = cfg.out;
    else if (const char *env = std::getenv("RRMIMO_OUT"); env && *env)
        dir = env;
    else
        dir = ".";

    try
    {
        rrmimo::harness::RunOptions opt;
        opt.threads = threads;
        const auto table = rrmimo::harness::run_experiment(cfg, opt);

        std::filesystem::create_directories(dir);
        const auto path = dir / (cfg.name + ".csv");
        table.write_csv(path.string());
        std::cout << "wrote " << path.string() << " (" << table.rows.size() << " rows, seed "
                  << cfg.seed << ", config " << rrmimo::harness::config_hash(cfg) << ")\n";

        if (check)
        {
            const auto failures = rrmimo::harness::run_checks(cfg, table);
            for (const auto &f : failures)
                std::cerr << "check failed: " << f << "\n";
            if (!failures.empty())
                return 2;
            std::cout << "checks passed\n";
        }
    }
    catch (const rrmimo::harness::ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
