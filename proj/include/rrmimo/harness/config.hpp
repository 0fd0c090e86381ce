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

#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "../basis.hpp"
#include "../types.hpp"

namespace rrmimo::harness
{

// Config errors map to CLI exit code 1; they carry no partial results.
struct ConfigError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct ClusterParams
{
    double mean_aoa_deg = 0.0;
    double spread_deg = 7.2;
    int subpaths = 20;
    std::string subpath_law = "uniform"; // uniform | fixed
};

enum class ExperimentKind
{
    mse_sweep,
    spectrum_report,
    rank_tables,
    beam_patterns,
    multicluster,
};

inline const char *to_string(ExperimentKind k)
{
    switch (k)
    {
    case ExperimentKind::mse_sweep: return "mse_sweep";
    case ExperimentKind::spectrum_report: return "spectrum_report";
    case ExperimentKind::rank_tables: return "rank_tables";
    case ExperimentKind::beam_patterns: return "beam_patterns";
    case ExperimentKind::multicluster: return "multicluster";
    }
    return "?";
}

// One experiment: a cluster-scenario list swept over bases, orders and SNRs.
// Every scenario is its own simulation cell family; a scenario with several
// clusters is one multi-cluster channel.
struct ExperimentConfig
{
    std::string name;
    ExperimentKind kind = ExperimentKind::mse_sweep;

    int antennas = 100;
    double spacing = 0.5; // in wavelengths
    int pilot_symbols = 16;
    int quadrature = 64;

    std::vector<std::vector<ClusterParams>> scenarios;
    std::vector<BasisKind> bases;
    std::vector<double> eta;
    std::vector<double> alpha_db;
    std::vector<int> orders; // mse_sweep modeling orders; 0 stands for m_eta

    int trials = 1000;
    int corr_blocks = 10; // J pilot blocks for estimated correlation
    bool known_beta = true;
    bool known_phi = true;
    std::string correlation = "analytic"; // analytic | identity

    uint64_t seed = 20260818;
    std::string out; // output directory; empty defers to --out / env / cwd
};

namespace detail
{

inline BasisKind parse_basis(const std::string &s)
{
    if (s == "klt")
        return BasisKind::klt;
    if (s == "dct2" || s == "dct")
        return BasisKind::dct2;
    if (s == "dft")
        return BasisKind::dft;
    if (s == "poly" || s == "polynomial")
        return BasisKind::polynomial;
    throw ConfigError("unknown basis kind: " + s);
}

inline ExperimentKind parse_kind(const std::string &s)
{
    if (s == "mse_sweep")
        return ExperimentKind::mse_sweep;
    if (s == "spectrum_report")
        return ExperimentKind::spectrum_report;
    if (s == "rank_tables")
        return ExperimentKind::rank_tables;
    if (s == "beam_patterns")
        return ExperimentKind::beam_patterns;
    if (s == "multicluster")
        return ExperimentKind::multicluster;
    throw ConfigError("unknown experiment kind: " + s);
}

inline ClusterParams parse_cluster(const nlohmann::json &j)
{
    ClusterParams c;
    c.mean_aoa_deg = j.at("mean_aoa_deg").get<double>();
    c.spread_deg = j.at("spread_deg").get<double>();
    c.subpaths = j.value("subpaths", 20);
    c.subpath_law = j.value("subpath_law", std::string("uniform"));
    return c;
}

} // namespace detail

inline void validate(const ExperimentConfig &c)
{
    if (c.name.empty())
        throw ConfigError("config: name must not be empty");
    if (c.antennas < 2)
        throw ConfigError("config: antennas must be at least 2");
    if (!(c.spacing > 0.0))
        throw ConfigError("config: spacing must be positive");
    if (c.pilot_symbols < 1)
        throw ConfigError("config: pilot_symbols must be at least 1");
    if (c.trials < 1)
        throw ConfigError("config: trials must be at least 1");
    if (c.alpha_db.empty())
        throw ConfigError("config: alpha_db sweep must not be empty");
    if (c.scenarios.empty())
        throw ConfigError("config: at least one cluster scenario required");
    if (c.correlation != "analytic" && c.correlation != "identity")
        throw ConfigError("config: correlation must be 'analytic' or 'identity'");
    for (const auto &scen : c.scenarios)
    {
        if (scen.empty() && c.correlation != "identity")
            throw ConfigError("config: empty cluster list requires identity correlation");
        if (!scen.empty() && c.correlation == "identity")
            throw ConfigError("config: identity correlation takes no clusters");
        for (const auto &cl : scen)
        {
            if (!(cl.spread_deg > 0.0))
                throw ConfigError("config: cluster spread must be positive");
            if (cl.mean_aoa_deg - cl.spread_deg <= -90.0 ||
                cl.mean_aoa_deg + cl.spread_deg >= 90.0)
                throw ConfigError("config: cluster leaves (-90, 90) degrees");
            if (cl.subpaths < 1)
                throw ConfigError("config: cluster needs at least one subpath");
            if (cl.subpath_law != "uniform" && cl.subpath_law != "fixed")
                throw ConfigError("config: subpath_law must be 'uniform' or 'fixed'");
        }
    }
    if (c.kind != ExperimentKind::multicluster)
        for (const auto &scen : c.scenarios)
            if (scen.size() > 1 && c.kind != ExperimentKind::mse_sweep)
                throw ConfigError("config: multi-cluster scenarios need kind 'multicluster'");
    for (double e : c.eta)
        if (!(e > 0.0 && e < 1.0))
            throw ConfigError("config: eta values must lie in (0, 1)");
    for (int m : c.orders)
        if (m < 0 || m > c.antennas)
            throw ConfigError("config: orders must lie in [0, antennas]");
    if (c.corr_blocks < 1)
        throw ConfigError("config: corr_blocks must be at least 1");
    if (c.quadrature < 32)
        throw ConfigError("config: quadrature must be at least 32");
    // Cell ids share a 24-bit field with the stream purpose.
    const uint64_t cells = uint64_t(c.scenarios.size()) * c.alpha_db.size();
    if (cells >= (uint64_t(1) << 24))
        throw ConfigError("config: too many cells for the stream layout");
    const bool needs_bases = c.kind != ExperimentKind::beam_patterns;
    if (needs_bases && c.bases.empty())
        throw ConfigError("config: at least one basis required");
    if ((c.kind == ExperimentKind::spectrum_report || c.kind == ExperimentKind::rank_tables ||
         c.kind == ExperimentKind::multicluster) &&
        c.eta.empty())
        throw ConfigError("config: eta list required for this experiment kind");
}

inline ExperimentConfig parse_config(const nlohmann::json &j, const std::string &fallback_name)
{
    ExperimentConfig c;
    try
    {
        c.name = j.value("name", fallback_name);
        c.kind = detail::parse_kind(j.at("kind").get<std::string>());
        c.antennas = j.value("antennas", 100);
        c.spacing = j.value("spacing", 0.5);
        c.pilot_symbols = j.value("pilot_symbols", 16);
        c.quadrature = j.value("quadrature", 64);
        if (j.contains("clusters"))
        {
            for (const auto &entry : j.at("clusters"))
            {
                if (entry.is_array())
                {
                    std::vector<ClusterParams> scen;
                    for (const auto &cj : entry)
                        scen.push_back(detail::parse_cluster(cj));
                    c.scenarios.push_back(std::move(scen));
                }
                else
                {
                    c.scenarios.push_back({detail::parse_cluster(entry)});
                }
            }
        }
        if (j.contains("bases"))
            for (const auto &b : j.at("bases"))
                c.bases.push_back(detail::parse_basis(b.get<std::string>()));
        if (j.contains("eta"))
            c.eta = j.at("eta").get<std::vector<double>>();
        if (j.contains("alpha_db"))
            c.alpha_db = j.at("alpha_db").get<std::vector<double>>();
        if (j.contains("orders"))
            c.orders = j.at("orders").get<std::vector<int>>();
        c.trials = j.value("trials", 1000);
        c.corr_blocks = j.value("corr_blocks", 10);
        c.known_beta = j.value("known_beta", true);
        c.known_phi = j.value("known_phi", true);
        c.correlation = j.value("correlation", std::string("analytic"));
        c.seed = j.value("seed", uint64_t(20260818));
        c.out = j.value("out", std::string());
    }
    catch (const nlohmann::json::exception &e)
    {
        throw ConfigError(std::string("config: ") + e.what());
    }
    validate(c);
    return c;
}

// Canonical serialization: nlohmann objects iterate keys in sorted order, so
// the dump (and therefore the hash) is independent of construction order.
inline nlohmann::json to_json(const ExperimentConfig &c)
{
    nlohmann::json j;
    j["name"] = c.name;
    j["kind"] = to_string(c.kind);
    j["antennas"] = c.antennas;
    j["spacing"] = c.spacing;
    j["pilot_symbols"] = c.pilot_symbols;
    j["quadrature"] = c.quadrature;
    nlohmann::json scen_list = nlohmann::json::array();
    for (const auto &scen : c.scenarios)
    {
        nlohmann::json sj = nlohmann::json::array();
        for (const auto &cl : scen)
            sj.push_back({{"mean_aoa_deg", cl.mean_aoa_deg},
                          {"spread_deg", cl.spread_deg},
                          {"subpaths", cl.subpaths},
                          {"subpath_law", cl.subpath_law}});
        scen_list.push_back(std::move(sj));
    }
    j["clusters"] = std::move(scen_list);
    std::vector<std::string> bases;
    for (auto b : c.bases)
        bases.emplace_back(to_string(b));
    j["bases"] = bases;
    j["eta"] = c.eta;
    j["alpha_db"] = c.alpha_db;
    j["orders"] = c.orders;
    j["trials"] = c.trials;
    j["corr_blocks"] = c.corr_blocks;
    j["known_beta"] = c.known_beta;
    j["known_phi"] = c.known_phi;
    j["correlation"] = c.correlation;
    j["seed"] = c.seed;
    return j;
}

// FNV-1a 64 over the canonical dump; seed excluded so the hash names the
// experiment design while the seed column names the draw.
inline std::string config_hash(const ExperimentConfig &c)
{
    nlohmann::json j = to_json(c);
    j.erase("seed");
    const std::string s = j.dump();
    uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s)
    {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Built-in experiment presets. The table presets use a short pilot block
// (T=8), which matches the SNR weighting the reference operating point was
// calibrated against; sweep presets use the desk default T=16.
inline const char *builtin_presets_json()
{
    return R"JSON({
  "fig2": {
    "kind": "spectrum_report",
    "clusters": [{"mean_aoa_deg": 60.0, "spread_deg": 7.2}],
    "bases": ["dct2"],
    "eta": [0.99],
    "alpha_db": [0.0],
    "trials": 1
  },
  "fig3": {
    "kind": "spectrum_report",
    "clusters": [{"mean_aoa_deg": 60.0, "spread_deg": 7.2},
                 {"mean_aoa_deg": 0.0, "spread_deg": 15.0}],
    "bases": ["klt", "dct2", "poly"],
    "eta": [0.99],
    "alpha_db": [0.0],
    "trials": 1
  },
  "fig4": {
    "kind": "mse_sweep",
    "clusters": [{"mean_aoa_deg": 60.0, "spread_deg": 7.2}],
    "bases": ["poly"],
    "eta": [0.99],
    "orders": [10, 20, 100],
    "alpha_db": [-10, -5, 0, 5, 10, 15, 20, 25, 30],
    "trials": 1000
  },
  "fig5": {
    "kind": "mse_sweep",
    "clusters": [{"mean_aoa_deg": 0.0, "spread_deg": 15.0}],
    "bases": ["dct2"],
    "eta": [0.99],
    "orders": [29, 37, 53, 100],
    "alpha_db": [-10, -5, 0, 5, 10, 15, 20, 25, 30],
    "trials": 1000
  },
  "fig6": {
    "kind": "mse_sweep",
    "clusters": [{"mean_aoa_deg": 60.0, "spread_deg": 7.2}],
    "bases": ["dct2"],
    "eta": [0.99],
    "orders": [12],
    "alpha_db": [-10, -5, 0, 5, 10, 15, 20, 25, 30],
    "known_beta": false,
    "known_phi": false,
    "trials": 1000
  },
  "fig7": {
    "kind": "beam_patterns",
    "clusters": [{"mean_aoa_deg": 60.0, "spread_deg": 7.2},
                 {"mean_aoa_deg": 15.0, "spread_deg": 15.0}],
    "bases": ["dct2"],
    "eta": [0.99],
    "alpha_db": [0.0],
    "corr_blocks": 10,
    "trials": 100
  },
  "fig8": {
    "kind": "multicluster",
    "clusters": [[{"mean_aoa_deg": 60.0, "spread_deg": 7.2},
                  {"mean_aoa_deg": 15.0, "spread_deg": 15.0}],
                 [{"mean_aoa_deg": -30.0, "spread_deg": 7.2},
                  {"mean_aoa_deg": -45.0, "spread_deg": 15.0}]],
    "bases": ["dft"],
    "eta": [0.9, 0.99],
    "alpha_db": [0.0],
    "trials": 500
  },
  "table1": {
    "kind": "rank_tables",
    "clusters": [{"mean_aoa_deg": 60.0, "spread_deg": 7.2}],
    "bases": ["klt", "dct2", "poly"],
    "eta": [0.99, 0.999, 0.9999],
    "alpha_db": [0, 10, 20],
    "pilot_symbols": 8,
    "quadrature": 96,
    "corr_blocks": 10,
    "trials": 200
  },
  "table2": {
    "kind": "rank_tables",
    "clusters": [{"mean_aoa_deg": 0.0, "spread_deg": 15.0}],
    "bases": ["klt", "dct2"],
    "eta": [0.99, 0.999, 0.9999],
    "alpha_db": [0, 10, 20],
    "pilot_symbols": 8,
    "quadrature": 96,
    "corr_blocks": 3,
    "trials": 200
  }
})JSON";
}

inline std::vector<std::string> preset_names()
{
    const auto j = nlohmann::json::parse(builtin_presets_json());
    std::vector<std::string> names;
    for (auto it = j.begin(); it != j.end(); ++it)
        names.push_back(it.key());
    return names;
}

// Resolve a CLI argument: a known preset name, else a path to a JSON file
// holding a single experiment object.
inline ExperimentConfig resolve_config(const std::string &name_or_path)
{
    const auto presets = nlohmann::json::parse(builtin_presets_json());
    if (presets.contains(name_or_path))
        return parse_config(presets.at(name_or_path), name_or_path);

    std::ifstream f(name_or_path);
    if (!f)
        throw ConfigError("no preset or config file named '" + name_or_path + "'");
    nlohmann::json j;
    try
    {
        f >> j;
    }
    catch (const nlohmann::json::exception &e)
    {
        throw ConfigError("config parse failure in '" + name_or_path + "': " + e.what());
    }
    std::string base = name_or_path;
    const auto slash = base.find_last_of('/');
    if (slash != std::string::npos)
        base = base.substr(slash + 1);
    const auto dot = base.find_last_of('.');
    if (dot != std::string::npos)
        base = base.substr(0, dot);
    return parse_config(j, base);
}

} // namespace rrmimo::harness
