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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace rrmimo::harness
{

struct ResultRow
{
    std::string experiment;
    std::string cell;   // "key=value;key=value" parameter tuple
    std::string metric; // metric name, no commas
    double value;
    double std_err; // 0 for deterministic quantities
    uint64_t seed;
    std::string config_hash;
};

// Long-format result table. Rows are sorted before serialization so the CSV
// bytes never depend on worker scheduling.
struct ResultTable
{
    std::vector<ResultRow> rows;

    void add(std::string experiment, std::string cell, std::string metric, double value,
             double std_err, uint64_t seed, std::string config_hash)
    {
        rows.push_back({std::move(experiment), std::move(cell), std::move(metric), value, std_err,
                        seed, std::move(config_hash)});
    }

    void sort()
    {
        std::stable_sort(rows.begin(), rows.end(), [](const ResultRow &a, const ResultRow &b) {
            return std::tie(a.experiment, a.cell, a.metric) <
                   std::tie(b.experiment, b.cell, b.metric);
        });
    }

    // Locate a single row; throws if absent (harness checks depend on it).
    const ResultRow &at(const std::string &cell, const std::string &metric) const
    {
        for (const auto &r : rows)
            if (r.cell == cell && r.metric == metric)
                return r;
        throw std::out_of_range("ResultTable: no row for (" + cell + ", " + metric + ")");
    }

    bool has(const std::string &cell, const std::string &metric) const
    {
        for (const auto &r : rows)
            if (r.cell == cell && r.metric == metric)
                return true;
        return false;
    }

    std::string to_csv() const
    {
        std::string out = "experiment,cell,metric,value,std_err,seed,config_hash\n";
        char buf[512];
        for (const auto &r : rows)
        {
            std::snprintf(buf, sizeof buf, "%s,%s,%s,%.12g,%.6g,%llu,%s\n", r.experiment.c_str(),
                          r.cell.c_str(), r.metric.c_str(), r.value, r.std_err,
                          static_cast<unsigned long long>(r.seed), r.config_hash.c_str());
            out += buf;
        }
        return out;
    }

    void write_csv(const std::string &path) const
    {
        std::ofstream f(path, std::ios::binary);
        if (!f)
            throw std::runtime_error("ResultTable: cannot open " + path);
        f << to_csv();
    }
};

// Batch-mean standard error: split trial sums into nb contiguous batches and
// report sd(batch means)/sqrt(nb). No distributional assumptions.
struct BatchStat
{
    double mean;
    double std_err;
};

inline BatchStat batch_stat(const std::vector<double> &batch_sums,
                            const std::vector<int> &batch_counts)
{
    const int nb = int(batch_sums.size());
    if (nb == 0 || batch_counts.size() != batch_sums.size())
        throw std::invalid_argument("batch_stat: malformed batches");
    double total = 0.0;
    long long n = 0;
    for (int b = 0; b < nb; ++b)
    {
        total += batch_sums[b];
        n += batch_counts[b];
    }
    if (n == 0)
        throw std::invalid_argument("batch_stat: zero trials");
    const double mean = total / double(n);
    if (nb < 2)
        return {mean, 0.0};
    double mu = 0.0;
    for (int b = 0; b < nb; ++b)
        mu += batch_sums[b] / double(batch_counts[b]);
    mu /= nb;
    double ss = 0.0;
    for (int b = 0; b < nb; ++b)
    {
        const double d = batch_sums[b] / double(batch_counts[b]) - mu;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / double(nb - 1));
    return {mean, sd / std::sqrt(double(nb))};
}

// Contiguous [lo, hi) trial ranges for the standard 10-batch split; fewer
// batches when there are fewer trials than batches.
inline std::vector<std::pair<int, int>> batch_ranges(int trials, int num_batches = 10)
{
    const int nb = std::max(1, std::min(num_batches, trials));
    std::vector<std::pair<int, int>> out;
    out.reserve(nb);
    for (int b = 0; b < nb; ++b)
    {
        const int lo = int(int64_t(trials) * b / nb);
        const int hi = int(int64_t(trials) * (b + 1) / nb);
        out.emplace_back(lo, hi);
    }
    return out;
}

} // namespace rrmimo::harness
