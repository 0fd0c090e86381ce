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

#include <cmath>
#include <stdexcept>
#include <vector>

#include "array.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace rrmimo
{

enum class AoaDistribution
{
    uniform,      // i.i.d. uniform offsets in [-spread, +spread]
    fixed_offset, // equally spaced offsets (variance-reduced spectra)
};

// One angular cluster: subpath AoAs live in [mean - spread, mean + spread],
// which must stay strictly inside (-pi/2, pi/2).
struct ClusterSpec
{
    double mean_aoa_rad;
    double angular_spread_rad;
    int num_subpaths;
    AoaDistribution aoa_distribution;

    ClusterSpec(double mean_aoa, double spread, int subpaths = 20,
                AoaDistribution dist = AoaDistribution::uniform)
        : mean_aoa_rad(mean_aoa), angular_spread_rad(spread), num_subpaths(subpaths),
          aoa_distribution(dist)
    {
        if (!(spread > 0.0))
            throw std::invalid_argument("ClusterSpec: angular spread must be positive");
        if (mean_aoa - spread <= -pi / 2 || mean_aoa + spread >= pi / 2)
            throw std::invalid_argument("ClusterSpec: cluster leaves (-pi/2, pi/2)");
        if (subpaths < 1)
            throw std::invalid_argument("ClusterSpec: need at least one subpath");
    }
};

// Slow-fading gain beta = shadowing * pathloss. Either fixed directly or
// sampled as s * d^{-a} with 10*log10(s) zero-mean Gaussian (std shadow_sigma_dB).
struct LargeScaleFading
{
    double distance = 1.0;
    double pathloss_exp = 3.0;
    double shadow_sigma_dB = 0.0;
    double beta = 1.0;

    static LargeScaleFading fixed(double beta_value)
    {
        if (!(beta_value > 0.0))
            throw std::invalid_argument("LargeScaleFading: beta must be positive");
        LargeScaleFading l;
        l.beta = beta_value;
        return l;
    }

    static LargeScaleFading sample(double distance, double pathloss_exp, double shadow_sigma_dB,
                                   Rng &rng)
    {
        if (!(distance > 0.0))
            throw std::invalid_argument("LargeScaleFading: distance must be positive");
        if (!(pathloss_exp > 2.0))
            throw std::invalid_argument("LargeScaleFading: pathloss exponent must exceed 2");
        if (shadow_sigma_dB < 0.0)
            throw std::invalid_argument("LargeScaleFading: shadow sigma must be nonnegative");
        LargeScaleFading l;
        l.distance = distance;
        l.pathloss_exp = pathloss_exp;
        l.shadow_sigma_dB = shadow_sigma_dB;
        const double shadow_db = shadow_sigma_dB * rng.normal();
        l.beta = std::pow(10.0, shadow_db / 10.0) * std::pow(distance, -pathloss_exp);
        return l;
    }
};

struct ChannelRealization
{
    CVec h;
    std::vector<ClusterSpec> clusters;
};

// Per-antenna unit-variance clustered channel: the sum of L*S steering
// vectors with i.i.d. unit circular Gaussian subpath gains, scaled by
// (L*S)^{-1/2} so that E{||h||^2} = M.
inline ChannelRealization draw_channel(const ArrayGeometry &geom,
                                       const std::vector<ClusterSpec> &clusters, Rng &rng)
{
    if (clusters.empty())
        throw std::invalid_argument("draw_channel: cluster list is empty");
    const int m = geom.num_antennas;
    CVec h = CVec::Zero(m);
    int total_subpaths = 0;
    for (const auto &cl : clusters)
    {
        const int s_count = cl.num_subpaths;
        total_subpaths += s_count;
        for (int s = 0; s < s_count; ++s)
        {
            double offset;
            if (cl.aoa_distribution == AoaDistribution::uniform)
                offset = cl.angular_spread_rad * (2.0 * rng.uniform() - 1.0);
            else
                offset = -cl.angular_spread_rad +
                         (2.0 * s + 1.0) * cl.angular_spread_rad / double(s_count);
            const cxd g = rng.cnormal();
            h += g * steering_vector(geom, cl.mean_aoa_rad + offset);
        }
    }
    h /= std::sqrt(double(total_subpaths));
    return {std::move(h), clusters};
}

} // namespace rrmimo
