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

#include "channel.hpp"
#include "pilot.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace rrmimo
{

// One training block: Y = sqrt(beta) h p^H + noise_scale * N, with N i.i.d.
// unit-variance circular complex Gaussian. noise_scale = 0 is the noiseless
// test hook.
inline CMat synthesize_rx(const ChannelRealization &ch, const LargeScaleFading &lsfc,
                          const PilotBlock &pilot, Rng &rng, double noise_scale = 1.0)
{
    const int m = int(ch.h.size());
    const int T = pilot.num_symbols;
    CMat y = std::sqrt(lsfc.beta) * ch.h * pilot.p.adjoint();
    if (noise_scale != 0.0)
        for (int t = 0; t < T; ++t)
            for (int i = 0; i < m; ++i)
                y(i, t) += noise_scale * rng.cnormal();
    return y;
}

// Multi-user superposition over orthogonal pilots.
inline CMat synthesize_rx(const std::vector<ChannelRealization> &chans,
                          const std::vector<LargeScaleFading> &lsfcs,
                          const std::vector<PilotBlock> &pilots, Rng &rng,
                          double noise_scale = 1.0)
{
    if (chans.empty() || chans.size() != lsfcs.size() || chans.size() != pilots.size())
        throw std::invalid_argument("synthesize_rx: user lists must be nonempty and equal-sized");
    const int m = int(chans[0].h.size());
    const int T = pilots[0].num_symbols;
    CMat y = CMat::Zero(m, T);
    for (size_t k = 0; k < chans.size(); ++k)
        y += std::sqrt(lsfcs[k].beta) * chans[k].h * pilots[k].p.adjoint();
    if (noise_scale != 0.0)
        for (int t = 0; t < T; ++t)
            for (int i = 0; i < m; ++i)
                y(i, t) += noise_scale * rng.cnormal();
    return y;
}

} // namespace rrmimo
