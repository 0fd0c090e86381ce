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

#include <stdexcept>
#include <vector>

#include "types.hpp"

namespace rrmimo
{

struct PilotBlock
{
    CVec p;
    double pilot_energy; // ||p||^2
    int num_symbols;     // T
};

enum class PilotStyle
{
    dft_rows, // rows of the T-point DFT, per-symbol unit power
};

// K mutually orthogonal pilots of length T >= K. Each symbol has unit power,
// so ||p||^2 = T for every user.
inline std::vector<PilotBlock> make_pilot(int T, int K, PilotStyle style = PilotStyle::dft_rows)
{
    if (T < 1 || K < 1 || T < K)
        throw std::invalid_argument("make_pilot: need T >= K >= 1");
    (void)style;
    std::vector<PilotBlock> blocks;
    blocks.reserve(K);
    for (int k = 0; k < K; ++k)
    {
        CVec p(T);
        for (int t = 0; t < T; ++t)
            p(t) = std::polar(1.0, -2.0 * pi * double(k) * double(t) / double(T));
        blocks.push_back({std::move(p), double(T), T});
    }
    return blocks;
}

} // namespace rrmimo
