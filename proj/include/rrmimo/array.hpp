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

#include "types.hpp"

namespace rrmimo
{

// Uniform linear array: M elements, spacing given as a fraction of the
// carrier wavelength (half-wavelength by default).
struct ArrayGeometry
{
    int num_antennas;
    double spacing_wavelengths;

    ArrayGeometry(int m, double spacing = 0.5) : num_antennas(m), spacing_wavelengths(spacing)
    {
        if (m < 2)
            throw std::invalid_argument("ArrayGeometry: need at least 2 antennas");
        if (!(spacing > 0.0))
            throw std::invalid_argument("ArrayGeometry: spacing must be positive");
    }
};

// Array response for a plane wave from broadside angle aoa_rad.
// Element i (0-based) carries phase -2*pi*i*(xi/lambda)*sin(aoa).
inline CVec steering_vector(const ArrayGeometry &geom, double aoa_rad)
{
    if (aoa_rad < -pi / 2 || aoa_rad > pi / 2)
        throw std::invalid_argument("steering_vector: AoA outside [-pi/2, pi/2]");
    const int m = geom.num_antennas;
    const double step = -2.0 * pi * geom.spacing_wavelengths * std::sin(aoa_rad);
    CVec a(m);
    for (int i = 0; i < m; ++i)
        a(i) = std::polar(1.0, step * i);
    return a;
}

} // namespace rrmimo
