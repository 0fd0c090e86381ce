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
#include <utility>
#include <vector>

#include "channel.hpp"
#include "types.hpp"

namespace rrmimo
{

enum class CorrSource
{
    analytic_integral,
    ensemble_average,
    pilot_estimated,
};

// Spatial correlation Phi = E{h h^H}. Analytic and ensemble sources are
// Hermitian PSD with unit diagonal; pilot-estimated ones are only Hermitian
// (the noise-power subtraction can leave an indefinite matrix).
struct SpatialCorrelation
{
    CMat phi;
    CorrSource source;
    int sample_blocks = 0; // J, pilot-estimated source only
};

namespace detail
{

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n)
{
    std::vector<double> x(n), w(n);
    for (int i = 0; i < (n + 1) / 2; ++i)
    {
        double t = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it)
        {
            // Recurrence for P_n(t) and P'_n(t).
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k)
            {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double step = p1 / dp;
            t -= step;
            if (std::abs(step) < 1e-15)
                break;
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    return {x, w};
}

} // namespace detail

// Exact-integral correlation of a single cluster with uniform AoA density on
// [mean - spread, mean + spread]. The matrix is Toeplitz: entry (i, j) depends
// on the lag i - j only, so one quadrature pass over the lag axis suffices.
inline SpatialCorrelation correlation_analytic(const ArrayGeometry &geom, const ClusterSpec &cluster,
                                               int quadrature_points = 64)
{
    if (quadrature_points < 32)
        throw std::invalid_argument("correlation_analytic: need at least 32 quadrature points");
    const int m = geom.num_antennas;
    const auto [nodes, weights] = detail::gauss_legendre(quadrature_points);

    // Lag response c_k = (1/2) * sum_t w_t exp(-j*2*pi*(xi/lambda)*k*sin(phi + spread*x_t));
    // the 1/2 absorbs the uniform density over the [-1, 1] mapped interval.
    std::vector<cxd> lag(m);
    for (int k = 0; k < m; ++k)
    {
        cxd acc(0.0, 0.0);
        for (int t = 0; t < quadrature_points; ++t)
        {
            const double theta = cluster.mean_aoa_rad + cluster.angular_spread_rad * nodes[t];
            const double phase = -2.0 * pi * geom.spacing_wavelengths * double(k) * std::sin(theta);
            acc += weights[t] * std::polar(1.0, phase);
        }
        lag[k] = 0.5 * acc;
    }

    CMat phi(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            phi(i, j) = (i >= j) ? lag[i - j] : std::conj(lag[j - i]);
    return {std::move(phi), CorrSource::analytic_integral};
}

// Equal-weight mixture over clusters: Phi = (1/L) sum_l Phi_l, matching the
// (L*S)^{-1/2} channel normalization.
inline SpatialCorrelation correlation_analytic(const ArrayGeometry &geom,
                                               const std::vector<ClusterSpec> &clusters,
                                               int quadrature_points = 64)
{
    if (clusters.empty())
        throw std::invalid_argument("correlation_analytic: cluster list is empty");
    const int m = geom.num_antennas;
    CMat phi = CMat::Zero(m, m);
    for (const auto &cl : clusters)
        phi += correlation_analytic(geom, cl, quadrature_points).phi;
    phi /= double(clusters.size());
    return {std::move(phi), CorrSource::analytic_integral};
}

// Sample average of h h^H, symmetrized; the Monte Carlo oracle for the
// analytic integral.
inline SpatialCorrelation correlation_ensemble(const ArrayGeometry &geom,
                                               const std::vector<ClusterSpec> &clusters,
                                               int num_draws, Rng &rng)
{
    if (num_draws < 1)
        throw std::invalid_argument("correlation_ensemble: need at least one draw");
    const int m = geom.num_antennas;
    CMat phi = CMat::Zero(m, m);
    for (int d = 0; d < num_draws; ++d)
    {
        const ChannelRealization ch = draw_channel(geom, clusters, rng);
        phi.selfadjointView<Eigen::Lower>().rankUpdate(ch.h, 1.0);
    }
    phi = CMat(phi.selfadjointView<Eigen::Lower>());
    phi /= double(num_draws);
    phi = 0.5 * (phi + phi.adjoint()).eval();
    return {std::move(phi), CorrSource::ensemble_average};
}

} // namespace rrmimo
