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
#include <optional>
#include <stdexcept>

#include "array.hpp"
#include "basis.hpp"
#include "correlation.hpp"
#include "rng.hpp"
#include "spectrum.hpp"
#include "types.hpp"

namespace rrmimo
{

struct ImodResult
{
    int m_eta_hat;
    double phi_hat;
    DominantSupport support;
    int iterations;
    bool converged;
};

namespace detail
{

// tr(Q_m^H W^H(phi) Phi W(phi) Q_m) as omega^H K omega with
// K = Phi .* (Q_m Q_m^H)^T; one O(M^2) evaluation per angle.
inline CMat alignment_kernel(const CMat &phi_mtx, const CMat &qm)
{
    const CMat g = qm * qm.adjoint();
    return phi_mtx.cwiseProduct(g.transpose());
}

inline double alignment_energy(const CMat &kernel, const ArrayGeometry &geom, double phi)
{
    const CVec w = steering_vector(geom, phi);
    return std::real(w.dot(kernel * w)); // w^H K w
}

} // namespace detail

// Alternating rank and mean-AoA determination: update the energy spectrum at
// the current alignment, solve for the dominant support, then re-align by
// maximizing the in-support energy over an angle grid. Terminates when the
// (support, angle) pair repeats or max_iters is reached.
inline ImodResult imod(const Basis &basis, const SpatialCorrelation &corr, double eta,
                       const ArrayGeometry &geom, int max_iters = 10, double grid_deg = 0.5,
                       std::optional<double> phi_init = std::nullopt)
{
    if (!(eta > 0.0 && eta < 1.0))
        throw std::invalid_argument("imod: eta must lie in (0, 1)");
    if (max_iters < 1)
        throw std::invalid_argument("imod: max_iters must be positive");

    const double step = deg2rad(grid_deg);
    const int half = int(std::floor((pi / 2) / step + 1e-9));
    double phi_hat = phi_init.value_or(0.0);

    DominantSupport sup{0, {}, eta, 0.0, false};
    std::vector<Window> prev_windows;
    double prev_phi = phi_hat;
    int it = 0;
    bool converged = false;

    while (it < max_iters)
    {
        ++it;
        const auto [b, spec] = bias_matrix(basis, corr, geom, phi_hat);
        (void)b;
        sup = dominant_support(spec, eta);

        // The model class is lowpass after alignment, so the angle update
        // scores the leading-m window; the current support can sit mid-band
        // while still misaligned and would trap the alternation there.
        const CMat kernel = detail::alignment_kernel(corr.phi, basis.q.leftCols(sup.m));
        double best = -1.0, best_phi = 0.0;
        for (int k = -half; k <= half; ++k)
        {
            const double phi = k * step;
            const double v = detail::alignment_energy(kernel, geom, phi);
            if (v > best || (v == best && std::abs(phi) < std::abs(best_phi)))
            {
                best = v;
                best_phi = phi;
            }
        }

        const bool support_repeats =
            it > 1 && prev_windows.size() == sup.windows.size() &&
            std::equal(prev_windows.begin(), prev_windows.end(), sup.windows.begin(),
                       [](const Window &a, const Window &b)
                       { return a.start == b.start && a.len == b.len; });
        const bool phi_repeats = it > 1 && std::abs(best_phi - prev_phi) < 0.5 * step;
        prev_windows = sup.windows;
        prev_phi = phi_hat;
        phi_hat = best_phi;
        if (support_repeats && phi_repeats)
        {
            converged = true;
            break;
        }
    }
    return {sup.m, phi_hat, sup, it, converged};
}

// Low-complexity mean-AoA search parameters. The coarse threshold is an
// absolute energy; its default (M/10) suits narrow angular spreads, while
// wide spreads need a lower value (the DC bin holds roughly trace/bandwidth).
struct Alg2Params
{
    double step_mu_rad;
    double shrink_kappa;
    double threshold_t;
    int window_w;
    int max_coarse_draws;
    double mu_min_rad;

    static Alg2Params defaults(const ArrayGeometry &geom)
    {
        return {deg2rad(5.0), 2.0, 0.1 * geom.num_antennas, (geom.num_antennas + 3) / 4, 200,
                deg2rad(0.1)};
    }
};

// Randomized coarse draw until the DC-bin energy clears the threshold, then a
// shrinking-step descent on the spectrum's tail-window energy. Requires the
// DCT basis (the aligned spectrum must be lowpass for the tail objective to
// point at the mean AoA).
inline double aoa_search_fast(const Basis &basis, const SpatialCorrelation &corr,
                              const ArrayGeometry &geom, const Alg2Params &params, Rng &rng)
{
    if (basis.kind != BasisKind::dct2)
        throw std::invalid_argument("aoa_search_fast: DCT basis required");
    if (!(params.shrink_kappa > 1.0))
        throw std::invalid_argument("aoa_search_fast: kappa must exceed 1");
    if (params.window_w < 1 || params.window_w >= geom.num_antennas)
        throw std::invalid_argument("aoa_search_fast: window size out of range");

    const CMat dc_kernel = detail::alignment_kernel(corr.phi, basis.q.leftCols(1));
    const CMat tail_kernel =
        detail::alignment_kernel(corr.phi, basis.q.rightCols(params.window_w));

    double phi_hat = 0.0;
    bool accepted = false;
    for (int d = 0; d < params.max_coarse_draws; ++d)
    {
        const double cand = rng.uniform(-pi / 2, pi / 2);
        if (detail::alignment_energy(dc_kernel, geom, cand) >= params.threshold_t)
        {
            phi_hat = cand;
            accepted = true;
            break;
        }
    }
    if (!accepted)
        throw std::runtime_error("aoa_search_fast: coarse phase exhausted its draw budget; "
                                 "lower threshold_t (wide spreads hold less DC energy)");

    double mu = params.step_mu_rad;
    double cur = detail::alignment_energy(tail_kernel, geom, phi_hat);
    while (mu >= params.mu_min_rad)
    {
        const double up = std::min(phi_hat + mu, pi / 2);
        const double dn = std::max(phi_hat - mu, -pi / 2);
        const double vu = detail::alignment_energy(tail_kernel, geom, up);
        const double vd = detail::alignment_energy(tail_kernel, geom, dn);
        if (vu < cur && vu <= vd)
        {
            phi_hat = up;
            cur = vu;
        }
        else if (vd < cur)
        {
            phi_hat = dn;
            cur = vd;
        }
        else
        {
            mu /= params.shrink_kappa;
        }
    }
    return phi_hat;
}

// Large-array rank fraction of a single cluster:
// rho = min{1, (xi/lambda) |sin(phi - spread) - sin(phi + spread)|}.
inline double asymptotic_rank(const ArrayGeometry &geom, const ClusterSpec &cluster)
{
    const double lo = cluster.mean_aoa_rad - cluster.angular_spread_rad;
    const double hi = cluster.mean_aoa_rad + cluster.angular_spread_rad;
    return std::min(1.0, geom.spacing_wavelengths * std::abs(std::sin(lo) - std::sin(hi)));
}

} // namespace rrmimo
