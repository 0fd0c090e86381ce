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
#include <vector>

#include "array.hpp"
#include "basis.hpp"
#include "correlation.hpp"
#include "pilot.hpp"
#include "spectrum.hpp"
#include "types.hpp"

namespace rrmimo
{

// Pilot-matched filter output Y p = gamma h + N p with gamma = sqrt(beta)||p||^2.
struct MatchedFilterOutput
{
    CVec yp;
    double gamma;
};

inline MatchedFilterOutput matched_filter(const CMat &y, const PilotBlock &pilot, double beta)
{
    if (!(beta > 0.0))
        throw std::invalid_argument("matched_filter: beta must be positive");
    if (y.cols() != pilot.num_symbols)
        throw std::invalid_argument("matched_filter: block length mismatch");
    return {y * pilot.p, std::sqrt(beta) * pilot.pilot_energy};
}

// Moment estimate of the slow-fading gain from one block:
// E{||Yp||^2} = beta ||p||^4 M + M ||p||^2. Clamped away from zero so the
// derived gamma stays usable at very low SNR.
inline double lsfc_estimate(const CMat &y, const PilotBlock &pilot)
{
    const double m = double(y.rows());
    const double e2 = pilot.pilot_energy;
    const double raw = ((y * pilot.p).squaredNorm() - m * e2) / (m * e2 * e2);
    return std::max(raw, 1e-12);
}

struct EstimationReport
{
    CVec h_hat;
    std::optional<double> phi_hat;
};

// Conventional least squares: the full-rank reduced-rank estimator.
inline EstimationReport estimate_ls(const MatchedFilterOutput &mf)
{
    return {mf.yp / mf.gamma, std::nullopt};
}

// Regular reduced-rank estimate: project the LS estimate onto span(Q_m).
// An empty support yields the zero vector.
inline EstimationReport estimate_rr_regular(const MatchedFilterOutput &mf,
                                            const TruncatedBasis &trunc)
{
    if (trunc.order() == 0)
        return {CVec::Zero(mf.yp.size()), std::nullopt};
    return {(trunc.qm * (trunc.qm.adjoint() * mf.yp)) / mf.gamma, std::nullopt};
}

// Mean-AoA line search: maximize ||(W(phi) Q_m)^H Y p||^2 over a uniform grid
// on [-pi/2, pi/2], then refine with one parabolic fit through the best grid
// point and its neighbors. Grid ties resolve toward smaller |phi|.
inline double search_mean_aoa(const MatchedFilterOutput &mf, const TruncatedBasis &trunc,
                              const ArrayGeometry &geom, double grid_deg = 0.5)
{
    if (trunc.order() < 1)
        throw std::invalid_argument("search_mean_aoa: need a nonempty support");
    if (!(grid_deg > 0.0))
        throw std::invalid_argument("search_mean_aoa: grid must be positive");
    const int m = geom.num_antennas;
    const double step = deg2rad(grid_deg);
    const int half = int(std::floor((pi / 2) / step + 1e-9));

    const auto objective = [&](double phi) {
        const CVec w = steering_vector(geom, phi);
        return (trunc.qm.adjoint() * w.conjugate().cwiseProduct(mf.yp).matrix()).squaredNorm();
    };
    (void)m;

    double best = -1.0, best_phi = 0.0;
    int best_k = 0;
    for (int k = -half; k <= half; ++k)
    {
        const double phi = k * step;
        const double v = objective(phi);
        // Strict improvement plus the |phi| tie rule: iterate in order of
        // increasing |phi| by checking the pair (|k|, sign).
        if (v > best)
        {
            best = v;
            best_phi = phi;
            best_k = k;
        }
        else if (v == best && std::abs(phi) < std::abs(best_phi))
        {
            best_phi = phi;
            best_k = k;
        }
    }

    if (best_k > -half && best_k < half)
    {
        const double vl = objective((best_k - 1) * step);
        const double vr = objective((best_k + 1) * step);
        const double denom = vl - 2.0 * best + vr;
        if (denom < 0.0)
        {
            const double delta = 0.5 * (vl - vr) / denom;
            if (std::abs(delta) <= 1.0)
                return best_phi + delta * step;
        }
    }
    return best_phi;
}

// Phase-aligned reduced-rank estimate with a known mean AoA.
inline EstimationReport estimate_rr_lpm_known(const MatchedFilterOutput &mf,
                                              const TruncatedBasis &trunc,
                                              const ArrayGeometry &geom, double phi)
{
    if (trunc.order() == 0)
        return {CVec::Zero(mf.yp.size()), phi};
    const CVec w = steering_vector(geom, phi);
    const CVec aligned = w.conjugate().cwiseProduct(mf.yp);
    const CVec proj = trunc.qm * (trunc.qm.adjoint() * aligned);
    return {w.cwiseProduct(proj) / mf.gamma, phi};
}

// Phase-aligned reduced-rank estimate; the mean AoA comes from the line search.
inline EstimationReport estimate_rr_lpm(const MatchedFilterOutput &mf, const TruncatedBasis &trunc,
                                        const ArrayGeometry &geom, double grid_deg = 0.5)
{
    const double phi = search_mean_aoa(mf, trunc, geom, grid_deg);
    return estimate_rr_lpm_known(mf, trunc, geom, phi);
}

// Linear MMSE benchmark: h = Phi (||p||^2 Phi + I)^{-1} Y p, solved with a
// Hermitian factorization (never an explicit inverse).
inline EstimationReport estimate_mmse(const CMat &y, const PilotBlock &pilot,
                                      const SpatialCorrelation &corr)
{
    const int m = int(y.rows());
    if (corr.phi.rows() != m)
        throw std::invalid_argument("estimate_mmse: dimension mismatch");
    CMat a = pilot.pilot_energy * corr.phi + CMat::Identity(m, m);
    Eigen::LDLT<CMat> ldlt(a);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("estimate_mmse: singular system");
    const CVec yp = y * pilot.p;
    return {corr.phi * ldlt.solve(yp), std::nullopt};
}

// Sample-average correlation estimate from J training blocks:
// Psi = (1/J) sum (Y_i p_i)(Y_i p_i)^H, Phi = (Psi - ||p||^2 I) / gamma^2.
// rank(Psi) <= J, so the result is indefinite for J < M.
inline SpatialCorrelation estimate_correlation(const std::vector<CMat> &blocks,
                                               const PilotBlock &pilot, double gamma)
{
    if (blocks.empty())
        throw std::invalid_argument("estimate_correlation: no blocks");
    if (!(gamma > 0.0))
        throw std::invalid_argument("estimate_correlation: gamma must be positive");
    const int m = int(blocks[0].rows());
    CMat psi = CMat::Zero(m, m);
    for (const auto &y : blocks)
    {
        const CVec yp = y * pilot.p;
        psi.selfadjointView<Eigen::Lower>().rankUpdate(yp, 1.0);
    }
    psi = CMat(psi.selfadjointView<Eigen::Lower>());
    psi /= double(blocks.size());
    CMat phi = (psi - pilot.pilot_energy * CMat::Identity(m, m)) / (gamma * gamma);
    phi = 0.5 * (phi + phi.adjoint()).eval();
    return {std::move(phi), CorrSource::pilot_estimated, int(blocks.size())};
}

} // namespace rrmimo
