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
#include <optional>
#include <stdexcept>
#include <vector>

#include "array.hpp"
#include "basis.hpp"
#include "correlation.hpp"
#include "types.hpp"

namespace rrmimo
{

// Linear phase modulation operator W(phi): diagonal of steering-vector
// phases. W(phi)^H a(phi) is the all-ones vector, which is what moves an
// aligned cluster's energy to the low transform indices.
struct LpmOperator
{
    double phi_rad;
    CVec diag;

    CVec apply(const CVec &x) const { return diag.cwiseProduct(x); }
    CVec apply_conj(const CVec &x) const { return diag.conjugate().cwiseProduct(x); }
};

inline LpmOperator lpm(const ArrayGeometry &geom, double phi)
{
    if (phi < -pi / 2 || phi > pi / 2)
        throw std::invalid_argument("lpm: phi outside [-pi/2, pi/2]");
    return {phi, steering_vector(geom, phi)};
}

// Channel energy spectrum: the real diagonal of a bias matrix. phi_used is
// absent for the unaligned (regular) model.
struct ChannelSpectrum
{
    RVec diag_b;
    BasisKind basis_kind;
    std::optional<double> phi_used;
    CorrSource source = CorrSource::analytic_integral;
};

// Bias matrix of the aligned model, B = Q^H W^H(phi) Phi W(phi) Q, or of the
// regular model (no phi), B = Q^H Phi Q. Returns the matrix and its spectrum.
inline std::pair<CMat, ChannelSpectrum> bias_matrix(const Basis &basis,
                                                    const SpatialCorrelation &corr,
                                                    const ArrayGeometry &geom,
                                                    std::optional<double> phi = std::nullopt)
{
    const int m = int(basis.q.rows());
    if (corr.phi.rows() != m || corr.phi.cols() != m)
        throw std::invalid_argument("bias_matrix: dimension mismatch");
    CMat c = corr.phi;
    if (phi)
    {
        const CVec w = steering_vector(geom, *phi);
        // W^H Phi W scales entry (i, j) by conj(w_i) w_j.
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < m; ++i)
                c(i, j) *= std::conj(w(i)) * w(j);
    }
    CMat b = basis.q.adjoint() * c * basis.q;
    ChannelSpectrum spec{b.diagonal().real(), basis.kind, phi, corr.source};
    return {std::move(b), std::move(spec)};
}

// How far the aligned correlation is from a real matrix:
// ||Im(W^H Phi W)||_F / ||Phi||_F.
inline double imag_leakage(const SpatialCorrelation &corr, const ArrayGeometry &geom, double phi)
{
    const int m = int(corr.phi.rows());
    const CVec w = steering_vector(geom, phi);
    double num = 0.0;
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i)
            num += std::pow(std::imag(corr.phi(i, j) * std::conj(w(i)) * w(j)), 2);
    return std::sqrt(num) / corr.phi.norm();
}

struct Window
{
    int start; // 0-based
    int len;
};

// Dominant support: the smallest total number of consecutive indices (one or
// two disjoint windows) capturing more than an eta fraction of the spectrum
// energy. feasible = false means even the full index set falls short, which
// only happens for estimated (indefinite) spectra; the full support is then
// returned.
struct DominantSupport
{
    int m;
    std::vector<Window> windows;
    double eta;
    double captured; // captured fraction, nonnegative-part normalization
    bool feasible;

    std::vector<int> indices() const
    {
        std::vector<int> out;
        out.reserve(m);
        for (const auto &w : windows)
            for (int i = 0; i < w.len; ++i)
                out.push_back(w.start + i);
        return out;
    }
};

namespace detail
{

// Window sums over the raw spectrum; feasibility threshold normalizes by the
// nonnegative part so that eta keeps its meaning on indefinite estimates
// (for exact spectra the denominator is the trace).
struct SupportScan
{
    const RVec &s;
    int m;
    std::vector<double> prefix;
    double denom;

    explicit SupportScan(const RVec &diag) : s(diag), m(int(diag.size())), prefix(m + 1, 0.0)
    {
        denom = 0.0;
        for (int i = 0; i < m; ++i)
        {
            prefix[i + 1] = prefix[i] + s(i);
            denom += std::max(s(i), 0.0);
        }
    }

    double wsum(int start, int len) const { return prefix[start + len] - prefix[start]; }
};

} // namespace detail

inline DominantSupport dominant_support(const ChannelSpectrum &spec, double eta,
                                        int num_windows = 1)
{
    if (!(eta > 0.0 && eta < 1.0))
        throw std::invalid_argument("dominant_support: eta must lie in (0, 1)");
    if (num_windows < 1 || num_windows > 2)
        throw std::invalid_argument("dominant_support: num_windows must be 1 or 2");

    const detail::SupportScan scan(spec.diag_b);
    const int m = scan.m;
    const double need = eta * scan.denom;

    if (num_windows == 1)
    {
        for (int len = 1; len <= m; ++len)
        {
            double best = -1.0;
            int best_start = 0;
            for (int start = 0; start + len <= m; ++start)
            {
                const double v = scan.wsum(start, len);
                if (v > best)
                {
                    best = v;
                    best_start = start;
                }
            }
            if (best > need)
                return {len, {{best_start, len}}, eta, best / scan.denom, true};
        }
        return {m, {{0, m}}, eta, scan.wsum(0, m) / scan.denom, false};
    }

    // Two windows: per length, the best window sum from each start onward.
    std::vector<std::vector<double>> sufbest(m + 1);
    std::vector<std::vector<int>> sufarg(m + 1);
    for (int len = 1; len <= m; ++len)
    {
        const int starts = m - len + 1;
        sufbest[len].assign(starts, 0.0);
        sufarg[len].assign(starts, 0);
        sufbest[len][starts - 1] = scan.wsum(starts - 1, len);
        sufarg[len][starts - 1] = starts - 1;
        for (int start = starts - 2; start >= 0; --start)
        {
            const double v = scan.wsum(start, len);
            if (v > sufbest[len][start + 1])
            {
                sufbest[len][start] = v;
                sufarg[len][start] = start;
            }
            else
            {
                sufbest[len][start] = sufbest[len][start + 1];
                sufarg[len][start] = sufarg[len][start + 1];
            }
        }
    }

    for (int total = 1; total <= m; ++total)
    {
        double best = -1.0;
        std::vector<Window> cfg;
        // Single window of the full length counts as a degenerate split.
        {
            const double v = sufbest[total][0];
            if (v > best)
            {
                best = v;
                cfg = {{sufarg[total][0], total}};
            }
        }
        for (int len1 = 1; len1 < total; ++len1)
        {
            const int len2 = total - len1;
            for (int start1 = 0; start1 + len1 <= m; ++start1)
            {
                const int next = start1 + len1 + 1; // disjoint, at least one gap
                if (next + len2 > m)
                    break;
                const double v = scan.wsum(start1, len1) + sufbest[len2][next];
                if (v > best)
                {
                    best = v;
                    cfg = {{start1, len1}, {sufarg[len2][next], len2}};
                }
            }
        }
        if (best > need)
            return {total, std::move(cfg), eta, best / scan.denom, true};
    }
    return {m, {{0, m}}, eta, scan.wsum(0, m) / scan.denom, false};
}

// Estimator variance m / (beta ||p||^2); basis-independent.
inline double theoretical_variance(int m, double beta, double pilot_energy)
{
    if (m < 0 || !(beta > 0.0) || !(pilot_energy > 0.0))
        throw std::invalid_argument("theoretical_variance: invalid arguments");
    return double(m) / (beta * pilot_energy);
}

// Truncation bias: spectrum mass outside the support (raw entries).
inline double theoretical_bias(const ChannelSpectrum &spec, const DominantSupport &support)
{
    double total = spec.diag_b.sum();
    for (const auto &w : support.windows)
        for (int i = 0; i < w.len; ++i)
            total -= spec.diag_b(w.start + i);
    return total;
}

inline double theoretical_mse(const ChannelSpectrum &spec, const DominantSupport &support,
                              double beta, double pilot_energy)
{
    int m = 0;
    for (const auto &w : support.windows)
        m += w.len;
    return theoretical_variance(m, beta, pilot_energy) + theoretical_bias(spec, support);
}

// MSE-minimizing order and support. Each retained index costs
// 1 / (beta ||p||^2) of variance and saves its spectrum entry of bias, so the
// unconstrained optimum keeps exactly the entries above that threshold; the
// window-constrained mode restricts the support to consecutive indices.
struct OptimalOrder
{
    int m;
    std::vector<int> support; // 0-based, increasing
    double mse;
};

inline OptimalOrder optimal_order(const ChannelSpectrum &spec, double beta, double pilot_energy,
                                  bool window_constrained)
{
    if (!(beta > 0.0) || !(pilot_energy > 0.0))
        throw std::invalid_argument("optimal_order: invalid arguments");
    const int m = int(spec.diag_b.size());
    const double thr = 1.0 / (beta * pilot_energy);
    const double total = spec.diag_b.sum();

    if (!window_constrained)
    {
        std::vector<int> support;
        double kept = 0.0;
        for (int i = 0; i < m; ++i)
            if (spec.diag_b(i) > thr)
            {
                support.push_back(i);
                kept += spec.diag_b(i);
            }
        const int order = int(support.size());
        return {order, std::move(support), order * thr + (total - kept)};
    }

    const detail::SupportScan scan(spec.diag_b);
    // Maximize wsum - len * thr; the empty support scores zero.
    double best = 0.0;
    int best_start = 0, best_len = 0;
    for (int len = 1; len <= m; ++len)
        for (int start = 0; start + len <= m; ++start)
        {
            const double v = scan.wsum(start, len) - len * thr;
            if (v > best)
            {
                best = v;
                best_start = start;
                best_len = len;
            }
        }
    std::vector<int> support(best_len);
    std::iota(support.begin(), support.end(), best_start);
    return {best_len, std::move(support), best_len * thr + (total - scan.wsum(best_start, best_len))};
}

} // namespace rrmimo
