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

#include <catch2/catch_amalgamated.hpp>

#include <rrmimo/correlation.hpp>
#include <rrmimo/rank_aoa.hpp>

using namespace rrmimo;

namespace
{

CMat aligned(const CMat &phi, const ArrayGeometry &geom, double angle)
{
    const CVec w = steering_vector(geom, angle);
    CMat c = phi;
    for (int j = 0; j < c.cols(); ++j)
        for (int i = 0; i < c.rows(); ++i)
            c(i, j) *= std::conj(w(i)) * w(j);
    return c;
}

} // namespace

TEST_CASE("alternating search on uncorrelated antennas")
{
    // Flat spectrum: the support is angle-independent, so the first support
    // repeat ends the loop.
    const ArrayGeometry geom{40, 0.5};
    const SpatialCorrelation corr{CMat::Identity(40, 40), CorrSource::analytic_integral, 0};
    const auto res = imod(basis_dct2(40), corr, 0.9, geom);
    CHECK(res.m_eta_hat == 37); // smallest m with m/40 > 0.9
    CHECK(res.converged);
    CHECK(res.iterations <= 3);
}

TEST_CASE("alternating search locks onto a single steering direction")
{
    const ArrayGeometry geom{48, 0.5};
    const double target = deg2rad(20.0);
    const CVec a = steering_vector(geom, target);
    SpatialCorrelation corr{a * a.adjoint(), CorrSource::analytic_integral, 0};
    const auto res = imod(basis_dct2(48), corr, 0.95, geom);
    CHECK(res.m_eta_hat == 1);
    CHECK(std::abs(rad2deg(res.phi_hat) - 20.0) <= 0.5);
    CHECK(res.converged);
    CHECK(res.iterations <= 6);
    REQUIRE(res.support.windows.size() >= 1);
    CHECK(res.support.windows[0].start == 0);
}

TEST_CASE("alternating search from the known mean angle")
{
    const ArrayGeometry geom{100, 0.5};
    const double phi0 = deg2rad(60.0);
    const auto corr = correlation_analytic(geom, ClusterSpec(phi0, deg2rad(7.2)), 96);
    const auto spec = bias_matrix(basis_dct2(100), corr, geom, phi0).second;
    const int m_eta = dominant_support(spec, 0.99).m;

    const auto res = imod(basis_dct2(100), corr, 0.99, geom, 10, 0.5, phi0);
    CHECK(res.converged);
    CHECK(res.iterations <= 5);
    CHECK(std::abs(res.m_eta_hat - m_eta) <= 1);
    CHECK(std::abs(rad2deg(res.phi_hat) - 60.0) <= 0.5);
}

TEST_CASE("alternating search from scratch still finds the cluster")
{
    const ArrayGeometry geom{100, 0.5};
    const double phi0 = deg2rad(60.0);
    const auto corr = correlation_analytic(geom, ClusterSpec(phi0, deg2rad(7.2)), 96);
    const auto spec = bias_matrix(basis_dct2(100), corr, geom, phi0).second;
    const int m_eta = dominant_support(spec, 0.99).m;

    const auto res = imod(basis_dct2(100), corr, 0.99, geom);
    CHECK(res.converged);
    CHECK(std::abs(rad2deg(res.phi_hat) - 60.0) <= 1.0);
    CHECK(std::abs(res.m_eta_hat - m_eta) <= 1);
}

TEST_CASE("eigenbasis of the aligned correlation converges immediately")
{
    // The KLT spectrum is the eigenvalue list at the alignment angle; no
    // other angle can beat it, so the search settles by the second pass.
    const ArrayGeometry geom{100, 0.5};
    const double phi0 = deg2rad(60.0);
    const auto corr = correlation_analytic(geom, ClusterSpec(phi0, deg2rad(7.2)), 96);
    const Basis q = basis_klt(aligned(corr.phi, geom, phi0));
    const auto res = imod(q, corr, 0.99, geom, 10, 0.5, phi0);
    CHECK(res.converged);
    CHECK(res.iterations <= 2);
    const RVec eigs = klt_eigenvalues(corr.phi);
    // m_eta from the eigenvalues directly.
    double need = 0.0;
    for (int i = 0; i < eigs.size(); ++i)
        need += std::max(eigs(i), 0.0);
    need *= 0.99;
    double acc = 0.0;
    int m_eig = 0;
    while (acc <= need && m_eig < 100)
        acc += eigs(m_eig++);
    CHECK(res.m_eta_hat == m_eig);
}

TEST_CASE("imod input validation")
{
    const ArrayGeometry geom{16, 0.5};
    const SpatialCorrelation corr{CMat::Identity(16, 16), CorrSource::analytic_integral, 0};
    CHECK_THROWS_AS(imod(basis_dct2(16), corr, 0.0, geom), std::invalid_argument);
    CHECK_THROWS_AS(imod(basis_dct2(16), corr, 1.0, geom), std::invalid_argument);
    CHECK_THROWS_AS(imod(basis_dct2(16), corr, 0.9, geom, 0), std::invalid_argument);
}

TEST_CASE("fast angle search finds a narrow cluster")
{
    const ArrayGeometry geom{100, 0.5};
    const auto corr = correlation_analytic(geom, ClusterSpec(deg2rad(60.0), deg2rad(7.2)), 96);
    const auto params = Alg2Params::defaults(geom);
    Rng rng = make_stream(20260818, 0, 0, StreamPurpose::coarse_aoa);
    const double phi = aoa_search_fast(basis_dct2(100), corr, geom, params, rng);
    CHECK(std::abs(rad2deg(phi) - 60.0) <= 2.0);
}

TEST_CASE("fast angle search is seed-reproducible")
{
    // Same narrow scenario the default threshold is calibrated for: the DC
    // bin holds peak energy ~ 1/(spread * cos aoa), so steep mean angles
    // hold more of it than broadside ones.
    const ArrayGeometry geom{100, 0.5};
    const auto corr = correlation_analytic(geom, ClusterSpec(deg2rad(60.0), deg2rad(7.2)), 96);
    const auto params = Alg2Params::defaults(geom);
    Rng a = make_stream(77, 0, 0, StreamPurpose::coarse_aoa);
    Rng b = make_stream(77, 0, 0, StreamPurpose::coarse_aoa);
    CHECK(aoa_search_fast(basis_dct2(100), corr, geom, params, a) ==
          aoa_search_fast(basis_dct2(100), corr, geom, params, b));
}

TEST_CASE("fast angle search demands more draws than wide spreads provide")
{
    // At AS=15 deg the DC bin never holds a tenth of the trace, so the coarse
    // stage exhausts its budget and reports the remedy.
    const ArrayGeometry geom{100, 0.5};
    const auto corr = correlation_analytic(geom, ClusterSpec(deg2rad(0.0), deg2rad(15.0)), 96);
    const auto params = Alg2Params::defaults(geom);
    Rng rng = make_stream(1, 0, 0, StreamPurpose::coarse_aoa);
    CHECK_THROWS_AS(aoa_search_fast(basis_dct2(100), corr, geom, params, rng),
                    std::runtime_error);

    // Scaling the threshold to the wider spread restores the search.
    auto lowered = params;
    lowered.threshold_t = 0.03 * geom.num_antennas;
    Rng rng2 = make_stream(1, 0, 0, StreamPurpose::coarse_aoa);
    const double phi = aoa_search_fast(basis_dct2(100), corr, geom, lowered, rng2);
    CHECK(std::abs(rad2deg(phi) - 0.0) <= 2.0);
}

TEST_CASE("fast angle search input validation")
{
    const ArrayGeometry geom{32, 0.5};
    const SpatialCorrelation corr{CMat::Identity(32, 32), CorrSource::analytic_integral, 0};
    auto params = Alg2Params::defaults(geom);
    Rng rng(3);
    CHECK_THROWS_AS(aoa_search_fast(basis_dft(32), corr, geom, params, rng),
                    std::invalid_argument);
    params.shrink_kappa = 1.0;
    CHECK_THROWS_AS(aoa_search_fast(basis_dct2(32), corr, geom, params, rng),
                    std::invalid_argument);
}

TEST_CASE("asymptotic rank fraction from the sine aperture")
{
    const ArrayGeometry geom{100, 0.5};
    const ClusterSpec centered(deg2rad(0.0), deg2rad(15.0));
    CHECK_THAT(asymptotic_rank(geom, centered),
               Catch::Matchers::WithinAbs(std::sin(deg2rad(15.0)), 1e-12));
    // Steeper incidence shrinks the sine aperture.
    const ClusterSpec steep(deg2rad(60.0), deg2rad(15.0));
    CHECK(asymptotic_rank(geom, steep) < asymptotic_rank(geom, centered));
    // The fraction saturates at one.
    const ArrayGeometry wide{100, 4.0};
    CHECK(asymptotic_rank(wide, centered) == 1.0);
}
