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

#include <rrmimo/basis.hpp>
#include <rrmimo/correlation.hpp>
#include <rrmimo/estimators.hpp>
#include <rrmimo/pilot.hpp>
#include <rrmimo/rx.hpp>

using namespace rrmimo;

namespace
{

bool orthonormal(const CMat &q)
{
    const int m = int(q.cols());
    return (q.adjoint() * q - CMat::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-10;
}

// Positive-definite stand-in for a near-singular analytic correlation; keeps
// the eigenvectors and the variance ordering intact.
CMat blend(const CMat &phi, double delta = 1e-9)
{
    const int m = int(phi.rows());
    return (1.0 - delta) * phi + delta * CMat::Identity(m, m);
}

} // namespace

TEST_CASE("all bases are unitary")
{
    const int m = 16;
    CHECK(orthonormal(basis_dct2(m).q));
    CHECK(orthonormal(basis_dft(m).q));
    CHECK(orthonormal(basis_polynomial(m).q));
    const ArrayGeometry geom{m, 0.5};
    const auto corr = correlation_analytic(geom, ClusterSpec(deg2rad(30.0), deg2rad(15.0)));
    CHECK(orthonormal(basis_klt(corr.phi).q));
    CHECK_THROWS_AS(basis_dct2(1), std::invalid_argument);
}

TEST_CASE("DCT-2 closed form at M=2")
{
    const auto q = basis_dct2(2).q;
    const double s = 1.0 / std::sqrt(2.0);
    CHECK_THAT(std::abs(q(0, 0) - cxd{s, 0}), Catch::Matchers::WithinAbs(0.0, 1e-12));
    CHECK_THAT(std::abs(q(1, 0) - cxd{s, 0}), Catch::Matchers::WithinAbs(0.0, 1e-12));
    CHECK_THAT(std::abs(q(0, 1) - cxd{s, 0}), Catch::Matchers::WithinAbs(0.0, 1e-12));
    CHECK_THAT(std::abs(q(1, 1) - cxd{-s, 0}), Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("polynomial basis starts from the constant vector")
{
    const auto q = basis_polynomial(8).q;
    const double s = 1.0 / std::sqrt(8.0);
    for (int i = 0; i < 8; ++i)
        CHECK_THAT(std::abs(q(i, 0) - cxd{s, 0}), Catch::Matchers::WithinAbs(0.0, 1e-10));
}

TEST_CASE("KLT of a 2x2 correlation")
{
    CMat phi(2, 2);
    phi << 1.0, 0.9, 0.9, 1.0;
    const RVec eigs = klt_eigenvalues(phi);
    CHECK_THAT(eigs(0), Catch::Matchers::WithinAbs(1.9, 1e-12));
    CHECK_THAT(eigs(1), Catch::Matchers::WithinAbs(0.1, 1e-12));
    const auto basis = basis_klt(phi);
    // Transform variances equal the eigenvalues, in descending order.
    const cxd v0 = basis.q.col(0).dot(phi * basis.q.col(0));
    CHECK_THAT(std::real(v0), Catch::Matchers::WithinAbs(1.9, 1e-12));
    // Coding gain: arithmetic mean 1 over geometric mean sqrt(0.19).
    CHECK_THAT(coding_gain(basis, phi), Catch::Matchers::WithinAbs(1.0 / std::sqrt(0.19), 1e-9));
}

TEST_CASE("KLT maximizes the coding gain")
{
    const ArrayGeometry geom{32, 0.5};
    const auto corr = correlation_analytic(geom, ClusterSpec(deg2rad(60.0), deg2rad(7.2)));
    const CMat phi = blend(corr.phi);
    const double g_klt = coding_gain(basis_klt(phi), phi);
    CHECK(g_klt >= coding_gain(basis_dct2(32), phi) - 1e-9);
    CHECK(g_klt >= coding_gain(basis_dft(32), phi) - 1e-9);
    CHECK(g_klt >= coding_gain(basis_polynomial(32), phi) - 1e-9);
    CHECK(coding_gain(basis_dct2(32), phi) >= 1.0);
}

TEST_CASE("coding gain grows with the array size")
{
    const ClusterSpec cl(deg2rad(60.0), deg2rad(7.2));
    double prev_klt = 1.0, prev_dct = 1.0;
    for (int m : {25, 50, 100})
    {
        const ArrayGeometry geom{m, 0.5};
        const CMat phi = blend(correlation_analytic(geom, cl).phi);
        const double g_klt = coding_gain(basis_klt(phi), phi);
        const double g_dct = coding_gain(basis_dct2(m), phi);
        CHECK(g_klt >= g_dct - 1e-9);
        CHECK(g_dct >= 1.0);
        CHECK(g_klt > prev_klt);
        CHECK(g_dct > prev_dct);
        prev_klt = g_klt;
        prev_dct = g_dct;
    }
}

TEST_CASE("coding gain rejects nonpositive transform variances")
{
    // A pilot-estimated correlation from fewer blocks than antennas is
    // indefinite, which the geometric mean cannot absorb.
    const ArrayGeometry geom{20, 0.5};
    const std::vector<ClusterSpec> clusters{ClusterSpec(deg2rad(10.0), deg2rad(7.2))};
    const auto pilot = make_pilot(8, 1)[0];
    std::vector<CMat> blocks;
    Rng rng_ch = make_stream(4, 0, 0, StreamPurpose::channel);
    Rng rng_n = make_stream(4, 0, 0, StreamPurpose::noise);
    for (int j = 0; j < 3; ++j)
    {
        const auto ch = draw_channel(geom, clusters, rng_ch);
        blocks.push_back(synthesize_rx(ch, LargeScaleFading::fixed(1.0), pilot, rng_n));
    }
    const auto est = estimate_correlation(blocks, pilot, pilot.pilot_energy);
    // The estimate's own KLT puts the negative eigenvalues on the diagonal.
    CHECK_THROWS_AS(coding_gain(basis_klt(est.phi), est.phi), std::domain_error);
}

TEST_CASE("klt eigenvalues are sorted descending")
{
    const ArrayGeometry geom{24, 0.5};
    const auto corr = correlation_analytic(geom, ClusterSpec(deg2rad(0.0), deg2rad(15.0)));
    const RVec eigs = klt_eigenvalues(corr.phi);
    for (int i = 1; i < eigs.size(); ++i)
        CHECK(eigs(i) <= eigs(i - 1) + 1e-12);
    CHECK_THAT(eigs.sum(), Catch::Matchers::WithinAbs(24.0, 1e-9));
}

TEST_CASE("truncate selects the requested columns")
{
    const auto basis = basis_dct2(8);
    const auto trunc = truncate(basis, {1, 3, 4});
    REQUIRE(trunc.order() == 3);
    CHECK((trunc.qm.col(0) - basis.q.col(1)).norm() < 1e-15);
    CHECK((trunc.qm.col(2) - basis.q.col(4)).norm() < 1e-15);
    CHECK_THROWS_AS(truncate(basis, {7, 8}), std::invalid_argument);
    CHECK_THROWS_AS(truncate(basis, {2, 2}), std::invalid_argument);
    CHECK(truncate(basis, {}).order() == 0); // degenerate order-zero basis is allowed
}
