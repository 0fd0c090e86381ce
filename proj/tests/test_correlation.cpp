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

#include <Eigen/Eigenvalues>

#include <rrmimo/correlation.hpp>

using namespace rrmimo;

namespace
{
const ArrayGeometry geom{40, 0.5};
const ClusterSpec cluster(deg2rad(60.0), deg2rad(7.2));
} // namespace

TEST_CASE("analytic correlation is Hermitian Toeplitz with unit diagonal")
{
    const auto corr = correlation_analytic(geom, cluster);
    const int m = geom.num_antennas;
    REQUIRE(corr.phi.rows() == m);
    CHECK((corr.phi - corr.phi.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    for (int i = 0; i < m; ++i)
        CHECK_THAT(std::abs(corr.phi(i, i) - cxd{1.0, 0.0}),
                   Catch::Matchers::WithinAbs(0.0, 1e-12));
    // Entries depend only on the antenna lag.
    for (int lag = 1; lag < 5; ++lag)
        for (int i = 0; i + lag < m; ++i)
            CHECK(std::abs(corr.phi(i, i + lag) - corr.phi(0, lag)) < 1e-13);
}

TEST_CASE("analytic correlation is positive semidefinite")
{
    const auto corr = correlation_analytic(geom, cluster);
    Eigen::SelfAdjointEigenSolver<CMat> es(corr.phi, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > -1e-8);
}

TEST_CASE("quadrature is converged at the default order")
{
    const auto a = correlation_analytic(geom, cluster, 64);
    const auto b = correlation_analytic(geom, cluster, 128);
    CHECK((a.phi - b.phi).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("analytic correlation matches the subpath ensemble")
{
    const int draws = 4000;
    Rng rng = make_stream(20260818, 0, 0, StreamPurpose::channel);
    const auto mc = correlation_ensemble(geom, {cluster}, draws, rng);
    const auto an = correlation_analytic(geom, cluster);
    // Entry standard error ~= 1/sqrt(draws); allow 3 of them in sup norm
    // (a simultaneous band over 40^2 entries, so this is generous only
    // pointwise, and the prototype run sits well inside it).
    const double tol = 3.0 / std::sqrt(double(draws));
    CHECK((mc.phi - an.phi).cwiseAbs().maxCoeff() < tol);
    CHECK(mc.source == CorrSource::ensemble_average);
}

TEST_CASE("multi-cluster correlation averages the per-cluster terms")
{
    const ClusterSpec second(deg2rad(-10.0), deg2rad(15.0));
    const auto both = correlation_analytic(geom, {cluster, second});
    const auto c1 = correlation_analytic(geom, cluster);
    const auto c2 = correlation_analytic(geom, second);
    CHECK((both.phi - 0.5 * (c1.phi + c2.phi)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THAT(std::abs(both.phi.trace()), Catch::Matchers::WithinAbs(geom.num_antennas, 1e-9));
}

TEST_CASE("correlation input validation")
{
    CHECK_THROWS_AS(correlation_analytic(geom, cluster, 8), std::invalid_argument);
    CHECK_THROWS_AS(correlation_analytic(geom, std::vector<ClusterSpec>{}),
                    std::invalid_argument);
    Rng rng(1);
    CHECK_THROWS_AS(correlation_ensemble(geom, {cluster}, 0, rng), std::invalid_argument);
}
