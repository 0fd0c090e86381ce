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

#include <rrmimo/channel.hpp>

using namespace rrmimo;

TEST_CASE("steering vector phases")
{
    const ArrayGeometry geom{4, 0.5};
    const CVec a = steering_vector(geom, deg2rad(30.0));
    REQUIRE(a.size() == 4);
    // First element is the phase reference.
    CHECK_THAT(std::abs(a(0) - cxd{1.0, 0.0}), Catch::Matchers::WithinAbs(0.0, 1e-12));
    // Element i advances by -2*pi*(spacing)*sin(phi) per antenna; at 30 deg
    // and half-wavelength spacing that is -pi/2, i.e. a(1) = -j.
    CHECK_THAT(std::abs(a(1) - cxd{0.0, -1.0}), Catch::Matchers::WithinAbs(0.0, 1e-12));
    CHECK_THAT(std::abs(a(2) - cxd{-1.0, 0.0}), Catch::Matchers::WithinAbs(0.0, 1e-12));
    for (int i = 0; i < 4; ++i)
        CHECK_THAT(std::abs(a(i)), Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("cluster spec validation")
{
    CHECK_NOTHROW(ClusterSpec(deg2rad(60.0), deg2rad(7.2)));
    CHECK_THROWS_AS(ClusterSpec(deg2rad(60.0), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ClusterSpec(deg2rad(60.0), -0.1), std::invalid_argument);
    CHECK_THROWS_AS(ClusterSpec(deg2rad(95.0), deg2rad(7.2)), std::invalid_argument);
    CHECK_THROWS_AS(ClusterSpec(deg2rad(60.0), deg2rad(7.2), 0), std::invalid_argument);
}

TEST_CASE("channel draws are reproducible per stream")
{
    const ArrayGeometry geom{32, 0.5};
    const std::vector<ClusterSpec> clusters{ClusterSpec(deg2rad(60.0), deg2rad(7.2))};
    Rng a = make_stream(42, 3, 1, StreamPurpose::channel);
    Rng b = make_stream(42, 3, 1, StreamPurpose::channel);
    const auto ha = draw_channel(geom, clusters, a);
    const auto hb = draw_channel(geom, clusters, b);
    REQUIRE((ha.h - hb.h).norm() == 0.0);

    Rng c = make_stream(42, 4, 1, StreamPurpose::channel);
    const auto hc = draw_channel(geom, clusters, c);
    CHECK((ha.h - hc.h).norm() > 1e-6);
}

TEST_CASE("channel power normalization E{|h|^2} = M")
{
    const ArrayGeometry geom{64, 0.5};
    const std::vector<ClusterSpec> clusters{ClusterSpec(deg2rad(60.0), deg2rad(7.2)),
                                            ClusterSpec(deg2rad(-10.0), deg2rad(15.0))};
    const int trials = 400;
    double acc = 0.0;
    for (int t = 0; t < trials; ++t)
    {
        Rng rng = make_stream(2026, t, 0, StreamPurpose::channel);
        acc += draw_channel(geom, clusters, rng).h.squaredNorm();
    }
    // Mean power M with relative sd ~ sqrt(2/(L*S*trials)); 5 sigma band.
    CHECK_THAT(acc / trials / geom.num_antennas, Catch::Matchers::WithinAbs(1.0, 0.06));
}

TEST_CASE("fixed-offset subpath law is gain-randomized only")
{
    const ArrayGeometry geom{16, 0.5};
    const std::vector<ClusterSpec> clusters{
        ClusterSpec(deg2rad(20.0), deg2rad(10.0), 8, AoaDistribution::fixed_offset)};
    Rng rng = make_stream(5, 0, 0, StreamPurpose::channel);
    const auto ch = draw_channel(geom, clusters, rng);
    REQUIRE(ch.h.allFinite());
    CHECK(ch.h.squaredNorm() > 0.0);
}

TEST_CASE("large-scale fading validation")
{
    CHECK_THROWS_AS(LargeScaleFading::fixed(0.0), std::invalid_argument);
    CHECK(LargeScaleFading::fixed(2.5).beta == 2.5);
}
