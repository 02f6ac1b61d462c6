// SPDX-License-Identifier: Apache-2.0
//
// dmadoa: computational DoA and polarization estimation with dynamic metasurface antennas
// Copyright (C) 2026 The dmadoa authors
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

#include "dmadoa/grid.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace dmadoa;

namespace
{
    // Independent enumeration of the grid convention: one point per pole, interior rings
    // theta = s_t, 2 s_t, ..., phi = -180 + s_p, ..., 180
    std::size_t enumerate_count(double sp, double st)
    {
        const int n_rings = static_cast<int>(std::lround(180.0 / st)) - 1;
        const int per_ring = static_cast<int>(std::lround(360.0 / sp));
        return static_cast<std::size_t>(2 + n_rings * per_ring);
    }
}

TEST(Grid, NinetyDegreeEnumeration)
{
    SphericalGrid g(90, 90);
    ASSERT_EQ(g.size(), 6u);
    EXPECT_EQ(g[0].theta, 0.0);
    EXPECT_EQ(g[5].theta, 180.0);
    std::set<double> phis;
    for (std::size_t d = 1; d <= 4; ++d)
    {
        EXPECT_EQ(g[d].theta, 90.0);
        phis.insert(g[d].phi);
    }
    EXPECT_EQ(phis, (std::set<double>{-90.0, 0.0, 90.0, 180.0}));
}

TEST(Grid, Counts)
{
    EXPECT_EQ(SphericalGrid(3, 3).size(), 7082u);
    for (double s : {3.0, 5.0, 15.0, 30.0})
        EXPECT_EQ(SphericalGrid(s, s).size(), enumerate_count(s, s));
    EXPECT_EQ(SphericalGrid(10, 5).size(), enumerate_count(10, 5));
}

TEST(Grid, IndexRoundTripAndNoDuplicates)
{
    SphericalGrid g(15, 15);
    std::set<std::pair<double, double>> seen;
    for (DirectionIndex d = 0; d < g.size(); ++d)
    {
        EXPECT_EQ(g.index_of(g[d].phi, g[d].theta), d);
        EXPECT_TRUE(seen.insert({g[d].phi, g[d].theta}).second);
        EXPECT_EQ(g.nearest(g[d].phi, g[d].theta), d);
    }
    EXPECT_THROW(g.index_of(7.0, 45.0), InvalidInput);
    EXPECT_EQ(g.index_of(-180.0, 45.0), g.index_of(180.0, 45.0));
}

TEST(Grid, RejectsBadSpacing)
{
    EXPECT_THROW(SphericalGrid(7, 3), InvalidInput);
    EXPECT_THROW(SphericalGrid(3, 0), InvalidInput);
    EXPECT_THROW(SphericalGrid(-3, 3), InvalidInput);
}

TEST(Grid, UnitVector)
{
    const auto z = unit_vector(0, 0);
    EXPECT_NEAR((z - Eigen::Vector3d(0, 0, 1)).norm(), 0.0, 1e-15);
    const auto y = unit_vector(90, 90);
    EXPECT_NEAR((y - Eigen::Vector3d(0, 1, 0)).norm(), 0.0, 1e-15);
    const auto u = unit_vector(120, 45);
    EXPECT_NEAR(u.x(), -0.35355, 5e-6);
    EXPECT_NEAR(u.y(), 0.61237, 5e-6);
    EXPECT_NEAR(u.z(), 0.70711, 5e-6);
}

TEST(Grid, AngularSeparation)
{
    SphericalGrid g(90, 90);
    const auto north = g.index_of(0, 0), south = g.index_of(0, 180);
    EXPECT_EQ(angular_separation(3, 3, g), 0.0);
    EXPECT_NEAR(angular_separation(north, south, g), 180.0, 1e-12);
    EXPECT_NEAR(angular_separation(g.index_of(0, 90), g.index_of(90, 90), g), 90.0, 1e-12);
    EXPECT_NEAR(angular_separation(g.index_of(0, 90), g.index_of(180, 90), g), 180.0, 1e-12);
}

TEST(Grid, SubsetsAndValidDirections)
{
    SphericalGrid g3(3, 3);
    const auto valid = valid_source_directions(g3, 3.0);
    EXPECT_EQ(valid.size(), 7080u);
    for (auto d : valid)
    {
        EXPECT_GE(g3[d].theta, 3.0);
        EXPECT_LE(g3[d].theta, 177.0);
    }
    EXPECT_EQ(optimization_subset(g3, 10, 3.0).size(), 708u);
    EXPECT_EQ(optimization_subset(g3, 1, 0.0).size(), g3.size());
    EXPECT_EQ(valid_source_directions(g3, 0.0).size(), g3.size());

    SphericalGrid g90(90, 90);
    const auto eq = valid_source_directions(g90, 3.0);
    ASSERT_EQ(eq.size(), 4u);
    for (auto d : eq)
        EXPECT_EQ(g90[d].theta, 90.0);

    const auto sub = optimization_subset(g3, 10, 3.0);
    for (std::size_t i = 0; i < sub.size(); ++i)
        EXPECT_EQ(sub[i], valid[10 * i]);
    EXPECT_THROW(valid_source_directions(g90, 95.0), InvalidConfiguration);
}
