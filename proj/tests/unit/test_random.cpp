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

#include "dmadoa/random.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace dmadoa;

TEST(DeriveSeed, DeterministicAndTagSensitive)
{
    EXPECT_EQ(derive_seed(7, {1, 2}), derive_seed(7, {1, 2}));
    EXPECT_NE(derive_seed(7, {1, 2}), derive_seed(7, {2, 1}));
    EXPECT_NE(derive_seed(7, {1}), derive_seed(8, {1}));
    EXPECT_NE(derive_seed(7, "noise"), derive_seed(7, "model"));
    EXPECT_EQ(derive_seed(7, "noise", {3}), derive_seed(7, "noise", {3}));

    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i)
        seen.insert(derive_seed(1, {i}));
    EXPECT_EQ(seen.size(), 1000u);
}

TEST(CircularGaussian, VarianceSplitsEvenly)
{
    rng_t rng(42);
    const int n = 100000;
    const double var = 2.5;
    double sr = 0, si = 0, s = 0;
    for (int i = 0; i < n; ++i)
    {
        const cplx z = draw_circular_gaussian(rng, var);
        sr += z.real() * z.real();
        si += z.imag() * z.imag();
        s += std::norm(z);
    }
    EXPECT_NEAR(s / n, var, 0.02 * var);
    EXPECT_NEAR(sr / n, var / 2, 0.02 * var);
    EXPECT_NEAR(si / n, var / 2, 0.02 * var);
}

TEST(RandomConfig, BinaryAndBalanced)
{
    rng_t rng(3);
    std::size_t ones = 0;
    const auto seq = random_sequence(rng, 200, 50);
    ASSERT_EQ(seq.size(), 200u);
    for (const auto &v : seq)
    {
        ASSERT_EQ(v.size(), 50u);
        for (auto b : v)
        {
            ASSERT_LE(b, 1);
            ones += b;
        }
    }
    EXPECT_NEAR(static_cast<double>(ones) / 10000.0, 0.5, 0.03);
}

TEST(RandomPolarization, UnitNorm)
{
    rng_t rng(5);
    for (int i = 0; i < 100; ++i)
        EXPECT_NEAR(random_polarization(rng).norm(), 1.0, 1e-14);
}

TEST(ValidateSequence, RejectsMalformed)
{
    EXPECT_THROW(validate_sequence({}, 3), InvalidInput);
    EXPECT_THROW(validate_sequence({{0, 1}}, 3), InvalidInput);
    EXPECT_THROW(validate_sequence({{0, 2, 1}}, 3), InvalidInput);
    EXPECT_NO_THROW(validate_sequence({{0, 1, 1}, {1, 1, 1}}, 3));
}
