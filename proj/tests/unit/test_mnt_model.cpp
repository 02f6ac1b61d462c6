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

#include "dmadoa/mnt_model.hpp"

#include "test_support.hpp"

#include <Eigen/SVD>
#include <gtest/gtest.h>

#include <numeric>

using namespace dmadoa;
using namespace dmadoa::testing;

namespace
{
    MntModel small_model(std::size_t n_meta = 6, std::uint64_t seed = 11, double coupling = 0.6)
    {
        return synthesize_model(n_meta, build_grid(30, 30), coupling, seed);
    }
}

TEST(LoadVector, Endpoints)
{
    const MntModel m0 = small_model(3);
    const MntModel m = model_with(m0, 0.9, -0.9);
    EXPECT_EQ(load_vector({0, 0, 0}, m), cvec::Constant(3, 0.9));
    EXPECT_EQ(load_vector({1, 1, 1}, m), cvec::Constant(3, -0.9));
    cvec expect(3);
    expect << -0.9, 0.9, -0.9;
    EXPECT_EQ(load_vector({1, 0, 1}, m), expect);
    EXPECT_THROW(load_vector({1, 0}, m), InvalidInput);
}

TEST(ComputeChannel, ZeroLoadsGiveDirectPath)
{
    const MntModel m = model_with(small_model(), 0.0, 0.0);
    rng_t rng(1);
    for (int i = 0; i < 5; ++i)
        EXPECT_EQ(compute_channel(m, random_config(rng, m.n_meta())), m.h0());
}

TEST(ComputeChannel, NoCouplingIsAffine)
{
    const MntModel base = small_model();
    const cmat zero = cmat::Zero(6, 6);
    const MntModel m = model_with(base, base.alpha(), base.beta(), &zero);
    const cvec h = compute_channel(m, ConfigVector(6, 1));
    EXPECT_LT(rel_err(h, m.h0() + m.beta() * (m.A() * m.b())), 1e-14);
}

TEST(ComputeChannel, MatchesBlockSystemOracle)
{
    rng_t rng(99);
    for (std::uint64_t s = 0; s < 20; ++s)
    {
        const MntModel m = small_model(1 + s % 8, s, 0.3 + 0.03 * static_cast<double>(s));
        const ConfigVector v = random_config(rng, m.n_meta());
        EXPECT_LT(rel_err(compute_channel(m, v), channel_oracle(m, v)), 1e-10);
    }
}

TEST(ComputeChannelRows, RestrictionOfFullChannel)
{
    const MntModel m = small_model();
    rng_t rng(2);
    const ConfigVector v = random_config(rng, m.n_meta());
    const cvec full = compute_channel(m, v);

    IndexSet all(m.n_directions());
    std::iota(all.begin(), all.end(), std::size_t{0});
    EXPECT_LT(rel_err(compute_channel_rows(m, v, all), full), 1e-15);

    const IndexSet one = {7};
    const cvec r1 = compute_channel_rows(m, v, one);
    ASSERT_EQ(r1.size(), 2);
    EXPECT_NEAR(std::abs(r1(0) - full(14)), 0.0, 1e-13 * full.norm());
    EXPECT_NEAR(std::abs(r1(1) - full(15)), 0.0, 1e-13 * full.norm());

    const IndexSet sub = {40, 3, 17, 0};
    const cvec rs = compute_channel_rows(m, v, sub);
    for (std::size_t j = 0; j < sub.size(); ++j)
        for (int p = 0; p < 2; ++p)
            EXPECT_NEAR(std::abs(rs(static_cast<Eigen::Index>(2 * j + p)) - full(static_cast<Eigen::Index>(2 * sub[j] + p))),
                        0.0, 1e-13 * full.norm());
    EXPECT_THROW(compute_channel_rows(m, v, IndexSet{m.n_directions()}), InvalidInput);
}

TEST(SynthesizeModel, DeterministicAndScaled)
{
    const auto grid = build_grid(30, 30);
    const MntModel a = synthesize_model(96, grid, 0.6, 5);
    const MntModel b = synthesize_model(96, grid, 0.6, 5);
    EXPECT_EQ(a.h0(), b.h0());
    EXPECT_EQ(a.A(), b.A());
    EXPECT_EQ(a.Gamma(), b.Gamma());
    EXPECT_EQ(a.b(), b.b());
    EXPECT_NE(synthesize_model(96, grid, 0.6, 6).A(), a.A());

    const double g2 = Eigen::JacobiSVD<cmat>(a.Gamma()).singularValues()(0);
    const double scale = std::max(std::abs(a.alpha()), std::abs(a.beta()));
    EXPECT_LE(scale * g2, 0.6 * (1 + 1e-12));
    EXPECT_NEAR(scale * g2, 0.6, 1e-12);
    EXPECT_LT((a.Gamma() - a.Gamma().transpose()).norm(), 1e-15);

    const MntModel z = synthesize_model(8, grid, 0.0, 5);
    EXPECT_EQ(z.Gamma(), cmat::Zero(8, 8));
}

TEST(MntModel, RejectsActiveLoadsAndBadShapes)
{
    const MntModel m = small_model(4);
    EXPECT_THROW(model_with(m, 1.5, 0.5), InvalidInput);
    EXPECT_THROW(MntModel(m.alpha(), m.beta(), m.h0(), m.A(), m.Gamma(), cvec::Zero(3), m.grid_ptr()), InvalidInput);
    EXPECT_THROW(MntModel(m.alpha(), m.beta(), cvec::Zero(4), m.A(), m.Gamma(), m.b(), m.grid_ptr()), InvalidInput);
    // Gamma = I with r = 1 makes I - Phi Gamma singular at v = 0
    const cmat eye = cmat::Identity(4, 4);
    EXPECT_THROW(model_with(m, 1.0, 0.5, &eye), SingularSystem);
}

TEST(LoadedNetwork, IncrementalFlipMatchesRecompute)
{
    const MntModel m = small_model(12, 4);
    rng_t rng(8);
    LoadedNetwork net(m, random_config(rng, 12));
    for (int step = 0; step < 40; ++step)
    {
        const std::size_t bit = rng() % 12;
        const auto up = net.propose_flip(bit);
        ConfigVector v = net.config();
        v[bit] ^= 1u;
        const cvec expect = virtual_port_response(m, v);
        EXPECT_LT(rel_err(net.port_response() + up.scale * up.direction, expect), 1e-11);
        if (step % 2 == 0)
        {
            net.apply_flip(up);
            EXPECT_EQ(net.config(), v);
            EXPECT_LT(rel_err(net.port_response(), expect), 1e-10);
        }
    }
}

TEST(DiversityMap, ZeroWithoutTunability)
{
    const MntModel base = small_model();
    const MntModel m = model_with(base, base.alpha(), base.alpha());
    const DiversityMap dm = diversity_map(m, 50, 1);
    EXPECT_LT(dm.sd_phi.maxCoeff(), 1e-12);
    EXPECT_LT(dm.sd_theta.maxCoeff(), 1e-12);
}

TEST(DiversityMap, EnumerationWithoutCoupling)
{
    const MntModel base = synthesize_model(3, build_grid(90, 90), 0.0, 21);
    const ConfigSequence all = all_configs(3);
    const DiversityMap dm = diversity_map(base, all);

    // With Gamma = 0 each element contributes (beta - alpha) v_i A(:, i) b_i with v_i ~ Bernoulli(1/2)
    const double dab = std::abs(base.beta() - base.alpha());
    for (Eigen::Index d = 0; d < static_cast<Eigen::Index>(base.n_directions()); ++d)
    {
        for (int p = 0; p < 2; ++p)
        {
            double s = 0;
            for (Eigen::Index i = 0; i < 3; ++i)
                s += std::norm(base.A()(2 * d + p, i) * base.b()(i));
            const double oracle = 0.5 * dab * std::sqrt(s);
            EXPECT_NEAR(p == 0 ? dm.sd_phi(d) : dm.sd_theta(d), oracle, 1e-12 * (1 + oracle));
        }
    }

    // same enumeration on a coupled model against direct population SD
    const MntModel cm = synthesize_model(3, build_grid(90, 90), 0.7, 22);
    const DiversityMap dc = diversity_map(cm, all);
    std::vector<cvec> hs;
    for (const auto &v : all)
        hs.push_back(compute_channel(cm, v));
    for (Eigen::Index j = 0; j < hs[0].size(); ++j)
    {
        cplx mean = 0;
        for (const auto &h : hs)
            mean += h(j);
        mean /= 8.0;
        double var = 0;
        for (const auto &h : hs)
            var += std::norm(h(j) - mean);
        const double sd = std::sqrt(var / 8.0);
        EXPECT_NEAR(j % 2 == 0 ? dc.sd_phi(j / 2) : dc.sd_theta(j / 2), sd, 1e-12 * (1 + sd));
    }
}

TEST(DiversityMap, FiniteAndDeterministic)
{
    const MntModel m = synthesize_model(96, build_grid(15, 15), 0.6, 2);
    const DiversityMap a = diversity_map(m, 1000, 9);
    const DiversityMap b = diversity_map(m, 1000, 9);
    EXPECT_TRUE(a.sd_phi.allFinite());
    EXPECT_GE(a.sd_phi.minCoeff(), 0.0);
    EXPECT_GE(a.sd_theta.minCoeff(), 0.0);
    EXPECT_EQ(a.sd_phi, b.sd_phi);
    EXPECT_EQ(a.sd_theta, b.sd_theta);
}
