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

#include "dmadoa/estimation.hpp"
#include "dmadoa/optimization.hpp"
#include "dmadoa/sensing.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace dmadoa;
using namespace dmadoa::testing;

namespace
{
    const MntModel &model15()
    {
        static const MntModel m = synthesize_model(96, build_grid(15, 15), 0.6, 31);
        return m;
    }

    ChannelSet random_channels(std::size_t K, std::uint64_t seed)
    {
        rng_t rng(seed);
        return compute_channels(model15(), random_sequence(rng, K, model15().n_meta()));
    }
}

TEST(Dictionary, ShapeAndStacking)
{
    const ChannelSet c1 = random_channels(1, 1);
    const auto D = build_dictionary(c1, 4);
    EXPECT_EQ(D.rows(), 1);
    EXPECT_EQ(D.cols(), 2);

    ChannelSet c = random_channels(5, 2);
    cmat stacked(c.K(), c.H.cols());
    for (DirectionIndex d = 0; d < model15().n_directions(); ++d)
        stacked.middleCols(static_cast<Eigen::Index>(2 * d), 2) = build_dictionary(c, d);
    EXPECT_EQ(stacked, c.H);

    c.H.col(2 * 7 + 1).setZero();
    EXPECT_EQ(build_dictionary(c, 7).col(1).norm(), 0.0);
    EXPECT_THROW(build_dictionary(c, model15().n_directions()), InvalidInput);
}

TEST(FitPolarization, ConsistentZeroAndNormalEquations)
{
    rng_t rng(3);
    const DictionaryMatrix D = random_cmat(rng, 20, 2);
    const cvec2 c0(cplx(0.3, -1.1), cplx(2.0, 0.4));
    EXPECT_LT((fit_polarization(D, D * c0) - c0).norm() / c0.norm(), 1e-12);

    EXPECT_EQ(fit_polarization(DictionaryMatrix::Zero(20, 2), random_cmat(rng, 20, 1)), cvec2::Zero());

    const cvec y = random_cmat(rng, 20, 1);
    const Eigen::Matrix2cd G = D.adjoint() * D;
    const cvec2 oracle = G.inverse() * (D.adjoint() * y);
    EXPECT_LT((fit_polarization(D, y) - oracle).norm() / oracle.norm(), 1e-10);
}

TEST(ProjectionScore, Extremes)
{
    rng_t rng(4);
    const DictionaryMatrix D = random_cmat(rng, 6, 2);
    const cvec y_in = D * cvec2(cplx(1, 2), cplx(-0.5, 0.1));
    EXPECT_NEAR(projection_score(D, fit_polarization(D, y_in), y_in), 1.0, 1e-12);

    // y orthogonal to both columns: project a random vector onto the orthogonal complement
    const cvec r = random_cmat(rng, 6, 1);
    const cvec y_perp = r - D * fit_polarization(D, r);
    EXPECT_NEAR(projection_score(D, fit_polarization(D, y_perp), y_perp), 0.0, 1e-12);
    EXPECT_THROW(projection_score(D, cvec2::Zero(), cvec::Zero(6)), DegenerateMeasurement);

    const ChannelSet c = random_channels(20, 5);
    const DictionaryMatrix D0 = build_dictionary(c, 40);
    const cvec y0 = D0 * cvec2(0.6, cplx(0, 0.8));
    EXPECT_GE(projection_score(D0, fit_polarization(D0, y0), y0), 1.0 - 1e-12);
}

TEST(ProjectionScore, CommonScalingInvariance)
{
    rng_t rng(6);
    for (int t = 0; t < 100; ++t)
    {
        const DictionaryMatrix D = random_cmat(rng, 8, 2);
        const cvec y = random_cmat(rng, 8, 1);
        const cplx s = draw_circular_gaussian(rng) * std::pow(10.0, static_cast<double>(t % 7) - 3.0);
        const DictionaryMatrix Ds = D * s;
        const double a = projection_score(D, fit_polarization(D, y), y);
        const double b = projection_score(Ds, fit_polarization(Ds, y), y);
        EXPECT_LT(std::abs(a - b), 1e-12);
    }
}

TEST(DictionaryBank, ScoresMatchDirectFit)
{
    const ChannelSet c = random_channels(9, 7);
    const IndexSet search = valid_source_directions(model15().grid());
    const DictionaryBank bank(c, search);
    rng_t rng(8);
    const cvec y = random_cmat(rng, 9, 1);
    const rvec eta = bank.scores(y);
    for (std::size_t j = 0; j < search.size(); j += 13)
    {
        const auto D = build_dictionary(c, search[j]);
        const cvec2 ch = fit_polarization(D, y);
        EXPECT_NEAR(eta(static_cast<Eigen::Index>(j)), projection_score(D, ch, y), 1e-12);
        EXPECT_LT((bank.fit(j, y) - ch).norm(), 1e-10 * (1 + ch.norm()));
    }
}

TEST(EstimateSingle, NoiselessExactRecovery)
{
    const ChannelSet c = random_channels(20, 9);
    const IndexSet search = valid_source_directions(model15().grid());
    const DictionaryBank bank(c, search);
    rng_t rng(10);
    for (std::size_t j = 0; j < search.size(); j += 7)
    {
        const SourceSpec s{search[j], random_polarization(rng)};
        const cvec y = noiseless_signals(c, std::span(&s, 1));
        const SingleEstimate e = bank.estimate_single(y);
        EXPECT_EQ(e.d_hat, s.direction);
        EXPECT_LT(pol_error(s.c, e.c_bar_hat), 1e-6);
        EXPECT_EQ(e.eta_map.size(), static_cast<Eigen::Index>(model15().n_directions()));
        EXPECT_EQ(e.eta_map(0), eta_sentinel);
    }
}

TEST(EstimateSingle, SingleConfigurationIsUninformative)
{
    const ChannelSet c = random_channels(1, 11);
    const IndexSet search = valid_source_directions(model15().grid());
    const DictionaryBank bank(c, search);
    const SourceSpec s{search[100], cvec2(0.6, 0.8)};
    const SingleEstimate e = bank.estimate_single(noiseless_signals(c, std::span(&s, 1)));
    for (auto d : search)
        EXPECT_NEAR(e.eta_map(static_cast<Eigen::Index>(d)), 1.0, 1e-12);
    EXPECT_EQ(e.d_hat, *std::min_element(search.begin(), search.end()));
}

TEST(EstimateSingle, NoDiversityIsRandomGuessing)
{
    const MntModel m = model_with(model15(), model15().alpha(), model15().alpha());
    rng_t rng(12);
    const ChannelSet c = compute_channels(m, random_sequence(rng, 10, m.n_meta()));
    const IndexSet search = valid_source_directions(m.grid());
    const DictionaryBank bank(c, search);
    const double p_ref = reference_power(model15(), 30, 3, 1);
    double sum_doa = 0, sum_pol = 0;
    const std::size_t n = 2000;
    for (std::size_t t = 0; t < n; ++t)
    {
        const SourceSpec s{search[rng() % search.size()], random_polarization(rng)};
        const auto meas = synthesize_measurements(c, std::span(&s, 1), {noise_power(p_ref, 5.0), t});
        const SingleEstimate e = bank.estimate_single(meas.y);
        sum_doa += angular_separation(s.direction, e.d_hat, m.grid());
        sum_pol += pol_error(s.c, e.c_bar_hat);
    }
    EXPECT_NEAR(sum_doa / n, 90.0, 5.0);
    EXPECT_NEAR(sum_pol / n, 45.0, 3.0);
}

TEST(EstimateSingle, DegenerateInputs)
{
    const ChannelSet c = random_channels(4, 13);
    const IndexSet search = valid_source_directions(model15().grid());
    EXPECT_THROW(estimate_single(c, cvec::Zero(4), search), DegenerateMeasurement);
    EXPECT_THROW(estimate_single(c, cvec::Ones(3), search), InvalidInput);
    EXPECT_THROW(DictionaryBank(c, IndexSet{}), InvalidConfiguration);

    ChannelSet z = c;
    z.H.setZero();
    EXPECT_THROW(estimate_single(z, cvec::Ones(4), search), NoSignal);
}

TEST(EstimateDual, NoiselessTwoSources)
{
    const ChannelSet c = random_channels(60, 14);
    const IndexSet search = valid_source_directions(model15().grid());
    const auto &g = model15().grid();
    const std::array<SourceSpec, 2> src = {SourceSpec{g.index_of(120, 45), cvec2(1, 1) / std::sqrt(2.0)},
                                           SourceSpec{g.index_of(-45, 45), cvec2(0.1, cplx(0, 0.1)) / std::sqrt(2.0)}};
    const DualEstimate e = estimate_dual(c, noiseless_signals(c, src), search, 10.0);
    EXPECT_EQ(e.d_hat_1, src[0].direction);
    EXPECT_EQ(e.d_hat_2, src[1].direction);
    EXPECT_LT(pol_error(normalized(src[0].c), e.c_bar_hat_1), 0.5);
    EXPECT_LT(pol_error(normalized(src[1].c), e.c_bar_hat_2), 0.5);
    EXPECT_LT((e.c_hat_1 - src[0].c).norm(), 1e-9);
    EXPECT_LT((e.c_hat_2 - src[1].c).norm(), 1e-9);
    for (auto d : search)
        if (angular_separation(e.d_hat_1, d, g) <= 10.0)
            EXPECT_GE(e.eta_res_map(static_cast<Eigen::Index>(d)), 0.0);
}

TEST(EstimateDual, SingleSourceLeavesNoResidual)
{
    const ChannelSet c = random_channels(20, 15);
    const IndexSet search = valid_source_directions(model15().grid());
    const SourceSpec s{search[50], cvec2(0.6, 0.8)};
    EXPECT_THROW(estimate_dual(c, noiseless_signals(c, std::span(&s, 1)), search, 10.0), SecondSourceUndetectable);
    EXPECT_THROW(estimate_dual(c, noiseless_signals(c, std::span(&s, 1)), search, 0.0), InvalidInput);
}

TEST(PolError, Cases)
{
    const cvec2 a = normalized(cvec2(cplx(1, 2), cplx(-0.3, 0.5)));
    EXPECT_NEAR(pol_error(a, a), 0.0, 1e-6);
    EXPECT_NEAR(pol_error(a, a * std::polar(1.0, std::numbers::pi / 3)), 0.0, 1e-6);
    EXPECT_NEAR(pol_error(cvec2(1, 0), cvec2(0, 1)), 90.0, 1e-12);
    EXPECT_NEAR(pol_error(cvec2(1, 0), normalized(cvec2(1, 1))), 45.0, 1e-12);
}
