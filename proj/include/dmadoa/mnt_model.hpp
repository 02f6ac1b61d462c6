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

#ifndef DMADOA_MNT_MODEL_HPP
#define DMADOA_MNT_MODEL_HPP

#include "dmadoa/core.hpp"
#include "dmadoa/grid.hpp"

#include <Eigen/LU>

#include <numbers>
#include <span>

namespace dmadoa
{
    // Reciprocal condition estimate of (I - Phi Gamma) below which a configuration is rejected
    inline constexpr double singularity_rcond = 1e-12;

    // Multiport-network model of a single-feed DMA with N_M 1-bit tunable loads.
    //
    // All quantities are scattering parameters w.r.t. a 50 Ohm reference impedance:
    //   h0    [2 N_D]      feed -> radiation ports (S_RF)
    //   A     [2 N_D, N_M] virtual ports -> radiation ports (S_RS)
    //   Gamma [N_M, N_M]   coupling between virtual ports (S_SS)
    //   b     [N_M]        feed -> virtual ports (S_SF)
    //   alpha, beta        load reflection coefficients of bit state 0 and 1
    // Radiation port 2d is E_phi and 2d+1 is E_theta of grid direction d.
    class MntModel
    {
    public:
        // Validates dimensions, passivity (|alpha|, |beta| <= 1) and invertibility of (I - Phi Gamma)
        // for the extremal configurations v = 0 and v = 1.
        MntModel(cplx alpha, cplx beta, cvec h0, cmat A, cmat Gamma, cvec b, GridPtr grid);

        cplx alpha() const noexcept { return alpha_; }
        cplx beta() const noexcept { return beta_; }
        const cvec &h0() const noexcept { return h0_; }
        const cmat &A() const noexcept { return A_; }
        const cmat &Gamma() const noexcept { return Gamma_; }
        const cvec &b() const noexcept { return b_; }
        const SphericalGrid &grid() const noexcept { return *grid_; }
        const GridPtr &grid_ptr() const noexcept { return grid_; }

        std::size_t n_meta() const noexcept { return static_cast<std::size_t>(b_.size()); }
        std::size_t n_directions() const noexcept { return grid_->size(); }

    private:
        cplx alpha_, beta_;
        cvec h0_;
        cmat A_;
        cmat Gamma_;
        cvec b_;
        GridPtr grid_;
    };

    // K dual-polarized channel vectors; row k of H is h(r(v_k)) over all 2 N_D radiation ports
    struct ChannelSet
    {
        cmat H;
        ConfigSequence configs;
        GridPtr grid;

        Eigen::Index K() const noexcept { return H.rows(); }
    };

    // r(v) = alpha 1 + (beta - alpha) v
    cvec load_vector(const ConfigVector &v, const MntModel &model);

    // x(v) = (I - Phi Gamma)^{-1} Phi b, the wave amplitudes re-emitted by the virtual ports
    cvec virtual_port_response(const MntModel &model, const ConfigVector &v);

    // h(r(v)) = h0 + A x(v), length 2 N_D
    cvec compute_channel(const MntModel &model, const ConfigVector &v);

    // Restriction of compute_channel to the given directions (E_phi, E_theta interleaved), length 2 |directions|
    cvec compute_channel_rows(const MntModel &model, const ConfigVector &v, std::span<const DirectionIndex> directions);

    ChannelSet compute_channels(const MntModel &model, const ConfigSequence &seq);

    // Rows (2d, 2d+1) of M for each d in directions, stacked in order
    cmat gather_direction_rows(const cmat &M, std::span<const DirectionIndex> directions);
    cvec gather_direction_rows(const cvec &x, std::span<const DirectionIndex> directions);

    // Resolvent state of one configuration that supports O(N_M^2) trial bit flips.
    //
    // Flipping bit i perturbs I - Phi Gamma by a rank-one term, so by Sherman-Morrison the new
    // port response is x' = x + s g with g = (I - Phi Gamma)^{-1} e_i. Accepted flips refactor the LU.
    class LoadedNetwork
    {
    public:
        struct FlipUpdate
        {
            std::size_t bit = 0;
            cplx scale;    // s
            cvec direction; // g
        };

        LoadedNetwork(const MntModel &model, ConfigVector v);

        const ConfigVector &config() const noexcept { return v_; }
        const cvec &port_response() const noexcept { return x_; }
        double rcond() const noexcept { return lu_.rcond(); }

        FlipUpdate propose_flip(std::size_t bit) const;

        // Applies a proposal from propose_flip on the current state; x is updated incrementally
        void apply_flip(const FlipUpdate &update);

    private:
        void factorize();

        const MntModel *model_;
        ConfigVector v_;
        cvec r_;
        Eigen::PartialPivLU<cmat> lu_;
        cvec x_;
    };

    struct SynthesisOptions
    {
        cplx alpha = std::polar(0.9, std::numbers::pi / 6.0);
        cplx beta = std::polar(0.9, -5.0 * std::numbers::pi / 6.0);
    };

    // Synthetic stand-in for an experimentally calibrated model.
    // h0, A, b ~ CN(0,1); Gamma complex symmetric with CN(0,1) entries, rescaled so that
    // max(|alpha|, |beta|) * ||Gamma||_2 == coupling_strength, which keeps (I - Phi Gamma) invertible
    // for every binary configuration.
    MntModel synthesize_model(std::size_t n_meta, GridPtr grid, double coupling_strength, std::uint64_t seed,
                              const SynthesisOptions &options = {});

    struct DiversityMap
    {
        rvec sd_phi;   // per direction, SD of the E_phi entry
        rvec sd_theta; // per direction, SD of the E_theta entry
    };

    // SD of each channel entry over n_samples uniformly random configurations.
    // Complex SD = sqrt(mean |h - mean(h)|^2).
    DiversityMap diversity_map(const MntModel &model, std::size_t n_samples, std::uint64_t seed);
    DiversityMap diversity_map(const MntModel &model, const ConfigSequence &ensemble);
}

#endif
