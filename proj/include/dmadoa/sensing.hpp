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

#ifndef DMADOA_SENSING_HPP
#define DMADOA_SENSING_HPP

#include "dmadoa/mnt_model.hpp"

#include <span>

namespace dmadoa
{
    struct SourceSpec
    {
        DirectionIndex direction = 0;
        cvec2 c = cvec2::Zero(); // (c_phi, c_theta) in the direction's spherical basis, ||c|| > 0
    };

    struct NoiseSpec
    {
        double sigma2 = 0.0; // noise power per complex measurement
        std::uint64_t seed = 0;
    };

    struct MeasurementSet
    {
        cvec y;
        ConfigSequence configs;
        NoiseSpec noise;
    };

    // sum over sources of h_phi,k(d) c_phi + h_theta,k(d) c_theta
    cplx noiseless_signal(const ChannelSet &channels, Eigen::Index k, std::span<const SourceSpec> sources);
    cvec noiseless_signals(const ChannelSet &channels, std::span<const SourceSpec> sources);

    // y = noiseless signals + CN(0, sigma2) noise, deterministic given noise.seed
    MeasurementSet synthesize_measurements(const ChannelSet &channels, std::span<const SourceSpec> sources,
                                           const NoiseSpec &noise);

    // Median over (valid direction, polarization) pairs of the variance, across a reference
    // ensemble of random configurations, of the noiseless signal of a unit-norm source.
    // The overload with an explicit ensemble and polarization list is the building block.
    double reference_power(const MntModel &model, std::size_t n_configs = 100, std::size_t n_pols = 3,
                           std::uint64_t seed = 0, double pole_margin = 3.0);
    double reference_power(const MntModel &model, const ConfigSequence &ensemble, std::span<const cvec2> polarizations,
                           std::span<const DirectionIndex> directions);

    // sigma2 = P_ref 10^(-snr_db / 10); snr_db = +inf gives 0
    double noise_power(double p_ref, double snr_db);
}

#endif
