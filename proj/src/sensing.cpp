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

#include "dmadoa/sensing.hpp"
#include "dmadoa/random.hpp"

#include <algorithm>
#include <cmath>

namespace dmadoa
{
    namespace
    {
        void check_sources(const ChannelSet &channels, std::span<const SourceSpec> sources)
        {
            if (sources.empty() || sources.size() > 2)
                throw InvalidInput("one or two sources are supported");
            const auto n_dir = static_cast<std::size_t>(channels.H.cols() / 2);
            for (const auto &s : sources)
            {
                if (s.direction >= n_dir)
                    throw InvalidInput("source direction out of range");
                if (!(s.c.norm() > 0.0))
                    throw InvalidInput("source polarization-amplitude vector must be nonzero");
            }
            if (sources.size() == 2 && sources[0].direction == sources[1].direction)
                throw InvalidInput("dual-source directions must be distinct");
        }

        double median(std::vector<double> v)
        {
            const std::size_t n = v.size();
            std::sort(v.begin(), v.end());
            return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
        }
    }

    cplx noiseless_signal(const ChannelSet &channels, Eigen::Index k, std::span<const SourceSpec> sources)
    {
        check_sources(channels, sources);
        if (k < 0 || k >= channels.K())
            throw InvalidInput("configuration index out of range");
        cplx y = 0.0;
        for (const auto &s : sources)
        {
            const auto col = static_cast<Eigen::Index>(2 * s.direction);
            y += channels.H(k, col) * s.c(0) + channels.H(k, col + 1) * s.c(1);
        }
        return y;
    }

    cvec noiseless_signals(const ChannelSet &channels, std::span<const SourceSpec> sources)
    {
        check_sources(channels, sources);
        cvec y = cvec::Zero(channels.K());
        for (const auto &s : sources)
        {
            const auto col = static_cast<Eigen::Index>(2 * s.direction);
            y += channels.H.col(col) * s.c(0) + channels.H.col(col + 1) * s.c(1);
        }
        return y;
    }

    MeasurementSet synthesize_measurements(const ChannelSet &channels, std::span<const SourceSpec> sources,
                                           const NoiseSpec &noise)
    {
        if (!(noise.sigma2 >= 0.0))
            throw InvalidInput("noise power must be >= 0");
        MeasurementSet out;
        out.y = noiseless_signals(channels, sources);
        if (noise.sigma2 > 0.0)
        {
            rng_t rng(noise.seed);
            out.y += draw_circular_gaussian(rng, out.y.size(), noise.sigma2);
        }
        out.configs = channels.configs;
        out.noise = noise;
        return out;
    }

    double reference_power(const MntModel &model, const ConfigSequence &ensemble, std::span<const cvec2> polarizations,
                           std::span<const DirectionIndex> directions)
    {
        if (ensemble.size() < 2)
            throw InvalidInput("reference ensemble needs at least two configurations");
        if (polarizations.empty() || directions.empty())
            throw InvalidInput("reference power needs at least one polarization and one direction");
        const ChannelSet ch = compute_channels(model, ensemble);
        const double n = static_cast<double>(ensemble.size());

        std::vector<double> variances;
        variances.reserve(polarizations.size() * directions.size());
        for (const auto &pol : polarizations)
        {
            const cvec2 c = pol / pol.norm();
            for (auto d : directions)
            {
                const auto col = static_cast<Eigen::Index>(2 * d);
                const cvec s = ch.H.col(col) * c(0) + ch.H.col(col + 1) * c(1);
                // shifted by the first sample so a configuration-independent signal gives exactly 0
                const cvec t = s.array() - s(0);
                const cplx mean = t.mean();
                variances.push_back((t.array() - mean).abs2().sum() / n);
            }
        }
        return median(std::move(variances));
    }

    double reference_power(const MntModel &model, std::size_t n_configs, std::size_t n_pols, std::uint64_t seed,
                           double pole_margin)
    {
        if (n_configs < 2 || n_pols < 1)
            throw InvalidInput("reference power needs n_configs >= 2 and n_pols >= 1");
        rng_t rng(seed);
        const ConfigSequence ensemble = random_sequence(rng, n_configs, model.n_meta());
        std::vector<cvec2> pols;
        for (std::size_t p = 0; p < n_pols; ++p)
            pols.push_back(random_polarization(rng));
        const IndexSet dirs = valid_source_directions(model.grid(), pole_margin);
        return reference_power(model, ensemble, pols, dirs);
    }

    double noise_power(double p_ref, double snr_db)
    {
        if (!(p_ref > 0.0))
            throw InvalidInput("reference power must be > 0");
        if (std::isinf(snr_db) && snr_db > 0)
            return 0.0;
        return p_ref * std::pow(10.0, -snr_db / 10.0);
    }
}
