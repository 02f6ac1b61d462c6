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

#include <cmath>

namespace dmadoa
{
    namespace
    {
        std::uint64_t splitmix64(std::uint64_t x)
        {
            x += 0x9e3779b97f4a7c15ULL;
            x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
            x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
            return x ^ (x >> 31);
        }

        // FNV-1a, only used to turn labels into tags
        std::uint64_t hash_label(std::string_view label)
        {
            std::uint64_t h = 0xcbf29ce484222325ULL;
            for (unsigned char ch : label)
            {
                h ^= ch;
                h *= 0x100000001b3ULL;
            }
            return h;
        }
    }

    std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags)
    {
        std::uint64_t s = splitmix64(base);
        for (auto t : tags)
            s = splitmix64(s ^ splitmix64(t + 0x632be59bd9b4e019ULL));
        return s;
    }

    std::uint64_t derive_seed(std::uint64_t base, std::string_view label, std::initializer_list<std::uint64_t> tags)
    {
        return derive_seed(derive_seed(base, {hash_label(label)}), tags);
    }

    cplx draw_circular_gaussian(rng_t &rng, double variance)
    {
        std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
        const double re = n(rng);
        const double im = n(rng);
        return {re, im};
    }

    cvec draw_circular_gaussian(rng_t &rng, Eigen::Index n, double variance)
    {
        cvec out(n);
        for (Eigen::Index i = 0; i < n; ++i)
            out(i) = draw_circular_gaussian(rng, variance);
        return out;
    }

    ConfigVector random_config(rng_t &rng, std::size_t n_meta)
    {
        ConfigVector v(n_meta);
        for (auto &bit : v)
            bit = static_cast<std::uint8_t>(rng() >> 63);
        return v;
    }

    ConfigSequence random_sequence(rng_t &rng, std::size_t K, std::size_t n_meta)
    {
        ConfigSequence seq;
        seq.reserve(K);
        for (std::size_t k = 0; k < K; ++k)
            seq.push_back(random_config(rng, n_meta));
        return seq;
    }

    cvec2 random_polarization(rng_t &rng)
    {
        cvec2 c;
        do
        {
            c(0) = draw_circular_gaussian(rng);
            c(1) = draw_circular_gaussian(rng);
        } while (c.norm() == 0.0);
        return c / c.norm();
    }

    void validate_sequence(const ConfigSequence &seq, std::size_t n_meta)
    {
        if (seq.empty())
            throw InvalidInput("configuration sequence must contain at least one configuration");
        for (const auto &v : seq)
        {
            if (v.size() != n_meta)
                throw InvalidInput("configuration length " + std::to_string(v.size()) +
                                   " does not match n_meta = " + std::to_string(n_meta));
            for (auto bit : v)
                if (bit > 1)
                    throw InvalidInput("configuration entries must be 0 or 1");
        }
    }
}
