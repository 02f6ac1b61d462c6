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

#ifndef DMADOA_RANDOM_HPP
#define DMADOA_RANDOM_HPP

#include "dmadoa/core.hpp"

#include <initializer_list>
#include <random>
#include <string_view>

namespace dmadoa
{
    using rng_t = std::mt19937_64;

    // Derives an independent sub-seed from a base seed and a list of tags (splitmix64 chain).
    // Used to give every experiment cell its own random stream.
    std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags);
    std::uint64_t derive_seed(std::uint64_t base, std::string_view label, std::initializer_list<std::uint64_t> tags = {});

    // Circular complex Gaussian CN(0, variance): real and imaginary parts each N(0, variance/2)
    cplx draw_circular_gaussian(rng_t &rng, double variance = 1.0);
    cvec draw_circular_gaussian(rng_t &rng, Eigen::Index n, double variance = 1.0);

    ConfigVector random_config(rng_t &rng, std::size_t n_meta);
    ConfigSequence random_sequence(rng_t &rng, std::size_t K, std::size_t n_meta);

    // Two i.i.d. CN(0,1) entries normalized to unit l2 norm
    cvec2 random_polarization(rng_t &rng);
}

#endif
