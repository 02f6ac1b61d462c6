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

#ifndef DMADOA_TEST_SUPPORT_HPP
#define DMADOA_TEST_SUPPORT_HPP

#include "dmadoa/mnt_model.hpp"
#include "dmadoa/random.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace dmadoa::testing
{
    inline cmat random_cmat(rng_t &rng, Eigen::Index rows, Eigen::Index cols)
    {
        cmat M(rows, cols);
        for (Eigen::Index c = 0; c < cols; ++c)
            for (Eigen::Index r = 0; r < rows; ++r)
                M(r, c) = draw_circular_gaussian(rng);
        return M;
    }

    inline cmat random_unitary(rng_t &rng, Eigen::Index n)
    {
        Eigen::HouseholderQR<cmat> qr(random_cmat(rng, n, n));
        return qr.householderQ() * cmat::Identity(n, n);
    }

    inline double rel_err(const cmat &a, const cmat &b)
    {
        const double ref = std::max(b.norm(), 1e-300);
        return (a - b).norm() / ref;
    }

    // Loaded-network equations written as one block system in the unknowns (b_S, a_S):
    //   b_S - Gamma a_S = b     (waves leaving the virtual ports, feed driven with unit amplitude)
    //   a_S - Phi b_S   = 0     (reflection at the tunable loads)
    // solved with a full-pivoting LU, then h = h0 + A a_S.
    inline cvec channel_oracle(const MntModel &m, const ConfigVector &v)
    {
        const auto n = static_cast<Eigen::Index>(m.n_meta());
        cmat S = cmat::Zero(2 * n, 2 * n);
        cvec rhs = cvec::Zero(2 * n);
        S.topLeftCorner(n, n).setIdentity();
        S.topRightCorner(n, n) = -m.Gamma();
        S.bottomRightCorner(n, n).setIdentity();
        for (Eigen::Index i = 0; i < n; ++i)
            S(n + i, i) = -(v[static_cast<std::size_t>(i)] ? m.beta() : m.alpha());
        rhs.head(n) = m.b();
        const cvec z = S.fullPivLu().solve(rhs);
        return m.h0() + m.A() * z.tail(n);
    }

    inline ConfigVector bits_of(std::uint64_t code, std::size_t n)
    {
        ConfigVector v(n);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = static_cast<std::uint8_t>((code >> i) & 1u);
        return v;
    }

    // Every binary configuration of n elements, code order
    inline ConfigSequence all_configs(std::size_t n)
    {
        ConfigSequence out;
        for (std::uint64_t c = 0; c < (std::uint64_t{1} << n); ++c)
            out.push_back(bits_of(c, n));
        return out;
    }

    // Sequence of K configurations encoded in the low K * n bits of code (bit k * n + i is element i of row k)
    inline ConfigSequence sequence_of(std::uint64_t code, std::size_t K, std::size_t n)
    {
        ConfigSequence seq;
        for (std::size_t k = 0; k < K; ++k)
            seq.push_back(bits_of(code >> (k * n), n));
        return seq;
    }

    inline MntModel model_with(const MntModel &m, cplx alpha, cplx beta, const cmat *Gamma = nullptr)
    {
        return MntModel(alpha, beta, m.h0(), m.A(), Gamma ? *Gamma : m.Gamma(), m.b(), m.grid_ptr());
    }

    inline double median(std::vector<double> v)
    {
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    }
}

#endif
