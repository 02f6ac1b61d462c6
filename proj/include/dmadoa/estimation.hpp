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

#ifndef DMADOA_ESTIMATION_HPP
#define DMADOA_ESTIMATION_HPP

#include "dmadoa/mnt_model.hpp"

#include <span>

namespace dmadoa
{
    // K x 2 dictionary of one direction: column 0 = E_phi responses, column 1 = E_theta responses
    using DictionaryMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, 2>;

    // Value written to score maps for directions that were not evaluated
    inline constexpr double eta_sentinel = -1.0;

    // Scores within this distance of the maximum count as ties; the smallest direction index wins.
    // With K <= 2 every nonzero dictionary explains y exactly and rounding alone would otherwise decide.
    inline constexpr double eta_tie_tolerance = 1e-12;

    inline constexpr double default_exclusion_radius = 10.0;

    struct SingleEstimate
    {
        DirectionIndex d_hat = 0;
        cvec2 c_hat = cvec2::Zero();
        cvec2 c_bar_hat = cvec2::Zero();
        double eta_peak = 0.0;
        rvec eta_map; // length N_D, eta_sentinel outside the search set
    };

    struct DualEstimate
    {
        DirectionIndex d_hat_1 = 0;
        DirectionIndex d_hat_2 = 0;
        cvec2 c_hat_1 = cvec2::Zero(); // joint refit
        cvec2 c_hat_2 = cvec2::Zero();
        cvec2 c_bar_hat_1 = cvec2::Zero();
        cvec2 c_bar_hat_2 = cvec2::Zero();
        cvec2 c_seq_1 = cvec2::Zero(); // sequential estimates before the refit
        cvec2 c_seq_2 = cvec2::Zero();
        double eta_peak = 0.0;
        double eta_res_peak = 0.0;
        cvec y_res;
        rvec eta_map;
        rvec eta_res_map; // evaluated over the whole search set; the exclusion zone only limits the argmax
    };

    DictionaryMatrix build_dictionary(const ChannelSet &channels, DirectionIndex d);

    // D^+ y with singular-value threshold max(K, 2) eps sigma_max
    cvec2 fit_polarization(const DictionaryMatrix &D, const cvec &y);

    // ||D c||^2 / ||y||^2
    double projection_score(const DictionaryMatrix &D, const cvec2 &c_hat, const cvec &y);

    // Grid-search estimators over precomputed per-direction thin SVDs of the dictionaries.
    // Factorizing once per channel set makes each additional measurement vector O(K |search set|).
    class DictionaryBank
    {
    public:
        DictionaryBank(const ChannelSet &channels, std::span<const DirectionIndex> search_set);

        const IndexSet &search_set() const noexcept { return search_; }

        // eta(d) for every entry of the search set, in search-set order
        rvec scores(const cvec &y) const;

        // Least-squares polarization fit at search-set position pos
        cvec2 fit(std::size_t pos, const cvec &y) const;

        SingleEstimate estimate_single(const cvec &y) const;
        DualEstimate estimate_dual(const cvec &y, double exclusion_radius = default_exclusion_radius) const;

    private:
        std::size_t argmax(const rvec &eta, const std::vector<bool> *allowed) const;

        const ChannelSet *channels_;
        IndexSet search_;
        cmat basis_;                    // K x 2|S|, orthonormal left singular vectors, zero where rank-deficient
        std::vector<Eigen::Matrix2cd> v_;
        std::vector<Eigen::Vector2d> inv_sigma_;
        bool any_signal_ = false;
    };

    SingleEstimate estimate_single(const ChannelSet &channels, const cvec &y, std::span<const DirectionIndex> search_set);

    // Strongest source, cancellation, residual search outside exclusion_radius [deg] of the first
    // estimate, then a joint K x 4 least-squares refit of both polarization vectors.
    DualEstimate estimate_dual(const ChannelSet &channels, const cvec &y, std::span<const DirectionIndex> search_set,
                               double exclusion_radius = default_exclusion_radius);

    // acos(|c_true^H c_est|) in [deg] for unit vectors, phase invariant; 90 if either vector is zero
    double pol_error(const cvec2 &c_true_bar, const cvec2 &c_est_bar);

    cvec2 normalized(const cvec2 &c);
}

#endif
