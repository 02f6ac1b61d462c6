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
#include "dmadoa/grid.hpp"
#include "dmadoa/linalg.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace dmadoa
{
    DictionaryMatrix build_dictionary(const ChannelSet &channels, DirectionIndex d)
    {
        const auto col = static_cast<Eigen::Index>(2 * d);
        if (col + 1 >= channels.H.cols())
            throw InvalidInput("direction index " + std::to_string(d) + " out of range");
        return channels.H.middleCols(col, 2);
    }

    cvec2 fit_polarization(const DictionaryMatrix &D, const cvec &y)
    {
        if (D.rows() < 1)
            throw InvalidInput("dictionary needs at least one row");
        return pinv_solve(D, y);
    }

    double projection_score(const DictionaryMatrix &D, const cvec2 &c_hat, const cvec &y)
    {
        const double yy = y.squaredNorm();
        if (!(yy > 0.0))
            throw DegenerateMeasurement("measurement vector is zero");
        return (D * c_hat).squaredNorm() / yy;
    }

    cvec2 normalized(const cvec2 &c)
    {
        const double n = c.norm();
        return n > 0.0 ? cvec2(c / n) : cvec2(cvec2::Zero());
    }

    double pol_error(const cvec2 &c_true_bar, const cvec2 &c_est_bar)
    {
        // atan2 of the orthogonal and parallel parts stays accurate near 0 where acos does not
        const cvec2 a = normalized(c_true_bar), b = normalized(c_est_bar);
        if (a.isZero(0.0) || b.isZero(0.0))
            return 90.0;
        const cplx overlap = a.dot(b);
        const double perp = (b - overlap * a).norm();
        return std::atan2(perp, std::abs(overlap)) * 180.0 / std::numbers::pi;
    }

    // ---------------------------------------------------------------------------------------------
    DictionaryBank::DictionaryBank(const ChannelSet &channels, std::span<const DirectionIndex> search_set)
        : channels_(&channels), search_(search_set.begin(), search_set.end())
    {
        if (search_.empty())
            throw InvalidConfiguration("search set is empty");
        const Eigen::Index K = channels.K();
        if (K < 1)
            throw InvalidInput("channel set is empty");
        const Eigen::Index rank_max = std::min<Eigen::Index>(K, 2);

        basis_ = cmat::Zero(K, static_cast<Eigen::Index>(2 * search_.size()));
        v_.resize(search_.size());
        inv_sigma_.resize(search_.size());
        for (std::size_t j = 0; j < search_.size(); ++j)
        {
            const cmat D = build_dictionary(channels, search_[j]);
            Eigen::JacobiSVD<cmat> svd(D, Eigen::ComputeThinU | Eigen::ComputeThinV);
            const auto &s = svd.singularValues();
            v_[j] = Eigen::Matrix2cd::Zero();
            inv_sigma_[j] = Eigen::Vector2d::Zero();
            if (s(0) == 0.0)
                continue;
            any_signal_ = true;
            const double tau = pinv_threshold(K, 2, s(0));
            for (Eigen::Index i = 0; i < rank_max; ++i)
            {
                if (!(s(i) > tau))
                    continue;
                basis_.col(static_cast<Eigen::Index>(2 * j) + i) = svd.matrixU().col(i);
                v_[j].col(i) = svd.matrixV().col(i);
                inv_sigma_[j](i) = 1.0 / s(i);
            }
        }
    }

    rvec DictionaryBank::scores(const cvec &y) const
    {
        if (y.size() != channels_->K())
            throw InvalidInput("measurement length does not match the channel set");
        const double yy = y.squaredNorm();
        if (!(yy > 0.0))
            throw DegenerateMeasurement("measurement vector is zero");
        if (!any_signal_)
            throw NoSignal("all dictionaries over the search set are zero");
        const cvec w = basis_.adjoint() * y;
        rvec eta(static_cast<Eigen::Index>(search_.size()));
        for (Eigen::Index j = 0; j < eta.size(); ++j)
            eta(j) = (std::norm(w(2 * j)) + std::norm(w(2 * j + 1))) / yy;
        return eta;
    }

    cvec2 DictionaryBank::fit(std::size_t pos, const cvec &y) const
    {
        const auto cols = basis_.middleCols(static_cast<Eigen::Index>(2 * pos), 2);
        const cvec2 w = cols.adjoint() * y;
        return v_[pos] * inv_sigma_[pos].cwiseProduct(w);
    }

    std::size_t DictionaryBank::argmax(const rvec &eta, const std::vector<bool> *allowed) const
    {
        double best = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < eta.size(); ++j)
            if (!allowed || (*allowed)[static_cast<std::size_t>(j)])
                best = std::max(best, eta(j));
        std::size_t pick = search_.size();
        for (std::size_t j = 0; j < search_.size(); ++j)
        {
            if (allowed && !(*allowed)[j])
                continue;
            if (eta(static_cast<Eigen::Index>(j)) >= best - eta_tie_tolerance &&
                (pick == search_.size() || search_[j] < search_[pick]))
                pick = j;
        }
        return pick;
    }

    SingleEstimate DictionaryBank::estimate_single(const cvec &y) const
    {
        const rvec eta = scores(y);
        const std::size_t pos = argmax(eta, nullptr);

        SingleEstimate est;
        est.d_hat = search_[pos];
        est.c_hat = fit(pos, y);
        est.c_bar_hat = normalized(est.c_hat);
        est.eta_peak = eta(static_cast<Eigen::Index>(pos));
        est.eta_map = rvec::Constant(channels_->H.cols() / 2, eta_sentinel);
        for (std::size_t j = 0; j < search_.size(); ++j)
            est.eta_map(static_cast<Eigen::Index>(search_[j])) = eta(static_cast<Eigen::Index>(j));
        return est;
    }

    DualEstimate DictionaryBank::estimate_dual(const cvec &y, double exclusion_radius) const
    {
        if (!(exclusion_radius > 0.0))
            throw InvalidInput("exclusion radius must be > 0");
        const SingleEstimate first = estimate_single(y);

        DualEstimate est;
        est.d_hat_1 = first.d_hat;
        est.c_seq_1 = first.c_hat;
        est.eta_peak = first.eta_peak;
        est.eta_map = first.eta_map;

        const DictionaryMatrix D1 = build_dictionary(*channels_, est.d_hat_1);
        est.y_res = y - D1 * first.c_hat;
        if (est.y_res.norm() < 1e3 * std::numeric_limits<double>::epsilon() * y.norm())
            throw SecondSourceUndetectable("residual after cancelling the strongest source is numerically zero");

        const SphericalGrid &grid = *channels_->grid;
        std::vector<bool> allowed(search_.size());
        bool any = false;
        for (std::size_t j = 0; j < search_.size(); ++j)
        {
            allowed[j] = angular_separation(est.d_hat_1, search_[j], grid) > exclusion_radius;
            any = any || allowed[j];
        }
        if (!any)
            throw InvalidConfiguration("exclusion radius removes every candidate direction");

        const rvec eta_res = scores(est.y_res);
        const std::size_t pos = argmax(eta_res, &allowed);
        est.d_hat_2 = search_[pos];
        est.c_seq_2 = fit(pos, est.y_res);
        est.eta_res_peak = eta_res(static_cast<Eigen::Index>(pos));
        est.eta_res_map = rvec::Constant(channels_->H.cols() / 2, eta_sentinel);
        for (std::size_t j = 0; j < search_.size(); ++j)
            est.eta_res_map(static_cast<Eigen::Index>(search_[j])) = eta_res(static_cast<Eigen::Index>(j));

        cmat D12(y.size(), 4);
        D12 << D1, build_dictionary(*channels_, est.d_hat_2);
        const cvec c12 = pinv_solve(D12, y);
        est.c_hat_1 = c12.head<2>();
        est.c_hat_2 = c12.tail<2>();
        est.c_bar_hat_1 = normalized(est.c_hat_1);
        est.c_bar_hat_2 = normalized(est.c_hat_2);
        return est;
    }

    SingleEstimate estimate_single(const ChannelSet &channels, const cvec &y, std::span<const DirectionIndex> search_set)
    {
        return DictionaryBank(channels, search_set).estimate_single(y);
    }

    DualEstimate estimate_dual(const ChannelSet &channels, const cvec &y, std::span<const DirectionIndex> search_set,
                               double exclusion_radius)
    {
        return DictionaryBank(channels, search_set).estimate_dual(y, exclusion_radius);
    }
}
