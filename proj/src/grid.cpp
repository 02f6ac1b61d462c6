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

#include "dmadoa/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dmadoa
{
    namespace
    {
        constexpr double deg = std::numbers::pi / 180.0;
        constexpr double angle_tol = 1e-9;

        std::size_t divide_exactly(double range, double spacing, const char *name)
        {
            if (!(spacing > 0.0) || !std::isfinite(spacing))
                throw InvalidInput(std::string(name) + " must be positive");
            const double q = range / spacing;
            const double r = std::round(q);
            if (r < 1.0 || std::abs(q - r) > 1e-9 * std::max(1.0, q))
                throw InvalidInput(std::string(name) + " = " + std::to_string(spacing) +
                                   " does not divide " + std::to_string(range));
            return static_cast<std::size_t>(r);
        }

        // Maps phi onto (-180, 180]
        double wrap_phi(double phi)
        {
            double p = std::fmod(phi, 360.0);
            if (p <= -180.0)
                p += 360.0;
            else if (p > 180.0)
                p -= 360.0;
            return p;
        }
    }

    SphericalGrid::SphericalGrid(double spacing_phi, double spacing_theta)
        : spacing_phi_(spacing_phi), spacing_theta_(spacing_theta)
    {
        n_phi_ = divide_exactly(360.0, spacing_phi, "spacing_phi");
        n_theta_ = divide_exactly(180.0, spacing_theta, "spacing_theta") + 1;

        directions_.reserve((n_theta_ - 2) * n_phi_ + 2);
        directions_.push_back({0.0, 0.0});
        for (std::size_t t = 1; t + 1 < n_theta_; ++t)
        {
            const double theta = static_cast<double>(t) * spacing_theta;
            for (std::size_t p = 1; p <= n_phi_; ++p)
                directions_.push_back({-180.0 + static_cast<double>(p) * spacing_phi, theta});
        }
        directions_.push_back({0.0, 180.0});

        units_.reserve(directions_.size());
        for (const auto &dir : directions_)
            units_.push_back(unit_vector(dir.phi, dir.theta));
    }

    DirectionIndex SphericalGrid::index_of(double phi, double theta) const
    {
        const double tq = theta / spacing_theta_;
        const double tr = std::round(tq);
        if (theta < -angle_tol || theta > 180.0 + angle_tol || std::abs(tq - tr) * spacing_theta_ > angle_tol)
            throw InvalidInput("theta = " + std::to_string(theta) + " is not on the grid");
        const auto t = static_cast<std::size_t>(tr);
        if (t == 0)
            return 0;
        if (t + 1 == n_theta_)
            return directions_.size() - 1;

        const double p = wrap_phi(phi);
        const double pq = (p + 180.0) / spacing_phi_;
        const double pr = std::round(pq);
        if (std::abs(pq - pr) * spacing_phi_ > angle_tol)
            throw InvalidInput("phi = " + std::to_string(phi) + " is not on the grid");
        auto pi = static_cast<std::size_t>(pr);
        if (pi == 0)
            pi = n_phi_; // -180 is the same meridian as 180
        return 1 + (t - 1) * n_phi_ + (pi - 1);
    }

    DirectionIndex SphericalGrid::nearest(double phi, double theta) const
    {
        const Eigen::Vector3d u = unit_vector(phi, theta);
        DirectionIndex best = 0;
        double best_dot = -2.0;
        for (DirectionIndex d = 0; d < units_.size(); ++d)
        {
            const double dot = units_[d].dot(u);
            if (dot > best_dot)
            {
                best_dot = dot;
                best = d;
            }
        }
        return best;
    }

    GridPtr build_grid(double spacing_phi, double spacing_theta)
    {
        return std::make_shared<const SphericalGrid>(spacing_phi, spacing_theta);
    }

    Eigen::Vector3d unit_vector(double phi, double theta)
    {
        const double p = phi * deg, t = theta * deg;
        return {std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t)};
    }

    double angular_separation(DirectionIndex d_true, DirectionIndex d_est, const SphericalGrid &grid)
    {
        if (d_true == d_est)
            return 0.0;
        const double dot = std::clamp(grid.unit(d_true).dot(grid.unit(d_est)), -1.0, 1.0);
        return std::acos(dot) / deg;
    }

    IndexSet valid_source_directions(const SphericalGrid &grid, double pole_margin)
    {
        IndexSet out;
        const auto dirs = grid.directions();
        for (DirectionIndex d = 0; d < dirs.size(); ++d)
            if (dirs[d].theta >= pole_margin && dirs[d].theta <= 180.0 - pole_margin)
                out.push_back(d);
        if (out.empty())
            throw InvalidConfiguration("pole margin leaves no valid source direction");
        return out;
    }

    IndexSet optimization_subset(const SphericalGrid &grid, std::size_t stride, double pole_margin)
    {
        if (stride < 1)
            throw InvalidInput("subset stride must be >= 1");
        const IndexSet valid = valid_source_directions(grid, pole_margin);
        IndexSet out;
        for (std::size_t i = 0; i < valid.size(); i += stride)
            out.push_back(valid[i]);
        return out;
    }
}
