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

#ifndef DMADOA_GRID_HPP
#define DMADOA_GRID_HPP

#include "dmadoa/core.hpp"

#include <memory>
#include <span>

namespace dmadoa
{
    struct Direction
    {
        double phi;   // Azimuth in [deg], in (-180, 180], measured from +x toward +y
        double theta; // Polar angle in [deg], in [0, 180], measured from +z
    };

    // Discretized far-field direction grid.
    //
    // Ordering: north pole first, then one ring per interior theta value (increasing theta), each ring
    // listing phi in increasing order from -180 + spacing_phi to 180, then the south pole. The pole
    // rows are collapsed to a single direction with phi = 0.
    //
    // Radiation-port convention shared by every consumer: direction d owns ports 2d (E_phi) and 2d+1 (E_theta).
    class SphericalGrid
    {
    public:
        SphericalGrid(double spacing_phi, double spacing_theta);

        std::size_t size() const noexcept { return directions_.size(); }
        double spacing_phi() const noexcept { return spacing_phi_; }
        double spacing_theta() const noexcept { return spacing_theta_; }

        const Direction &operator[](DirectionIndex d) const { return directions_.at(d); }
        std::span<const Direction> directions() const noexcept { return directions_; }
        const Eigen::Vector3d &unit(DirectionIndex d) const { return units_.at(d); }

        // Exact lookup of a grid point (tolerance 1e-9 deg); throws InvalidInput if (phi, theta) is no grid point
        DirectionIndex index_of(double phi, double theta) const;

        // Grid point with the smallest angular separation to (phi, theta); ties resolve to the smaller index
        DirectionIndex nearest(double phi, double theta) const;

    private:
        double spacing_phi_;
        double spacing_theta_;
        std::size_t n_phi_;
        std::size_t n_theta_; // number of theta samples including both poles
        std::vector<Direction> directions_;
        std::vector<Eigen::Vector3d> units_;
    };

    using GridPtr = std::shared_ptr<const SphericalGrid>;

    GridPtr build_grid(double spacing_phi, double spacing_theta);

    // (sin(theta) cos(phi), sin(theta) sin(phi), cos(theta)), angles in degrees
    Eigen::Vector3d unit_vector(double phi, double theta);

    // Angle between two grid directions in [deg], in [0, 180]
    double angular_separation(DirectionIndex d_true, DirectionIndex d_est, const SphericalGrid &grid);

    // Directions with pole_margin <= theta <= 180 - pole_margin, then every stride-th survivor
    IndexSet optimization_subset(const SphericalGrid &grid, std::size_t stride = 10, double pole_margin = 3.0);

    // All directions with pole_margin <= theta <= 180 - pole_margin
    IndexSet valid_source_directions(const SphericalGrid &grid, double pole_margin = 3.0);
}

#endif
