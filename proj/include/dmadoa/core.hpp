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

#ifndef DMADOA_CORE_HPP
#define DMADOA_CORE_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dmadoa
{
    using cplx = std::complex<double>;
    using cvec = Eigen::VectorXcd;
    using cmat = Eigen::MatrixXcd;
    using rvec = Eigen::VectorXd;
    using cvec2 = Eigen::Vector2cd;

    // Index into a SphericalGrid, 0 <= d < N_D
    using DirectionIndex = std::size_t;
    using IndexSet = std::vector<DirectionIndex>;

    // One binary control vector v in {0,1}^N_M
    using ConfigVector = std::vector<std::uint8_t>;

    // Ordered list of K control vectors
    using ConfigSequence = std::vector<ConfigVector>;

    // Error hierarchy. Every failure raised by the library derives from dmadoa::Error.
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class InvalidInput : public Error
    {
    public:
        using Error::Error;
    };

    class InvalidConfiguration : public Error
    {
    public:
        using Error::Error;
    };

    class SingularSystem : public Error
    {
    public:
        SingularSystem(const std::string &what, double rcond) : Error(what), rcond_(rcond) {}
        double rcond() const noexcept { return rcond_; }

    private:
        double rcond_;
    };

    class DegenerateMeasurement : public Error
    {
    public:
        using Error::Error;
    };

    class NoSignal : public Error
    {
    public:
        using Error::Error;
    };

    class SecondSourceUndetectable : public Error
    {
    public:
        using Error::Error;
    };

    void validate_sequence(const ConfigSequence &seq, std::size_t n_meta);
}

#endif
