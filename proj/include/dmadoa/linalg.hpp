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

#ifndef DMADOA_LINALG_HPP
#define DMADOA_LINALG_HPP

#include "dmadoa/core.hpp"

namespace dmadoa
{
    // Singular values in decreasing order, length min(rows, cols).
    // Thin matrices are reduced by a Householder QR before a Jacobi SVD of the triangular factor;
    // everything else goes through a divide-and-conquer SVD. Relative accuracy ~1e-14 on well-scaled input.
    rvec singular_values(const cmat &H);

    // Pseudoinverse rank threshold max(rows, cols) * eps * sigma_max
    double pinv_threshold(Eigen::Index rows, Eigen::Index cols, double sigma_max);

    // Minimum-norm least-squares solution D^+ y, singular values below pinv_threshold are discarded
    cvec pinv_solve(const cmat &D, const cvec &y);
}

#endif
