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

#include "dmadoa/linalg.hpp"

#include <Eigen/SVD>

#include <limits>

namespace dmadoa
{
    namespace
    {
        // Square factors up to this size go through Jacobi, larger ones through divide and conquer
        constexpr Eigen::Index jacobi_limit = 40;

        rvec tall_singular_values(const cmat &T)
        {
            const Eigen::Index m = T.rows(), n = T.cols();
            if (n == 0)
                return rvec();
            if (n > jacobi_limit)
                return Eigen::BDCSVD<cmat>(T).singularValues();
            if (m > n)
            {
                Eigen::HouseholderQR<cmat> qr(T);
                const cmat R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
                return Eigen::JacobiSVD<cmat>(R).singularValues();
            }
            return Eigen::JacobiSVD<cmat>(T).singularValues();
        }
    }

    rvec singular_values(const cmat &H)
    {
        if (H.rows() >= H.cols())
            return tall_singular_values(H);
        return tall_singular_values(H.adjoint());
    }

    double pinv_threshold(Eigen::Index rows, Eigen::Index cols, double sigma_max)
    {
        return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() * sigma_max;
    }

    cvec pinv_solve(const cmat &D, const cvec &y)
    {
        if (D.rows() != y.size())
            throw InvalidInput("pinv_solve: row count of D does not match length of y");
        cvec x = cvec::Zero(D.cols());
        if (D.size() == 0)
            return x;
        Eigen::JacobiSVD<cmat> svd(D, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const rvec &s = svd.singularValues();
        if (s.size() == 0 || s(0) == 0.0)
            return x;
        const double tau = pinv_threshold(D.rows(), D.cols(), s(0));
        const cvec uy = svd.matrixU().adjoint() * y;
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s(i) > tau)
                x += svd.matrixV().col(i) * (uy(i) / s(i));
        return x;
    }
}
