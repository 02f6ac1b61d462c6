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

#include "dmadoa/mnt_model.hpp"
#include "dmadoa/random.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace dmadoa
{
    namespace
    {
        void check_length(const ConfigVector &v, std::size_t n_meta)
        {
            if (v.size() != n_meta)
                throw InvalidInput("configuration length " + std::to_string(v.size()) +
                                   " does not match n_meta = " + std::to_string(n_meta));
        }

        Eigen::PartialPivLU<cmat> factorize_resolvent(const cmat &Gamma, const cvec &r)
        {
            cmat M = -(r.asDiagonal() * Gamma);
            M.diagonal().array() += 1.0;
            Eigen::PartialPivLU<cmat> lu(M);
            const double rc = lu.rcond();
            if (!(rc >= singularity_rcond))
                throw SingularSystem("(I - Phi Gamma) is singular or near-singular, rcond = " + std::to_string(rc), rc);
            return lu;
        }
    }

    MntModel::MntModel(cplx alpha, cplx beta, cvec h0, cmat A, cmat Gamma, cvec b, GridPtr grid)
        : alpha_(alpha), beta_(beta), h0_(std::move(h0)), A_(std::move(A)), Gamma_(std::move(Gamma)),
          b_(std::move(b)), grid_(std::move(grid))
    {
        if (!grid_)
            throw InvalidInput("model requires a grid");
        const auto n_ports = static_cast<Eigen::Index>(2 * grid_->size());
        const Eigen::Index n_meta = b_.size();
        if (n_meta < 1)
            throw InvalidInput("model requires at least one meta-element");
        if (h0_.size() != n_ports)
            throw InvalidInput("h0 must have length 2 N_D = " + std::to_string(n_ports));
        if (A_.rows() != n_ports || A_.cols() != n_meta)
            throw InvalidInput("A must be 2 N_D x N_M");
        if (Gamma_.rows() != n_meta || Gamma_.cols() != n_meta)
            throw InvalidInput("Gamma must be N_M x N_M");
        constexpr double passive_tol = 1e-12;
        if (std::abs(alpha_) > 1.0 + passive_tol || std::abs(beta_) > 1.0 + passive_tol)
            throw InvalidInput("load reflection coefficients must satisfy |alpha|, |beta| <= 1");
        for (const cplx r : {alpha_, beta_})
            factorize_resolvent(Gamma_, cvec::Constant(n_meta, r));
    }

    cvec load_vector(const ConfigVector &v, const MntModel &model)
    {
        check_length(v, model.n_meta());
        cvec r(static_cast<Eigen::Index>(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i)
        {
            if (v[i] > 1)
                throw InvalidInput("configuration entries must be 0 or 1");
            r(static_cast<Eigen::Index>(i)) = v[i] ? model.beta() : model.alpha();
        }
        return r;
    }

    cvec virtual_port_response(const MntModel &model, const ConfigVector &v)
    {
        const cvec r = load_vector(v, model);
        const auto lu = factorize_resolvent(model.Gamma(), r);
        return lu.solve(cvec(r.cwiseProduct(model.b())));
    }

    cvec compute_channel(const MntModel &model, const ConfigVector &v)
    {
        return model.h0() + model.A() * virtual_port_response(model, v);
    }

    cmat gather_direction_rows(const cmat &M, std::span<const DirectionIndex> directions)
    {
        cmat out(static_cast<Eigen::Index>(2 * directions.size()), M.cols());
        for (std::size_t j = 0; j < directions.size(); ++j)
        {
            const auto row = static_cast<Eigen::Index>(2 * directions[j]);
            if (row + 1 >= M.rows())
                throw InvalidInput("direction index " + std::to_string(directions[j]) + " out of range");
            out.row(static_cast<Eigen::Index>(2 * j)) = M.row(row);
            out.row(static_cast<Eigen::Index>(2 * j + 1)) = M.row(row + 1);
        }
        return out;
    }

    cvec gather_direction_rows(const cvec &x, std::span<const DirectionIndex> directions)
    {
        cvec out(static_cast<Eigen::Index>(2 * directions.size()));
        for (std::size_t j = 0; j < directions.size(); ++j)
        {
            const auto row = static_cast<Eigen::Index>(2 * directions[j]);
            if (row + 1 >= x.size())
                throw InvalidInput("direction index " + std::to_string(directions[j]) + " out of range");
            out(static_cast<Eigen::Index>(2 * j)) = x(row);
            out(static_cast<Eigen::Index>(2 * j + 1)) = x(row + 1);
        }
        return out;
    }

    cvec compute_channel_rows(const MntModel &model, const ConfigVector &v, std::span<const DirectionIndex> directions)
    {
        for (auto d : directions)
            if (d >= model.n_directions())
                throw InvalidInput("direction index " + std::to_string(d) + " out of range");
        const cvec x = virtual_port_response(model, v);
        return gather_direction_rows(model.h0(), directions) + gather_direction_rows(model.A(), directions) * x;
    }

    ChannelSet compute_channels(const MntModel &model, const ConfigSequence &seq)
    {
        validate_sequence(seq, model.n_meta());
        ChannelSet out;
        out.H.resize(static_cast<Eigen::Index>(seq.size()), static_cast<Eigen::Index>(2 * model.n_directions()));
        for (std::size_t k = 0; k < seq.size(); ++k)
            out.H.row(static_cast<Eigen::Index>(k)) = compute_channel(model, seq[k]).transpose();
        out.configs = seq;
        out.grid = model.grid_ptr();
        return out;
    }

    // ---------------------------------------------------------------------------------------------
    LoadedNetwork::LoadedNetwork(const MntModel &model, ConfigVector v)
        : model_(&model), v_(std::move(v))
    {
        r_ = load_vector(v_, model);
        factorize();
        x_ = lu_.solve(cvec(r_.cwiseProduct(model.b())));
    }

    void LoadedNetwork::factorize()
    {
        lu_ = factorize_resolvent(model_->Gamma(), r_);
    }

    LoadedNetwork::FlipUpdate LoadedNetwork::propose_flip(std::size_t bit) const
    {
        if (bit >= v_.size())
            throw InvalidInput("bit index out of range");
        const auto i = static_cast<Eigen::Index>(bit);
        const cplx r_new = v_[bit] ? model_->alpha() : model_->beta();
        const cplx delta = r_new - r_(i);

        FlipUpdate up;
        up.bit = bit;
        up.direction = lu_.solve(cvec(cvec::Unit(r_.size(), i)));
        const auto gamma_row = model_->Gamma().row(i);
        const cplx gamma_g = (gamma_row * up.direction)(0);
        const cplx gamma_x = (gamma_row * x_)(0);
        const cplx denom = 1.0 - delta * gamma_g;
        if (std::abs(denom) < singularity_rcond)
            throw SingularSystem("bit flip makes (I - Phi Gamma) singular", std::abs(denom));
        up.scale = delta * (gamma_x + model_->b()(i)) / denom;
        return up;
    }

    void LoadedNetwork::apply_flip(const FlipUpdate &update)
    {
        const auto i = static_cast<Eigen::Index>(update.bit);
        v_[update.bit] ^= 1;
        r_(i) = v_[update.bit] ? model_->beta() : model_->alpha();
        factorize();
        x_ += update.scale * update.direction;
    }

    // ---------------------------------------------------------------------------------------------
    MntModel synthesize_model(std::size_t n_meta, GridPtr grid, double coupling_strength, std::uint64_t seed,
                              const SynthesisOptions &options)
    {
        if (n_meta < 1)
            throw InvalidInput("n_meta must be >= 1");
        if (!grid)
            throw InvalidInput("synthesize_model requires a grid");
        if (!(coupling_strength >= 0.0 && coupling_strength < 1.0))
            throw InvalidInput("coupling_strength must lie in [0, 1)");
        if (std::abs(options.alpha) > 1.0 || std::abs(options.beta) > 1.0)
            throw InvalidInput("load reflection coefficients must satisfy |alpha|, |beta| <= 1");

        rng_t rng(seed);
        const auto n_ports = static_cast<Eigen::Index>(2 * grid->size());
        const auto n = static_cast<Eigen::Index>(n_meta);

        cvec h0 = draw_circular_gaussian(rng, n_ports);
        cmat A(n_ports, n);
        for (Eigen::Index c = 0; c < n; ++c)
            A.col(c) = draw_circular_gaussian(rng, n_ports);
        cmat Gamma(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i; j < n; ++j)
            {
                Gamma(i, j) = draw_circular_gaussian(rng);
                Gamma(j, i) = Gamma(i, j);
            }
        cvec b = draw_circular_gaussian(rng, n);

        const double load_max = std::max(std::abs(options.alpha), std::abs(options.beta));
        if (coupling_strength == 0.0)
        {
            Gamma.setZero();
        }
        else
        {
            const double norm2 = Eigen::JacobiSVD<cmat>(Gamma).singularValues()(0);
            const double target = load_max > 0.0 ? coupling_strength / load_max : coupling_strength;
            Gamma *= target / norm2;
        }
        return MntModel(options.alpha, options.beta, std::move(h0), std::move(A), std::move(Gamma), std::move(b),
                        std::move(grid));
    }

    DiversityMap diversity_map(const MntModel &model, const ConfigSequence &ensemble)
    {
        validate_sequence(ensemble, model.n_meta());
        if (ensemble.size() < 2)
            throw InvalidInput("diversity map needs at least two configurations");
        const auto n_ports = static_cast<Eigen::Index>(2 * model.n_directions());

        // Response relative to the first sample keeps the running sums well conditioned
        const cvec shift = compute_channel(model, ensemble.front());
        cvec sum = cvec::Zero(n_ports);
        rvec sum_sq = rvec::Zero(n_ports);
        for (const auto &v : ensemble)
        {
            const cvec dh = compute_channel(model, v) - shift;
            sum += dh;
            sum_sq += dh.cwiseAbs2();
        }
        const double n = static_cast<double>(ensemble.size());
        const rvec var = (sum_sq / n - (sum / n).cwiseAbs2()).cwiseMax(0.0);

        DiversityMap out;
        const auto nd = static_cast<Eigen::Index>(model.n_directions());
        out.sd_phi.resize(nd);
        out.sd_theta.resize(nd);
        for (Eigen::Index d = 0; d < nd; ++d)
        {
            out.sd_phi(d) = std::sqrt(var(2 * d));
            out.sd_theta(d) = std::sqrt(var(2 * d + 1));
        }
        return out;
    }

    DiversityMap diversity_map(const MntModel &model, std::size_t n_samples, std::uint64_t seed)
    {
        if (n_samples < 2)
            throw InvalidInput("n_samples must be >= 2");
        rng_t rng(seed);
        return diversity_map(model, random_sequence(rng, n_samples, model.n_meta()));
    }
}
