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

#include "dmadoa/optimization.hpp"
#include "dmadoa/linalg.hpp"
#include "dmadoa/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dmadoa
{
    std::string_view to_string(ObjectiveKind kind)
    {
        switch (kind)
        {
        case ObjectiveKind::raw:
            return "raw";
        case ObjectiveKind::column_normalized:
            return "column_normalized";
        case ObjectiveKind::direction_block_normalized:
            return "direction_block_normalized";
        }
        return "unknown";
    }

    ObjectiveKind parse_objective_kind(std::string_view name)
    {
        for (auto kind : all_objective_kinds)
            if (name == to_string(kind))
                return kind;
        throw InvalidInput("unknown objective kind '" + std::string(name) + "'");
    }

    SensingMatrix build_sensing_matrix(const MntModel &model, const ConfigSequence &seq,
                                       std::span<const DirectionIndex> subset)
    {
        if (subset.empty())
            throw InvalidInput("sensing matrix needs a nonempty direction subset");
        validate_sequence(seq, model.n_meta());
        SensingMatrix S;
        S.subset.assign(subset.begin(), subset.end());
        S.H.resize(static_cast<Eigen::Index>(seq.size()), static_cast<Eigen::Index>(2 * subset.size()));
        for (std::size_t k = 0; k < seq.size(); ++k)
            S.H.row(static_cast<Eigen::Index>(k)) = compute_channel_rows(model, seq[k], subset).transpose();
        return S;
    }

    double effective_rank(const cmat &H)
    {
        if (H.size() == 0)
            throw InvalidInput("effective rank of an empty matrix");
        const rvec s = singular_values(H);
        if (!(s(0) > 0.0))
            throw InvalidInput("effective rank of an all-zero matrix");
        const double tau = pinv_threshold(H.rows(), H.cols(), s(0));
        double total = 0.0;
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s(i) > tau)
                total += s(i);
        double entropy = 0.0;
        for (Eigen::Index i = 0; i < s.size(); ++i)
        {
            if (!(s(i) > tau))
                continue;
            const double p = s(i) / total;
            entropy -= p * std::log(p);
        }
        return std::exp(entropy);
    }

    cmat normalize_columns(const cmat &H)
    {
        cmat out = H;
        for (Eigen::Index c = 0; c < out.cols(); ++c)
        {
            const double n = out.col(c).norm();
            if (n > 0.0)
                out.col(c) /= n;
        }
        return out;
    }

    cmat normalize_direction_blocks(const cmat &H)
    {
        if (H.cols() % 2 != 0)
            throw InvalidInput("direction-block normalization needs an even column count");
        cmat out = H;
        for (Eigen::Index c = 0; c < out.cols(); c += 2)
        {
            const double n = out.middleCols(c, 2).norm();
            if (n > 0.0)
                out.middleCols(c, 2) /= n;
        }
        return out;
    }

    double objective(const cmat &H, ObjectiveKind kind)
    {
        switch (kind)
        {
        case ObjectiveKind::raw:
            return effective_rank(H);
        case ObjectiveKind::column_normalized:
            return effective_rank(normalize_columns(H));
        case ObjectiveKind::direction_block_normalized:
            return effective_rank(normalize_direction_blocks(H));
        }
        throw InvalidInput("unknown objective kind");
    }

    namespace
    {
        void run_restart(const MntModel &model, const cmat &h0_rows, const cmat &A_rows, ObjectiveKind kind,
                         std::size_t max_sweeps, rng_t &rng, RestartTrace &trace)
        {
            const std::size_t K = trace.initial_sequence.size();
            const std::size_t n_meta = model.n_meta();

            std::vector<LoadedNetwork> networks;
            networks.reserve(K);
            cmat H(static_cast<Eigen::Index>(K), A_rows.rows());
            for (std::size_t k = 0; k < K; ++k)
            {
                networks.emplace_back(model, trace.initial_sequence[k]);
                H.row(static_cast<Eigen::Index>(k)) = (h0_rows + A_rows * networks[k].port_response()).transpose();
            }
            double value = objective(H, kind);
            trace.initial_value = value;

            std::vector<std::size_t> order(K * n_meta);
            Eigen::RowVectorXcd saved_row;
            for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep)
            {
                std::iota(order.begin(), order.end(), std::size_t{0});
                std::shuffle(order.begin(), order.end(), rng);
                bool accepted = false;
                for (const std::size_t coord : order)
                {
                    const std::size_t k = coord / n_meta;
                    const std::size_t bit = coord % n_meta;
                    const auto row = static_cast<Eigen::Index>(k);
                    const auto update = networks[k].propose_flip(bit);

                    saved_row = H.row(row);
                    H.row(row) += (update.scale * (A_rows * update.direction)).transpose();
                    const double candidate = objective(H, kind);
                    ++trace.flips_tried;
                    if (candidate > value)
                    {
                        networks[k].apply_flip(update);
                        value = candidate;
                        trace.accepted_values.push_back(value);
                        accepted = true;
                    }
                    else
                    {
                        H.row(row) = saved_row;
                    }
                }
                trace.sweeps_used = sweep + 1;
                if (!accepted)
                    break;
            }

            trace.final_sequence.clear();
            for (const auto &net : networks)
                trace.final_sequence.push_back(net.config());
            trace.final_value = value;
            trace.maintained_H = std::move(H);
        }
    }

    OptimizationResult greedy_optimize(const MntModel &model, std::size_t K, std::span<const DirectionIndex> subset,
                                       ObjectiveKind kind, const OptimizerConfig &cfg)
    {
        if (K < 1)
            throw InvalidInput("sequence length K must be >= 1");
        if (subset.empty())
            throw InvalidInput("optimization subset is empty");
        if (cfg.max_sweeps < 1)
            throw InvalidInput("max_sweeps must be >= 1");
        const std::size_t n_restarts = cfg.initial_sequences.empty() ? cfg.restarts : cfg.initial_sequences.size();
        if (n_restarts < 1)
            throw InvalidInput("restarts must be >= 1");
        for (const auto &init : cfg.initial_sequences)
        {
            validate_sequence(init, model.n_meta());
            if (init.size() != K)
                throw InvalidInput("initial sequence length does not match K");
        }
        for (auto d : subset)
            if (d >= model.n_directions())
                throw InvalidInput("subset direction out of range");

        const cmat h0_rows = gather_direction_rows(model.h0(), subset);
        const cmat A_rows = gather_direction_rows(model.A(), subset);

        OptimizationResult result;
        result.restarts.resize(n_restarts);
        bool have_best = false;
        for (std::size_t r = 0; r < n_restarts; ++r)
        {
            rng_t rng(derive_seed(cfg.seed, "greedy-restart", {r}));
            RestartTrace &trace = result.restarts[r];
            trace.initial_sequence = cfg.initial_sequences.empty() ? random_sequence(rng, K, model.n_meta())
                                                                   : cfg.initial_sequences[r];
            try
            {
                run_restart(model, h0_rows, A_rows, kind, cfg.max_sweeps, rng, trace);
            }
            catch (const SingularSystem &e)
            {
                trace.aborted = true;
                trace.error = e.what();
                continue;
            }
            if (!have_best || trace.final_value > result.best_value)
            {
                have_best = true;
                result.best_value = trace.final_value;
                result.best_sequence = trace.final_sequence;
                result.best_restart = r;
            }
        }
        if (!have_best)
            throw SingularSystem("every optimizer restart hit a singular configuration: " + result.restarts.front().error,
                                 0.0);
        return result;
    }

    RandomSequenceStats random_sequence_stats(const MntModel &model, std::size_t K,
                                              std::span<const DirectionIndex> subset, ObjectiveKind kind,
                                              std::size_t n_sequences, std::uint64_t seed)
    {
        if (n_sequences < 2)
            throw InvalidInput("random sequence statistics need n_sequences >= 2");
        RandomSequenceStats stats;
        stats.values.reserve(n_sequences);
        for (std::size_t s = 0; s < n_sequences; ++s)
        {
            rng_t rng(derive_seed(seed, "random-sequence", {s}));
            const ConfigSequence seq = random_sequence(rng, K, model.n_meta());
            stats.values.push_back(objective(build_sensing_matrix(model, seq, subset), kind));
        }
        const double n = static_cast<double>(n_sequences);
        stats.mean = std::accumulate(stats.values.begin(), stats.values.end(), 0.0) / n;
        double ss = 0.0;
        for (double v : stats.values)
            ss += (v - stats.mean) * (v - stats.mean);
        stats.std = std::sqrt(ss / (n - 1.0));
        return stats;
    }
}
