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

#ifndef DMADOA_OPTIMIZATION_HPP
#define DMADOA_OPTIMIZATION_HPP

#include "dmadoa/mnt_model.hpp"

#include <array>
#include <span>
#include <string>
#include <string_view>

namespace dmadoa
{
    // Row k holds the E_phi/E_theta responses of configuration k over the subset directions
    struct SensingMatrix
    {
        cmat H; // K x 2 N_D,opt
        IndexSet subset;
    };

    enum class ObjectiveKind
    {
        raw,
        column_normalized,
        direction_block_normalized
    };

    inline constexpr std::array<ObjectiveKind, 3> all_objective_kinds = {
        ObjectiveKind::raw, ObjectiveKind::column_normalized, ObjectiveKind::direction_block_normalized};

    std::string_view to_string(ObjectiveKind kind);
    ObjectiveKind parse_objective_kind(std::string_view name);

    SensingMatrix build_sensing_matrix(const MntModel &model, const ConfigSequence &seq,
                                       std::span<const DirectionIndex> subset);

    // exp(-sum p_i log p_i) with p_i = sigma_i / sum sigma_j. Singular values at or below
    // max(rows, cols) eps sigma_max count as zero (0 log 0 = 0). Throws InvalidInput for a zero matrix.
    double effective_rank(const cmat &H);

    // Every nonzero column scaled to unit l2 norm; zero columns stay zero
    cmat normalize_columns(const cmat &H);

    // Each (E_phi, E_theta) column pair scaled by one real factor to unit Frobenius norm; zero blocks stay zero
    cmat normalize_direction_blocks(const cmat &H);

    double objective(const cmat &H, ObjectiveKind kind);
    inline double objective(const SensingMatrix &S, ObjectiveKind kind) { return objective(S.H, kind); }

    struct OptimizerConfig
    {
        std::size_t restarts = 4;
        std::size_t max_sweeps = 20;
        std::uint64_t seed = 0;
        // When nonempty, one restart per entry starting from the given sequence instead of a random draw
        std::vector<ConfigSequence> initial_sequences;
    };

    struct RestartTrace
    {
        ConfigSequence initial_sequence;
        ConfigSequence final_sequence;
        double initial_value = 0.0;
        double final_value = 0.0;
        std::vector<double> accepted_values; // objective after each accepted flip, strictly increasing
        std::size_t sweeps_used = 0;
        std::size_t flips_tried = 0;
        bool aborted = false;
        std::string error;
        cmat maintained_H; // sensing matrix as updated flip by flip
    };

    struct OptimizationResult
    {
        ConfigSequence best_sequence;
        double best_value = 0.0;
        std::size_t best_restart = 0;
        std::vector<RestartTrace> restarts;
    };

    // Multi-start greedy coordinate ascent over the K N_M control bits. Each sweep visits all bits in a
    // fresh random order; a trial flip recomputes only its row of the sensing matrix and is kept only if
    // the objective strictly increases. A sweep without accepted flips ends the restart.
    OptimizationResult greedy_optimize(const MntModel &model, std::size_t K, std::span<const DirectionIndex> subset,
                                       ObjectiveKind kind, const OptimizerConfig &cfg);

    struct RandomSequenceStats
    {
        double mean = 0.0;
        double std = 0.0; // sample standard deviation (n - 1)
        std::vector<double> values;
    };

    RandomSequenceStats random_sequence_stats(const MntModel &model, std::size_t K,
                                              std::span<const DirectionIndex> subset, ObjectiveKind kind,
                                              std::size_t n_sequences, std::uint64_t seed);
}

#endif
