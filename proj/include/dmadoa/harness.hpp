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

#ifndef DMADOA_HARNESS_HPP
#define DMADOA_HARNESS_HPP

#include "dmadoa/estimation.hpp"
#include "dmadoa/mnt_model.hpp"
#include "dmadoa/optimization.hpp"
#include "dmadoa/sensing.hpp"

#include <json.hpp>

#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>

namespace dmadoa
{
    inline constexpr double snr_infinite = std::numeric_limits<double>::infinity();

    struct ModelSpec
    {
        std::string file; // load this model file instead of synthesizing when nonempty
        std::size_t n_meta = 96;
        double spacing_phi = 15.0;
        double spacing_theta = 15.0;
        double coupling_strength = 0.6;
        cplx alpha = SynthesisOptions{}.alpha;
        cplx beta = SynthesisOptions{}.beta;
    };

    // Experiment description. JSON sections: seed, model, sweep, sequences, optimizer, estimation,
    // reference_power, diversity, rank_study, dual, output. Missing keys take the defaults below;
    // unknown keys are rejected. Every random stream is derived from `seed` and a fixed label.
    struct ExperimentConfig
    {
        std::uint64_t seed = 1;
        ModelSpec model;

        // sweep
        std::vector<std::size_t> K_values = {1, 2, 4, 7, 10, 20};
        std::vector<double> snr_db = {5.0, 25.0, 50.0};
        bool write_records = true;

        // sequences
        std::size_t random_sequences = 10;
        std::vector<ObjectiveKind> optimized = {all_objective_kinds.begin(), all_objective_kinds.end()};

        // optimizer
        std::size_t restarts = 4;
        std::size_t max_sweeps = 20;
        std::size_t subset_stride = 10;
        double subset_pole_margin = 3.0;

        // estimation
        std::vector<cvec2> polarizations; // defaults to E_phi, E_theta and (E_phi + E_theta)/sqrt(2)
        std::size_t trials = 10;
        double exclusion_radius = default_exclusion_radius;
        double pole_margin = 3.0;
        std::size_t source_stride = 4;

        // reference_power
        std::size_t reference_configs = 100;
        std::size_t reference_pols = 3;

        // diversity
        std::size_t diversity_samples = 1000;

        // rank_study
        std::vector<std::size_t> rank_K = {2, 5, 10, 20};
        std::size_t rank_random = 100;
        std::vector<ObjectiveKind> rank_objectives = {all_objective_kinds.begin(), all_objective_kinds.end()};

        // dual
        Direction jammer = {120.0, 45.0};
        Direction transmitter = {-40.0, 45.0};
        cvec2 jammer_pol = cvec2(1.0, 1.0) / std::sqrt(2.0);
        cvec2 transmitter_pol = cvec2(1.0, 1.0) / std::sqrt(2.0);
        double imbalance_db = 20.0;
        std::size_t dual_K = 100;
        ObjectiveKind dual_objective = ObjectiveKind::column_normalized;
        double dual_snr_db = 25.0;
        std::size_t dual_trials = 10;
        std::size_t dual_restarts = 1;
        std::size_t dual_max_sweeps = 3;

        // output
        std::string output_dir;

        ExperimentConfig();
    };

    ExperimentConfig parse_config(const nlohmann::json &j);
    ExperimentConfig load_config(const std::filesystem::path &path);

    // Fully resolved configuration including the derived seeds
    nlohmann::json config_to_json(const ExperimentConfig &cfg);

    // Named sub-seeds (model, reference-power, diversity, ...)
    std::uint64_t experiment_seed(const ExperimentConfig &cfg, std::string_view label);

    MntModel resolve_model(const ExperimentConfig &cfg);

    struct ResultRecord
    {
        std::string experiment;
        std::size_t K = 0;
        double snr_db = 0.0;
        std::string sequence;
        SourceSpec source;
        std::size_t pol_index = 0;
        std::size_t trial = 0;
        DirectionIndex d_hat = 0;
        double eps_doa = 0.0; // [deg]
        double eps_pol = 0.0; // [deg]
        double eta_peak = 0.0;
        double runtime_s = 0.0; // not serialized, outputs stay byte-reproducible
    };

    struct SummaryRow
    {
        std::size_t K = 0;
        double snr_db = 0.0;
        std::string sequence;
        std::size_t count = 0;
        double mean_doa = 0.0, se_doa = 0.0;
        double mean_pol = 0.0, se_pol = 0.0;
        double exact_doa_fraction = 0.0;
    };

    // Mean over records grouped by (K, snr, sequence); random-* sequences are additionally pooled as "random"
    std::vector<SummaryRow> aggregate(const std::vector<ResultRecord> &records);

    struct SweepResult
    {
        double p_ref = 0.0;
        std::vector<double> sigma2; // per snr_db entry
        std::map<std::string, double> optimized_values; // "K=<K>/<kind>" -> objective value
        std::vector<ResultRecord> records;
        std::vector<SummaryRow> summary;
    };

    SweepResult run_single_source_sweep(const ExperimentConfig &cfg, const MntModel &model);

    struct DualTrialRecord
    {
        std::string label; // "noiseless" or "trial-<i>"
        double snr_db = 0.0;
        bool ok = false;
        std::string error;
        DirectionIndex d_hat_1 = 0, d_hat_2 = 0;
        double eps_doa_jammer = 0.0, eps_doa_transmitter = 0.0;
        double eps_pol_jammer = 0.0, eps_pol_transmitter = 0.0;
        double eta_peak = 0.0, eta_res_peak = 0.0;
    };

    struct DualScenarioResult
    {
        DirectionIndex jammer = 0, transmitter = 0;
        double optimized_value = 0.0;
        double p_ref = 0.0, sigma2 = 0.0;
        ConfigSequence sequence;
        std::vector<DualTrialRecord> records;
        rvec eta_noiseless, eta_res_noiseless;
        rvec eta_noisy, eta_res_noisy; // first noisy trial
    };

    DualScenarioResult run_dual_source_scenario(const ExperimentConfig &cfg, const MntModel &model);

    DiversityMap run_diversity_map(const ExperimentConfig &cfg, const MntModel &model);

    struct RankStudyRow
    {
        std::size_t K = 0;
        ObjectiveKind kind = ObjectiveKind::raw;
        double optimized = 0.0;
        double random_mean = 0.0;
        double random_std = 0.0;
        double normalized_improvement = 0.0; // NaN when random_std == 0
    };

    struct RankStudyResult
    {
        std::vector<RankStudyRow> rows;
        std::map<std::string, double> spearman; // objective -> Spearman(K, normalized improvement)
    };

    RankStudyResult run_rank_study(const ExperimentConfig &cfg, const MntModel &model);

    // Spearman rank correlation with average ranks for ties; NaN if undefined
    double spearman(const std::vector<double> &x, const std::vector<double> &y);

    // CLI entry points. Each writes its outputs into out_dir and returns the list of files written.
    // Subcommands: synth-model, diversity-map, rank-study, sweep-single, dual-scenario.
    std::vector<std::filesystem::path> run_subcommand(std::string_view name, const ExperimentConfig &cfg,
                                                      const std::filesystem::path &out_dir);

    // Shortest round-trip decimal representation; "nan", "inf", "-inf" for non-finite values
    std::string format_number(double x);
}

#endif
