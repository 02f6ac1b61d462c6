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

#include "dmadoa/harness.hpp"
#include "dmadoa/model_io.hpp"
#include "dmadoa/random.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

namespace dmadoa
{
    using nlohmann::json;
    namespace fs = std::filesystem;

    ExperimentConfig::ExperimentConfig()
    {
        polarizations = {cvec2(1.0, 0.0), cvec2(0.0, 1.0), cvec2(1.0, 1.0) / std::sqrt(2.0)};
    }

    // =============================================================================================
    // Config parsing
    // =============================================================================================
    namespace
    {
        // Reads keys of one JSON object and rejects any key that was never asked for
        class Section
        {
        public:
            Section(const json &j, std::string name) : j_(j), name_(std::move(name))
            {
                if (!j_.is_object())
                    throw InvalidInput("config section '" + name_ + "' must be an object");
            }

            const json *get(const std::string &key)
            {
                known_.insert(key);
                auto it = j_.find(key);
                return it == j_.end() || it->is_null() ? nullptr : &*it;
            }

            template <typename T>
            void read(const std::string &key, T &out)
            {
                if (const json *v = get(key))
                {
                    try
                    {
                        out = v->get<T>();
                    }
                    catch (const json::exception &)
                    {
                        throw InvalidInput("config key '" + name_ + "." + key + "' has the wrong type");
                    }
                }
            }

            void finish() const
            {
                for (auto it = j_.begin(); it != j_.end(); ++it)
                    if (!known_.count(it.key()))
                        throw InvalidInput("unknown config key '" + (name_.empty() ? "" : name_ + ".") + it.key() + "'");
            }

            const std::string &name() const { return name_; }

        private:
            const json &j_;
            std::string name_;
            std::set<std::string> known_;
        };

        cplx complex_from_json(const json &v, const std::string &where)
        {
            if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
                throw InvalidInput("'" + where + "' must be [re, im]");
            return {v[0].get<double>(), v[1].get<double>()};
        }

        cvec2 polarization_from_json(const json &v, const std::string &where)
        {
            if (!v.is_array() || v.size() != 2)
                throw InvalidInput("'" + where + "' must be [[re, im], [re, im]]");
            cvec2 c(complex_from_json(v[0], where), complex_from_json(v[1], where));
            if (!(c.norm() > 0.0))
                throw InvalidInput("'" + where + "' must be a nonzero polarization");
            return c;
        }

        json complex_to_json(cplx c) { return json::array({c.real(), c.imag()}); }

        json polarization_to_json(const cvec2 &c) { return json::array({complex_to_json(c(0)), complex_to_json(c(1))}); }

        double snr_from_json(const json &v)
        {
            if (v.is_number())
                return v.get<double>();
            if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "Infinity"))
                return snr_infinite;
            throw InvalidInput("SNR values must be numbers or \"inf\"");
        }

        json snr_to_json(double snr)
        {
            if (std::isinf(snr))
                return "inf";
            return snr;
        }

        std::vector<ObjectiveKind> kinds_from_json(const json &v, const std::string &where)
        {
            if (!v.is_array())
                throw InvalidInput("'" + where + "' must be a list of objective names");
            std::vector<ObjectiveKind> out;
            for (const auto &e : v)
                out.push_back(parse_objective_kind(e.get<std::string>()));
            return out;
        }

        json kinds_to_json(const std::vector<ObjectiveKind> &kinds)
        {
            json out = json::array();
            for (auto k : kinds)
                out.push_back(std::string(to_string(k)));
            return out;
        }

        Direction direction_from_json(const json &v, const std::string &where)
        {
            if (!v.is_array() || v.size() != 2)
                throw InvalidInput("'" + where + "' must be [phi, theta]");
            return {v[0].get<double>(), v[1].get<double>()};
        }

        void require_nonempty(bool ok, const char *what)
        {
            if (!ok)
                throw InvalidInput(std::string("config: ") + what + " must be nonempty");
        }
    }

    ExperimentConfig parse_config(const json &j)
    {
        ExperimentConfig cfg;
        Section top(j, "");
        top.read("seed", cfg.seed);

        if (const json *m = top.get("model"))
        {
            Section s(*m, "model");
            s.read("file", cfg.model.file);
            s.read("n_meta", cfg.model.n_meta);
            s.read("spacing_phi", cfg.model.spacing_phi);
            s.read("spacing_theta", cfg.model.spacing_theta);
            s.read("coupling_strength", cfg.model.coupling_strength);
            if (const json *v = s.get("alpha"))
                cfg.model.alpha = complex_from_json(*v, "model.alpha");
            if (const json *v = s.get("beta"))
                cfg.model.beta = complex_from_json(*v, "model.beta");
            s.finish();
        }
        if (const json *m = top.get("sweep"))
        {
            Section s(*m, "sweep");
            s.read("K", cfg.K_values);
            if (const json *v = s.get("snr_db"))
            {
                if (!v->is_array())
                    throw InvalidInput("sweep.snr_db must be a list");
                cfg.snr_db.clear();
                for (const auto &e : *v)
                    cfg.snr_db.push_back(snr_from_json(e));
            }
            s.read("write_records", cfg.write_records);
            s.finish();
        }
        if (const json *m = top.get("sequences"))
        {
            Section s(*m, "sequences");
            s.read("random", cfg.random_sequences);
            if (const json *v = s.get("optimized"))
                cfg.optimized = kinds_from_json(*v, "sequences.optimized");
            s.finish();
        }
        if (const json *m = top.get("optimizer"))
        {
            Section s(*m, "optimizer");
            s.read("restarts", cfg.restarts);
            s.read("max_sweeps", cfg.max_sweeps);
            s.read("subset_stride", cfg.subset_stride);
            s.read("pole_margin", cfg.subset_pole_margin);
            s.finish();
        }
        if (const json *m = top.get("estimation"))
        {
            Section s(*m, "estimation");
            if (const json *v = s.get("polarizations"))
            {
                if (!v->is_array())
                    throw InvalidInput("estimation.polarizations must be a list");
                cfg.polarizations.clear();
                for (const auto &e : *v)
                    cfg.polarizations.push_back(polarization_from_json(e, "estimation.polarizations"));
            }
            s.read("trials", cfg.trials);
            s.read("exclusion_radius", cfg.exclusion_radius);
            s.read("pole_margin", cfg.pole_margin);
            s.read("source_stride", cfg.source_stride);
            s.finish();
        }
        if (const json *m = top.get("reference_power"))
        {
            Section s(*m, "reference_power");
            s.read("n_configs", cfg.reference_configs);
            s.read("n_pols", cfg.reference_pols);
            s.finish();
        }
        if (const json *m = top.get("diversity"))
        {
            Section s(*m, "diversity");
            s.read("n_samples", cfg.diversity_samples);
            s.finish();
        }
        if (const json *m = top.get("rank_study"))
        {
            Section s(*m, "rank_study");
            s.read("K", cfg.rank_K);
            s.read("n_random", cfg.rank_random);
            if (const json *v = s.get("objectives"))
                cfg.rank_objectives = kinds_from_json(*v, "rank_study.objectives");
            s.finish();
        }
        if (const json *m = top.get("dual"))
        {
            Section s(*m, "dual");
            if (const json *v = s.get("jammer"))
                cfg.jammer = direction_from_json(*v, "dual.jammer");
            if (const json *v = s.get("transmitter"))
                cfg.transmitter = direction_from_json(*v, "dual.transmitter");
            if (const json *v = s.get("jammer_polarization"))
                cfg.jammer_pol = polarization_from_json(*v, "dual.jammer_polarization");
            if (const json *v = s.get("transmitter_polarization"))
                cfg.transmitter_pol = polarization_from_json(*v, "dual.transmitter_polarization");
            s.read("imbalance_db", cfg.imbalance_db);
            s.read("K", cfg.dual_K);
            if (const json *v = s.get("objective"))
                cfg.dual_objective = parse_objective_kind(v->get<std::string>());
            if (const json *v = s.get("snr_db"))
                cfg.dual_snr_db = snr_from_json(*v);
            s.read("trials", cfg.dual_trials);
            s.read("restarts", cfg.dual_restarts);
            s.read("max_sweeps", cfg.dual_max_sweeps);
            s.finish();
        }
        if (const json *m = top.get("output"))
        {
            Section s(*m, "output");
            s.read("dir", cfg.output_dir);
            s.finish();
        }
        // "config" and "derived_seeds" are echoed by config_to_json; accept them so an echo can be rerun
        top.get("derived_seeds");
        top.finish();

        require_nonempty(!cfg.K_values.empty(), "sweep.K");
        require_nonempty(!cfg.snr_db.empty(), "sweep.snr_db");
        require_nonempty(!cfg.polarizations.empty(), "estimation.polarizations");
        require_nonempty(!cfg.rank_K.empty(), "rank_study.K");
        for (auto K : cfg.K_values)
            if (K < 1)
                throw InvalidInput("config: sequence lengths must be >= 1");
        if (cfg.source_stride < 1)
            throw InvalidInput("config: estimation.source_stride must be >= 1");
        return cfg;
    }

    ExperimentConfig load_config(const fs::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw Error("cannot open config file " + path.string());
        json j;
        try
        {
            in >> j;
        }
        catch (const json::exception &e)
        {
            throw InvalidInput("malformed config file " + path.string() + ": " + e.what());
        }
        return parse_config(j);
    }

    std::uint64_t experiment_seed(const ExperimentConfig &cfg, std::string_view label)
    {
        return derive_seed(cfg.seed, label);
    }

    namespace
    {
        const std::vector<std::string> seed_labels = {"model", "reference-power", "diversity", "random-sequence",
                                                      "optimizer", "noise", "rank-optimizer", "rank-random",
                                                      "dual-optimizer", "dual-noise"};
    }

    json config_to_json(const ExperimentConfig &cfg)
    {
        json j;
        j["seed"] = cfg.seed;
        j["model"] = {{"file", cfg.model.file},
                      {"n_meta", cfg.model.n_meta},
                      {"spacing_phi", cfg.model.spacing_phi},
                      {"spacing_theta", cfg.model.spacing_theta},
                      {"coupling_strength", cfg.model.coupling_strength},
                      {"alpha", complex_to_json(cfg.model.alpha)},
                      {"beta", complex_to_json(cfg.model.beta)}};
        json snr = json::array();
        for (double s : cfg.snr_db)
            snr.push_back(snr_to_json(s));
        j["sweep"] = {{"K", cfg.K_values}, {"snr_db", snr}, {"write_records", cfg.write_records}};
        j["sequences"] = {{"random", cfg.random_sequences}, {"optimized", kinds_to_json(cfg.optimized)}};
        j["optimizer"] = {{"restarts", cfg.restarts},
                          {"max_sweeps", cfg.max_sweeps},
                          {"subset_stride", cfg.subset_stride},
                          {"pole_margin", cfg.subset_pole_margin}};
        json pols = json::array();
        for (const auto &p : cfg.polarizations)
            pols.push_back(polarization_to_json(p));
        j["estimation"] = {{"polarizations", pols},
                           {"trials", cfg.trials},
                           {"exclusion_radius", cfg.exclusion_radius},
                           {"pole_margin", cfg.pole_margin},
                           {"source_stride", cfg.source_stride}};
        j["reference_power"] = {{"n_configs", cfg.reference_configs}, {"n_pols", cfg.reference_pols}};
        j["diversity"] = {{"n_samples", cfg.diversity_samples}};
        j["rank_study"] = {{"K", cfg.rank_K},
                           {"n_random", cfg.rank_random},
                           {"objectives", kinds_to_json(cfg.rank_objectives)}};
        j["dual"] = {{"jammer", {cfg.jammer.phi, cfg.jammer.theta}},
                     {"transmitter", {cfg.transmitter.phi, cfg.transmitter.theta}},
                     {"jammer_polarization", polarization_to_json(cfg.jammer_pol)},
                     {"transmitter_polarization", polarization_to_json(cfg.transmitter_pol)},
                     {"imbalance_db", cfg.imbalance_db},
                     {"K", cfg.dual_K},
                     {"objective", std::string(to_string(cfg.dual_objective))},
                     {"snr_db", snr_to_json(cfg.dual_snr_db)},
                     {"trials", cfg.dual_trials},
                     {"restarts", cfg.dual_restarts},
                     {"max_sweeps", cfg.dual_max_sweeps}};
        j["output"] = {{"dir", cfg.output_dir}};
        json seeds;
        for (const auto &label : seed_labels)
            seeds[label] = experiment_seed(cfg, label);
        j["derived_seeds"] = seeds;
        return j;
    }

    MntModel resolve_model(const ExperimentConfig &cfg)
    {
        if (!cfg.model.file.empty())
            return load_model(cfg.model.file);
        SynthesisOptions opts;
        opts.alpha = cfg.model.alpha;
        opts.beta = cfg.model.beta;
        return synthesize_model(cfg.model.n_meta, build_grid(cfg.model.spacing_phi, cfg.model.spacing_theta),
                                cfg.model.coupling_strength, experiment_seed(cfg, "model"), opts);
    }

    // =============================================================================================
    // Experiments
    // =============================================================================================
    namespace
    {
        double noise_for(double p_ref, double snr_db)
        {
            return std::isinf(snr_db) && snr_db > 0 ? 0.0 : noise_power(p_ref, snr_db);
        }

        double elapsed_s(std::chrono::steady_clock::time_point t0)
        {
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }

        struct LabeledSequence
        {
            std::string label;
            ConfigSequence seq;
        };

        std::string random_label(std::size_t r)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "random-%03zu", r);
            return buf;
        }
    }

    std::vector<SummaryRow> aggregate(const std::vector<ResultRecord> &records)
    {
        struct Acc
        {
            std::size_t n = 0, exact = 0;
            double sd = 0, sd2 = 0, sp = 0, sp2 = 0;
        };
        std::map<std::tuple<std::size_t, double, std::string>, Acc> groups;
        auto add = [&](const ResultRecord &r, const std::string &label) {
            Acc &a = groups[{r.K, r.snr_db, label}];
            ++a.n;
            a.exact += r.eps_doa == 0.0 ? 1 : 0;
            a.sd += r.eps_doa;
            a.sd2 += r.eps_doa * r.eps_doa;
            a.sp += r.eps_pol;
            a.sp2 += r.eps_pol * r.eps_pol;
        };
        for (const auto &r : records)
        {
            add(r, r.sequence);
            if (r.sequence.rfind("random-", 0) == 0)
                add(r, "random");
        }
        std::vector<SummaryRow> out;
        for (const auto &[key, a] : groups)
        {
            SummaryRow row;
            std::tie(row.K, row.snr_db, row.sequence) = key;
            row.count = a.n;
            const double n = static_cast<double>(a.n);
            row.mean_doa = a.sd / n;
            row.mean_pol = a.sp / n;
            auto se = [n](double s, double s2) {
                if (n < 2)
                    return 0.0;
                const double var = std::max(0.0, (s2 - s * s / n) / (n - 1.0));
                return std::sqrt(var / n);
            };
            row.se_doa = se(a.sd, a.sd2);
            row.se_pol = se(a.sp, a.sp2);
            row.exact_doa_fraction = static_cast<double>(a.exact) / n;
            out.push_back(std::move(row));
        }
        return out;
    }

    SweepResult run_single_source_sweep(const ExperimentConfig &cfg, const MntModel &model)
    {
        SweepResult res;
        const SphericalGrid &grid = model.grid();
        const IndexSet search = valid_source_directions(grid, cfg.pole_margin);
        IndexSet sources;
        for (std::size_t i = 0; i < search.size(); i += cfg.source_stride)
            sources.push_back(search[i]);
        const IndexSet subset = optimization_subset(grid, cfg.subset_stride, cfg.subset_pole_margin);

        res.p_ref = reference_power(model, cfg.reference_configs, cfg.reference_pols,
                                    experiment_seed(cfg, "reference-power"), cfg.pole_margin);
        for (double snr : cfg.snr_db)
            res.sigma2.push_back(noise_for(res.p_ref, snr));

        std::vector<cvec2> pols;
        for (const auto &p : cfg.polarizations)
            pols.push_back(normalized(p));

        const std::uint64_t seq_seed = experiment_seed(cfg, "random-sequence");
        const std::uint64_t opt_seed = experiment_seed(cfg, "optimizer");
        const std::uint64_t noise_seed = experiment_seed(cfg, "noise");

        for (const std::size_t K : cfg.K_values)
        {
            std::vector<LabeledSequence> sequences;
            for (std::size_t r = 0; r < cfg.random_sequences; ++r)
            {
                rng_t rng(derive_seed(seq_seed, {K, r}));
                sequences.push_back({random_label(r), random_sequence(rng, K, model.n_meta())});
            }
            for (const auto kind : cfg.optimized)
            {
                OptimizerConfig oc;
                oc.restarts = cfg.restarts;
                oc.max_sweeps = cfg.max_sweeps;
                oc.seed = derive_seed(opt_seed, {K, static_cast<std::uint64_t>(kind)});
                const auto opt = greedy_optimize(model, K, subset, kind, oc);
                const std::string label = "opt-" + std::string(to_string(kind));
                res.optimized_values["K=" + std::to_string(K) + "/" + std::string(to_string(kind))] = opt.best_value;
                sequences.push_back({label, opt.best_sequence});
            }

            for (std::size_t q = 0; q < sequences.size(); ++q)
            {
                const ChannelSet channels = compute_channels(model, sequences[q].seq);
                const DictionaryBank bank(channels, search);
                for (std::size_t si = 0; si < cfg.snr_db.size(); ++si)
                {
                    for (const DirectionIndex d : sources)
                        for (std::size_t p = 0; p < pols.size(); ++p)
                            for (std::size_t t = 0; t < cfg.trials; ++t)
                            {
                                const auto t0 = std::chrono::steady_clock::now();
                                const SourceSpec src{d, pols[p]};
                                const NoiseSpec noise{res.sigma2[si], derive_seed(noise_seed, {K, q, si, d, p, t})};
                                const MeasurementSet m = synthesize_measurements(channels, std::span(&src, 1), noise);
                                const SingleEstimate est = bank.estimate_single(m.y);

                                ResultRecord rec;
                                rec.experiment = "sweep-single";
                                rec.K = K;
                                rec.snr_db = cfg.snr_db[si];
                                rec.sequence = sequences[q].label;
                                rec.source = src;
                                rec.pol_index = p;
                                rec.trial = t;
                                rec.d_hat = est.d_hat;
                                rec.eps_doa = angular_separation(d, est.d_hat, grid);
                                rec.eps_pol = pol_error(pols[p], est.c_bar_hat);
                                rec.eta_peak = est.eta_peak;
                                rec.runtime_s = elapsed_s(t0);
                                res.records.push_back(std::move(rec));
                            }
                }
            }
        }
        res.summary = aggregate(res.records);
        return res;
    }

    DualScenarioResult run_dual_source_scenario(const ExperimentConfig &cfg, const MntModel &model)
    {
        DualScenarioResult res;
        const SphericalGrid &grid = model.grid();
        res.jammer = grid.nearest(cfg.jammer.phi, cfg.jammer.theta);
        res.transmitter = grid.nearest(cfg.transmitter.phi, cfg.transmitter.theta);
        if (res.jammer == res.transmitter)
            throw InvalidConfiguration("jammer and transmitter map to the same grid direction");

        const IndexSet search = valid_source_directions(grid, cfg.pole_margin);
        const IndexSet subset = optimization_subset(grid, cfg.subset_stride, cfg.subset_pole_margin);

        OptimizerConfig oc;
        oc.restarts = cfg.dual_restarts;
        oc.max_sweeps = cfg.dual_max_sweeps;
        oc.seed = experiment_seed(cfg, "dual-optimizer");
        const auto opt = greedy_optimize(model, cfg.dual_K, subset, cfg.dual_objective, oc);
        res.optimized_value = opt.best_value;
        res.sequence = opt.best_sequence;

        const ChannelSet channels = compute_channels(model, res.sequence);
        const DictionaryBank bank(channels, search);

        res.p_ref = reference_power(model, cfg.reference_configs, cfg.reference_pols,
                                    experiment_seed(cfg, "reference-power"), cfg.pole_margin);
        res.sigma2 = noise_for(res.p_ref, cfg.dual_snr_db);

        const cvec2 c_jam = normalized(cfg.jammer_pol);
        const cvec2 c_dt_bar = normalized(cfg.transmitter_pol);
        const cvec2 c_dt = c_dt_bar * std::pow(10.0, -cfg.imbalance_db / 20.0);
        const std::array<SourceSpec, 2> sources = {SourceSpec{res.jammer, c_jam}, SourceSpec{res.transmitter, c_dt}};

        auto run_trial = [&](const std::string &label, double snr, const NoiseSpec &noise, rvec *eta, rvec *eta_res) {
            DualTrialRecord rec;
            rec.label = label;
            rec.snr_db = snr;
            const MeasurementSet m = synthesize_measurements(channels, sources, noise);
            try
            {
                const DualEstimate est = bank.estimate_dual(m.y, cfg.exclusion_radius);
                rec.ok = true;
                rec.d_hat_1 = est.d_hat_1;
                rec.d_hat_2 = est.d_hat_2;
                rec.eps_doa_jammer = angular_separation(res.jammer, est.d_hat_1, grid);
                rec.eps_doa_transmitter = angular_separation(res.transmitter, est.d_hat_2, grid);
                rec.eps_pol_jammer = pol_error(c_jam, est.c_bar_hat_1);
                rec.eps_pol_transmitter = pol_error(c_dt_bar, est.c_bar_hat_2);
                rec.eta_peak = est.eta_peak;
                rec.eta_res_peak = est.eta_res_peak;
                if (eta)
                    *eta = est.eta_map;
                if (eta_res)
                    *eta_res = est.eta_res_map;
            }
            catch (const Error &e)
            {
                rec.ok = false;
                rec.error = e.what();
            }
            res.records.push_back(std::move(rec));
        };

        run_trial("noiseless", snr_infinite, NoiseSpec{0.0, 0}, &res.eta_noiseless, &res.eta_res_noiseless);
        const std::uint64_t noise_seed = experiment_seed(cfg, "dual-noise");
        for (std::size_t t = 0; t < cfg.dual_trials; ++t)
            run_trial("trial-" + std::to_string(t), cfg.dual_snr_db, NoiseSpec{res.sigma2, derive_seed(noise_seed, {t})},
                      t == 0 ? &res.eta_noisy : nullptr, t == 0 ? &res.eta_res_noisy : nullptr);
        return res;
    }

    DiversityMap run_diversity_map(const ExperimentConfig &cfg, const MntModel &model)
    {
        return diversity_map(model, cfg.diversity_samples, experiment_seed(cfg, "diversity"));
    }

    double spearman(const std::vector<double> &x, const std::vector<double> &y)
    {
        const std::size_t n = x.size();
        if (n != y.size() || n < 2)
            return std::nan("");
        for (std::size_t i = 0; i < n; ++i)
            if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
                return std::nan("");
        auto ranks = [n](const std::vector<double> &v) {
            std::vector<std::size_t> idx(n);
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
            std::vector<double> r(n);
            for (std::size_t i = 0; i < n;)
            {
                std::size_t j = i;
                while (j + 1 < n && v[idx[j + 1]] == v[idx[i]])
                    ++j;
                const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
                for (std::size_t m = i; m <= j; ++m)
                    r[idx[m]] = avg;
                i = j + 1;
            }
            return r;
        };
        const auto rx = ranks(x), ry = ranks(y);
        const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(n);
        const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(n);
        double sxy = 0, sxx = 0, syy = 0;
        for (std::size_t i = 0; i < n; ++i)
        {
            sxy += (rx[i] - mx) * (ry[i] - my);
            sxx += (rx[i] - mx) * (rx[i] - mx);
            syy += (ry[i] - my) * (ry[i] - my);
        }
        if (sxx == 0.0 || syy == 0.0)
            return std::nan("");
        return sxy / std::sqrt(sxx * syy);
    }

    RankStudyResult run_rank_study(const ExperimentConfig &cfg, const MntModel &model)
    {
        RankStudyResult res;
        const IndexSet subset = optimization_subset(model.grid(), cfg.subset_stride, cfg.subset_pole_margin);
        const std::uint64_t opt_seed = experiment_seed(cfg, "rank-optimizer");
        const std::uint64_t rnd_seed = experiment_seed(cfg, "rank-random");
        for (const auto kind : cfg.rank_objectives)
        {
            std::vector<double> ks, improvements;
            for (const std::size_t K : cfg.rank_K)
            {
                OptimizerConfig oc;
                oc.restarts = cfg.restarts;
                oc.max_sweeps = cfg.max_sweeps;
                oc.seed = derive_seed(opt_seed, {K, static_cast<std::uint64_t>(kind)});
                const auto opt = greedy_optimize(model, K, subset, kind, oc);
                const auto stats = random_sequence_stats(model, K, subset, kind, cfg.rank_random, derive_seed(rnd_seed, {K}));

                RankStudyRow row;
                row.K = K;
                row.kind = kind;
                row.optimized = opt.best_value;
                row.random_mean = stats.mean;
                row.random_std = stats.std;
                row.normalized_improvement =
                    stats.std > 0.0 ? (opt.best_value - stats.mean) / stats.std : std::nan("");
                res.rows.push_back(row);
                ks.push_back(static_cast<double>(K));
                improvements.push_back(row.normalized_improvement);
            }
            res.spearman[std::string(to_string(kind))] = spearman(ks, improvements);
        }
        return res;
    }

    // =============================================================================================
    // Output
    // =============================================================================================
    std::string format_number(double x)
    {
        if (std::isnan(x))
            return "nan";
        if (std::isinf(x))
            return x > 0 ? "inf" : "-inf";
        char buf[64];
        const auto r = std::to_chars(buf, buf + sizeof buf, x);
        return std::string(buf, r.ptr);
    }

    namespace
    {
        class CsvWriter
        {
        public:
            CsvWriter(const fs::path &path, const std::string &command, const json &config) : out_(path, std::ios::binary)
            {
                if (!out_)
                    throw Error("cannot open " + path.string() + " for writing");
                out_ << "# dmadoa " << command << '\n' << "# config: " << config.dump() << '\n';
            }

            CsvWriter &header(std::initializer_list<const char *> cols)
            {
                bool first = true;
                for (const char *c : cols)
                {
                    out_ << (first ? "" : ",") << c;
                    first = false;
                }
                out_ << '\n';
                return *this;
            }

            template <typename... Ts>
            void row(const Ts &...values)
            {
                bool first = true;
                ((out_ << (first ? "" : ","), write(values), first = false), ...);
                out_ << '\n';
            }

        private:
            void write(double v) { out_ << format_number(v); }
            void write(std::size_t v) { out_ << v; }
            void write(int v) { out_ << v; }
            void write(const std::string &v) { out_ << v; }
            void write(const char *v) { out_ << v; }

            std::ofstream out_;
        };

        void write_json(const fs::path &path, const json &j)
        {
            std::ofstream out(path, std::ios::binary);
            if (!out)
                throw Error("cannot open " + path.string() + " for writing");
            out << j.dump(1) << '\n';
        }

        json map_to_json(const rvec &m)
        {
            json out = json::array();
            for (Eigen::Index i = 0; i < m.size(); ++i)
                out.push_back(m(i));
            return out;
        }

        json grid_to_json(const SphericalGrid &grid)
        {
            json phi = json::array(), theta = json::array();
            for (const auto &d : grid.directions())
            {
                phi.push_back(d.phi);
                theta.push_back(d.theta);
            }
            return {{"spacing_phi", grid.spacing_phi()}, {"spacing_theta", grid.spacing_theta()}, {"phi", phi}, {"theta", theta}};
        }

        json sequence_to_json(const ConfigSequence &seq)
        {
            json out = json::array();
            for (const auto &v : seq)
            {
                std::string bits;
                for (auto b : v)
                    bits.push_back(b ? '1' : '0');
                out.push_back(bits);
            }
            return out;
        }
    }

    std::vector<fs::path> run_subcommand(std::string_view name, const ExperimentConfig &cfg, const fs::path &out_dir)
    {
        fs::create_directories(out_dir);
        const json config = config_to_json(cfg);
        std::vector<fs::path> files;
        const MntModel model = resolve_model(cfg);
        const SphericalGrid &grid = model.grid();

        if (name == "synth-model")
        {
            json j = model_to_json(model);
            j["config"] = config;
            const fs::path p = out_dir / "model.json";
            write_json(p, j);
            files.push_back(p);
        }
        else if (name == "diversity-map")
        {
            const DiversityMap dm = run_diversity_map(cfg, model);
            const fs::path p = out_dir / "diversity.csv";
            CsvWriter csv(p, std::string(name), config);
            csv.header({"direction", "phi_deg", "theta_deg", "sd_phi", "sd_theta"});
            for (DirectionIndex d = 0; d < grid.size(); ++d)
                csv.row(d, grid[d].phi, grid[d].theta, dm.sd_phi(static_cast<Eigen::Index>(d)),
                        dm.sd_theta(static_cast<Eigen::Index>(d)));
            files.push_back(p);
        }
        else if (name == "rank-study")
        {
            const RankStudyResult rs = run_rank_study(cfg, model);
            const fs::path p = out_dir / "rank_study.csv";
            {
                CsvWriter csv(p, std::string(name), config);
                csv.header({"K", "objective", "optimized", "random_mean", "random_std", "normalized_improvement"});
                for (const auto &r : rs.rows)
                    csv.row(r.K, std::string(to_string(r.kind)), r.optimized, r.random_mean, r.random_std,
                            r.normalized_improvement);
            }
            files.push_back(p);
            json s;
            for (const auto &[k, v] : rs.spearman)
                s[k] = std::isfinite(v) ? json(v) : json("nan");
            const fs::path pj = out_dir / "rank_study.json";
            write_json(pj, {{"config", config}, {"spearman_K_vs_normalized_improvement", s}});
            files.push_back(pj);
        }
        else if (name == "sweep-single")
        {
            const SweepResult sr = run_single_source_sweep(cfg, model);
            if (cfg.write_records)
            {
                const fs::path p = out_dir / "sweep_records.csv";
                CsvWriter csv(p, std::string(name), config);
                csv.header({"K", "snr_db", "sequence", "direction", "phi_deg", "theta_deg", "pol_index", "c_phi_re",
                            "c_phi_im", "c_theta_re", "c_theta_im", "trial", "d_hat", "eps_doa_deg", "eps_pol_deg",
                            "eta_peak"});
                for (const auto &r : sr.records)
                {
                    const auto &dir = grid[r.source.direction];
                    csv.row(r.K, r.snr_db, r.sequence, r.source.direction, dir.phi, dir.theta, r.pol_index,
                            r.source.c(0).real(), r.source.c(0).imag(), r.source.c(1).real(), r.source.c(1).imag(),
                            r.trial, r.d_hat, r.eps_doa, r.eps_pol, r.eta_peak);
                }
                files.push_back(p);
            }
            const fs::path ps = out_dir / "sweep_summary.csv";
            {
                CsvWriter csv(ps, std::string(name), config);
                csv.header({"K", "snr_db", "sequence", "count", "mean_eps_doa_deg", "se_eps_doa_deg",
                            "mean_eps_pol_deg", "se_eps_pol_deg", "exact_doa_fraction"});
                for (const auto &r : sr.summary)
                    csv.row(r.K, r.snr_db, r.sequence, r.count, r.mean_doa, r.se_doa, r.mean_pol, r.se_pol,
                            r.exact_doa_fraction);
            }
            files.push_back(ps);
            json sig = json::array();
            for (std::size_t i = 0; i < sr.sigma2.size(); ++i)
                sig.push_back({{"snr_db", snr_to_json(cfg.snr_db[i])}, {"sigma2", sr.sigma2[i]}});
            const fs::path pj = out_dir / "sweep.json";
            write_json(pj, {{"config", config}, {"p_ref", sr.p_ref}, {"noise", sig}, {"optimized_values", sr.optimized_values}});
            files.push_back(pj);
        }
        else if (name == "dual-scenario")
        {
            const DualScenarioResult dr = run_dual_source_scenario(cfg, model);
            const fs::path p = out_dir / "dual_records.csv";
            {
                CsvWriter csv(p, std::string(name), config);
                csv.header({"label", "snr_db", "ok", "d_hat_1", "d_hat_2", "eps_doa_jammer_deg",
                            "eps_doa_transmitter_deg", "eps_pol_jammer_deg", "eps_pol_transmitter_deg", "eta_peak",
                            "eta_res_peak", "error"});
                for (const auto &r : dr.records)
                    csv.row(r.label, r.snr_db, r.ok ? 1 : 0, r.d_hat_1, r.d_hat_2, r.eps_doa_jammer,
                            r.eps_doa_transmitter, r.eps_pol_jammer, r.eps_pol_transmitter, r.eta_peak, r.eta_res_peak,
                            r.error);
            }
            files.push_back(p);
            const fs::path pj = out_dir / "dual_maps.json";
            write_json(pj, {{"config", config},
                            {"grid", grid_to_json(grid)},
                            {"jammer", {{"direction", dr.jammer}, {"phi", grid[dr.jammer].phi}, {"theta", grid[dr.jammer].theta}}},
                            {"transmitter",
                             {{"direction", dr.transmitter}, {"phi", grid[dr.transmitter].phi}, {"theta", grid[dr.transmitter].theta}}},
                            {"optimized_value", dr.optimized_value},
                            {"p_ref", dr.p_ref},
                            {"sigma2", dr.sigma2},
                            {"sequence", sequence_to_json(dr.sequence)},
                            {"eta_noiseless", map_to_json(dr.eta_noiseless)},
                            {"eta_res_noiseless", map_to_json(dr.eta_res_noiseless)},
                            {"eta_noisy", map_to_json(dr.eta_noisy)},
                            {"eta_res_noisy", map_to_json(dr.eta_res_noisy)}});
            files.push_back(pj);
        }
        else
        {
            throw InvalidInput("unknown subcommand '" + std::string(name) + "'");
        }
        return files;
    }
}
