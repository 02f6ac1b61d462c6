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

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char **argv)
{
    CLI::App app{"dmadoa: DoA and polarization estimation experiments with dynamic metasurface antennas"};
    app.require_subcommand(1);

    struct Options
    {
        std::string config;
        std::string out;
        std::optional<std::uint64_t> seed;
    };

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"synth-model", "Synthesize a random coupled-dipole model and write model.json"},
        {"diversity-map", "Per-direction standard deviation of the channel over random configurations"},
        {"rank-study", "Optimized versus random effective rank of the sensing matrix"},
        {"sweep-single", "Single-source DoA and polarization error sweep over K, SNR and sequences"},
        {"dual-scenario", "Jammer plus weak transmitter with successive cancellation"}};

    std::vector<Options> options(commands.size());
    std::vector<CLI::App *> subs;
    for (std::size_t i = 0; i < commands.size(); ++i)
    {
        CLI::App *sub = app.add_subcommand(commands[i].first, commands[i].second);
        sub->add_option("--config", options[i].config, "JSON experiment config")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", options[i].out, "Output directory (defaults to output.dir from the config)");
        sub->add_option("--seed", options[i].seed, "Override the top-level seed");
        subs.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);

    for (std::size_t i = 0; i < subs.size(); ++i)
    {
        if (!subs[i]->parsed())
            continue;
        try
        {
            dmadoa::ExperimentConfig cfg = dmadoa::load_config(options[i].config);
            if (options[i].seed)
                cfg.seed = *options[i].seed;
            std::string out = options[i].out.empty() ? cfg.output_dir : options[i].out;
            if (out.empty())
                throw dmadoa::InvalidInput("no output directory: pass --out or set output.dir");
            for (const auto &p : dmadoa::run_subcommand(commands[i].first, cfg, out))
                std::cout << p.string() << '\n';
        }
        catch (const std::exception &e)
        {
            std::cerr << "dmadoa " << commands[i].first << ": " << e.what() << '\n';
            return 1;
        }
    }
    return 0;
}
