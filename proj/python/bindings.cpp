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

#include "dmadoa/estimation.hpp"
#include "dmadoa/harness.hpp"
#include "dmadoa/model_io.hpp"
#include "dmadoa/optimization.hpp"
#include "dmadoa/sensing.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace dmadoa;

namespace
{
    py::dict single_to_dict(const SingleEstimate &e)
    {
        py::dict d;
        d["d_hat"] = e.d_hat;
        d["c_hat"] = cvec(e.c_hat);
        d["c_bar_hat"] = cvec(e.c_bar_hat);
        d["eta_peak"] = e.eta_peak;
        d["eta_map"] = e.eta_map;
        return d;
    }

    py::dict dual_to_dict(const DualEstimate &e)
    {
        py::dict d;
        d["d_hat_1"] = e.d_hat_1;
        d["d_hat_2"] = e.d_hat_2;
        d["c_hat_1"] = cvec(e.c_hat_1);
        d["c_hat_2"] = cvec(e.c_hat_2);
        d["c_bar_hat_1"] = cvec(e.c_bar_hat_1);
        d["c_bar_hat_2"] = cvec(e.c_bar_hat_2);
        d["eta_peak"] = e.eta_peak;
        d["eta_res_peak"] = e.eta_res_peak;
        d["eta_map"] = e.eta_map;
        d["eta_res_map"] = e.eta_res_map;
        d["y_res"] = e.y_res;
        return d;
    }

    std::vector<SourceSpec> sources_from(const std::vector<std::pair<DirectionIndex, cvec>> &list)
    {
        std::vector<SourceSpec> out;
        for (const auto &[d, c] : list)
        {
            if (c.size() != 2)
                throw InvalidInput("source polarization must have two entries");
            out.push_back({d, cvec2(c(0), c(1))});
        }
        return out;
    }
}

PYBIND11_MODULE(_core, m)
{
    m.doc() = "DoA and polarization estimation with dynamic metasurface antennas";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<InvalidConfiguration>(m, "InvalidConfiguration", PyExc_ValueError);
    py::register_exception<SingularSystem>(m, "SingularSystem", PyExc_ArithmeticError);
    py::register_exception<DegenerateMeasurement>(m, "DegenerateMeasurement", PyExc_ValueError);
    py::register_exception<NoSignal>(m, "NoSignal", PyExc_ValueError);
    py::register_exception<SecondSourceUndetectable>(m, "SecondSourceUndetectable", PyExc_ValueError);

    py::class_<SphericalGrid, std::shared_ptr<SphericalGrid>>(m, "SphericalGrid")
        .def(py::init<double, double>(), py::arg("spacing_phi"), py::arg("spacing_theta"))
        .def("__len__", &SphericalGrid::size)
        .def_property_readonly("spacing_phi", &SphericalGrid::spacing_phi)
        .def_property_readonly("spacing_theta", &SphericalGrid::spacing_theta)
        .def("direction", [](const SphericalGrid &g, DirectionIndex d) { return std::make_pair(g[d].phi, g[d].theta); })
        .def("directions",
             [](const SphericalGrid &g) {
                 std::vector<std::pair<double, double>> out;
                 for (const auto &d : g.directions())
                     out.emplace_back(d.phi, d.theta);
                 return out;
             })
        .def("index_of", &SphericalGrid::index_of)
        .def("nearest", &SphericalGrid::nearest);

    m.def("valid_source_directions", &valid_source_directions, py::arg("grid"), py::arg("pole_margin") = 3.0);
    m.def("optimization_subset", &optimization_subset, py::arg("grid"), py::arg("stride") = 10,
          py::arg("pole_margin") = 3.0);
    m.def("angular_separation", &angular_separation);

    py::class_<MntModel>(m, "MntModel")
        .def(py::init([](cplx alpha, cplx beta, cvec h0, cmat A, cmat Gamma, cvec b, std::shared_ptr<SphericalGrid> g) {
                 return MntModel(alpha, beta, std::move(h0), std::move(A), std::move(Gamma), std::move(b), g);
             }),
             py::arg("alpha"), py::arg("beta"), py::arg("h0"), py::arg("A"), py::arg("Gamma"), py::arg("b"), py::arg("grid"))
        .def_property_readonly("alpha", &MntModel::alpha)
        .def_property_readonly("beta", &MntModel::beta)
        .def_property_readonly("h0", &MntModel::h0)
        .def_property_readonly("A", &MntModel::A)
        .def_property_readonly("Gamma", &MntModel::Gamma)
        .def_property_readonly("b", &MntModel::b)
        .def_property_readonly("n_meta", &MntModel::n_meta)
        .def_property_readonly("n_directions", &MntModel::n_directions)
        .def_property_readonly("grid", [](const MntModel &mdl) { return std::const_pointer_cast<SphericalGrid>(mdl.grid_ptr()); });

    m.def(
        "synthesize_model",
        [](std::size_t n_meta, double spacing_phi, double spacing_theta, double coupling, std::uint64_t seed,
           cplx alpha, cplx beta) {
            return synthesize_model(n_meta, build_grid(spacing_phi, spacing_theta), coupling, seed,
                                    SynthesisOptions{alpha, beta});
        },
        py::arg("n_meta"), py::arg("spacing_phi"), py::arg("spacing_theta"), py::arg("coupling_strength") = 0.6,
        py::arg("seed") = 0, py::arg("alpha") = SynthesisOptions{}.alpha, py::arg("beta") = SynthesisOptions{}.beta);
    m.def("load_model", &load_model);
    m.def("save_model", &save_model);

    m.def("compute_channel", &compute_channel);
    m.def("compute_channels", [](const MntModel &mdl, const ConfigSequence &seq) { return compute_channels(mdl, seq).H; });
    m.def("effective_rank", &effective_rank);
    m.def("objective", [](const cmat &H, const std::string &kind) { return objective(H, parse_objective_kind(kind)); });

    m.def(
        "greedy_optimize",
        [](const MntModel &mdl, std::size_t K, const IndexSet &subset, const std::string &kind, std::size_t restarts,
           std::size_t max_sweeps, std::uint64_t seed) {
            OptimizerConfig cfg;
            cfg.restarts = restarts;
            cfg.max_sweeps = max_sweeps;
            cfg.seed = seed;
            const auto res = greedy_optimize(mdl, K, subset, parse_objective_kind(kind), cfg);
            py::dict d;
            d["best_sequence"] = res.best_sequence;
            d["best_value"] = res.best_value;
            d["best_restart"] = res.best_restart;
            return d;
        },
        py::arg("model"), py::arg("K"), py::arg("subset"), py::arg("kind") = "column_normalized",
        py::arg("restarts") = 4, py::arg("max_sweeps") = 20, py::arg("seed") = 0);

    m.def(
        "synthesize_measurements",
        [](const MntModel &mdl, const ConfigSequence &seq, const std::vector<std::pair<DirectionIndex, cvec>> &sources,
           double sigma2, std::uint64_t seed) {
            const ChannelSet ch = compute_channels(mdl, seq);
            const auto src = sources_from(sources);
            return synthesize_measurements(ch, src, NoiseSpec{sigma2, seed}).y;
        },
        py::arg("model"), py::arg("sequence"), py::arg("sources"), py::arg("sigma2") = 0.0, py::arg("seed") = 0);
    m.def("reference_power",
          py::overload_cast<const MntModel &, std::size_t, std::size_t, std::uint64_t, double>(&reference_power),
          py::arg("model"), py::arg("n_configs") = 100, py::arg("n_pols") = 3, py::arg("seed") = 0,
          py::arg("pole_margin") = 3.0);
    m.def("noise_power", &noise_power);

    m.def(
        "estimate_single",
        [](const MntModel &mdl, const ConfigSequence &seq, const cvec &y, const IndexSet &search) {
            const ChannelSet ch = compute_channels(mdl, seq);
            return single_to_dict(estimate_single(ch, y, search));
        },
        py::arg("model"), py::arg("sequence"), py::arg("y"), py::arg("search_set"));
    m.def(
        "estimate_dual",
        [](const MntModel &mdl, const ConfigSequence &seq, const cvec &y, const IndexSet &search, double radius) {
            const ChannelSet ch = compute_channels(mdl, seq);
            return dual_to_dict(estimate_dual(ch, y, search, radius));
        },
        py::arg("model"), py::arg("sequence"), py::arg("y"), py::arg("search_set"),
        py::arg("exclusion_radius") = default_exclusion_radius);
    m.def("pol_error", [](const cvec &a, const cvec &b) {
        if (a.size() != 2 || b.size() != 2)
            throw InvalidInput("polarizations must have two entries");
        return pol_error(cvec2(a(0), a(1)), cvec2(b(0), b(1)));
    });

    m.def(
        "run_subcommand",
        [](const std::string &name, const std::string &config_json, const std::filesystem::path &out_dir) {
            return run_subcommand(name, parse_config(nlohmann::json::parse(config_json)), out_dir);
        },
        py::arg("name"), py::arg("config_json"), py::arg("out_dir"));
}
