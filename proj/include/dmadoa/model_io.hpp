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

#ifndef DMADOA_MODEL_IO_HPP
#define DMADOA_MODEL_IO_HPP

#include "dmadoa/mnt_model.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace dmadoa
{
    // Model file layout:
    //   {
    //     "format": "dmadoa-mnt-model", "version": 1, "reference_impedance_ohm": 50,
    //     "alpha": [re, im], "beta": [re, im], "n_meta": N_M, "n_directions": N_D,
    //     "grid": {"spacing_phi": deg, "spacing_theta": deg},
    //     "h0" | "A" | "Gamma" | "b": {"rows": r, "cols": c, "order": "row-major",
    //                                  "encoding": "base64-f64le-interleaved", "data": "..."}
    //   }
    // Array payloads are row-major sequences of (re, im) pairs of little-endian IEEE-754 doubles.

    std::string encode_complex_array(const cmat &M);
    cmat decode_complex_array(const std::string &base64, Eigen::Index rows, Eigen::Index cols);

    nlohmann::json model_to_json(const MntModel &model);
    MntModel model_from_json(const nlohmann::json &j);

    void save_model(const MntModel &model, const std::filesystem::path &path);
    MntModel load_model(const std::filesystem::path &path);
}

#endif
