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

#include "dmadoa/model_io.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstring>
#include <fstream>

namespace dmadoa
{
    namespace
    {
        constexpr const char *format_name = "dmadoa-mnt-model";
        constexpr const char *encoding_name = "base64-f64le-interleaved";

        std::uint64_t to_little_endian(std::uint64_t x)
        {
            if constexpr (std::endian::native == std::endian::big)
            {
                std::uint64_t y = 0;
                for (int i = 0; i < 8; ++i)
                    y |= ((x >> (8 * i)) & 0xffULL) << (8 * (7 - i));
                return y;
            }
            return x;
        }

        nlohmann::json array_entry(const cmat &M)
        {
            return {{"rows", M.rows()},
                    {"cols", M.cols()},
                    {"order", "row-major"},
                    {"encoding", encoding_name},
                    {"data", encode_complex_array(M)}};
        }

        cmat read_array(const nlohmann::json &j, const char *key)
        {
            if (!j.contains(key))
                throw InvalidInput(std::string("model file is missing '") + key + "'");
            const auto &e = j.at(key);
            if (e.value("order", "") != "row-major" || e.value("encoding", "") != encoding_name)
                throw InvalidInput(std::string("unsupported layout for '") + key + "'");
            return decode_complex_array(e.at("data").get<std::string>(), e.at("rows").get<Eigen::Index>(),
                                        e.at("cols").get<Eigen::Index>());
        }

        cplx read_complex(const nlohmann::json &j, const char *key)
        {
            const auto &e = j.at(key);
            if (!e.is_array() || e.size() != 2)
                throw InvalidInput(std::string("'") + key + "' must be [re, im]");
            return {e[0].get<double>(), e[1].get<double>()};
        }
    }

    std::string encode_complex_array(const cmat &M)
    {
        std::vector<unsigned char> raw(static_cast<std::size_t>(M.size()) * 16);
        std::size_t pos = 0;
        for (Eigen::Index r = 0; r < M.rows(); ++r)
            for (Eigen::Index c = 0; c < M.cols(); ++c)
                for (double part : {M(r, c).real(), M(r, c).imag()})
                {
                    const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(part));
                    std::memcpy(raw.data() + pos, &bits, 8);
                    pos += 8;
                }
        std::string out(4 * ((raw.size() + 2) / 3), '\0');
        const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char *>(out.data()), raw.data(), static_cast<int>(raw.size()));
        out.resize(static_cast<std::size_t>(n));
        return out;
    }

    cmat decode_complex_array(const std::string &base64, Eigen::Index rows, Eigen::Index cols)
    {
        if (rows < 0 || cols < 0)
            throw InvalidInput("negative array dimension");
        if (base64.size() % 4 != 0)
            throw InvalidInput("base64 payload length is not a multiple of 4");
        std::vector<unsigned char> raw(3 * (base64.size() / 4) + 3);
        const int n = EVP_DecodeBlock(raw.data(), reinterpret_cast<const unsigned char *>(base64.data()),
                                      static_cast<int>(base64.size()));
        if (n < 0)
            throw InvalidInput("malformed base64 payload");
        // EVP_DecodeBlock keeps the zero bytes produced by '=' padding
        std::size_t len = static_cast<std::size_t>(n);
        if (!base64.empty() && base64.back() == '=')
            --len;
        if (base64.size() >= 2 && base64[base64.size() - 2] == '=')
            --len;
        const auto expected = static_cast<std::size_t>(rows * cols) * 16;
        if (len != expected)
            throw InvalidInput("array payload has " + std::to_string(len) + " bytes, expected " + std::to_string(expected));

        cmat M(rows, cols);
        std::size_t pos = 0;
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c)
            {
                double parts[2];
                for (double &part : parts)
                {
                    std::uint64_t bits;
                    std::memcpy(&bits, raw.data() + pos, 8);
                    part = std::bit_cast<double>(to_little_endian(bits));
                    pos += 8;
                }
                M(r, c) = {parts[0], parts[1]};
            }
        return M;
    }

    nlohmann::json model_to_json(const MntModel &model)
    {
        nlohmann::json j;
        j["format"] = format_name;
        j["version"] = 1;
        j["reference_impedance_ohm"] = 50.0;
        j["alpha"] = {model.alpha().real(), model.alpha().imag()};
        j["beta"] = {model.beta().real(), model.beta().imag()};
        j["n_meta"] = model.n_meta();
        j["n_directions"] = model.n_directions();
        j["grid"] = {{"spacing_phi", model.grid().spacing_phi()}, {"spacing_theta", model.grid().spacing_theta()}};
        j["h0"] = array_entry(model.h0());
        j["A"] = array_entry(model.A());
        j["Gamma"] = array_entry(model.Gamma());
        j["b"] = array_entry(model.b());
        return j;
    }

    MntModel model_from_json(const nlohmann::json &j)
    {
        try
        {
            if (j.value("format", "") != format_name)
                throw InvalidInput("not a dmadoa model file");
            if (j.value("version", 0) != 1)
                throw InvalidInput("unsupported model file version");
            const auto &g = j.at("grid");
            GridPtr grid = build_grid(g.at("spacing_phi").get<double>(), g.at("spacing_theta").get<double>());
            const auto n_meta = j.at("n_meta").get<Eigen::Index>();
            const auto n_dir = j.at("n_directions").get<std::size_t>();
            if (n_dir != grid->size())
                throw InvalidInput("n_directions does not match the grid spec");
            const auto n_ports = static_cast<Eigen::Index>(2 * n_dir);

            cmat h0 = read_array(j, "h0");
            cmat A = read_array(j, "A");
            cmat Gamma = read_array(j, "Gamma");
            cmat b = read_array(j, "b");
            if (h0.rows() != n_ports || h0.cols() != 1 || b.rows() != n_meta || b.cols() != 1)
                throw InvalidInput("h0 / b dimensions do not match n_directions / n_meta");
            return MntModel(read_complex(j, "alpha"), read_complex(j, "beta"), h0.col(0), std::move(A),
                            std::move(Gamma), b.col(0), std::move(grid));
        }
        catch (const nlohmann::json::exception &e)
        {
            throw InvalidInput(std::string("malformed model file: ") + e.what());
        }
    }

    void save_model(const MntModel &model, const std::filesystem::path &path)
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw Error("cannot open " + path.string() + " for writing");
        out << model_to_json(model).dump(2) << '\n';
    }

    MntModel load_model(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw Error("cannot open " + path.string());
        nlohmann::json j;
        try
        {
            in >> j;
        }
        catch (const nlohmann::json::exception &e)
        {
            throw InvalidInput("malformed model file " + path.string() + ": " + e.what());
        }
        return model_from_json(j);
    }
}
