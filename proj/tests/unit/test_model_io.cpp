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

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace dmadoa;
using namespace dmadoa::testing;

TEST(ComplexArrayCodec, KnownEncoding)
{
    cmat one(1, 1);
    one(0, 0) = cplx(1.0, 0.0);
    // 1.0 = 00 00 00 00 00 00 f0 3f, followed by eight zero bytes
    EXPECT_EQ(encode_complex_array(one), "AAAAAAAA8D8AAAAAAAAAAA==");
    EXPECT_EQ(decode_complex_array("AAAAAAAA8D8AAAAAAAAAAA==", 1, 1), one);
}

TEST(ComplexArrayCodec, RoundTripIsBitExactAndRowMajor)
{
    rng_t rng(1);
    const cmat M = random_cmat(rng, 5, 3);
    EXPECT_EQ(decode_complex_array(encode_complex_array(M), 5, 3), M);

    cmat R(2, 2);
    R << cplx(1, 2), cplx(3, 4), cplx(5, 6), cplx(7, 8);
    const cmat flat = decode_complex_array(encode_complex_array(R), 1, 4);
    EXPECT_EQ(flat(0, 1), cplx(3, 4));
    EXPECT_EQ(flat(0, 2), cplx(5, 6));

    EXPECT_THROW(decode_complex_array(encode_complex_array(M), 5, 4), InvalidInput);
    EXPECT_THROW(decode_complex_array("abc", 1, 1), InvalidInput);
}

TEST(ModelFile, RoundTrip)
{
    const MntModel m = synthesize_model(7, build_grid(30, 30), 0.5, 3);
    const auto path = std::filesystem::temp_directory_path() / "dmadoa_model_io_test.json";
    save_model(m, path);
    const MntModel r = load_model(path);
    std::filesystem::remove(path);
    EXPECT_EQ(r.alpha(), m.alpha());
    EXPECT_EQ(r.beta(), m.beta());
    EXPECT_EQ(r.h0(), m.h0());
    EXPECT_EQ(r.A(), m.A());
    EXPECT_EQ(r.Gamma(), m.Gamma());
    EXPECT_EQ(r.b(), m.b());
    EXPECT_EQ(r.grid().size(), m.grid().size());
    EXPECT_EQ(model_to_json(r).dump(), model_to_json(m).dump());
}

TEST(ModelFile, RejectsMalformed)
{
    const MntModel m = synthesize_model(3, build_grid(90, 90), 0.5, 3);
    auto j = model_to_json(m);
    j["format"] = "other";
    EXPECT_THROW(model_from_json(j), InvalidInput);

    j = model_to_json(m);
    j["grid"]["spacing_phi"] = 45.0;
    EXPECT_THROW(model_from_json(j), InvalidInput);

    j = model_to_json(m);
    j.erase("Gamma");
    EXPECT_THROW(model_from_json(j), InvalidInput);

    j = model_to_json(m);
    j["alpha"] = {2.0, 0.0};
    EXPECT_THROW(model_from_json(j), InvalidInput);
}
