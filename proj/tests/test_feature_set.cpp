/* Copyright 2026 the sdm authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <catch2/catch_amalgamated.hpp>
#include <sstream>

#include "sdm/feature_set.hpp"
#include "support/oracles.hpp"

namespace {

sdm::FeatureSet toy_set() {
    sdm::FeatureSet fs;
    fs.features = oracles::gaussian_matrix(3, 7, 2);
    fs.labels = {0, 0, 1, 2, 1, 0, 2};
    fs.num_classes = 3;
    return fs;
}

TEST_CASE("class bookkeeping counts and slices by label", "[feature_set]") {
    const sdm::FeatureSet fs = toy_set();
    const auto counts = sdm::class_counts(fs);
    REQUIRE(counts == std::vector<Eigen::Index>{3, 2, 2});

    const Eigen::MatrixXd c1 = sdm::class_rows(fs, 1);
    REQUIRE(c1.rows() == 2);
    REQUIRE(c1.row(0) == fs.features.row(2));
    REQUIRE(c1.row(1) == fs.features.row(4));
}

TEST_CASE("validation rejects inconsistent label metadata", "[feature_set]") {
    sdm::FeatureSet fs = toy_set();
    fs.labels.pop_back();
    REQUIRE_THROWS_AS(sdm::validate(fs), sdm::validation_error);

    fs = toy_set();
    fs.labels[0] = 3;  // outside [0, num_classes)
    REQUIRE_THROWS_AS(sdm::validate(fs), sdm::validation_error);

    fs = toy_set();
    fs.num_classes = 0;
    REQUIRE_THROWS_AS(sdm::validate(fs), sdm::validation_error);
}

TEST_CASE("feature sets round-trip exactly through CSV", "[feature_set]") {
    const sdm::FeatureSet fs = toy_set();
    std::stringstream ss;
    sdm::save_feature_csv(ss, fs);

    const std::string text = ss.str();
    REQUIRE(text.rfind("dim_0,dim_1,label\n", 0) == 0);

    std::stringstream in(text);
    const sdm::FeatureSet back = sdm::load_feature_csv(in);
    REQUIRE(back.features == fs.features);  // %.17g output makes this exact
    REQUIRE(back.labels == fs.labels);
    REQUIRE(back.num_classes == fs.num_classes);
}

TEST_CASE("CSV loader reports the offending line on malformed input", "[feature_set]") {
    std::stringstream in("dim_0,label\n1.5,0\nnot-a-number,1\n");
    try {
        sdm::load_feature_csv(in);
        FAIL("expected validation_error");
    } catch (const sdm::validation_error& e) {
        REQUIRE(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("feature sets round-trip exactly through the binary format", "[feature_set]") {
    const sdm::FeatureSet fs = toy_set();
    std::stringstream ss;
    sdm::save_feature_set(ss, fs);

    const std::string bytes = ss.str();
    REQUIRE(bytes.substr(0, 4) == "SDMX");
    // magic(4) + version(4) + N(8) + D(8) + C(8) + 14 f64 + 7 u32 labels.
    REQUIRE(bytes.size() == 4 + 4 + 8 + 8 + 8 + 14 * 8 + 7 * 4);

    std::stringstream in(bytes);
    const sdm::FeatureSet back = sdm::load_feature_set(in);
    REQUIRE(back.features == fs.features);
    REQUIRE(back.labels == fs.labels);
    REQUIRE(back.num_classes == fs.num_classes);
}

TEST_CASE("binary loader rejects a foreign magic", "[feature_set]") {
    std::stringstream in("SDMF....");
    REQUIRE_THROWS_AS(sdm::load_feature_set(in), sdm::validation_error);
}

}  // namespace
