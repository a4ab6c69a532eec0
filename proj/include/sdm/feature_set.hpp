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

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sdm/common.hpp"

namespace sdm {

/// A labeled point cloud: N feature rows with one class label each.
/// `num_classes` fixes the label universe [0, num_classes); classes may be
/// empty.
struct FeatureSet {
    Eigen::MatrixXd features;        ///< N x D
    std::vector<std::uint32_t> labels;  ///< size N, values < num_classes
    std::uint32_t num_classes = 1;

    Eigen::Index size() const { return features.rows(); }
    Eigen::Index dim() const { return features.cols(); }
};

inline void validate(const FeatureSet& fs) {
    if (fs.features.rows() != static_cast<Eigen::Index>(fs.labels.size()))
        throw validation_error("feature set: label count does not match row count");
    if (fs.num_classes == 0)
        throw validation_error("feature set: num_classes must be positive");
    for (std::uint32_t l : fs.labels)
        if (l >= fs.num_classes)
            throw validation_error("feature set: label " + std::to_string(l) +
                                   " out of range for " + std::to_string(fs.num_classes) +
                                   " classes");
}

/// Per-class sample counts, indexed by class id.
inline std::vector<Eigen::Index> class_counts(const FeatureSet& fs) {
    validate(fs);
    std::vector<Eigen::Index> counts(fs.num_classes, 0);
    for (std::uint32_t l : fs.labels) ++counts[l];
    return counts;
}

/// Rows of class c, in their original order.
inline Eigen::MatrixXd class_rows(const FeatureSet& fs, std::uint32_t c) {
    validate(fs);
    if (c >= fs.num_classes)
        throw validation_error("class_rows: class id out of range");
    Eigen::Index n = 0;
    for (std::uint32_t l : fs.labels)
        if (l == c) ++n;
    Eigen::MatrixXd out(n, fs.dim());
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < fs.size(); ++i)
        if (fs.labels[static_cast<std::size_t>(i)] == c) out.row(r++) = fs.features.row(i);
    return out;
}

// --- CSV form ----------------------------------------------------------------
//
// Header: dim_0,...,dim_{D-1},label. Values use 17-significant-digit decimal
// so doubles survive a write/read round trip bit-exactly.

inline void save_feature_csv(std::ostream& os, const FeatureSet& fs) {
    validate(fs);
    for (Eigen::Index d = 0; d < fs.dim(); ++d) os << "dim_" << d << ",";
    os << "label\n";
    for (Eigen::Index i = 0; i < fs.size(); ++i) {
        for (Eigen::Index d = 0; d < fs.dim(); ++d)
            os << format_double(fs.features(i, d)) << ",";
        os << fs.labels[static_cast<std::size_t>(i)] << "\n";
    }
    if (!os) throw io_error("save_feature_csv: stream write failed");
}

inline void save_feature_csv(const std::string& path, const FeatureSet& fs) {
    std::ofstream os(path);
    if (!os) throw io_error("save_feature_csv: cannot open '" + path + "' for writing");
    save_feature_csv(os, fs);
}

inline FeatureSet load_feature_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line))
        throw validation_error("load_feature_csv: empty file");
    // Count columns from the header; last column must be the label.
    Eigen::Index dim = 0;
    {
        std::stringstream hs(line);
        std::string cell;
        std::vector<std::string> cols;
        while (std::getline(hs, cell, ',')) cols.push_back(std::string(trim(cell)));
        if (cols.empty() || cols.back() != "label")
            throw validation_error("load_feature_csv: header must end with 'label'");
        dim = static_cast<Eigen::Index>(cols.size()) - 1;
        if (dim <= 0)
            throw validation_error("load_feature_csv: no feature columns");
    }
    std::vector<double> values;
    std::vector<std::uint32_t> labels;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::stringstream ls(line);
        std::string cell;
        Eigen::Index col = 0;
        for (; std::getline(ls, cell, ','); ++col) {
            const std::string v(trim(cell));
            std::size_t used = 0;
            if (col < dim) {
                double x = 0.0;
                try {
                    x = std::stod(v, &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used != v.size())
                    throw validation_error("load_feature_csv: line " +
                                           std::to_string(line_no) + ": bad number '" + v + "'");
                values.push_back(x);
            } else if (col == dim) {
                unsigned long l = 0;
                try {
                    l = std::stoul(v, &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used != v.size())
                    throw validation_error("load_feature_csv: line " +
                                           std::to_string(line_no) + ": bad label '" + v + "'");
                labels.push_back(static_cast<std::uint32_t>(l));
            }
        }
        if (col != dim + 1)
            throw validation_error("load_feature_csv: line " + std::to_string(line_no) +
                                   ": expected " + std::to_string(dim + 1) + " columns");
    }
    FeatureSet fs;
    const auto n = static_cast<Eigen::Index>(labels.size());
    fs.features.resize(n, dim);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index d = 0; d < dim; ++d)
            fs.features(i, d) = values[static_cast<std::size_t>(i * dim + d)];
    fs.labels = std::move(labels);
    std::uint32_t max_label = 0;
    for (std::uint32_t l : fs.labels) max_label = std::max(max_label, l);
    fs.num_classes = fs.labels.empty() ? 1 : max_label + 1;
    validate(fs);
    return fs;
}

inline FeatureSet load_feature_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("load_feature_csv: cannot open '" + path + "'");
    return load_feature_csv(is);
}

// --- binary form ---------------------------------------------------------
//
// Layout (all integers little-endian):
//   bytes 0..3   magic "SDMX"
//   u32          format version (1)
//   u64          N (rows)
//   u64          D (cols)
//   u64          number of classes
//   N*D f64      features, row-major
//   N   u32      labels

inline constexpr char kFeatureMagic[4] = {'S', 'D', 'M', 'X'};
inline constexpr std::uint32_t kFeatureFormatVersion = 1;

inline void save_feature_set(std::ostream& os, const FeatureSet& fs) {
    validate(fs);
    os.write(kFeatureMagic, 4);
    write_u32le(os, kFeatureFormatVersion);
    write_u64le(os, static_cast<std::uint64_t>(fs.size()));
    write_u64le(os, static_cast<std::uint64_t>(fs.dim()));
    write_u64le(os, fs.num_classes);
    for (Eigen::Index i = 0; i < fs.size(); ++i)
        for (Eigen::Index d = 0; d < fs.dim(); ++d) write_f64le(os, fs.features(i, d));
    for (std::uint32_t l : fs.labels) write_u32le(os, l);
    if (!os) throw io_error("save_feature_set: stream write failed");
}

inline void save_feature_set(const std::string& path, const FeatureSet& fs) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("save_feature_set: cannot open '" + path + "' for writing");
    save_feature_set(os, fs);
}

inline FeatureSet load_feature_set(std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kFeatureMagic, 4) != 0)
        throw validation_error("load_feature_set: bad magic, not a feature set file");
    const std::uint32_t version = read_u32le(is);
    if (version != kFeatureFormatVersion)
        throw validation_error("load_feature_set: unsupported format version " +
                               std::to_string(version));
    FeatureSet fs;
    const auto n = static_cast<Eigen::Index>(read_u64le(is));
    const auto d = static_cast<Eigen::Index>(read_u64le(is));
    fs.num_classes = static_cast<std::uint32_t>(read_u64le(is));
    if (n < 0 || d <= 0)
        throw validation_error("load_feature_set: bad dimensions in header");
    fs.features.resize(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) fs.features(i, j) = read_f64le(is);
    fs.labels.resize(static_cast<std::size_t>(n));
    for (auto& l : fs.labels) l = read_u32le(is);
    validate(fs);
    return fs;
}

inline FeatureSet load_feature_set(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("load_feature_set: cannot open '" + path + "'");
    return load_feature_set(is);
}

}  // namespace sdm
