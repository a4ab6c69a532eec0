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
#include <cmath>
#include <numbers>
#include <vector>

#include "sdm/common.hpp"
#include "sdm/feature_set.hpp"
#include "sdm/rng.hpp"

namespace sdm {

/// Long-tailed Gaussian-mixture dataset description. Class c receives
/// max(1, round(base_count * beta^(-c/(C-1)))) samples, so class 0 is the
/// head at base_count and class C-1 the tail at ~base_count/beta.
///
/// Mixture layout: if `means` is empty, each class gets one component placed
/// on a circle of `radius` in the first two dimensions. Otherwise `means[c]`
/// lists the class's component means (optionally weighted by `weights[c]`,
/// uniform when omitted). `cov_scale` is the isotropic per-component
/// standard deviation.
struct LongTailSpec {
    std::uint32_t num_classes = 10;
    Eigen::Index base_count = 5000;
    double beta = 200.0;
    Eigen::Index dim = 2;
    double cov_scale = 1.0;
    double radius = 3.0;
    std::vector<std::vector<Eigen::VectorXd>> means;  ///< per class, per component
    std::vector<std::vector<double>> weights;          ///< optional, aligned with means
};

inline void validate(const LongTailSpec& spec) {
    if (spec.num_classes == 0)
        throw validation_error("long-tail spec: num_classes must be positive");
    if (spec.base_count < 1)
        throw validation_error("long-tail spec: base_count must be >= 1");
    if (!(spec.beta >= 1.0) || !std::isfinite(spec.beta))
        throw validation_error("long-tail spec: beta must be >= 1 and finite");
    if (spec.num_classes < 2 && spec.beta > 1.0)
        throw validation_error("long-tail spec: beta > 1 requires at least 2 classes");
    if (spec.dim < 1) throw validation_error("long-tail spec: dim must be >= 1");
    if (!(spec.cov_scale > 0.0) || !std::isfinite(spec.cov_scale))
        throw validation_error("long-tail spec: cov_scale must be positive");
    if (!(spec.radius >= 0.0) || !std::isfinite(spec.radius))
        throw validation_error("long-tail spec: radius must be nonnegative");
    if (!spec.means.empty()) {
        if (spec.means.size() != spec.num_classes)
            throw validation_error("long-tail spec: means must list every class");
        for (std::size_t c = 0; c < spec.means.size(); ++c) {
            if (spec.means[c].empty())
                throw validation_error("long-tail spec: class " + std::to_string(c) +
                                       " has no mixture component");
            for (const auto& mu : spec.means[c])
                if (mu.size() != spec.dim || !mu.allFinite())
                    throw validation_error("long-tail spec: bad component mean in class " +
                                           std::to_string(c));
        }
    }
    if (!spec.weights.empty()) {
        if (spec.means.empty() || spec.weights.size() != spec.means.size())
            throw validation_error("long-tail spec: weights must align with means");
        for (std::size_t c = 0; c < spec.weights.size(); ++c) {
            if (spec.weights[c].size() != spec.means[c].size())
                throw validation_error("long-tail spec: weight count mismatch in class " +
                                       std::to_string(c));
            double sum = 0.0;
            for (double w : spec.weights[c]) {
                if (!(w >= 0.0) || !std::isfinite(w))
                    throw validation_error("long-tail spec: weights must be nonnegative");
                sum += w;
            }
            if (!(sum > 0.0))
                throw validation_error("long-tail spec: class " + std::to_string(c) +
                                       " weights sum to zero");
        }
    }
}

/// Exponential-decay class sizes: counts[c] = max(1, round(base * beta^(-c/(C-1)))).
/// With beta = 1 every class stays at base_count.
inline std::vector<Eigen::Index> longtail_counts(const LongTailSpec& spec) {
    validate(spec);
    const std::uint32_t c_total = spec.num_classes;
    std::vector<Eigen::Index> counts(c_total);
    if (spec.beta == 1.0 || c_total == 1) {
        for (auto& n : counts) n = spec.base_count;
        return counts;
    }
    const double denom = static_cast<double>(c_total - 1);
    for (std::uint32_t c = 0; c < c_total; ++c) {
        const double mu = std::pow(spec.beta, -static_cast<double>(c) / denom);
        counts[c] = std::max<Eigen::Index>(
            1, static_cast<Eigen::Index>(std::llround(static_cast<double>(spec.base_count) * mu)));
    }
    return counts;
}

namespace detail {

/// Default layout when no means are given: one component per class on a
/// circle in the first two dimensions (just the x-axis offset for 1-D data).
inline Eigen::VectorXd circle_mean(const LongTailSpec& spec, std::uint32_t c) {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(spec.dim);
    const double theta =
        2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(spec.num_classes);
    mu(0) = spec.radius * std::cos(theta);
    if (spec.dim >= 2) mu(1) = spec.radius * std::sin(theta);
    return mu;
}

}  // namespace detail

/// Draws the long-tailed mixture dataset. Rows are grouped by class in
/// ascending class order. Sample i of class c consumes counter indices
/// i*(D+1) .. i*(D+1)+D of the class's derived stream: one uniform for the
/// component choice, then D normals.
inline FeatureSet generate_mixture_dataset(const LongTailSpec& spec, std::uint64_t seed) {
    validate(spec);
    const auto counts = longtail_counts(spec);
    Eigen::Index total = 0;
    for (Eigen::Index n : counts) total += n;

    FeatureSet fs;
    fs.num_classes = spec.num_classes;
    fs.features.resize(total, spec.dim);
    fs.labels.resize(static_cast<std::size_t>(total));

    Eigen::Index row = 0;
    for (std::uint32_t c = 0; c < spec.num_classes; ++c) {
        // Resolve this class's component means and cumulative weights.
        std::vector<Eigen::VectorXd> mus;
        if (spec.means.empty())
            mus.push_back(detail::circle_mean(spec, c));
        else
            mus = spec.means[c];
        std::vector<double> cum(mus.size());
        if (spec.weights.empty()) {
            for (std::size_t k = 0; k < mus.size(); ++k)
                cum[k] = static_cast<double>(k + 1) / static_cast<double>(mus.size());
        } else {
            double sum = 0.0;
            for (double w : spec.weights[c]) sum += w;
            double acc = 0.0;
            for (std::size_t k = 0; k < mus.size(); ++k) {
                acc += spec.weights[c][k];
                cum[k] = acc / sum;
            }
        }
        cum.back() = 1.0;

        const std::uint64_t class_seed = rng::derive_seed(seed, "class", c);
        const auto stride = static_cast<std::uint64_t>(spec.dim) + 1;
        for (Eigen::Index i = 0; i < counts[c]; ++i) {
            const std::uint64_t base = static_cast<std::uint64_t>(i) * stride;
            const double pick = rng::uniform_at(class_seed, base);
            std::size_t k = 0;
            while (k + 1 < cum.size() && pick > cum[k]) ++k;
            for (Eigen::Index d = 0; d < spec.dim; ++d)
                fs.features(row, d) =
                    mus[k](d) + spec.cov_scale *
                                    rng::normal_at(class_seed, base + 1 + static_cast<std::uint64_t>(d));
            fs.labels[static_cast<std::size_t>(row)] = c;
            ++row;
        }
    }
    return fs;
}

/// Per-dimension affine transform computed from the REAL set only: shift by
/// its mean, scale by its population standard deviation (floored at 1e-8).
struct NormalizationStats {
    Eigen::VectorXd shift;
    Eigen::VectorXd scale;
};

inline NormalizationStats compute_normalization(const FeatureSet& real) {
    validate(real);
    if (real.size() == 0) throw validation_error("compute_normalization: empty real set");
    const Eigen::Index n = real.size(), d = real.dim();
    NormalizationStats stats;
    stats.shift.resize(d);
    stats.scale.resize(d);
    Eigen::VectorXd col(n);
    for (Eigen::Index j = 0; j < d; ++j) {
        col = real.features.col(j);
        const double mean = pairwise_mean(col.data(), static_cast<std::size_t>(n));
        col = (col.array() - mean).square();
        const double var = pairwise_mean(col.data(), static_cast<std::size_t>(n));
        stats.shift(j) = mean;
        stats.scale(j) = std::max(std::sqrt(var), 1e-8);
    }
    return stats;
}

inline void apply_normalization(FeatureSet& fs, const NormalizationStats& stats) {
    if (fs.dim() != stats.shift.size())
        throw validation_error("apply_normalization: dimension mismatch");
    fs.features.rowwise() -= stats.shift.transpose();
    fs.features.array().rowwise() /= stats.scale.transpose().array();
}

/// Normalizes both sets by the real set's statistics (applied identically);
/// no clipping, purely affine.
inline NormalizationStats normalize_features(FeatureSet& real, FeatureSet& syn) {
    if (real.dim() != syn.dim())
        throw validation_error("normalize_features: dimension mismatch");
    const NormalizationStats stats = compute_normalization(real);
    apply_normalization(real, stats);
    apply_normalization(syn, stats);
    return stats;
}

/// Single-set overload for pipelines that normalize the real data before any
/// synthetic set exists.
inline NormalizationStats normalize_features(FeatureSet& real) {
    const NormalizationStats stats = compute_normalization(real);
    apply_normalization(real, stats);
    return stats;
}

}  // namespace sdm
