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

// Independent reference implementations used to pin test expectations.
// Everything here is deliberately naive: double loops, long-double
// accumulators, and std::mt19937 for data generation, sharing no code
// paths with the library under test.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "sdm/kernel.hpp"

namespace oracles {

/// Naive double-loop biased MMD^2 estimate with long-double accumulation.
inline double mmd2_loop(const sdm::KernelSpec& spec, const Eigen::MatrixXd& x,
                        const Eigen::MatrixXd& y) {
    const Eigen::Index n = x.rows(), m = y.rows();
    long double xx = 0.0L, yy = 0.0L, xy = 0.0L;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) xx += sdm::kernel_eval(spec, x.row(i), x.row(j));
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) yy += sdm::kernel_eval(spec, y.row(i), y.row(j));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j) xy += sdm::kernel_eval(spec, x.row(i), y.row(j));
    const long double nn = static_cast<long double>(n) * n;
    const long double mm = static_cast<long double>(m) * m;
    const long double nm = static_cast<long double>(n) * m;
    return static_cast<double>(xx / nn - 2.0L * xy / nm + yy / mm);
}

/// Characteristic function of the empirical measure of `x` at frequency `t`,
/// computed by the obvious loop.
inline std::pair<double, double> empirical_cf_loop(const Eigen::MatrixXd& x,
                                                   const Eigen::VectorXd& t) {
    long double re = 0.0L, im = 0.0L;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double phase = x.row(i).dot(t.transpose());
        re += std::cos(phase);
        im += std::sin(phase);
    }
    const auto n = static_cast<long double>(x.rows());
    return {static_cast<double>(re / n), static_cast<double>(im / n)};
}

/// i.i.d. Gaussian matrix from the standard-library generator.
inline Eigen::MatrixXd gaussian_matrix(std::uint32_t seed, Eigen::Index n, Eigen::Index d,
                                       double mean = 0.0, double stddev = 1.0) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> dist(mean, stddev);
    Eigen::MatrixXd x(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) x(i, j) = dist(gen);
    return x;
}

/// Rows of `z` interleaved with their negations: column sums are exactly
/// zero, so two such sets share identical (zero) means while their spreads
/// can differ.
inline Eigen::MatrixXd mirrored_rows(const Eigen::MatrixXd& z) {
    Eigen::MatrixXd out(2 * z.rows(), z.cols());
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        out.row(2 * i) = z.row(i);
        out.row(2 * i + 1) = -z.row(i);
    }
    return out;
}

/// Upper quantile of |statistic| under label permutations of the pooled
/// sample; used to calibrate "distinguishable at all" claims.
template <typename Stat>
double permutation_null_quantile(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                 Stat&& stat, int permutations, double quantile,
                                 std::uint32_t seed) {
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd pooled(n + y.rows(), x.cols());
    pooled.topRows(n) = x;
    pooled.bottomRows(y.rows()) = y;
    std::mt19937 gen(seed);
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(pooled.rows()));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<Eigen::Index>(i);

    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(permutations));
    for (int p = 0; p < permutations; ++p) {
        std::shuffle(idx.begin(), idx.end(), gen);
        Eigen::MatrixXd xa(n, pooled.cols()), yb(pooled.rows() - n, pooled.cols());
        for (Eigen::Index i = 0; i < n; ++i) xa.row(i) = pooled.row(idx[static_cast<std::size_t>(i)]);
        for (Eigen::Index i = n; i < pooled.rows(); ++i)
            yb.row(i - n) = pooled.row(idx[static_cast<std::size_t>(i)]);
        values.push_back(std::abs(stat(xa, yb)));
    }
    std::sort(values.begin(), values.end());
    const auto rank = static_cast<std::size_t>(quantile * (static_cast<double>(values.size()) - 1.0));
    return values[rank];
}

/// One-sided Kolmogorov-Smirnov distance between an empirical sample and a
/// CDF functor.
template <typename Cdf>
double ks_distance(std::vector<double> sample, Cdf&& cdf) {
    std::sort(sample.begin(), sample.end());
    const auto n = static_cast<double>(sample.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        worst = std::max(worst, std::max(std::abs(f - lo), std::abs(f - hi)));
    }
    return worst;
}

}  // namespace oracles
