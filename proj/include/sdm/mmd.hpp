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
#include <complex>
#include <vector>

#include "sdm/common.hpp"
#include "sdm/kernel.hpp"

namespace sdm {

namespace detail {

/// Mean of the full n x m Gram block, accumulated row-by-row with pairwise
/// reductions. Row blocking bounds memory without changing the summation
/// order (each row is always one pairwise tree of length m).
inline double gram_mean(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& X,
                        const Eigen::Ref<const Eigen::MatrixXd>& Y) {
    const Eigen::Index n = X.rows(), m = Y.rows();
    constexpr Eigen::Index kRowBlock = 512;
    std::vector<double> row_sums(static_cast<std::size_t>(n));
    Eigen::VectorXd row(m);
    for (Eigen::Index i0 = 0; i0 < n; i0 += kRowBlock) {
        const Eigen::Index bn = std::min(kRowBlock, n - i0);
        Eigen::MatrixXd block = gram_matrix(spec, X.middleRows(i0, bn), Y);
        for (Eigen::Index i = 0; i < bn; ++i) {
            row = block.row(i);
            row_sums[static_cast<std::size_t>(i0 + i)] =
                pairwise_sum(row.data(), static_cast<std::size_t>(m));
        }
    }
    return pairwise_sum(row_sums.data(), row_sums.size()) /
           (static_cast<double>(n) * static_cast<double>(m));
}

}  // namespace detail

/// Biased (V-statistic) squared MMD:
///   (1/N^2) sum k(x,x') - (2/NM) sum k(x,y) + (1/M^2) sum k(y,y').
/// Includes the diagonal self-terms; nonnegative for positive-definite
/// kernels up to rounding.
inline double mmd2_biased(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& X,
                          const Eigen::Ref<const Eigen::MatrixXd>& Y) {
    validate(spec);
    if (X.rows() == 0 || Y.rows() == 0)
        throw validation_error("mmd2_biased: empty sample set");
    if (X.cols() != Y.cols())
        throw validation_error("mmd2_biased: dimension mismatch");
    const double xx = detail::gram_mean(spec, X, X);
    const double xy = detail::gram_mean(spec, X, Y);
    const double yy = detail::gram_mean(spec, Y, Y);
    return xx - 2.0 * xy + yy;
}

/// Squared distance between the empirical means: the linear-kernel MMD^2.
/// Blind to any difference that preserves the mean.
inline double linear_mmd2(const Eigen::Ref<const Eigen::MatrixXd>& X,
                          const Eigen::Ref<const Eigen::MatrixXd>& Y) {
    if (X.rows() == 0 || Y.rows() == 0)
        throw validation_error("linear_mmd2: empty sample set");
    if (X.cols() != Y.cols())
        throw validation_error("linear_mmd2: dimension mismatch");
    if (!X.allFinite() || !Y.allFinite())
        throw numeric_error("linear_mmd2: non-finite input");
    const Eigen::Index d = X.cols();
    double acc = 0.0;
    Eigen::VectorXd col;
    for (Eigen::Index j = 0; j < d; ++j) {
        col = X.col(j);
        const double mx = pairwise_mean(col.data(), static_cast<std::size_t>(X.rows()));
        col = Y.col(j);
        const double my = pairwise_mean(col.data(), static_cast<std::size_t>(Y.rows()));
        acc += (mx - my) * (mx - my);
    }
    return acc;
}

// --- Gaussian moment expansion --------------------------------------------

/// Exponent tuple for a D-dimensional monomial x^alpha.
struct MultiIndex {
    std::vector<int> exponents;

    int order() const {
        int s = 0;
        for (int e : exponents) s += e;
        return s;
    }
};

/// All multi-indices over `dim` coordinates with total order <= max_order,
/// grouped by ascending order (so prefix sums are truncations).
inline std::vector<MultiIndex> enumerate_multi_indices(int dim, int max_order) {
    if (dim <= 0) throw validation_error("enumerate_multi_indices: dim must be positive");
    if (max_order < 0)
        throw validation_error("enumerate_multi_indices: max_order must be nonnegative");
    std::vector<MultiIndex> out;
    std::vector<int> cur(static_cast<std::size_t>(dim), 0);
    for (int total = 0; total <= max_order; ++total) {
        // Enumerate compositions of `total` into dim nonnegative parts.
        auto rec = [&](auto&& self, int pos, int remaining) -> void {
            if (pos == dim - 1) {
                cur[static_cast<std::size_t>(pos)] = remaining;
                out.push_back(MultiIndex{cur});
                return;
            }
            for (int e = 0; e <= remaining; ++e) {
                cur[static_cast<std::size_t>(pos)] = e;
                self(self, pos + 1, remaining - e);
            }
        };
        rec(rec, 0, total);
    }
    return out;
}

/// Gaussian-damped empirical moment
///   m_alpha = (1/N) sum_n prod_d x_{n,d}^{alpha_d} * exp(-|x_n|^2/(2 sigma^2)).
inline double weighted_moment(const Eigen::Ref<const Eigen::MatrixXd>& X,
                              const MultiIndex& alpha, double sigma) {
    if (X.rows() == 0) throw validation_error("weighted_moment: empty sample set");
    if (static_cast<Eigen::Index>(alpha.exponents.size()) != X.cols())
        throw validation_error("weighted_moment: multi-index dimension mismatch");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw validation_error("weighted_moment: sigma must be positive and finite");
    if (!X.allFinite()) throw numeric_error("weighted_moment: non-finite input");

    const Eigen::Index n = X.rows(), d = X.cols();
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    std::vector<double> terms(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        double mono = 1.0;
        for (Eigen::Index j = 0; j < d; ++j)
            mono *= detail::int_pow(X(i, j), alpha.exponents[static_cast<std::size_t>(j)]);
        terms[static_cast<std::size_t>(i)] =
            mono * std::exp(-X.row(i).squaredNorm() * inv2s2);
    }
    return pairwise_mean(terms.data(), terms.size());
}

namespace detail {

/// log of w_alpha = 1 / (alpha! sigma^(2|alpha|)), kept in log space so high
/// orders cannot overflow before the final exponentiation.
inline double log_moment_weight(const MultiIndex& alpha, double sigma) {
    double lw = -2.0 * alpha.order() * std::log(sigma);
    for (int e : alpha.exponents) lw -= std::lgamma(static_cast<double>(e) + 1.0);
    return lw;
}

}  // namespace detail

/// Truncated moment-space form of the Gaussian-kernel MMD^2:
///   sum_{|alpha| <= max_order} w_alpha (m_P,alpha - m_Q,alpha)^2,
/// which converges to mmd2_biased with k(x,y) = exp(-|x-y|^2/(2 sigma^2))
/// as max_order grows. Partial sums are nondecreasing in max_order.
inline double gaussian_moment_expansion_mmd2(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                             const Eigen::Ref<const Eigen::MatrixXd>& Y,
                                             double sigma, int max_order) {
    if (X.cols() != Y.cols())
        throw validation_error("gaussian_moment_expansion_mmd2: dimension mismatch");
    const auto indices = enumerate_multi_indices(static_cast<int>(X.cols()), max_order);
    std::vector<double> terms;
    terms.reserve(indices.size());
    for (const MultiIndex& alpha : indices) {
        const double mp = weighted_moment(X, alpha, sigma);
        const double mq = weighted_moment(Y, alpha, sigma);
        const double diff = mp - mq;
        terms.push_back(std::exp(detail::log_moment_weight(alpha, sigma)) * diff * diff);
    }
    return pairwise_sum(terms.data(), terms.size());
}

// --- cumulants from the empirical log-CF ----------------------------------

struct CumulantEstimate {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
};

namespace detail {

/// psi(t) = log phi_emp(t), principal branch. Valid only near t=0 where
/// |phi| stays close to 1; enforced by the |phi| >= 0.5 guard.
inline std::complex<double> log_empirical_cf_at(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                                const Eigen::VectorXd& t) {
    const Eigen::Index n = X.rows();
    Eigen::VectorXd phase = X * t;
    Eigen::VectorXd work(n);
    work = phase.array().cos();
    const double re = pairwise_mean(work.data(), static_cast<std::size_t>(n));
    work = phase.array().sin();
    const double im = pairwise_mean(work.data(), static_cast<std::size_t>(n));
    const std::complex<double> phi(re, im);
    if (std::abs(phi) < 0.5)
        throw numeric_error(
            "logcf_cumulants: |CF| < 0.5 on the stencil; decrease h or rescale the data");
    return std::log(phi);
}

}  // namespace detail

/// Mean and covariance read off the empirical log-characteristic function at
/// the origin: grad psi(0) = i*mu and hess psi(0) = -Sigma. Central
/// differences: 2-point stencil for the gradient, 4-point for the Hessian
/// diagonal, 2x2 cross stencil for off-diagonals. psi(0) = 0 exactly, so it
/// never appears.
inline CumulantEstimate logcf_cumulants(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                        double h = 1e-3) {
    if (X.rows() == 0) throw validation_error("logcf_cumulants: empty sample set");
    if (X.cols() == 0) throw validation_error("logcf_cumulants: zero-dimensional samples");
    if (!(h > 0.0) || !std::isfinite(h))
        throw validation_error("logcf_cumulants: h must be positive and finite");
    if (!X.allFinite()) throw numeric_error("logcf_cumulants: non-finite input");

    const Eigen::Index d = X.cols();
    auto psi = [&](const Eigen::VectorXd& t) { return detail::log_empirical_cf_at(X, t); };

    CumulantEstimate est;
    est.mean.resize(d);
    est.covariance.resize(d, d);

    Eigen::VectorXd t = Eigen::VectorXd::Zero(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        t.setZero();
        t(j) = h;
        const auto p1 = psi(t);
        t(j) = -h;
        const auto m1 = psi(t);
        t(j) = 2.0 * h;
        const auto p2 = psi(t);
        t(j) = -2.0 * h;
        const auto m2 = psi(t);
        // d psi/dt_j = i mu_j at 0, so mu_j is the imaginary part.
        est.mean(j) = std::imag((p1 - m1) / (2.0 * h));
        // Fourth-order central second derivative; the psi(0)=0 term drops out.
        const std::complex<double> d2 = (-p2 + 16.0 * p1 + 16.0 * m1 - m2) / (12.0 * h * h);
        est.covariance(j, j) = -std::real(d2);
    }
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index k = j + 1; k < d; ++k) {
            t.setZero();
            t(j) = h;
            t(k) = h;
            const auto pp = psi(t);
            t(k) = -h;
            const auto pm = psi(t);
            t(j) = -h;
            t(k) = h;
            const auto mp = psi(t);
            t(k) = -h;
            const auto mm = psi(t);
            const std::complex<double> d2 = (pp - pm - mp + mm) / (4.0 * h * h);
            est.covariance(j, k) = est.covariance(k, j) = -std::real(d2);
        }
    }
    return est;
}

}  // namespace sdm
