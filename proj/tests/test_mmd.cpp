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
#include <cmath>
#include <random>

#include "sdm/mmd.hpp"
#include "support/oracles.hpp"

namespace {

sdm::KernelSpec rbf(double gamma) {
    sdm::KernelSpec spec;
    spec.kind = sdm::KernelKind::RBF;
    spec.gamma = gamma;
    return spec;
}

TEST_CASE("mmd2 of a set against itself vanishes", "[mmd]") {
    const Eigen::MatrixXd x = oracles::gaussian_matrix(1, 20, 3);
    REQUIRE(std::abs(sdm::mmd2_biased(rbf(0.5), x, x)) <= 1e-12);
}

TEST_CASE("singleton mmd2 matches its closed form", "[mmd]") {
    Eigen::MatrixXd x(1, 2), y(1, 2);
    x << 0.2, -1.0;
    y << 1.4, 0.5;
    const double gamma = 0.8;
    const double expected = 2.0 - 2.0 * std::exp(-gamma * (x - y).squaredNorm());
    REQUIRE(sdm::mmd2_biased(rbf(gamma), x, y) == Catch::Approx(expected).epsilon(1e-13));
}

TEST_CASE("mmd2 matches the double-loop oracle on Gaussian samples", "[mmd]") {
    const Eigen::MatrixXd x = oracles::gaussian_matrix(10, 50, 1, 0.0);
    const Eigen::MatrixXd y = oracles::gaussian_matrix(11, 50, 1, 3.0);
    const double got = sdm::mmd2_biased(rbf(0.5), x, y);
    const double expected = oracles::mmd2_loop(rbf(0.5), x, y);
    REQUIRE(std::abs(got - expected) <= 1e-12);
}

TEST_CASE("mmd2 is symmetric and never visibly negative", "[mmd]") {
    std::vector<sdm::KernelSpec> specs{rbf(2.0)};
    sdm::KernelSpec lap;
    lap.kind = sdm::KernelKind::Laplace;
    lap.gamma = 1.0;
    specs.push_back(lap);
    sdm::KernelSpec lin;
    lin.kind = sdm::KernelKind::Linear;
    specs.push_back(lin);

    for (std::uint32_t seed = 0; seed < 5; ++seed) {
        const Eigen::MatrixXd x = oracles::gaussian_matrix(100 + seed, 17, 2, 0.3);
        const Eigen::MatrixXd y = oracles::gaussian_matrix(200 + seed, 23, 2, -0.2, 1.5);
        for (const auto& spec : specs) {
            const double xy = sdm::mmd2_biased(spec, x, y);
            const double yx = sdm::mmd2_biased(spec, y, x);
            REQUIRE(std::abs(xy - yx) <= 1e-12);
            REQUIRE(xy >= -1e-10);
        }
    }
}

TEST_CASE("mmd2 validates inputs", "[mmd]") {
    const Eigen::MatrixXd x = oracles::gaussian_matrix(1, 4, 2);
    REQUIRE_THROWS_AS(sdm::mmd2_biased(rbf(1.0), Eigen::MatrixXd(0, 2), x),
                      sdm::validation_error);
    REQUIRE_THROWS_AS(sdm::mmd2_biased(rbf(1.0), x, oracles::gaussian_matrix(2, 4, 3)),
                      sdm::validation_error);
}

TEST_CASE("linear mmd2 is the squared mean gap", "[mmd]") {
    const Eigen::MatrixXd x = oracles::gaussian_matrix(5, 30, 2);
    REQUIRE(sdm::linear_mmd2(x, x) == 0.0);

    // Sets engineered to have means exactly (1,0) and (0,1).
    Eigen::MatrixXd a(2, 2), b(2, 2);
    a << 1.0, 0.5, 1.0, -0.5;
    b << 0.25, 1.0, -0.25, 1.0;
    REQUIRE(sdm::linear_mmd2(a, b) == Catch::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("mean-matched sets fool the linear statistic but not the rbf one", "[mmd]") {
    // Integer-valued mirrored rows: partial sums are exact in binary floating
    // point, so both sets have column means of exactly zero.
    Eigen::MatrixXd z(3, 2);
    z << 1.0, 2.0, 3.0, 1.0, 2.0, 3.0;
    const Eigen::MatrixXd x = oracles::mirrored_rows(z);        // spread 1x
    const Eigen::MatrixXd y = oracles::mirrored_rows(2.0 * z);  // spread 2x

    REQUIRE(sdm::linear_mmd2(x, y) == 0.0);
    REQUIRE(sdm::mmd2_biased(rbf(2.0), x, y) > 0.01);
}

TEST_CASE("universal kernel separates variance-mismatched sets; linear cannot",
          "[mmd][slow]") {
    // Mean-matched N=M=200 sets with per-coordinate spread 1 vs 2.
    const Eigen::MatrixXd z = oracles::gaussian_matrix(81, 100, 2);
    const Eigen::MatrixXd x = oracles::mirrored_rows(z);
    const Eigen::MatrixXd y = oracles::mirrored_rows(2.0 * oracles::gaussian_matrix(82, 100, 2));

    const auto rbf_stat = [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
        return sdm::mmd2_biased(rbf(2.0), a, b);
    };
    const auto lin_stat = [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
        return sdm::linear_mmd2(a, b);
    };

    const double rbf_observed = rbf_stat(x, y);
    const double rbf_null =
        oracles::permutation_null_quantile(x, y, rbf_stat, 100, 0.95, 4242);
    REQUIRE(rbf_observed >= 5.0 * rbf_null);

    const double lin_observed = lin_stat(x, y);
    const double lin_null =
        oracles::permutation_null_quantile(x, y, lin_stat, 100, 0.95, 4242);
    REQUIRE(lin_observed < 5.0 * lin_null);
}

TEST_CASE("multi-index enumeration is grouped by ascending total order", "[mmd]") {
    const auto idx = sdm::enumerate_multi_indices(2, 3);
    // Orders 0..3 in 2-D: 1 + 2 + 3 + 4 = 10 indices.
    REQUIRE(idx.size() == 10);
    Eigen::Index prev = 0;
    for (const auto& mi : idx) {
        REQUIRE(mi.order() >= prev);
        prev = mi.order();
    }
    REQUIRE(idx.front().order() == 0);
    REQUIRE(idx.back().order() == 3);
}

TEST_CASE("weighted moment of the zero multi-index at the origin is one", "[mmd]") {
    Eigen::MatrixXd x(1, 2);
    x << 0.0, 0.0;
    sdm::MultiIndex alpha;
    alpha.exponents = {0, 0};
    REQUIRE(sdm::weighted_moment(x, alpha, 1.0) == 1.0);
}

TEST_CASE("weighted moment matches the direct formula on a single point", "[mmd]") {
    Eigen::MatrixXd x(1, 1);
    x << 1.0;
    sdm::MultiIndex alpha;
    alpha.exponents = {1};
    REQUIRE(sdm::weighted_moment(x, alpha, 1.0) ==
            Catch::Approx(std::exp(-0.5)).epsilon(1e-14));
}

TEST_CASE("weighted moment matches a long-double loop oracle", "[mmd]") {
    const Eigen::MatrixXd x = oracles::gaussian_matrix(33, 100, 1);
    sdm::MultiIndex alpha;
    alpha.exponents = {2};
    const double sigma = 2.0;

    long double acc = 0.0L;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        acc += x(i, 0) * x(i, 0) * std::exp(-x(i, 0) * x(i, 0) / (2.0 * sigma * sigma));
    const double expected = static_cast<double>(acc / 100.0L);
    REQUIRE(std::abs(sdm::weighted_moment(x, alpha, sigma) - expected) <= 1e-14);
}

TEST_CASE("moment expansion vanishes when both sets coincide", "[mmd]") {
    const Eigen::MatrixXd x = oracles::gaussian_matrix(3, 12, 2);
    for (int order : {0, 3, 8})
        REQUIRE(sdm::gaussian_moment_expansion_mmd2(x, x, 1.5, order) == 0.0);
}

TEST_CASE("order-12 expansion reaches the gram value on close singletons", "[mmd]") {
    Eigen::MatrixXd x(1, 1), y(1, 1);
    x << 0.0;
    y << 1.0;
    const double sigma = 1.0;
    // sigma=1 corresponds to RBF gamma = 1/(2 sigma^2) = 0.5.
    const double gram = sdm::mmd2_biased(rbf(0.5), x, y);
    const double trunc = sdm::gaussian_moment_expansion_mmd2(x, y, sigma, 12);
    REQUIRE(std::abs(trunc - gram) <= 1e-4);
}

TEST_CASE("expansion partial sums grow monotonically toward the gram value", "[mmd]") {
    std::mt19937 gen(17);
    std::uniform_real_distribution<double> dist(-1.5, 1.5);
    Eigen::MatrixXd x(30, 1), y(30, 1);
    for (Eigen::Index i = 0; i < 30; ++i) {
        x(i, 0) = dist(gen);
        y(i, 0) = dist(gen) * 0.8 + 0.2;
    }
    const double sigma = 2.0;
    const double gram = sdm::mmd2_biased(rbf(1.0 / (2.0 * sigma * sigma)), x, y);

    double prev = -1.0;
    double last = 0.0;
    for (int order = 0; order <= 10; ++order) {
        last = sdm::gaussian_moment_expansion_mmd2(x, y, sigma, order);
        REQUIRE(last >= prev - 1e-15);
        prev = last;
    }
    // On [-1.5,1.5] data with sigma=2 the order-10 remainder is ~1e-10.
    REQUIRE(std::abs(last - gram) < 1e-8);
    const double order0 = sdm::gaussian_moment_expansion_mmd2(x, y, sigma, 0);
    REQUIRE(std::abs(last - gram) < std::abs(order0 - gram));
}

TEST_CASE("logcf cumulants of a point mass recover the point", "[mmd]") {
    Eigen::MatrixXd x(5, 2);
    for (Eigen::Index i = 0; i < 5; ++i) {
        x(i, 0) = 0.7;
        x(i, 1) = -0.4;
    }
    const sdm::CumulantEstimate est = sdm::logcf_cumulants(x, 1e-3);
    REQUIRE(std::abs(est.mean(0) - 0.7) <= 1e-8);
    REQUIRE(std::abs(est.mean(1) + 0.4) <= 1e-8);
    REQUIRE(est.covariance.cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("logcf cumulants track sample mean and variance", "[mmd]") {
    const Eigen::MatrixXd x = oracles::gaussian_matrix(55, 10000, 1, 0.3, 1.2);
    const sdm::CumulantEstimate est = sdm::logcf_cumulants(x, 1e-3);

    const double sample_mean = x.col(0).mean();
    const double sample_var =
        (x.col(0).array() - sample_mean).square().sum() / 10000.0;
    REQUIRE(std::abs(est.mean(0) - sample_mean) < 0.05);
    REQUIRE(std::abs(est.covariance(0, 0) - sample_var) < 0.05);
}

TEST_CASE("logcf cumulants recover off-diagonal covariance", "[mmd]") {
    // x1 = z1, x2 = 0.6 z1 + 0.8 z2: population covariance 0.6.
    const Eigen::MatrixXd z = oracles::gaussian_matrix(66, 10000, 2);
    Eigen::MatrixXd x(10000, 2);
    x.col(0) = z.col(0);
    x.col(1) = 0.6 * z.col(0) + 0.8 * z.col(1);

    const Eigen::RowVectorXd mu = x.colwise().mean();
    const double sample_cov =
        ((x.col(0).array() - mu(0)) * (x.col(1).array() - mu(1))).sum() / 10000.0;

    const sdm::CumulantEstimate est = sdm::logcf_cumulants(x, 1e-3);
    REQUIRE(std::abs(est.covariance(0, 1) - sample_cov) < 0.05);
    REQUIRE(std::abs(est.covariance(0, 1) - est.covariance(1, 0)) < 1e-10);
}

TEST_CASE("logcf rejects steps that push the CF magnitude below one half", "[mmd]") {
    // Wide data: |CF| decays fast, so a large step lands outside the valid
    // stencil region.
    const Eigen::MatrixXd x = oracles::gaussian_matrix(9, 500, 1, 0.0, 50.0);
    REQUIRE_THROWS_AS(sdm::logcf_cumulants(x, 1.0), sdm::numeric_error);
}

}  // namespace
