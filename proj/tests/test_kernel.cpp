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

#include "sdm/kernel.hpp"
#include "support/oracles.hpp"

namespace {

sdm::KernelSpec rbf(double gamma) {
    sdm::KernelSpec spec;
    spec.kind = sdm::KernelKind::RBF;
    spec.gamma = gamma;
    return spec;
}

Eigen::VectorXd vec(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

TEST_CASE("rbf evaluates to 1 at zero separation", "[kernel]") {
    const Eigen::VectorXd x = vec({0.3, -1.2, 4.0});
    REQUIRE(sdm::kernel_eval(rbf(1.0), x, x) == 1.0);
}

TEST_CASE("rbf matches its closed form on a unit separation", "[kernel]") {
    REQUIRE(sdm::kernel_eval(rbf(1.0), vec({0.0, 0.0}), vec({1.0, 0.0})) ==
            Catch::Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("linear kernel is the dot product", "[kernel]") {
    sdm::KernelSpec spec;
    spec.kind = sdm::KernelKind::Linear;
    REQUIRE(sdm::kernel_eval(spec, vec({1.0, 2.0}), vec({3.0, 4.0})) == 11.0);
}

TEST_CASE("polynomial, sigmoid, cosine and laplace match direct formulas", "[kernel]") {
    const Eigen::VectorXd x = vec({0.5, -1.0});
    const Eigen::VectorXd y = vec({2.0, 0.25});
    const double dot = x.dot(y);

    sdm::KernelSpec poly;
    poly.kind = sdm::KernelKind::Polynomial;
    poly.degree = 3;
    poly.offset = 1.5;
    REQUIRE(sdm::kernel_eval(poly, x, y) ==
            Catch::Approx(std::pow(dot + 1.5, 3.0)).epsilon(1e-14));

    sdm::KernelSpec sig;
    sig.kind = sdm::KernelKind::Sigmoid;
    sig.slope = 0.7;
    sig.offset = -0.2;
    REQUIRE(sdm::kernel_eval(sig, x, y) ==
            Catch::Approx(std::tanh(0.7 * dot - 0.2)).epsilon(1e-14));

    sdm::KernelSpec cosk;
    cosk.kind = sdm::KernelKind::Cosine;
    cosk.omega = 1.3;
    REQUIRE(sdm::kernel_eval(cosk, x, y) ==
            Catch::Approx(std::cos(1.3 * (x - y).norm())).epsilon(1e-14));

    sdm::KernelSpec lap;
    lap.kind = sdm::KernelKind::Laplace;
    lap.gamma = 0.4;
    REQUIRE(sdm::kernel_eval(lap, x, y) ==
            Catch::Approx(std::exp(-0.4 * (x - y).cwiseAbs().sum())).epsilon(1e-14));
}

TEST_CASE("kernel_eval validates inputs", "[kernel]") {
    REQUIRE_THROWS_AS(sdm::kernel_eval(rbf(1.0), vec({1.0}), vec({1.0, 2.0})),
                      sdm::validation_error);
    REQUIRE_THROWS_AS(
        sdm::kernel_eval(rbf(1.0), vec({std::numeric_limits<double>::infinity()}), vec({0.0})),
        sdm::numeric_error);
    REQUIRE_THROWS_AS(sdm::validate(rbf(-1.0)), sdm::validation_error);
    REQUIRE_THROWS_AS(sdm::validate(rbf(0.0)), sdm::validation_error);
}

TEST_CASE("gram diagonal of rbf is all ones", "[kernel]") {
    const Eigen::MatrixXd x = oracles::gaussian_matrix(11, 6, 3);
    const Eigen::MatrixXd g = sdm::gram_matrix(rbf(1.0), x, x);
    for (Eigen::Index i = 0; i < 6; ++i) REQUIRE(g(i, i) == Catch::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("one-by-one gram matches the scalar kernel", "[kernel]") {
    Eigen::MatrixXd x(1, 1), y(1, 1);
    x << 0.0;
    y << 2.0;
    const Eigen::MatrixXd g = sdm::gram_matrix(rbf(0.5), x, y);
    REQUIRE(g.rows() == 1);
    REQUIRE(g.cols() == 1);
    REQUIRE(g(0, 0) == Catch::Approx(std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("gram matches an element-wise kernel_eval loop for every kind", "[kernel]") {
    const Eigen::MatrixXd x = oracles::gaussian_matrix(21, 5, 3);
    const Eigen::MatrixXd y = oracles::gaussian_matrix(22, 4, 3, 0.5);

    std::vector<sdm::KernelSpec> specs;
    specs.push_back(rbf(0.7));
    sdm::KernelSpec s;
    s.kind = sdm::KernelKind::Laplace;
    s.gamma = 1.1;
    specs.push_back(s);
    s = sdm::KernelSpec{};
    s.kind = sdm::KernelKind::Linear;
    specs.push_back(s);
    s = sdm::KernelSpec{};
    s.kind = sdm::KernelKind::Polynomial;
    s.degree = 2;
    s.offset = 1.0;
    specs.push_back(s);
    s = sdm::KernelSpec{};
    s.kind = sdm::KernelKind::Sigmoid;
    specs.push_back(s);
    s = sdm::KernelSpec{};
    s.kind = sdm::KernelKind::Cosine;
    s.omega = 2.0;
    specs.push_back(s);

    for (const auto& spec : specs) {
        const Eigen::MatrixXd g = sdm::gram_matrix(spec, x, y);
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            for (Eigen::Index j = 0; j < y.rows(); ++j)
                REQUIRE(g(i, j) ==
                        Catch::Approx(sdm::kernel_eval(spec, x.row(i), y.row(j)))
                            .margin(1e-12));
    }
}

TEST_CASE("rbf and laplace gram matrices are positive semidefinite", "[kernel]") {
    for (std::uint32_t seed : {1u, 2u, 3u}) {
        const Eigen::MatrixXd x = oracles::gaussian_matrix(seed, 20, 4);
        for (auto kind : {sdm::KernelKind::RBF, sdm::KernelKind::Laplace}) {
            sdm::KernelSpec spec;
            spec.kind = kind;
            spec.gamma = 0.8;
            const Eigen::MatrixXd g = sdm::gram_matrix(spec, x, x);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
            REQUIRE(es.eigenvalues().minCoeff() >= -1e-8);
        }
    }
}

TEST_CASE("shift-invariant kernels ignore common translations", "[kernel]") {
    const Eigen::VectorXd x = vec({0.4, -0.9, 2.0});
    const Eigen::VectorXd y = vec({-1.0, 0.3, 0.7});
    const Eigen::VectorXd c = vec({5.5, -3.25, 0.125});
    for (auto kind :
         {sdm::KernelKind::RBF, sdm::KernelKind::Laplace, sdm::KernelKind::Cosine}) {
        sdm::KernelSpec spec;
        spec.kind = kind;
        REQUIRE(sdm::is_shift_invariant(kind));
        REQUIRE(std::abs(sdm::kernel_eval(spec, x + c, y + c) -
                         sdm::kernel_eval(spec, x, y)) < 1e-12);
    }
    REQUIRE_FALSE(sdm::is_shift_invariant(sdm::KernelKind::Linear));
    REQUIRE_FALSE(sdm::is_shift_invariant(sdm::KernelKind::Polynomial));
    REQUIRE_FALSE(sdm::is_shift_invariant(sdm::KernelKind::Sigmoid));
}

TEST_CASE("universality classification covers rbf and laplace only", "[kernel]") {
    REQUIRE(sdm::is_universal(sdm::KernelKind::RBF));
    REQUIRE(sdm::is_universal(sdm::KernelKind::Laplace));
    REQUIRE_FALSE(sdm::is_universal(sdm::KernelKind::Linear));
    REQUIRE_FALSE(sdm::is_universal(sdm::KernelKind::Cosine));
}

TEST_CASE("kernel_mass is k(0)=1 for shift-invariant kinds, error otherwise", "[kernel]") {
    for (auto kind :
         {sdm::KernelKind::RBF, sdm::KernelKind::Laplace, sdm::KernelKind::Cosine}) {
        sdm::KernelSpec spec;
        spec.kind = kind;
        spec.gamma = 3.7;
        spec.omega = 0.2;
        REQUIRE(sdm::kernel_mass(spec) == 1.0);
    }
    sdm::KernelSpec lin;
    lin.kind = sdm::KernelKind::Linear;
    REQUIRE_THROWS_AS(sdm::kernel_mass(lin), sdm::unsupported_kernel);
}

TEST_CASE("kernel spec round-trips through the config text form", "[kernel]") {
    // The emitted block covers only the parameters the kind actually uses.
    sdm::KernelSpec poly;
    poly.kind = sdm::KernelKind::Polynomial;
    poly.degree = 4;
    poly.offset = -0.5;
    const sdm::KernelSpec poly_back = sdm::kernel_from_config(sdm::kernel_to_config(poly));
    REQUIRE(poly_back.kind == poly.kind);
    REQUIRE(poly_back.degree == poly.degree);
    REQUIRE(poly_back.offset == poly.offset);

    sdm::KernelSpec gauss;
    gauss.kind = sdm::KernelKind::RBF;
    gauss.gamma = 0.25;
    const sdm::KernelSpec gauss_back = sdm::kernel_from_config(sdm::kernel_to_config(gauss));
    REQUIRE(gauss_back.kind == gauss.kind);
    REQUIRE(gauss_back.gamma == gauss.gamma);

    sdm::KernelSpec wave;
    wave.kind = sdm::KernelKind::Cosine;
    wave.omega = 1.75;
    const sdm::KernelSpec wave_back = sdm::kernel_from_config(sdm::kernel_to_config(wave));
    REQUIRE(wave_back.kind == wave.kind);
    REQUIRE(wave_back.omega == wave.omega);

    REQUIRE_THROWS_AS(sdm::kernel_from_config("kernel.gamma=1\n"), sdm::validation_error);
    REQUIRE_THROWS_AS(sdm::kernel_from_config("kernel.kind=rbf\nkernel.width=2\n"),
                      sdm::validation_error);
}

}  // namespace
