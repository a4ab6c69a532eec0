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
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "sdm/common.hpp"
#include "sdm/frequency_bank.hpp"
#include "sdm/kernel.hpp"
#include "sdm/mmd.hpp"
#include "sdm/rng.hpp"
#include "sdm/spectral.hpp"

namespace sdm::verify {

struct VerifyOptions {
    int pairs = 5;                    ///< Bochner-equivalence sample-set pairs
    Eigen::Index samples = 200;       ///< N = M per set
    Eigen::Index bank_size = 50000;   ///< Monte-Carlo frequencies L
    int cf_pairs = 1000;              ///< decomposition-identity pairs
    int sandwich_pairs = 100;
    int grad_instances = 5;
    std::uint64_t seed = 1;
};

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;   ///< worst observed value
    double tolerance = 0.0;  ///< pass bound on `measured`
    std::string note;
};

namespace detail {

inline Eigen::MatrixXd gaussian_matrix(std::uint64_t seed, Eigen::Index n, Eigen::Index d,
                                       const Eigen::VectorXd& mean, double scale) {
    Eigen::MatrixXd x(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            x(i, j) = mean(j) + scale * rng::normal_at(
                                            seed, static_cast<std::uint64_t>(i * d + j));
    return x;
}

/// Central finite differences of class_discrepancy with respect to each
/// synthetic coordinate.
inline Eigen::MatrixXd fd_gradient(const Eigen::MatrixXd& real, const Eigen::MatrixXd& syn,
                                   const FrequencyBank& bank, double alpha, double h) {
    const EmpiricalCF phi_t = empirical_cf(real, bank);
    Eigen::MatrixXd grad(syn.rows(), syn.cols());
    Eigen::MatrixXd work = syn;
    for (Eigen::Index i = 0; i < syn.rows(); ++i) {
        for (Eigen::Index j = 0; j < syn.cols(); ++j) {
            work(i, j) = syn(i, j) + h;
            const double up = class_discrepancy(phi_t, empirical_cf(work, bank), alpha);
            work(i, j) = syn(i, j) - h;
            const double dn = class_discrepancy(phi_t, empirical_cf(work, bank), alpha);
            work(i, j) = syn(i, j);
            grad(i, j) = (up - dn) / (2.0 * h);
        }
    }
    return grad;
}

}  // namespace detail

/// |sdd - mmd2| <= 3 SE_MC on random 2-D Gaussian pairs; at most one failure
/// tolerated (a 3-sigma band is itself statistical). The note reports the
/// median 3*SE band so callers can see the tolerance shrink with 1/sqrt(L).
inline CheckResult check_bochner_equivalence(const VerifyOptions& opt) {
    const KernelSpec spec{KernelKind::RBF, 2.0, 2, 1.0, 1.0, 1.0};
    const Eigen::Index d = 2;
    int failures = 0;
    double worst_diff = 0.0;
    std::vector<double> bands;
    for (int p = 0; p < opt.pairs; ++p) {
        const std::uint64_t ps = rng::derive_seed(opt.seed, "bochner", static_cast<std::uint64_t>(p));
        Eigen::VectorXd mu_x = Eigen::VectorXd::Zero(d);
        Eigen::VectorXd mu_y(d);
        mu_y << 0.4 + 0.05 * p, -0.3;
        const double scale_y = 1.0 + 0.1 * (p % 3);
        const Eigen::MatrixXd x =
            detail::gaussian_matrix(rng::derive_seed(ps, "x", 0), opt.samples, d, mu_x, 1.0);
        const Eigen::MatrixXd y =
            detail::gaussian_matrix(rng::derive_seed(ps, "y", 0), opt.samples, d, mu_y, scale_y);

        const FrequencyBank bank =
            spectral_sample(spec, opt.bank_size, d, rng::derive_seed(ps, "bank", 0));
        const SddEstimate est = sdd_estimate(empirical_cf(x, bank), empirical_cf(y, bank));
        const double gram = mmd2_biased(spec, x, y);
        const double diff = std::abs(est.value - gram);
        worst_diff = std::max(worst_diff, diff);
        bands.push_back(3.0 * est.standard_error);
        if (diff > 3.0 * est.standard_error) ++failures;
    }
    std::sort(bands.begin(), bands.end());
    const double median_band = bands[bands.size() / 2];

    CheckResult r;
    r.name = "bochner-equivalence";
    r.measured = static_cast<double>(failures);
    r.tolerance = 1.0;
    r.pass = failures <= 1;
    r.note = "median_band=" + format_double(median_band) +
             " worst_diff=" + format_double(worst_diff);
    return r;
}

/// amp + cross = |delta phi|^2 per frequency, and the alpha=0.5 blend is
/// exactly half the squared estimate; both to 1e-12 on random CF pairs.
inline CheckResult check_decomposition_identity(const VerifyOptions& opt) {
    const KernelSpec spec{KernelKind::RBF, 2.0, 2, 1.0, 1.0, 1.0};
    double worst = 0.0;
    for (int p = 0; p < opt.cf_pairs; ++p) {
        const std::uint64_t ps =
            rng::derive_seed(opt.seed, "decomp", static_cast<std::uint64_t>(p));
        const Eigen::Index d = 1 + static_cast<Eigen::Index>(p % 3);
        Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
        const Eigen::MatrixXd x =
            detail::gaussian_matrix(rng::derive_seed(ps, "x", 0), 8, d, mu, 1.0);
        mu.setConstant(0.7);
        const Eigen::MatrixXd y =
            detail::gaussian_matrix(rng::derive_seed(ps, "y", 0), 5, d, mu, 1.3);
        const FrequencyBank bank = spectral_sample(spec, 64, d, rng::derive_seed(ps, "bank", 0));
        const EmpiricalCF pt = empirical_cf(x, bank), psyn = empirical_cf(y, bank);

        const AmpPhaseTerms terms = amp_phase_decompose(pt, psyn);
        for (Eigen::Index i = 0; i < bank.size(); ++i) {
            const double dre = pt.re(i) - psyn.re(i);
            const double dim = pt.im(i) - psyn.im(i);
            worst = std::max(worst, std::abs(terms.amplitude(i) + terms.cross(i) -
                                             (dre * dre + dim * dim)));
        }
        const double half = class_discrepancy(pt, psyn, 0.5);
        const double full = sdd_estimate(pt, psyn).value;
        worst = std::max(worst, std::abs(half - 0.5 * full));
    }
    CheckResult r;
    r.name = "decomposition-identity";
    r.measured = worst;
    r.tolerance = 1e-12;
    r.pass = worst <= r.tolerance;
    return r;
}

/// cfd <= sqrt(mass * sdd) and sdd <= 2 cfd with slack >= -1e-12: these are
/// Cauchy-Schwarz and boundedness applied to the same finite sums, so they
/// hold deterministically per pair.
inline CheckResult check_cfd_sandwich(const VerifyOptions& opt) {
    const KernelSpec spec{KernelKind::RBF, 2.0, 2, 1.0, 1.0, 1.0};
    double worst_violation = 0.0;
    for (int p = 0; p < opt.sandwich_pairs; ++p) {
        const std::uint64_t ps =
            rng::derive_seed(opt.seed, "sandwich", static_cast<std::uint64_t>(p));
        const Eigen::Index d = 1 + static_cast<Eigen::Index>(p % 2);
        Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
        const Eigen::MatrixXd x =
            detail::gaussian_matrix(rng::derive_seed(ps, "x", 0), 12, d, mu, 1.0);
        mu.setConstant(0.2 + 0.1 * (p % 5));
        const Eigen::MatrixXd y =
            detail::gaussian_matrix(rng::derive_seed(ps, "y", 0), 9, d, mu, 0.8);
        const FrequencyBank bank =
            spectral_sample(spec, 128, d, rng::derive_seed(ps, "bank", 0));
        const EmpiricalCF pt = empirical_cf(x, bank), psyn = empirical_cf(y, bank);
        const double sdd = sdd_estimate(pt, psyn).value;
        const double cfd = cfd_mu_estimate(pt, psyn);
        worst_violation = std::max(worst_violation, cfd - std::sqrt(bank.mass * sdd));
        worst_violation = std::max(worst_violation, sdd - 2.0 * cfd);
    }
    CheckResult r;
    r.name = "cfd-sandwich";
    r.measured = worst_violation;
    r.tolerance = 1e-12;
    r.pass = worst_violation <= r.tolerance;
    return r;
}

/// Order-12 truncation of the Gaussian-kernel moment expansion agrees with
/// the Gram-matrix MMD^2 on 1-D singleton pairs, and partial sums are
/// nondecreasing in the order.
inline CheckResult check_moment_expansion(const VerifyOptions& opt) {
    const double sigma = 1.0;
    const KernelSpec gram_spec{KernelKind::RBF, 1.0 / (2.0 * sigma * sigma), 2, 1.0, 1.0, 1.0};
    double worst = 0.0;
    int monotonicity_violations = 0;
    for (int p = 0; p < 8; ++p) {
        const std::uint64_t ps =
            rng::derive_seed(opt.seed, "moment", static_cast<std::uint64_t>(p));
        Eigen::MatrixXd x(1, 1), y(1, 1);
        x(0, 0) = 3.0 * (rng::uniform_at(ps, 0) - 0.5);  // in [-1.5, 1.5]
        y(0, 0) = 3.0 * (rng::uniform_at(ps, 1) - 0.5);
        const double gram = mmd2_biased(gram_spec, x, y);
        double prev = -1.0;
        double truncated = 0.0;
        for (int order = 0; order <= 12; ++order) {
            truncated = gaussian_moment_expansion_mmd2(x, y, sigma, order);
            if (truncated < prev - 1e-15) ++monotonicity_violations;
            prev = truncated;
        }
        worst = std::max(worst, std::abs(truncated - gram));
    }
    CheckResult r;
    r.name = "moment-expansion";
    r.measured = worst;
    r.tolerance = 1e-4;
    r.pass = worst <= r.tolerance && monotonicity_violations == 0;
    if (monotonicity_violations > 0)
        r.note = "monotonicity_violations=" + std::to_string(monotonicity_violations);
    return r;
}

/// Finite-difference cumulants of the empirical log-CF match directly
/// computed sample statistics within 0.05 on 10000 Gaussian draws.
inline CheckResult check_logcf_cumulants(const VerifyOptions& opt) {
    const Eigen::Index n = 10000, d = 2;
    const std::uint64_t ps = rng::derive_seed(opt.seed, "cumulant", 0);
    // Correlated 2-D Gaussian: x2 mixes x1 for a nonzero off-diagonal.
    Eigen::MatrixXd x(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double z1 = rng::normal_at(ps, static_cast<std::uint64_t>(2 * i));
        const double z2 = rng::normal_at(ps, static_cast<std::uint64_t>(2 * i + 1));
        x(i, 0) = 0.3 + z1;
        x(i, 1) = -0.2 + 0.4 * z1 + 0.8 * z2;
    }
    const CumulantEstimate est = logcf_cumulants(x);

    const Eigen::RowVectorXd mean = x.colwise().mean();
    Eigen::MatrixXd centered = x.rowwise() - mean;
    const Eigen::MatrixXd cov =
        centered.transpose() * centered / static_cast<double>(n);

    double worst = (est.mean.transpose() - mean).cwiseAbs().maxCoeff();
    worst = std::max(worst, (est.covariance - cov).cwiseAbs().maxCoeff());

    CheckResult r;
    r.name = "logcf-cumulants";
    r.measured = worst;
    r.tolerance = 0.05;
    r.pass = worst <= r.tolerance;
    return r;
}

/// Analytic gradient vs central finite differences (h=1e-5) on random small
/// instances; relative error measured against the larger of the two norms
/// with a 1e-4 floor.
inline CheckResult check_gradient(const VerifyOptions& opt) {
    const KernelSpec spec{KernelKind::RBF, 2.0, 2, 1.0, 1.0, 1.0};
    double worst = 0.0;
    for (int p = 0; p < opt.grad_instances; ++p) {
        const std::uint64_t ps =
            rng::derive_seed(opt.seed, "grad", static_cast<std::uint64_t>(p));
        const Eigen::Index d = 1 + static_cast<Eigen::Index>(p % 3);
        const Eigen::Index n = 4 + static_cast<Eigen::Index>(p % 5);
        const Eigen::Index m = 2 + static_cast<Eigen::Index>(p % 3);
        Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
        const Eigen::MatrixXd real =
            detail::gaussian_matrix(rng::derive_seed(ps, "x", 0), n, d, mu, 1.0);
        mu.setConstant(0.5);
        const Eigen::MatrixXd syn =
            detail::gaussian_matrix(rng::derive_seed(ps, "y", 0), m, d, mu, 1.0);
        const FrequencyBank bank = spectral_sample(spec, 64, d, rng::derive_seed(ps, "bank", 0));
        const double alpha = 0.1 + 0.8 * rng::uniform_at(ps, 7);

        const Eigen::MatrixXd analytic = sdd_gradient(real, syn, bank, alpha);
        const Eigen::MatrixXd fd = detail::fd_gradient(real, syn, bank, alpha, 1e-5);
        const double denom =
            std::max({analytic.cwiseAbs().maxCoeff(), fd.cwiseAbs().maxCoeff(), 1e-4});
        worst = std::max(worst, (analytic - fd).cwiseAbs().maxCoeff() / denom);
    }
    CheckResult r;
    r.name = "gradient-fd";
    r.measured = worst;
    r.tolerance = 1e-5;
    r.pass = worst <= r.tolerance;
    return r;
}

inline std::vector<CheckResult> run_property_suite(const VerifyOptions& opt) {
    std::vector<CheckResult> results;
    results.push_back(check_bochner_equivalence(opt));
    results.push_back(check_decomposition_identity(opt));
    results.push_back(check_cfd_sandwich(opt));
    results.push_back(check_moment_expansion(opt));
    results.push_back(check_logcf_cumulants(opt));
    results.push_back(check_gradient(opt));
    return results;
}

inline bool all_passed(const std::vector<CheckResult>& results) {
    for (const CheckResult& r : results)
        if (!r.pass) return false;
    return true;
}

inline void print_check_table(std::ostream& os, const std::vector<CheckResult>& results) {
    os << std::left << std::setw(26) << "check" << std::setw(8) << "status" << std::setw(16)
       << "measured" << std::setw(16) << "tolerance" << "note\n";
    for (const CheckResult& r : results) {
        char measured[32], tolerance[32];
        std::snprintf(measured, sizeof(measured), "%.6g", r.measured);
        std::snprintf(tolerance, sizeof(tolerance), "%.6g", r.tolerance);
        os << std::left << std::setw(26) << r.name << std::setw(8)
           << (r.pass ? "PASS" : "FAIL") << std::setw(16) << measured << std::setw(16)
           << tolerance << r.note << "\n";
    }
}

}  // namespace sdm::verify
