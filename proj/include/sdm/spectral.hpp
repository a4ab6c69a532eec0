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
#include <fstream>
#include <string>
#include <vector>

#include "sdm/common.hpp"
#include "sdm/feature_set.hpp"
#include "sdm/frequency_bank.hpp"

namespace sdm {

/// Magnitudes below this are treated as zero when splitting a squared CF
/// difference into amplitude and phase parts: the phase of a (near-)zero
/// complex number is meaningless, so the cross term is defined as 0 there.
inline constexpr double kPhaseGuard = 1e-15;

/// Empirical characteristic function phi(t_i) = (1/N) sum_n exp(j t_i.x_n),
/// evaluated on one frequency bank and stored as separate real/imaginary
/// vectors. Tagged with the bank id so estimators can reject CF pairs built
/// on different banks.
struct EmpiricalCF {
    Eigen::VectorXd re;  ///< Re phi(t_i), length L
    Eigen::VectorXd im;  ///< Im phi(t_i), length L
    std::uint64_t bank_id = 0;
    double mass = 1.0;           ///< spectral mass carried over from the bank
    Eigen::Index sample_count = 0;

    Eigen::Index size() const { return re.size(); }
};

namespace detail {

inline void check_same_bank(const EmpiricalCF& a, const EmpiricalCF& b, const char* who) {
    if (a.bank_id != b.bank_id)
        throw validation_error(std::string(who) +
                               ": characteristic functions built on different banks");
    if (a.size() != b.size())
        throw validation_error(std::string(who) + ": bank size mismatch");
}

}  // namespace detail

/// Evaluates the empirical CF of the rows of X on every bank frequency.
/// Frequencies are processed in column blocks to bound the phase-matrix
/// memory; each CF entry is a fixed-order pairwise mean over samples, so
/// results do not depend on the block size.
inline EmpiricalCF empirical_cf(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                const FrequencyBank& bank) {
    if (X.rows() == 0) throw validation_error("empirical_cf: empty sample set");
    if (X.cols() != bank.dim())
        throw validation_error("empirical_cf: sample dimension does not match bank");
    if (!X.allFinite()) throw numeric_error("empirical_cf: non-finite input");

    const Eigen::Index n = X.rows(), total = bank.size();
    EmpiricalCF cf;
    cf.re.resize(total);
    cf.im.resize(total);
    cf.bank_id = bank.id;
    cf.mass = bank.mass;
    cf.sample_count = n;

    // Cap the phase matrix at ~4M doubles (32 MB) per block.
    constexpr Eigen::Index kPhaseBudget = Eigen::Index(1) << 22;
    const Eigen::Index bw_cap = std::max<Eigen::Index>(1, kPhaseBudget / n);

    Eigen::MatrixXd phases;
    Eigen::VectorXd work(n);
    for (Eigen::Index j0 = 0; j0 < total; j0 += bw_cap) {
        const Eigen::Index bw = std::min(bw_cap, total - j0);
        phases.noalias() = X * bank.freqs.middleRows(j0, bw).transpose();
        for (Eigen::Index j = 0; j < bw; ++j) {
            work = phases.col(j).array().cos();
            cf.re(j0 + j) = pairwise_mean(work.data(), static_cast<std::size_t>(n));
            work = phases.col(j).array().sin();
            cf.im(j0 + j) = pairwise_mean(work.data(), static_cast<std::size_t>(n));
        }
    }
    return cf;
}

/// Monte-Carlo estimate of the spectral discrepancy integral, plus the
/// standard error of the per-frequency summands (mass * sd / sqrt(L)).
struct SddEstimate {
    double value = 0.0;
    double standard_error = 0.0;
};

/// (mass/L) * sum_i |phi_T(t_i) - phi_S(t_i)|^2. Equals the universal-kernel
/// MMD^2 in expectation over the bank draw.
inline SddEstimate sdd_estimate(const EmpiricalCF& phi_t, const EmpiricalCF& phi_s) {
    detail::check_same_bank(phi_t, phi_s, "sdd_estimate");
    const Eigen::Index L = phi_t.size();
    Eigen::VectorXd sq(L);
    sq = (phi_t.re - phi_s.re).array().square() + (phi_t.im - phi_s.im).array().square();

    SddEstimate est;
    const double mean = pairwise_mean(sq.data(), static_cast<std::size_t>(L));
    est.value = phi_t.mass * mean;
    if (L > 1) {
        Eigen::VectorXd dev = sq.array() - mean;
        dev = dev.array().square();
        const double var =
            pairwise_sum(dev.data(), static_cast<std::size_t>(L)) / static_cast<double>(L - 1);
        est.standard_error = phi_t.mass * std::sqrt(var / static_cast<double>(L));
    }
    return est;
}

/// Per-frequency split of |phi_T - phi_S|^2 into an amplitude part
/// (|phi_T| - |phi_S|)^2 and a phase-misalignment part
/// 2|phi_T||phi_S|(1 - cos(theta_T - theta_S)). The parts sum back to the
/// squared difference identically.
struct AmpPhaseTerms {
    Eigen::VectorXd amplitude;
    Eigen::VectorXd cross;
};

inline AmpPhaseTerms amp_phase_decompose(const EmpiricalCF& phi_t, const EmpiricalCF& phi_s) {
    detail::check_same_bank(phi_t, phi_s, "amp_phase_decompose");
    const Eigen::Index L = phi_t.size();
    AmpPhaseTerms out;
    out.amplitude.resize(L);
    out.cross.resize(L);
    for (Eigen::Index i = 0; i < L; ++i) {
        if (phi_t.re(i) == phi_s.re(i) && phi_t.im(i) == phi_s.im(i)) {
            // Equal CF values: both parts vanish exactly. Going through the
            // cosine formula instead would leave an ~1e-16 residue, because
            // hypot(u,v)^2 rounds away from u^2 + v^2.
            out.amplitude(i) = 0.0;
            out.cross(i) = 0.0;
            continue;
        }
        const double at = std::hypot(phi_t.re(i), phi_t.im(i));
        const double as = std::hypot(phi_s.re(i), phi_s.im(i));
        const double diff = at - as;
        out.amplitude(i) = diff * diff;
        if (at < kPhaseGuard || as < kPhaseGuard) {
            out.cross(i) = 0.0;
        } else {
            // cos of the phase gap without extracting angles: Re(phi_T conj(phi_S)) / (|phi_T||phi_S|).
            double cos_delta =
                (phi_t.re(i) * phi_s.re(i) + phi_t.im(i) * phi_s.im(i)) / (at * as);
            cos_delta = std::min(1.0, std::max(-1.0, cos_delta));
            out.cross(i) = 2.0 * at * as * (1.0 - cos_delta);
        }
    }
    return out;
}

/// Class-level discrepancy (mass/L) * sum_i [alpha*amp_i + (1-alpha)*cross_i].
/// At alpha = 0.5 this is exactly half the plain spectral discrepancy.
inline double class_discrepancy(const EmpiricalCF& phi_t, const EmpiricalCF& phi_s,
                                double alpha) {
    detail::check_same_bank(phi_t, phi_s, "class_discrepancy");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw validation_error("class_discrepancy: alpha must lie in [0,1]");
    const AmpPhaseTerms terms = amp_phase_decompose(phi_t, phi_s);
    const Eigen::Index L = phi_t.size();
    Eigen::VectorXd blend = alpha * terms.amplitude + (1.0 - alpha) * terms.cross;
    return phi_t.mass * pairwise_mean(blend.data(), static_cast<std::size_t>(L));
}

/// (mass/L) * sum_i |phi_T(t_i) - phi_S(t_i)|: the L1-integrand variant.
/// Deterministically sandwiched by the squared form on the same sums:
/// cfd <= sqrt(mass * sdd) and sdd <= 2 * cfd.
inline double cfd_mu_estimate(const EmpiricalCF& phi_t, const EmpiricalCF& phi_s) {
    detail::check_same_bank(phi_t, phi_s, "cfd_mu_estimate");
    const Eigen::Index L = phi_t.size();
    Eigen::VectorXd mag(L);
    mag = ((phi_t.re - phi_s.re).array().square() +
           (phi_t.im - phi_s.im).array().square()).sqrt();
    return phi_t.mass * pairwise_mean(mag.data(), static_cast<std::size_t>(L));
}

// --- class-aware weighting --------------------------------------------------

enum class AlphaMode { TwoPoint, LogLinear };

/// Maps per-class sample counts to the amplitude weight alpha(c): data-rich
/// classes get alpha_head, scarce classes alpha_tail, either as a median
/// split (TwoPoint) or log-count interpolation (LogLinear). Results are
/// clamped into [clamp_lo, clamp_hi].
struct AlphaPolicy {
    AlphaMode mode = AlphaMode::TwoPoint;
    double alpha_head = 0.8;
    double alpha_tail = 0.2;
    double clamp_lo = 0.05;
    double clamp_hi = 0.95;
};

inline void validate(const AlphaPolicy& p) {
    if (!(p.alpha_head >= 0.0 && p.alpha_head <= 1.0))
        throw validation_error("alpha policy: alpha_head must lie in [0,1]");
    if (!(p.alpha_tail >= 0.0 && p.alpha_tail <= 1.0))
        throw validation_error("alpha policy: alpha_tail must lie in [0,1]");
    if (!(p.clamp_lo >= 0.0 && p.clamp_hi <= 1.0 && p.clamp_lo <= p.clamp_hi))
        throw validation_error("alpha policy: clamp bounds must satisfy 0 <= lo <= hi <= 1");
}

/// alpha(c) for every class given the real per-class counts.
inline Eigen::VectorXd alpha_policy_eval(const AlphaPolicy& policy,
                                         const std::vector<Eigen::Index>& counts) {
    validate(policy);
    if (counts.empty()) throw validation_error("alpha_policy_eval: no classes");
    for (Eigen::Index n : counts)
        if (n <= 0) throw validation_error("alpha_policy_eval: class count must be positive");

    const std::size_t c = counts.size();
    Eigen::VectorXd alpha(static_cast<Eigen::Index>(c));
    auto clamp = [&](double a) {
        return std::min(policy.clamp_hi, std::max(policy.clamp_lo, a));
    };

    if (policy.mode == AlphaMode::TwoPoint) {
        std::vector<Eigen::Index> sorted(counts);
        std::sort(sorted.begin(), sorted.end());
        const double median =
            (c % 2 == 1)
                ? static_cast<double>(sorted[c / 2])
                : 0.5 * (static_cast<double>(sorted[c / 2 - 1]) +
                         static_cast<double>(sorted[c / 2]));
        for (std::size_t i = 0; i < c; ++i)
            alpha(static_cast<Eigen::Index>(i)) =
                clamp(static_cast<double>(counts[i]) >= median ? policy.alpha_head
                                                               : policy.alpha_tail);
    } else {
        Eigen::Index n_min = counts[0], n_max = counts[0];
        for (Eigen::Index n : counts) {
            n_min = std::min(n_min, n);
            n_max = std::max(n_max, n);
        }
        if (n_min == n_max) {
            alpha.setConstant(clamp(policy.alpha_head));
        } else {
            const double lo = std::log(static_cast<double>(n_min));
            const double hi = std::log(static_cast<double>(n_max));
            for (std::size_t i = 0; i < c; ++i) {
                const double frac = (std::log(static_cast<double>(counts[i])) - lo) / (hi - lo);
                alpha(static_cast<Eigen::Index>(i)) =
                    clamp(policy.alpha_tail + (policy.alpha_head - policy.alpha_tail) * frac);
            }
        }
    }
    return alpha;
}

// --- total over classes ------------------------------------------------------

struct ClassDiscrepancyReport {
    double total = 0.0;
    Eigen::VectorXd per_class;
    Eigen::VectorXd alpha;
    std::vector<Eigen::Index> real_counts;
};

/// Unweighted sum over classes of the alpha(c)-blended class discrepancy,
/// with alpha derived from the REAL per-class counts.
inline ClassDiscrepancyReport total_discrepancy(const FeatureSet& real, const FeatureSet& syn,
                                                const FrequencyBank& bank,
                                                const AlphaPolicy& policy) {
    validate(real);
    validate(syn);
    if (real.num_classes != syn.num_classes)
        throw validation_error("total_discrepancy: class count mismatch");
    if (real.dim() != syn.dim())
        throw validation_error("total_discrepancy: dimension mismatch");

    const auto counts_r = class_counts(real);
    const auto counts_s = class_counts(syn);
    for (std::uint32_t c = 0; c < real.num_classes; ++c) {
        if (counts_r[c] == 0)
            throw validation_error("total_discrepancy: class " + std::to_string(c) +
                                   " empty in the real set");
        if (counts_s[c] == 0)
            throw validation_error("total_discrepancy: class " + std::to_string(c) +
                                   " empty in the synthetic set");
    }

    ClassDiscrepancyReport report;
    report.real_counts = counts_r;
    report.alpha = alpha_policy_eval(policy, counts_r);
    report.per_class.resize(real.num_classes);
    std::vector<double> terms(real.num_classes);
    for (std::uint32_t c = 0; c < real.num_classes; ++c) {
        const EmpiricalCF phi_t = empirical_cf(class_rows(real, c), bank);
        const EmpiricalCF phi_s = empirical_cf(class_rows(syn, c), bank);
        const double d_c = class_discrepancy(phi_t, phi_s, report.alpha(c));
        report.per_class(c) = d_c;
        terms[c] = d_c;
    }
    report.total = pairwise_sum(terms.data(), terms.size());
    return report;
}

// --- analytic gradient --------------------------------------------------------

struct ClassObjective {
    double value = 0.0;     ///< class_discrepancy(real, syn) on this bank
    Eigen::MatrixXd grad;   ///< d value / d syn, same shape as syn
};

/// Value and analytic gradient of the alpha-blended class discrepancy with
/// respect to the synthetic points. Derivation: with u,v the synthetic CF
/// components, A = |phi|, per frequency
///   d/du [ alpha (A_T - A_S)^2 + (1-alpha) 2 A_T A_S (1 - cos dtheta) ]
/// collapses (using A_S^2 = u^2 + v^2 and  A_T A_S cos dtheta = u_T u + v_T v)
/// to  -K1 u - K2 u_T  with
///   K1 = (-2 alpha (A_T - A_S) + 2 (1-alpha) A_T) / A_S,  K2 = 2 (1-alpha),
/// and symmetrically for v. Chain rule through
/// u(t) = (1/M) sum_m cos(t.y_m), v(t) = (1/M) sum_m sin(t.y_m) then yields
///   grad(y_m) = (mass/L) sum_i [ sin(t_i.y_m) s_i + cos(t_i.y_m) c_i ] t_i,
///   s_i = (-u_i K1_i + u_T,i K2) / M,  c_i = (v_i K1_i - v_T,i K2) / M.
/// Frequencies where a CF magnitude falls below the phase guard contribute
/// zero, matching the guarded cross term.
inline ClassObjective class_objective_with_gradient(
    const Eigen::Ref<const Eigen::MatrixXd>& real, const Eigen::Ref<const Eigen::MatrixXd>& syn,
    const FrequencyBank& bank, double alpha) {
    if (syn.rows() == 0 || real.rows() == 0)
        throw validation_error("sdd_gradient: empty sample set");
    if (syn.cols() != bank.dim() || real.cols() != bank.dim())
        throw validation_error("sdd_gradient: sample dimension does not match bank");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw validation_error("sdd_gradient: alpha must lie in [0,1]");
    if (!real.allFinite() || !syn.allFinite())
        throw numeric_error("sdd_gradient: non-finite input");

    const EmpiricalCF phi_t = empirical_cf(real, bank);
    const Eigen::Index m = syn.rows(), L = bank.size(), d = bank.dim();
    const double inv_m = 1.0 / static_cast<double>(m);
    const double k2 = 2.0 * (1.0 - alpha);

    ClassObjective out;
    out.grad = Eigen::MatrixXd::Zero(m, d);
    Eigen::VectorXd terms(L);

    constexpr Eigen::Index kColBlock = 8192;
    Eigen::MatrixXd cosm, sinm;
    Eigen::VectorXd col(m);
    Eigen::VectorXd s_coef, c_coef;
    for (Eigen::Index j0 = 0; j0 < L; j0 += kColBlock) {
        const Eigen::Index bw = std::min(kColBlock, L - j0);
        const auto freqs = bank.freqs.middleRows(j0, bw);
        cosm.noalias() = syn * freqs.transpose();  // phases, M x bw
        sinm = cosm.array().sin();
        cosm = cosm.array().cos();

        s_coef.resize(bw);
        c_coef.resize(bw);
        for (Eigen::Index j = 0; j < bw; ++j) {
            col = cosm.col(j);
            const double u = pairwise_mean(col.data(), static_cast<std::size_t>(m));
            col = sinm.col(j);
            const double v = pairwise_mean(col.data(), static_cast<std::size_t>(m));
            const double ut = phi_t.re(j0 + j), vt = phi_t.im(j0 + j);
            if (u == ut && v == vt) {
                // Equal CF values contribute nothing to the objective or the
                // gradient; skipping keeps the stationary point exact.
                terms(j0 + j) = 0.0;
                s_coef(j) = 0.0;
                c_coef(j) = 0.0;
                continue;
            }
            const double at = std::hypot(ut, vt);
            const double as = std::hypot(u, v);

            const double diff = at - as;
            double amp = diff * diff;
            double cross = 0.0;
            const bool guarded = (at < kPhaseGuard || as < kPhaseGuard);
            if (!guarded) {
                double cos_delta = (ut * u + vt * v) / (at * as);
                cos_delta = std::min(1.0, std::max(-1.0, cos_delta));
                cross = 2.0 * at * as * (1.0 - cos_delta);
            }
            terms(j0 + j) = alpha * amp + (1.0 - alpha) * cross;

            if (as < kPhaseGuard) {
                // |phi_S| = 0 is a kink of the amplitude term and the guard
                // zeroes the cross term, so this frequency contributes no
                // gradient.
                s_coef(j) = 0.0;
                c_coef(j) = 0.0;
            } else if (guarded) {
                const double k1_amp = -2.0 * alpha * diff / as;
                s_coef(j) = -u * k1_amp * inv_m;
                c_coef(j) = v * k1_amp * inv_m;
            } else {
                const double k1 = (-2.0 * alpha * diff + k2 * at) / as;
                s_coef(j) = (-u * k1 + ut * k2) * inv_m;
                c_coef(j) = (v * k1 - vt * k2) * inv_m;
            }
        }
        // G = sin .* s_coef + cos .* c_coef (column-wise scaling), then G * freqs.
        sinm.array().rowwise() *= s_coef.transpose().array();
        cosm.array().rowwise() *= c_coef.transpose().array();
        sinm += cosm;
        out.grad.noalias() += sinm * freqs;
    }

    const double scale = bank.mass / static_cast<double>(L);
    out.value = bank.mass * pairwise_mean(terms.data(), static_cast<std::size_t>(L));
    out.grad *= scale;
    return out;
}

/// Gradient of class_discrepancy with respect to the synthetic points.
inline Eigen::MatrixXd sdd_gradient(const Eigen::Ref<const Eigen::MatrixXd>& real,
                                    const Eigen::Ref<const Eigen::MatrixXd>& syn,
                                    const FrequencyBank& bank, double alpha) {
    return class_objective_with_gradient(real, syn, bank, alpha).grad;
}

// --- diagnostic CSV dumps ----------------------------------------------------

/// Per-frequency decomposition table (freq_index, amp_term, cross_term, sq_diff).
inline void write_frequency_diagnostics(std::ostream& os, const EmpiricalCF& phi_t,
                                        const EmpiricalCF& phi_s) {
    const AmpPhaseTerms terms = amp_phase_decompose(phi_t, phi_s);
    os << "freq_index,amp_term,cross_term,sq_diff\n";
    for (Eigen::Index i = 0; i < phi_t.size(); ++i) {
        const double dre = phi_t.re(i) - phi_s.re(i);
        const double dim = phi_t.im(i) - phi_s.im(i);
        os << i << "," << format_double(terms.amplitude(i)) << ","
           << format_double(terms.cross(i)) << "," << format_double(dre * dre + dim * dim)
           << "\n";
    }
    if (!os) throw io_error("write_frequency_diagnostics: stream write failed");
}

inline void write_frequency_diagnostics(const std::string& path, const EmpiricalCF& phi_t,
                                        const EmpiricalCF& phi_s) {
    std::ofstream os(path);
    if (!os)
        throw io_error("write_frequency_diagnostics: cannot open '" + path + "' for writing");
    write_frequency_diagnostics(os, phi_t, phi_s);
}

/// Per-class weighting table (class, count, alpha, d_c).
inline void write_class_diagnostics(std::ostream& os, const ClassDiscrepancyReport& report) {
    os << "class,count,alpha,d_c\n";
    for (Eigen::Index c = 0; c < report.per_class.size(); ++c)
        os << c << "," << report.real_counts[static_cast<std::size_t>(c)] << ","
           << format_double(report.alpha(c)) << "," << format_double(report.per_class(c))
           << "\n";
    if (!os) throw io_error("write_class_diagnostics: stream write failed");
}

inline void write_class_diagnostics(const std::string& path,
                                    const ClassDiscrepancyReport& report) {
    std::ofstream os(path);
    if (!os) throw io_error("write_class_diagnostics: cannot open '" + path + "' for writing");
    write_class_diagnostics(os, report);
}

}  // namespace sdm
