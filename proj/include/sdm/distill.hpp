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
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "sdm/common.hpp"
#include "sdm/feature_set.hpp"
#include "sdm/frequency_bank.hpp"
#include "sdm/kernel.hpp"
#include "sdm/rng.hpp"
#include "sdm/spectral.hpp"

namespace sdm {

enum class InitStrategy { RandomReal, ClassMeanJitter };

/// Hyperparameters of the gradient-descent distillation loop. The kernel
/// must be shift-invariant (the objective lives in its frequency domain).
/// Training banks are resampled every iteration from (master_seed, iteration)
/// unless freeze_bank pins iteration 0's bank; progress is scored on a
/// separate frozen verification bank of eval_bank_size frequencies every
/// eval_every iterations.
struct DistillConfig {
    KernelSpec kernel;                     ///< default rbf, gamma = 2
    Eigen::Index ipc = 10;                 ///< synthetic points per class
    long iterations = 2000;
    double learning_rate = 0.05;
    Eigen::Index bank_size = 1024;         ///< training-bank L
    bool freeze_bank = false;
    InitStrategy init = InitStrategy::RandomReal;
    AlphaPolicy policy;
    std::uint64_t master_seed = 1;
    long eval_every = 100;
    Eigen::Index eval_bank_size = 50000;   ///< verification-bank L
};

inline void validate(const DistillConfig& cfg) {
    validate(cfg.kernel);
    if (!is_shift_invariant(cfg.kernel.kind))
        throw validation_error("distill config: kernel must be shift-invariant");
    validate(cfg.policy);
    if (cfg.ipc < 1) throw validation_error("distill config: ipc must be >= 1");
    if (cfg.iterations < 0)
        throw validation_error("distill config: iterations must be >= 0");
    if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate))
        throw validation_error("distill config: learning_rate must be positive");
    if (cfg.bank_size < 1) throw validation_error("distill config: bank_size must be >= 1");
    if (cfg.eval_every < 1) throw validation_error("distill config: eval_every must be >= 1");
    if (cfg.eval_bank_size < 1)
        throw validation_error("distill config: eval_bank_size must be >= 1");
}

/// One verification-bank measurement during a run.
struct TracePoint {
    long iteration = 0;
    double objective = 0.0;
    Eigen::VectorXd per_class;
};

/// Per-class quality proxies of a synthetic set: d_c from the discrepancy
/// report, mean pairwise distance among the class's synthetic points
/// (diversity; 0 when ipc = 1), and mean nearest-real-neighbor distance
/// (realism; 0 when synthetic points sit on real ones).
struct EvalReport {
    ClassDiscrepancyReport discrepancy;
    Eigen::VectorXd diversity;
    Eigen::VectorXd realism;
};

struct DistillResult {
    FeatureSet synthetic;
    std::vector<TracePoint> trace;   ///< verification-bank objective over time
    Eigen::VectorXd alpha;           ///< per-class weights used throughout
    Eigen::VectorXd per_class_final;
    Eigen::VectorXd diversity;
    Eigen::VectorXd realism;

    double initial_objective() const { return trace.front().objective; }
    double final_objective() const { return trace.back().objective; }
};

/// Builds the starting synthetic set: ipc rows per class, grouped by class.
/// RandomReal draws real rows (without replacement while the class has
/// enough, with replacement otherwise); ClassMeanJitter places the class
/// mean plus Gaussian noise of standard deviation jitter_sigma (0 collapses
/// every point onto the class mean exactly).
inline FeatureSet init_synthetic(const FeatureSet& real, Eigen::Index ipc,
                                 InitStrategy strategy, std::uint64_t seed,
                                 double jitter_sigma = 0.1) {
    validate(real);
    if (ipc < 1) throw validation_error("init_synthetic: ipc must be >= 1");
    if (jitter_sigma < 0.0 || !std::isfinite(jitter_sigma))
        throw validation_error("init_synthetic: jitter_sigma must be finite and >= 0");
    const auto counts = class_counts(real);
    for (std::uint32_t c = 0; c < real.num_classes; ++c)
        if (counts[c] == 0)
            throw validation_error("init_synthetic: class " + std::to_string(c) +
                                   " has no real samples");

    FeatureSet syn;
    syn.num_classes = real.num_classes;
    syn.features.resize(static_cast<Eigen::Index>(real.num_classes) * ipc, real.dim());
    syn.labels.resize(static_cast<std::size_t>(syn.features.rows()));

    Eigen::Index row = 0;
    for (std::uint32_t c = 0; c < real.num_classes; ++c) {
        const Eigen::MatrixXd rows = class_rows(real, c);
        const Eigen::Index n = rows.rows();
        const std::uint64_t class_seed = rng::derive_seed(seed, "init-class", c);

        if (strategy == InitStrategy::RandomReal) {
            if (n >= ipc) {
                // Partial Fisher-Yates: first ipc entries of a seeded shuffle.
                std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
                for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
                for (Eigen::Index k = 0; k < ipc; ++k) {
                    const double u = rng::uniform_at(class_seed, static_cast<std::uint64_t>(k));
                    const Eigen::Index j =
                        k + std::min<Eigen::Index>(n - k - 1,
                                                   static_cast<Eigen::Index>(
                                                       u * static_cast<double>(n - k)));
                    std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(j)]);
                    syn.features.row(row + k) = rows.row(idx[static_cast<std::size_t>(k)]);
                }
            } else {
                for (Eigen::Index k = 0; k < ipc; ++k) {
                    const double u = rng::uniform_at(class_seed, static_cast<std::uint64_t>(k));
                    const Eigen::Index j = std::min<Eigen::Index>(
                        n - 1, static_cast<Eigen::Index>(u * static_cast<double>(n)));
                    syn.features.row(row + k) = rows.row(j);
                }
            }
        } else {
            const Eigen::RowVectorXd mean = rows.colwise().mean();
            const Eigen::Index d = real.dim();
            for (Eigen::Index k = 0; k < ipc; ++k) {
                for (Eigen::Index j = 0; j < d; ++j)
                    syn.features(row + k, j) =
                        mean(j) + jitter_sigma * rng::normal_at(
                                                     class_seed,
                                                     static_cast<std::uint64_t>(k * d + j));
            }
        }
        for (Eigen::Index k = 0; k < ipc; ++k)
            syn.labels[static_cast<std::size_t>(row + k)] = c;
        row += ipc;
    }
    return syn;
}

/// Objective measured by one training step (before the update).
struct StepResult {
    double objective = 0.0;
    Eigen::VectorXd per_class;
};

/// One stochastic descent step on this iteration's frequency bank: for each
/// class, take the analytic gradient of the alpha(c)-blended discrepancy and
/// move the class's synthetic rows against it. Returns the pre-step
/// objective on the same bank.
inline StepResult distill_step(const FeatureSet& real, FeatureSet& syn,
                               const DistillConfig& cfg, long iteration) {
    validate(cfg);
    validate(real);
    validate(syn);
    if (real.num_classes != syn.num_classes)
        throw validation_error("distill_step: class count mismatch");
    if (real.dim() != syn.dim()) throw validation_error("distill_step: dimension mismatch");

    const auto counts = class_counts(real);
    const Eigen::VectorXd alpha = alpha_policy_eval(cfg.policy, counts);

    const std::uint64_t bank_seed = rng::derive_seed(
        cfg.master_seed, "bank",
        cfg.freeze_bank ? 0 : static_cast<std::uint64_t>(iteration));
    const FrequencyBank bank = spectral_sample(cfg.kernel, cfg.bank_size, real.dim(), bank_seed);

    // Locate each class's synthetic rows once; updates go back in place.
    std::vector<std::vector<Eigen::Index>> syn_rows(real.num_classes);
    for (Eigen::Index i = 0; i < syn.size(); ++i)
        syn_rows[syn.labels[static_cast<std::size_t>(i)]].push_back(i);

    StepResult result;
    result.per_class.resize(real.num_classes);
    std::vector<double> terms(real.num_classes);
    for (std::uint32_t c = 0; c < real.num_classes; ++c) {
        if (syn_rows[c].empty())
            throw validation_error("distill_step: class " + std::to_string(c) +
                                   " empty in the synthetic set");
        Eigen::MatrixXd syn_c(static_cast<Eigen::Index>(syn_rows[c].size()), syn.dim());
        for (std::size_t k = 0; k < syn_rows[c].size(); ++k)
            syn_c.row(static_cast<Eigen::Index>(k)) = syn.features.row(syn_rows[c][k]);

        const ClassObjective obj =
            class_objective_with_gradient(class_rows(real, c), syn_c, bank, alpha(c));
        if (!obj.grad.allFinite())
            throw numeric_error("distill_step: non-finite gradient for class " +
                                std::to_string(c) + " at iteration " +
                                std::to_string(iteration));
        result.per_class(c) = obj.value;
        terms[c] = obj.value;

        syn_c -= cfg.learning_rate * obj.grad;
        for (std::size_t k = 0; k < syn_rows[c].size(); ++k)
            syn.features.row(syn_rows[c][k]) = syn_c.row(static_cast<Eigen::Index>(k));
    }
    result.objective = pairwise_sum(terms.data(), terms.size());
    return result;
}

/// Per-class diversity/realism proxies plus the discrepancy report on the
/// given bank.
inline EvalReport evaluate_synthetic(const FeatureSet& real, const FeatureSet& syn,
                                     const FrequencyBank& bank, const AlphaPolicy& policy) {
    EvalReport report;
    report.discrepancy = total_discrepancy(real, syn, bank, policy);
    const std::uint32_t c_total = real.num_classes;
    report.diversity.resize(c_total);
    report.realism.resize(c_total);
    for (std::uint32_t c = 0; c < c_total; ++c) {
        const Eigen::MatrixXd syn_c = class_rows(syn, c);
        const Eigen::MatrixXd real_c = class_rows(real, c);
        const Eigen::Index m = syn_c.rows();

        double pair_acc = 0.0;
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = i + 1; j < m; ++j)
                pair_acc += (syn_c.row(i) - syn_c.row(j)).norm();
        report.diversity(c) =
            m < 2 ? 0.0 : pair_acc / (0.5 * static_cast<double>(m) * static_cast<double>(m - 1));

        double nn_acc = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index j = 0; j < real_c.rows(); ++j)
                best = std::min(best, (syn_c.row(i) - real_c.row(j)).norm());
            nn_acc += best;
        }
        report.realism(c) = nn_acc / static_cast<double>(m);
    }
    return report;
}

/// Full distillation run: init, iterate distill_step, score on a frozen
/// verification bank at iteration 0, every eval_every iterations, and at the
/// end; final set is evaluated for diversity/realism on the same bank.
inline DistillResult run_distillation(const FeatureSet& real, const DistillConfig& cfg) {
    validate(cfg);
    validate(real);
    const auto counts = class_counts(real);
    for (std::uint32_t c = 0; c < real.num_classes; ++c)
        if (counts[c] == 0)
            throw validation_error("run_distillation: class " + std::to_string(c) +
                                   " has no real samples");

    DistillResult result;
    result.alpha = alpha_policy_eval(cfg.policy, counts);
    result.synthetic = init_synthetic(real, cfg.ipc, cfg.init,
                                      rng::derive_seed(cfg.master_seed, "init", 0));

    // Spot-check the analytic gradient against central differences on one
    // randomly chosen (class, point, dimension) triple before trusting it
    // for thousands of updates.
    {
        const std::uint64_t gc = rng::derive_seed(cfg.master_seed, "gradcheck", 0);
        auto pick = [&](std::uint64_t slot, Eigen::Index limit) {
            return std::min<Eigen::Index>(
                limit - 1,
                static_cast<Eigen::Index>(rng::uniform_at(gc, slot) *
                                          static_cast<double>(limit)));
        };
        const auto c = static_cast<std::uint32_t>(
            pick(0, static_cast<Eigen::Index>(real.num_classes)));
        const Eigen::Index p = pick(1, cfg.ipc);
        const Eigen::Index d = pick(2, real.dim());

        const FrequencyBank check_bank =
            spectral_sample(cfg.kernel, cfg.bank_size, real.dim(),
                            rng::derive_seed(cfg.master_seed, "bank", 0));
        const Eigen::MatrixXd real_c = class_rows(real, c);
        const Eigen::MatrixXd syn_c = class_rows(result.synthetic, c);
        const ClassObjective obj =
            class_objective_with_gradient(real_c, syn_c, check_bank, result.alpha(c));

        const EmpiricalCF phi_t = empirical_cf(real_c, check_bank);
        const double h = 1e-5;
        Eigen::MatrixXd plus = syn_c, minus = syn_c;
        plus(p, d) += h;
        minus(p, d) -= h;
        const double fd =
            (class_discrepancy(phi_t, empirical_cf(plus, check_bank), result.alpha(c)) -
             class_discrepancy(phi_t, empirical_cf(minus, check_bank), result.alpha(c))) /
            (2.0 * h);
        const double denom = std::max({std::abs(obj.grad(p, d)), std::abs(fd), 1e-3});
        if (std::abs(obj.grad(p, d) - fd) > 1e-4 * denom)
            throw numeric_error(
                "run_distillation: analytic gradient disagrees with finite differences "
                "(class " + std::to_string(c) + ", point " + std::to_string(p) +
                ", dim " + std::to_string(d) + ": analytic " +
                format_double(obj.grad(p, d)) + " vs fd " + format_double(fd) + ")");
    }

    const FrequencyBank verify_bank =
        spectral_sample(cfg.kernel, cfg.eval_bank_size, real.dim(),
                        rng::derive_seed(cfg.master_seed, "verify", 0));

    // The real per-class CFs on the frozen bank never change; cache them.
    std::vector<EmpiricalCF> real_cfs(real.num_classes);
    for (std::uint32_t c = 0; c < real.num_classes; ++c)
        real_cfs[c] = empirical_cf(class_rows(real, c), verify_bank);

    auto record = [&](long iteration) {
        TracePoint point;
        point.iteration = iteration;
        point.per_class.resize(real.num_classes);
        std::vector<double> terms(real.num_classes);
        for (std::uint32_t c = 0; c < real.num_classes; ++c) {
            const EmpiricalCF phi_s = empirical_cf(class_rows(result.synthetic, c), verify_bank);
            point.per_class(c) = class_discrepancy(real_cfs[c], phi_s, result.alpha(c));
            terms[c] = point.per_class(c);
        }
        point.objective = pairwise_sum(terms.data(), terms.size());
        result.trace.push_back(std::move(point));
    };

    record(0);
    for (long it = 0; it < cfg.iterations; ++it) {
        distill_step(real, result.synthetic, cfg, it);
        if ((it + 1) % cfg.eval_every == 0 || it + 1 == cfg.iterations) record(it + 1);
    }

    const EvalReport eval =
        evaluate_synthetic(real, result.synthetic, verify_bank, cfg.policy);
    result.per_class_final = result.trace.back().per_class;
    result.diversity = eval.diversity;
    result.realism = eval.realism;
    return result;
}

// --- run artifacts ------------------------------------------------------------

/// trace.csv: iteration, objective, per_class_0..per_class_{C-1}.
inline void write_trace_csv(std::ostream& os, const std::vector<TracePoint>& trace) {
    if (trace.empty()) throw validation_error("write_trace_csv: empty trace");
    os << "iteration,objective";
    for (Eigen::Index c = 0; c < trace.front().per_class.size(); ++c)
        os << ",per_class_" << c;
    os << "\n";
    for (const TracePoint& p : trace) {
        os << p.iteration << "," << format_double(p.objective);
        for (Eigen::Index c = 0; c < p.per_class.size(); ++c)
            os << "," << format_double(p.per_class(c));
        os << "\n";
    }
    if (!os) throw io_error("write_trace_csv: stream write failed");
}

inline void write_trace_csv(const std::string& path, const std::vector<TracePoint>& trace) {
    std::ofstream os(path);
    if (!os) throw io_error("write_trace_csv: cannot open '" + path + "' for writing");
    write_trace_csv(os, trace);
}

/// final_report.csv: class, count_real, ipc, alpha, d_c, diversity, realism.
inline void write_final_report_csv(std::ostream& os, const DistillResult& result,
                                   const std::vector<Eigen::Index>& real_counts,
                                   Eigen::Index ipc) {
    os << "class,count_real,ipc,alpha,d_c,diversity,realism\n";
    for (Eigen::Index c = 0; c < result.per_class_final.size(); ++c) {
        os << c << "," << real_counts[static_cast<std::size_t>(c)] << "," << ipc << ","
           << format_double(result.alpha(c)) << "," << format_double(result.per_class_final(c))
           << "," << format_double(result.diversity(c)) << ","
           << format_double(result.realism(c)) << "\n";
    }
    if (!os) throw io_error("write_final_report_csv: stream write failed");
}

inline void write_final_report_csv(const std::string& path, const DistillResult& result,
                                   const std::vector<Eigen::Index>& real_counts,
                                   Eigen::Index ipc) {
    std::ofstream os(path);
    if (!os) throw io_error("write_final_report_csv: cannot open '" + path + "' for writing");
    write_final_report_csv(os, result, real_counts, ipc);
}

}  // namespace sdm
