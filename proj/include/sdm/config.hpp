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

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sdm/common.hpp"
#include "sdm/distill.hpp"
#include "sdm/kernel.hpp"
#include "sdm/longtail.hpp"
#include "sdm/spectral.hpp"

namespace sdm {

/// Everything an experiment run needs, assembled from flat `section.key=value`
/// text. Later entries override earlier ones, so the precedence chain is
/// defaults < config file < command-line overrides.
struct ExperimentConfig {
    KernelSpec kernel;   // kernel.*
    LongTailSpec data;   // data.*
    AlphaPolicy alpha;   // alpha.*

    // distill.*
    Eigen::Index ipc = 10;
    long iterations = 2000;
    double learning_rate = 0.05;
    Eigen::Index bank_size = 1024;
    bool freeze_bank = false;
    InitStrategy init = InitStrategy::RandomReal;
    long eval_every = 100;
    Eigen::Index eval_bank_size = 50000;

    // verify.*
    struct VerifySizes {
        int pairs = 5;
        Eigen::Index samples = 200;
        Eigen::Index bank_size = 50000;
        int cf_pairs = 1000;
        int sandwich_pairs = 100;
        int grad_instances = 5;
    } verify;

    // bench.*
    struct BenchSizes {
        Eigen::Index dim = 16;
        Eigen::Index bank_size = 1024;
        int reps = 3;
    } bench;

    // run.*
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    bool diagnostics = false;

    /// The distillation engine's view of this config.
    DistillConfig distill_config() const {
        DistillConfig cfg;
        cfg.kernel = kernel;
        cfg.ipc = ipc;
        cfg.iterations = iterations;
        cfg.learning_rate = learning_rate;
        cfg.bank_size = bank_size;
        cfg.freeze_bank = freeze_bank;
        cfg.init = init;
        cfg.policy = alpha;
        cfg.master_seed = seed;
        cfg.eval_every = eval_every;
        cfg.eval_bank_size = eval_bank_size;
        return cfg;
    }
};

namespace detail {

inline std::string where(int line) {
    return line > 0 ? "config line " + std::to_string(line) + ": " : "override: ";
}

inline double kv_double(const KvEntry& e) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(e.value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != e.value.size() || !std::isfinite(v))
        throw validation_error(where(e.line) + "expected a number for '" + e.key + "', got '" +
                               e.value + "'");
    return v;
}

inline long long kv_int(const KvEntry& e) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(e.value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != e.value.size())
        throw validation_error(where(e.line) + "expected an integer for '" + e.key +
                               "', got '" + e.value + "'");
    return v;
}

inline std::uint64_t kv_u64(const KvEntry& e) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        // stoull would silently wrap negative input around 2^64.
        if (e.value.find('-') == std::string::npos) v = std::stoull(e.value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != e.value.size())
        throw validation_error(where(e.line) + "expected an unsigned integer for '" + e.key +
                               "', got '" + e.value + "'");
    return v;
}

inline bool kv_bool(const KvEntry& e) {
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    throw validation_error(where(e.line) + "expected a boolean for '" + e.key + "', got '" +
                           e.value + "'");
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    return parts;
}

/// data.means grammar: classes separated by '|', components by ';',
/// coordinates by ','. Example: "0,0;1,1|3,0" is two classes, the first a
/// two-component mixture.
inline std::vector<std::vector<Eigen::VectorXd>> kv_means(const KvEntry& e) {
    std::vector<std::vector<Eigen::VectorXd>> means;
    for (const std::string& cls : split(e.value, '|')) {
        std::vector<Eigen::VectorXd> comps;
        for (const std::string& comp : split(cls, ';')) {
            const auto coords = split(comp, ',');
            Eigen::VectorXd mu(static_cast<Eigen::Index>(coords.size()));
            for (std::size_t i = 0; i < coords.size(); ++i) {
                const std::string tok(trim(coords[i]));
                std::size_t used = 0;
                double v = 0.0;
                try {
                    v = std::stod(tok, &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used != tok.size() || !std::isfinite(v))
                    throw validation_error(where(e.line) + "bad coordinate '" + tok + "' in '" +
                                           e.key + "'");
                mu(static_cast<Eigen::Index>(i)) = v;
            }
            comps.push_back(std::move(mu));
        }
        means.push_back(std::move(comps));
    }
    return means;
}

inline std::vector<std::vector<double>> kv_weights(const KvEntry& e) {
    std::vector<std::vector<double>> weights;
    for (const std::string& cls : split(e.value, '|')) {
        std::vector<double> ws;
        for (const std::string& tok_raw : split(cls, ';')) {
            const std::string tok(trim(tok_raw));
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok.size() || !std::isfinite(v))
                throw validation_error(where(e.line) + "bad weight '" + tok + "' in '" + e.key +
                                       "'");
            ws.push_back(v);
        }
        weights.push_back(std::move(ws));
    }
    return weights;
}

}  // namespace detail

/// Applies one key=value entry. Unknown keys are rejected by name; type
/// mismatches report the config line.
inline void apply_config_entry(ExperimentConfig& cfg, const KvEntry& e) {
    using detail::kv_bool;
    using detail::kv_double;
    using detail::kv_int;
    using detail::kv_u64;
    using detail::where;

    const std::string& k = e.key;
    if (k == "kernel.kind") {
        cfg.kernel.kind = kernel_kind_from_name(e.value);
    } else if (k == "kernel.gamma") {
        cfg.kernel.gamma = kv_double(e);
    } else if (k == "kernel.degree") {
        cfg.kernel.degree = static_cast<int>(kv_int(e));
    } else if (k == "kernel.offset") {
        cfg.kernel.offset = kv_double(e);
    } else if (k == "kernel.slope") {
        cfg.kernel.slope = kv_double(e);
    } else if (k == "kernel.omega") {
        cfg.kernel.omega = kv_double(e);
    } else if (k == "data.classes") {
        cfg.data.num_classes = static_cast<std::uint32_t>(kv_int(e));
    } else if (k == "data.base") {
        cfg.data.base_count = static_cast<Eigen::Index>(kv_int(e));
    } else if (k == "data.beta") {
        cfg.data.beta = kv_double(e);
    } else if (k == "data.dim") {
        cfg.data.dim = static_cast<Eigen::Index>(kv_int(e));
    } else if (k == "data.cov") {
        cfg.data.cov_scale = kv_double(e);
    } else if (k == "data.radius") {
        cfg.data.radius = kv_double(e);
    } else if (k == "data.means") {
        cfg.data.means = detail::kv_means(e);
    } else if (k == "data.weights") {
        cfg.data.weights = detail::kv_weights(e);
    } else if (k == "alpha.head") {
        cfg.alpha.alpha_head = kv_double(e);
    } else if (k == "alpha.tail") {
        cfg.alpha.alpha_tail = kv_double(e);
    } else if (k == "alpha.mode") {
        if (e.value == "two_point")
            cfg.alpha.mode = AlphaMode::TwoPoint;
        else if (e.value == "log_linear")
            cfg.alpha.mode = AlphaMode::LogLinear;
        else
            throw validation_error(where(e.line) +
                                   "alpha.mode must be two_point or log_linear, got '" +
                                   e.value + "'");
    } else if (k == "alpha.clamp_lo") {
        cfg.alpha.clamp_lo = kv_double(e);
    } else if (k == "alpha.clamp_hi") {
        cfg.alpha.clamp_hi = kv_double(e);
    } else if (k == "distill.ipc") {
        cfg.ipc = static_cast<Eigen::Index>(kv_int(e));
    } else if (k == "distill.iterations") {
        cfg.iterations = static_cast<long>(kv_int(e));
    } else if (k == "distill.lr") {
        cfg.learning_rate = kv_double(e);
    } else if (k == "distill.bank_size") {
        cfg.bank_size = static_cast<Eigen::Index>(kv_int(e));
    } else if (k == "distill.freeze_bank") {
        cfg.freeze_bank = kv_bool(e);
    } else if (k == "distill.init") {
        if (e.value == "random_real")
            cfg.init = InitStrategy::RandomReal;
        else if (e.value == "class_mean_jitter")
            cfg.init = InitStrategy::ClassMeanJitter;
        else
            throw validation_error(where(e.line) +
                                   "distill.init must be random_real or class_mean_jitter, "
                                   "got '" + e.value + "'");
    } else if (k == "distill.eval_every") {
        cfg.eval_every = static_cast<long>(kv_int(e));
    } else if (k == "distill.eval_bank") {
        cfg.eval_bank_size = static_cast<Eigen::Index>(kv_int(e));
    } else if (k == "verify.pairs") {
        cfg.verify.pairs = static_cast<int>(kv_int(e));
    } else if (k == "verify.samples") {
        cfg.verify.samples = static_cast<Eigen::Index>(kv_int(e));
    } else if (k == "verify.bank_size") {
        cfg.verify.bank_size = static_cast<Eigen::Index>(kv_int(e));
    } else if (k == "verify.cf_pairs") {
        cfg.verify.cf_pairs = static_cast<int>(kv_int(e));
    } else if (k == "verify.sandwich_pairs") {
        cfg.verify.sandwich_pairs = static_cast<int>(kv_int(e));
    } else if (k == "verify.grad_instances") {
        cfg.verify.grad_instances = static_cast<int>(kv_int(e));
    } else if (k == "bench.dim") {
        cfg.bench.dim = static_cast<Eigen::Index>(kv_int(e));
    } else if (k == "bench.bank_size") {
        cfg.bench.bank_size = static_cast<Eigen::Index>(kv_int(e));
    } else if (k == "bench.reps") {
        cfg.bench.reps = static_cast<int>(kv_int(e));
    } else if (k == "run.seed") {
        cfg.seed = kv_u64(e);
    } else if (k == "run.out") {
        cfg.out_dir = e.value;
    } else if (k == "run.diagnostics") {
        cfg.diagnostics = kv_bool(e);
    } else {
        throw validation_error(where(e.line) + "unknown config key '" + k + "'");
    }
}

inline void validate(const ExperimentConfig& cfg) {
    validate(cfg.kernel);
    validate(cfg.data);
    validate(cfg.alpha);
    validate(cfg.distill_config());
    if (cfg.verify.pairs < 1 || cfg.verify.cf_pairs < 1 || cfg.verify.sandwich_pairs < 1 ||
        cfg.verify.grad_instances < 1)
        throw validation_error("config: verify.* counts must be >= 1");
    if (cfg.verify.samples < 2 || cfg.verify.bank_size < 2)
        throw validation_error("config: verify.samples and verify.bank_size must be >= 2");
    if (cfg.bench.dim < 1 || cfg.bench.bank_size < 1 || cfg.bench.reps < 1)
        throw validation_error("config: bench.* sizes must be >= 1");
    if (cfg.out_dir.empty()) throw validation_error("config: run.out must not be empty");
}

/// Parses flat config text into a fully validated config.
inline ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    for (const KvEntry& e : parse_kv_text(text)) apply_config_entry(cfg, e);
    validate(cfg);
    return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw validation_error("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

/// Applies `key=value` override strings (e.g. from --set flags) on top of an
/// already-parsed config, then re-validates.
inline void apply_overrides(ExperimentConfig& cfg, const std::vector<std::string>& overrides) {
    for (const std::string& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos)
            throw validation_error("override '" + o + "' is not of the form key=value");
        KvEntry e;
        e.key = std::string(trim(o.substr(0, eq)));
        e.value = std::string(trim(o.substr(eq + 1)));
        e.line = 0;
        if (e.key.empty()) throw validation_error("override '" + o + "' has an empty key");
        apply_config_entry(cfg, e);
    }
    validate(cfg);
}

}  // namespace sdm
