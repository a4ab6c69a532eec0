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
#include <chrono>
#include <ostream>
#include <string>
#include <vector>

#include "sdm/common.hpp"
#include "sdm/frequency_bank.hpp"
#include "sdm/kernel.hpp"
#include "sdm/mmd.hpp"
#include "sdm/rng.hpp"
#include "sdm/spectral.hpp"

namespace sdm::bench {

struct BenchOptions {
    Eigen::Index dim = 16;
    Eigen::Index bank_size = 1024;
    int reps = 3;                  ///< repetitions per cell; minimum is kept
    std::uint64_t seed = 1;
    std::vector<Eigen::Index> sizes = {512, 1024, 2048, 4096};
};

struct BenchRow {
    std::string method;  ///< "sdd" or "gram"
    Eigen::Index n = 0;
    double seconds = 0.0;
    double ratio_vs_prev = 1.0;  ///< seconds / previous size's seconds, same method
};

/// Times the frequency-domain pipeline (two empirical CFs + the spectral
/// estimate, O(NLD)) against the Gram-matrix MMD^2 (O(N^2 D)) over growing
/// N. The spectral column should scale linearly, the Gram column
/// quadratically.
inline std::vector<BenchRow> run_bench(const BenchOptions& opt) {
    if (opt.sizes.empty()) throw validation_error("run_bench: no sizes");
    if (opt.reps < 1) throw validation_error("run_bench: reps must be >= 1");
    const KernelSpec spec{KernelKind::RBF, 2.0, 2, 1.0, 1.0, 1.0};

    Eigen::Index n_max = 0;
    for (Eigen::Index n : opt.sizes) {
        if (n < 1) throw validation_error("run_bench: sizes must be positive");
        n_max = std::max(n_max, n);
    }

    // One data pool per side; each cell times a prefix of it.
    Eigen::MatrixXd x(n_max, opt.dim), y(n_max, opt.dim);
    const std::uint64_t sx = rng::derive_seed(opt.seed, "bench-x", 0);
    const std::uint64_t sy = rng::derive_seed(opt.seed, "bench-y", 0);
    for (Eigen::Index i = 0; i < n_max; ++i) {
        for (Eigen::Index j = 0; j < opt.dim; ++j) {
            const auto idx = static_cast<std::uint64_t>(i * opt.dim + j);
            x(i, j) = rng::normal_at(sx, idx);
            y(i, j) = 0.3 + rng::normal_at(sy, idx);
        }
    }
    const FrequencyBank bank = spectral_sample(spec, opt.bank_size, opt.dim,
                                               rng::derive_seed(opt.seed, "bench-bank", 0));

    volatile double sink = 0.0;  // keep the timed work observable
    auto time_min = [&](auto&& fn) {
        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r < opt.reps; ++r) {
            const auto t0 = std::chrono::steady_clock::now();
            sink = sink + fn();
            const auto t1 = std::chrono::steady_clock::now();
            best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
        }
        return best;
    };

    std::vector<BenchRow> rows;
    for (const char* method : {"sdd", "gram"}) {
        double prev = 0.0;
        for (Eigen::Index n : opt.sizes) {
            const auto xn = x.topRows(n);
            const auto yn = y.topRows(n);
            BenchRow row;
            row.method = method;
            row.n = n;
            if (std::string(method) == "sdd") {
                row.seconds = time_min([&] {
                    return sdd_estimate(empirical_cf(xn, bank), empirical_cf(yn, bank)).value;
                });
            } else {
                row.seconds = time_min([&] { return mmd2_biased(spec, xn, yn); });
            }
            row.ratio_vs_prev = prev > 0.0 ? row.seconds / prev : 1.0;
            prev = row.seconds;
            rows.push_back(row);
        }
    }
    return rows;
}

/// bench.csv: method, N, seconds, ratio_vs_prev.
inline void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
    os << "method,n,seconds,ratio_vs_prev\n";
    for (const BenchRow& r : rows)
        os << r.method << "," << r.n << "," << format_double(r.seconds) << ","
           << format_double(r.ratio_vs_prev) << "\n";
    if (!os) throw io_error("write_bench_csv: stream write failed");
}

}  // namespace sdm::bench
