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

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sdm/sdm.hpp"

namespace fs = std::filesystem;

namespace {

// Exit codes: 0 success, 1 validation error, 2 runtime/numerical error,
// 3 property-suite failure.
constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitPropertyFailure = 3;

/// Flags shared by all subcommands. Named shorthands are collected as
/// dotted-key overrides applied after --set, giving the precedence chain
/// defaults < config file < --set < named flags.
struct CommonArgs {
    std::string config_path;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<long> bank_size;
    std::optional<double> gamma;
    std::optional<double> beta;
    std::optional<long> ipc;
    std::optional<long> iterations;
    std::optional<double> learning_rate;
    bool freeze_bank = false;
    bool diagnostics = false;
};

void add_common_flags(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "flat section.key=value config file");
    cmd->add_option("--set", args.sets, "dotted-key override, e.g. --set data.beta=100")
        ->take_all();
    cmd->add_option("--seed", args.seed, "master seed (run.seed)");
    cmd->add_option("--out", args.out_dir, "output directory (run.out)");
    cmd->add_option("--gamma", args.gamma, "kernel scale (kernel.gamma)");
    cmd->add_option("--beta", args.beta, "imbalance factor (data.beta)");
}

sdm::ExperimentConfig assemble_config(const CommonArgs& args, const std::string& bank_key) {
    sdm::ExperimentConfig cfg;
    if (!args.config_path.empty()) cfg = sdm::parse_config_file(args.config_path);

    std::vector<std::string> overrides = args.sets;
    auto push = [&](const std::string& key, const std::string& value) {
        overrides.push_back(key + "=" + value);
    };
    if (args.seed) push("run.seed", std::to_string(*args.seed));
    if (args.out_dir) push("run.out", *args.out_dir);
    if (args.bank_size) push(bank_key, std::to_string(*args.bank_size));
    if (args.gamma) push("kernel.gamma", sdm::format_double(*args.gamma));
    if (args.beta) push("data.beta", sdm::format_double(*args.beta));
    if (args.ipc) push("distill.ipc", std::to_string(*args.ipc));
    if (args.iterations) push("distill.iterations", std::to_string(*args.iterations));
    if (args.learning_rate) push("distill.lr", sdm::format_double(*args.learning_rate));
    if (args.freeze_bank) push("distill.freeze_bank", "true");
    if (args.diagnostics) push("run.diagnostics", "true");
    sdm::apply_overrides(cfg, overrides);
    return cfg;
}

fs::path prepare_out_dir(const sdm::ExperimentConfig& cfg) {
    const fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw sdm::io_error("cannot create output directory '" + cfg.out_dir +
                                "': " + ec.message());
    // Probe writability up front so failures surface before long runs.
    const fs::path probe = dir / ".write_probe";
    {
        std::ofstream os(probe);
        if (!os) throw sdm::io_error("output directory '" + cfg.out_dir + "' is not writable");
    }
    fs::remove(probe, ec);
    return dir;
}

sdm::FeatureSet build_dataset(const sdm::ExperimentConfig& cfg) {
    return sdm::generate_mixture_dataset(cfg.data, sdm::rng::derive_seed(cfg.seed, "data", 0));
}

int cmd_gen_data(const sdm::ExperimentConfig& cfg) {
    const fs::path dir = prepare_out_dir(cfg);
    const sdm::FeatureSet real = build_dataset(cfg);
    sdm::save_feature_csv((dir / "dataset.csv").string(), real);
    sdm::save_feature_set((dir / "dataset.bin").string(), real);

    const auto counts = sdm::class_counts(real);
    std::cout << "wrote " << (dir / "dataset.csv").string() << " (" << real.size() << " rows, "
              << real.dim() << " dims, " << real.num_classes << " classes)\n";
    std::cout << "class counts:";
    for (auto n : counts) std::cout << " " << n;
    std::cout << "\n";
    return kExitOk;
}

int cmd_distill(const sdm::ExperimentConfig& cfg) {
    const fs::path dir = prepare_out_dir(cfg);
    sdm::FeatureSet real = build_dataset(cfg);
    sdm::normalize_features(real);

    const sdm::DistillConfig dcfg = cfg.distill_config();
    const sdm::DistillResult result = sdm::run_distillation(real, dcfg);
    const auto counts = sdm::class_counts(real);

    sdm::write_trace_csv((dir / "trace.csv").string(), result.trace);
    sdm::write_final_report_csv((dir / "final_report.csv").string(), result, counts, dcfg.ipc);
    sdm::save_feature_csv((dir / "synthetic.csv").string(), result.synthetic);
    sdm::save_feature_set((dir / "synthetic.bin").string(), result.synthetic);

    if (cfg.diagnostics) {
        const sdm::FrequencyBank diag_bank = sdm::spectral_sample(
            dcfg.kernel, dcfg.bank_size, real.dim(), sdm::rng::derive_seed(cfg.seed, "diag", 0));
        const sdm::EmpiricalCF phi_t = sdm::empirical_cf(real.features, diag_bank);
        const sdm::EmpiricalCF phi_s =
            sdm::empirical_cf(result.synthetic.features, diag_bank);
        sdm::write_frequency_diagnostics((dir / "freq_diag.csv").string(), phi_t, phi_s);
        const sdm::ClassDiscrepancyReport report =
            sdm::total_discrepancy(real, result.synthetic, diag_bank, dcfg.policy);
        sdm::write_class_diagnostics((dir / "class_diag.csv").string(), report);
    }

    std::cout << "objective " << sdm::format_double(result.initial_objective()) << " -> "
              << sdm::format_double(result.final_objective()) << " over "
              << result.trace.back().iteration << " iterations\n";
    for (Eigen::Index c = 0; c < result.per_class_final.size(); ++c) {
        std::cout << "class " << c << ": count=" << counts[static_cast<std::size_t>(c)]
                  << " alpha=" << sdm::format_double(result.alpha(c))
                  << " d_c=" << sdm::format_double(result.per_class_final(c))
                  << " diversity=" << sdm::format_double(result.diversity(c))
                  << " realism=" << sdm::format_double(result.realism(c)) << "\n";
    }
    std::cout << "outputs in " << dir.string() << "\n";
    return kExitOk;
}

int cmd_verify(const sdm::ExperimentConfig& cfg) {
    sdm::verify::VerifyOptions opt;
    opt.pairs = cfg.verify.pairs;
    opt.samples = cfg.verify.samples;
    opt.bank_size = cfg.verify.bank_size;
    opt.cf_pairs = cfg.verify.cf_pairs;
    opt.sandwich_pairs = cfg.verify.sandwich_pairs;
    opt.grad_instances = cfg.verify.grad_instances;
    opt.seed = cfg.seed;

    const auto results = sdm::verify::run_property_suite(opt);
    sdm::verify::print_check_table(std::cout, results);
    if (!sdm::verify::all_passed(results)) {
        std::cerr << "property suite failed\n";
        return kExitPropertyFailure;
    }
    return kExitOk;
}

int cmd_bench(const sdm::ExperimentConfig& cfg) {
    const fs::path dir = prepare_out_dir(cfg);
    sdm::bench::BenchOptions opt;
    opt.dim = cfg.bench.dim;
    opt.bank_size = cfg.bench.bank_size;
    opt.reps = cfg.bench.reps;
    opt.seed = cfg.seed;

    const auto rows = sdm::bench::run_bench(opt);
    {
        std::ofstream os(dir / "bench.csv");
        if (!os) throw sdm::io_error("cannot open bench.csv for writing");
        sdm::bench::write_bench_csv(os, rows);
    }
    sdm::bench::write_bench_csv(std::cout, rows);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"class-aware spectral distribution matching toolkit"};
    app.require_subcommand(1);

    CommonArgs distill_args, verify_args, bench_args, gen_args;

    CLI::App* distill = app.add_subcommand("distill", "run the distillation pipeline");
    add_common_flags(distill, distill_args);
    distill->add_option("--bank-size", distill_args.bank_size, "training bank L");
    distill->add_option("--ipc", distill_args.ipc, "synthetic points per class");
    distill->add_option("--iterations", distill_args.iterations, "descent iterations");
    distill->add_option("--lr", distill_args.learning_rate, "learning rate");
    distill->add_flag("--freeze-bank", distill_args.freeze_bank,
                      "reuse iteration 0's frequency bank");
    distill->add_flag("--diagnostics", distill_args.diagnostics,
                      "also write freq_diag.csv and class_diag.csv");

    CLI::App* verify = app.add_subcommand("verify", "run the property suite");
    add_common_flags(verify, verify_args);
    verify->add_option("--bank-size", verify_args.bank_size, "Monte-Carlo bank L");

    CLI::App* bench = app.add_subcommand("bench", "time spectral vs Gram scaling");
    add_common_flags(bench, bench_args);
    bench->add_option("--bank-size", bench_args.bank_size, "bank L for the spectral column");

    CLI::App* gen = app.add_subcommand("gen-data", "emit the long-tailed dataset");
    add_common_flags(gen, gen_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (distill->parsed())
            return cmd_distill(assemble_config(distill_args, "distill.bank_size"));
        if (verify->parsed())
            return cmd_verify(assemble_config(verify_args, "verify.bank_size"));
        if (bench->parsed())
            return cmd_bench(assemble_config(bench_args, "bench.bank_size"));
        return cmd_gen_data(assemble_config(gen_args, "distill.bank_size"));
    } catch (const sdm::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
