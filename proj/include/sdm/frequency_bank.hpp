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
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "sdm/common.hpp"
#include "sdm/kernel.hpp"
#include "sdm/rng.hpp"

namespace sdm {

/// Monte-Carlo frequency bank: L rows drawn from the spectral measure of a
/// shift-invariant kernel. Banks are identified by a stable id so empirical
/// characteristic functions can be checked for compatibility downstream.
struct FrequencyBank {
    Eigen::MatrixXd freqs;  ///< L x D frequency rows
    KernelKind kind = KernelKind::RBF;
    double mass = 1.0;      ///< total spectral mass mu(R^d) = k(0)
    std::uint64_t seed = 0;
    std::uint64_t id = 0;

    Eigen::Index size() const { return freqs.rows(); }
    Eigen::Index dim() const { return freqs.cols(); }
};

namespace detail {

/// Content fingerprint over (seed, kind, mass, every frequency value). Two
/// banks agree on the id exactly when they hold the same sampled content,
/// which is what downstream CF-compatibility checks care about; the id is
/// recomputed on load rather than stored, so it never drifts from the data.
inline std::uint64_t bank_id(std::uint64_t seed, KernelKind kind, double mass,
                             const Eigen::MatrixXd& freqs) {
    std::uint64_t h = rng::kFnvBasis;
    h = rng::fnv1a_u64(h, seed);
    h = rng::fnv1a_u64(h, static_cast<std::uint64_t>(kind));
    h = rng::fnv1a_u64(h, std::bit_cast<std::uint64_t>(mass));
    h = rng::fnv1a_u64(h, static_cast<std::uint64_t>(freqs.rows()));
    h = rng::fnv1a_u64(h, static_cast<std::uint64_t>(freqs.cols()));
    for (Eigen::Index i = 0; i < freqs.rows(); ++i)
        for (Eigen::Index d = 0; d < freqs.cols(); ++d)
            h = rng::fnv1a_u64(h, std::bit_cast<std::uint64_t>(freqs(i, d)));
    return h;
}

}  // namespace detail

/// Draws L frequency vectors in D dimensions from the kernel's spectral
/// measure (normalized to a probability law; the mass rides separately):
///   rbf     exp(-g|x-y|^2)   -> N(0, 2g I)
///   laplace exp(-g|x-y|_1)   -> product of per-coordinate Cauchy(0, g)
///   cosine  cos(w|x-y|)      -> radius w, uniformly random direction
/// Draw (i, d) consumes counter index i*D+d of `seed`, so the bank is
/// reproducible point-by-point.
inline FrequencyBank spectral_sample(const KernelSpec& spec, Eigen::Index L, Eigen::Index D,
                                     std::uint64_t seed) {
    validate(spec);
    if (!is_shift_invariant(spec.kind))
        throw unsupported_kernel(std::string("kernel '") +
                                 std::string(kernel_kind_name(spec.kind)) +
                                 "' is not shift-invariant; no spectral measure to sample");
    if (L <= 0 || D <= 0)
        throw validation_error("spectral_sample: L and D must be positive");

    FrequencyBank bank;
    bank.kind = spec.kind;
    bank.mass = kernel_mass(spec);
    bank.seed = seed;
    bank.freqs.resize(L, D);

    switch (spec.kind) {
        case KernelKind::RBF: {
            const double sd = std::sqrt(2.0 * spec.gamma);
            for (Eigen::Index i = 0; i < L; ++i)
                for (Eigen::Index d = 0; d < D; ++d)
                    bank.freqs(i, d) =
                        sd * rng::normal_at(seed, static_cast<std::uint64_t>(i * D + d));
            break;
        }
        case KernelKind::Laplace: {
            for (Eigen::Index i = 0; i < L; ++i)
                for (Eigen::Index d = 0; d < D; ++d)
                    bank.freqs(i, d) =
                        rng::cauchy_at(seed, static_cast<std::uint64_t>(i * D + d), spec.gamma);
            break;
        }
        case KernelKind::Cosine: {
            Eigen::VectorXd g(D);
            for (Eigen::Index i = 0; i < L; ++i) {
                for (Eigen::Index d = 0; d < D; ++d)
                    g(d) = rng::normal_at(seed, static_cast<std::uint64_t>(i * D + d));
                const double norm = g.norm();
                if (norm < 1e-300) {
                    bank.freqs.row(i).setZero();
                    bank.freqs(i, 0) = spec.omega;
                } else {
                    bank.freqs.row(i) = (spec.omega / norm) * g.transpose();
                }
            }
            break;
        }
        default:
            throw unsupported_kernel("spectral_sample: unsupported kernel kind");
    }
    bank.id = detail::bank_id(bank.seed, bank.kind, bank.mass, bank.freqs);
    return bank;
}

// --- binary persistence ----------------------------------------------------
//
// Layout (all integers little-endian):
//   bytes 0..3   magic "SDMF"
//   u32          format version (1)
//   u64          L (rows)
//   u64          D (cols)
//   u64          sampling seed
//   u8           kernel kind (enum value)
//   f64          spectral mass
//   L*D f64      frequencies, row-major
//
// The in-memory id is a content fingerprint and is recomputed on load.

inline constexpr char kBankMagic[4] = {'S', 'D', 'M', 'F'};
inline constexpr std::uint32_t kBankFormatVersion = 1;

inline void save_bank(std::ostream& os, const FrequencyBank& bank) {
    os.write(kBankMagic, 4);
    write_u32le(os, kBankFormatVersion);
    write_u64le(os, static_cast<std::uint64_t>(bank.size()));
    write_u64le(os, static_cast<std::uint64_t>(bank.dim()));
    write_u64le(os, bank.seed);
    write_u8(os, static_cast<std::uint8_t>(bank.kind));
    write_f64le(os, bank.mass);
    for (Eigen::Index i = 0; i < bank.size(); ++i)
        for (Eigen::Index d = 0; d < bank.dim(); ++d) write_f64le(os, bank.freqs(i, d));
    if (!os) throw io_error("save_bank: stream write failed");
}

inline void save_bank(const std::string& path, const FrequencyBank& bank) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("save_bank: cannot open '" + path + "' for writing");
    save_bank(os, bank);
}

inline FrequencyBank load_bank(std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kBankMagic, 4) != 0)
        throw validation_error("load_bank: bad magic, not a frequency bank file");
    const std::uint32_t version = read_u32le(is);
    if (version != kBankFormatVersion)
        throw validation_error("load_bank: unsupported format version " +
                               std::to_string(version));
    FrequencyBank bank;
    const auto L = static_cast<Eigen::Index>(read_u64le(is));
    const auto D = static_cast<Eigen::Index>(read_u64le(is));
    bank.seed = read_u64le(is);
    const std::uint8_t kind = read_u8(is);
    if (kind > static_cast<std::uint8_t>(KernelKind::Cosine))
        throw validation_error("load_bank: invalid kernel kind byte");
    bank.kind = static_cast<KernelKind>(kind);
    bank.mass = read_f64le(is);
    if (L <= 0 || D <= 0)
        throw validation_error("load_bank: non-positive dimensions in header");
    bank.freqs.resize(L, D);
    for (Eigen::Index i = 0; i < L; ++i)
        for (Eigen::Index d = 0; d < D; ++d) bank.freqs(i, d) = read_f64le(is);
    bank.id = detail::bank_id(bank.seed, bank.kind, bank.mass, bank.freqs);
    return bank;
}

inline FrequencyBank load_bank(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("load_bank: cannot open '" + path + "'");
    return load_bank(is);
}

}  // namespace sdm
