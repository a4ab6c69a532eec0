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

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

#include "sdm/common.hpp"

namespace sdm::rng {

/// Generator name/version, frozen so outputs stay byte-reproducible across
/// releases. `sx64 v1` is a pure counter design: draw i of stream `seed` is
/// a function of (seed, i) alone, so any draw can be produced out of order
/// and independent of how work is partitioned.
inline constexpr std::string_view kGeneratorName = "sx64";
inline constexpr std::uint32_t kGeneratorVersion = 1;

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// 64-bit finalizer (the SplitMix64 output mix).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Raw 64 bits for draw `index` of stream `seed`.
constexpr std::uint64_t bits_at(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed + (index + 1) * kGolden);
}

/// Uniform draw in the open interval (0, 1): 53 mantissa bits, half-ulp
/// centering so 0 and 1 are unreachable (safe for inverse-CDF transforms).
inline double uniform_at(std::uint64_t seed, std::uint64_t index) {
    return (static_cast<double>(bits_at(seed, index) >> 11) + 0.5) * 0x1.0p-53;
}

/// Inverse standard normal CDF, Wichura's algorithm AS 241 (PPND16),
/// accurate to ~1e-16 relative over (0, 1).
inline double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw numeric_error("inverse_normal_cdf: p must lie in (0,1)");

    static constexpr double a[8] = {
        3.3871328727963666080e0,  1.3314166789178437745e2,  1.9715909503065514427e3,
        1.3731693765509461125e4,  4.5921953931549871457e4,  6.7265770927008700853e4,
        3.3430575583588128105e4,  2.5090809287301226727e3};
    static constexpr double b[8] = {
        1.0,                      4.2313330701600911252e1,  6.8718700749205790830e2,
        5.3941960214247511077e3,  2.1213794301586595867e4,  3.9307895800092710610e4,
        2.8729085735721942674e4,  5.2264952788528545610e3};
    static constexpr double c[8] = {
        1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
        3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
        2.27238449892691845833e-2, 7.74545014278341407640e-4};
    static constexpr double d[8] = {
        1.0,                      2.05319162663775882187e0, 1.67638483018380384940e0,
        6.89767334985100004550e-1, 1.48103976427480074590e-1, 1.51986665636164571966e-2,
        5.47593808499534494600e-4, 1.05075007164441684324e-9};
    static constexpr double e[8] = {
        6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
        2.65321895265761230930e-1, 1.24266094738807843860e-2, 2.71155556874348757815e-4,
        2.01033439929228813265e-7, 0.0};
    static constexpr double f[8] = {
        1.0,                      5.99832206555887937690e-1, 1.36929880922735805310e-1,
        1.48753612908506148525e-2, 7.86869131145613259100e-4, 1.84631831751005468180e-5,
        1.42151175831644588870e-7, 0.0};

    auto poly7 = [](const double (&k)[8], double r) {
        return ((((((k[7] * r + k[6]) * r + k[5]) * r + k[4]) * r + k[3]) * r + k[2]) * r +
                k[1]) * r + k[0];
    };

    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * poly7(a, r) / poly7(b, r);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = poly7(c, r) / poly7(d, r);
    } else {
        r -= 5.0;
        x = poly7(e, r) / poly7(f, r);
    }
    return q < 0.0 ? -x : x;
}

/// Standard normal draw `index` of stream `seed` (inverse-CDF transform).
inline double normal_at(std::uint64_t seed, std::uint64_t index) {
    return inverse_normal_cdf(uniform_at(seed, index));
}

/// Cauchy(0, scale) draw via inverse CDF.
inline double cauchy_at(std::uint64_t seed, std::uint64_t index, double scale) {
    return scale * std::tan(std::numbers::pi * (uniform_at(seed, index) - 0.5));
}

inline constexpr std::uint64_t kFnvBasis = 0xCBF29CE484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001B3ULL;

/// FNV-1a hash of a label, used to namespace derived streams.
constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = kFnvBasis;
    for (char ch : s) {
        h ^= static_cast<unsigned char>(ch);
        h *= kFnvPrime;
    }
    return h;
}

/// Running FNV-1a over a 64-bit word fed in little-endian byte order, so
/// content fingerprints do not depend on host endianness.
constexpr std::uint64_t fnv1a_u64(std::uint64_t h, std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
        h ^= (word >> (8 * b)) & 0xFFu;
        h *= kFnvPrime;
    }
    return h;
}

/// Deterministic child stream, decorrelated from every other (tag, index)
/// pair under the same master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                    std::uint64_t index) {
    return mix64(mix64(master ^ fnv1a(tag)) + (index + 1) * kGolden);
}

}  // namespace sdm::rng
