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
#include <string>
#include <string_view>

#include "sdm/common.hpp"

namespace sdm {

enum class KernelKind { RBF, Laplace, Linear, Polynomial, Sigmoid, Cosine };

inline std::string_view kernel_kind_name(KernelKind k) {
    switch (k) {
        case KernelKind::RBF: return "rbf";
        case KernelKind::Laplace: return "laplace";
        case KernelKind::Linear: return "linear";
        case KernelKind::Polynomial: return "polynomial";
        case KernelKind::Sigmoid: return "sigmoid";
        case KernelKind::Cosine: return "cosine";
    }
    throw validation_error("kernel_kind_name: unknown kind");
}

inline KernelKind kernel_kind_from_name(std::string_view name) {
    if (name == "rbf") return KernelKind::RBF;
    if (name == "laplace") return KernelKind::Laplace;
    if (name == "linear") return KernelKind::Linear;
    if (name == "polynomial") return KernelKind::Polynomial;
    if (name == "sigmoid") return KernelKind::Sigmoid;
    if (name == "cosine") return KernelKind::Cosine;
    throw validation_error("unknown kernel kind '" + std::string(name) + "'");
}

/// Kernel family plus its parameters. Unused parameters are ignored by the
/// evaluators but kept so a spec round-trips through its config form.
struct KernelSpec {
    KernelKind kind = KernelKind::RBF;
    double gamma = 2.0;   ///< rbf: exp(-gamma*|x-y|^2); laplace: exp(-gamma*|x-y|_1)
    int degree = 2;       ///< polynomial: (x.y + offset)^degree
    double offset = 1.0;  ///< polynomial / sigmoid additive constant
    double slope = 1.0;   ///< sigmoid: tanh(slope*x.y + offset)
    double omega = 1.0;   ///< cosine: cos(omega*|x-y|_2)
};

/// Shift-invariant kernels admit a spectral (frequency) representation.
inline bool is_shift_invariant(KernelKind k) {
    return k == KernelKind::RBF || k == KernelKind::Laplace || k == KernelKind::Cosine;
}

/// Universal kernels: characteristic, so a zero discrepancy implies equal
/// distributions.
inline bool is_universal(KernelKind k) {
    return k == KernelKind::RBF || k == KernelKind::Laplace;
}

inline void validate(const KernelSpec& spec) {
    switch (spec.kind) {
        case KernelKind::RBF:
        case KernelKind::Laplace:
            if (!(spec.gamma > 0.0) || !std::isfinite(spec.gamma))
                throw validation_error("kernel gamma must be positive and finite");
            break;
        case KernelKind::Polynomial:
            if (spec.degree < 1)
                throw validation_error("polynomial kernel degree must be >= 1");
            if (!std::isfinite(spec.offset))
                throw validation_error("polynomial kernel offset must be finite");
            break;
        case KernelKind::Sigmoid:
            if (!std::isfinite(spec.slope) || !std::isfinite(spec.offset))
                throw validation_error("sigmoid kernel parameters must be finite");
            break;
        case KernelKind::Cosine:
            if (!(spec.omega > 0.0) || !std::isfinite(spec.omega))
                throw validation_error("cosine kernel omega must be positive and finite");
            break;
        case KernelKind::Linear:
            break;
    }
}

/// Total spectral mass mu(R^d) = k(0) of a shift-invariant kernel.
inline double kernel_mass(const KernelSpec& spec) {
    if (!is_shift_invariant(spec.kind))
        throw unsupported_kernel(std::string("kernel '") +
                                 std::string(kernel_kind_name(spec.kind)) +
                                 "' is not shift-invariant; it has no spectral mass");
    validate(spec);
    return 1.0;  // all three shift-invariant families satisfy k(0) = 1
}

namespace detail {

inline double int_pow(double base, int deg) {
    double r = 1.0;
    for (int i = 0; i < deg; ++i) r *= base;
    return r;
}

}  // namespace detail

/// Pointwise kernel evaluation k(x, y). Throws numeric_error on non-finite
/// inputs.
inline double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& y) {
    validate(spec);
    if (x.size() != y.size())
        throw validation_error("kernel_eval: dimension mismatch");
    if (x.size() == 0)
        throw validation_error("kernel_eval: empty vectors");
    if (!x.allFinite() || !y.allFinite())
        throw numeric_error("kernel_eval: non-finite input");

    switch (spec.kind) {
        case KernelKind::RBF:
            return std::exp(-spec.gamma * (x - y).squaredNorm());
        case KernelKind::Laplace:
            return std::exp(-spec.gamma * (x - y).lpNorm<1>());
        case KernelKind::Linear:
            return x.dot(y);
        case KernelKind::Polynomial:
            return detail::int_pow(x.dot(y) + spec.offset, spec.degree);
        case KernelKind::Sigmoid:
            return std::tanh(spec.slope * x.dot(y) + spec.offset);
        case KernelKind::Cosine:
            return std::cos(spec.omega * (x - y).norm());
    }
    throw validation_error("kernel_eval: unknown kind");
}

/// Full N x M Gram matrix K(i,j) = k(X_i, Y_j); rows of X and Y are points.
inline Eigen::MatrixXd gram_matrix(const KernelSpec& spec,
                                   const Eigen::Ref<const Eigen::MatrixXd>& X,
                                   const Eigen::Ref<const Eigen::MatrixXd>& Y) {
    validate(spec);
    if (X.cols() != Y.cols())
        throw validation_error("gram_matrix: dimension mismatch");
    if (X.rows() == 0 || Y.rows() == 0)
        throw validation_error("gram_matrix: empty point set");
    if (X.cols() == 0)
        throw validation_error("gram_matrix: zero-dimensional points");
    if (!X.allFinite() || !Y.allFinite())
        throw numeric_error("gram_matrix: non-finite input");

    const Eigen::Index n = X.rows(), m = Y.rows();
    Eigen::MatrixXd K(n, m);

    switch (spec.kind) {
        case KernelKind::RBF:
        case KernelKind::Cosine: {
            // |x-y|^2 = |x|^2 + |y|^2 - 2 x.y, clamped at 0 against rounding.
            Eigen::VectorXd xs = X.rowwise().squaredNorm();
            Eigen::VectorXd ys = Y.rowwise().squaredNorm();
            K.noalias() = -2.0 * X * Y.transpose();
            K.colwise() += xs;
            K.rowwise() += ys.transpose();
            K = K.cwiseMax(0.0);
            if (spec.kind == KernelKind::RBF)
                K = (-spec.gamma * K.array()).exp();
            else
                K = (spec.omega * K.array().sqrt()).cos();
            break;
        }
        case KernelKind::Laplace: {
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < m; ++j)
                    K(i, j) = std::exp(-spec.gamma * (X.row(i) - Y.row(j)).lpNorm<1>());
            break;
        }
        case KernelKind::Linear:
            K.noalias() = X * Y.transpose();
            break;
        case KernelKind::Polynomial: {
            K.noalias() = X * Y.transpose();
            K.array() += spec.offset;
            Eigen::MatrixXd base = K;
            for (int p = 1; p < spec.degree; ++p) K.array() *= base.array();
            break;
        }
        case KernelKind::Sigmoid: {
            K.noalias() = X * Y.transpose();
            K = (spec.slope * K.array() + spec.offset).tanh();
            break;
        }
    }
    return K;
}

/// Emits the flat `kernel.*` config block describing `spec`.
inline std::string kernel_to_config(const KernelSpec& spec) {
    std::string out;
    out += "kernel.kind=" + std::string(kernel_kind_name(spec.kind)) + "\n";
    switch (spec.kind) {
        case KernelKind::RBF:
        case KernelKind::Laplace:
            out += "kernel.gamma=" + format_double(spec.gamma) + "\n";
            break;
        case KernelKind::Polynomial:
            out += "kernel.degree=" + std::to_string(spec.degree) + "\n";
            out += "kernel.offset=" + format_double(spec.offset) + "\n";
            break;
        case KernelKind::Sigmoid:
            out += "kernel.slope=" + format_double(spec.slope) + "\n";
            out += "kernel.offset=" + format_double(spec.offset) + "\n";
            break;
        case KernelKind::Cosine:
            out += "kernel.omega=" + format_double(spec.omega) + "\n";
            break;
        case KernelKind::Linear:
            break;
    }
    return out;
}

/// Parses a flat `kernel.*` config block (as emitted by kernel_to_config).
/// Unknown keys are rejected by name.
inline KernelSpec kernel_from_config(std::string_view text) {
    KernelSpec spec;
    bool saw_kind = false;
    for (const KvEntry& e : parse_kv_text(text)) {
        auto as_double = [&](const std::string& v) {
            std::size_t used = 0;
            double d;
            try {
                d = std::stod(v, &used);
            } catch (const std::exception&) {
                used = 0;
                d = 0.0;
            }
            if (used != v.size() || !std::isfinite(d))
                throw validation_error("config line " + std::to_string(e.line) +
                                       ": expected a number for '" + e.key + "'");
            return d;
        };
        if (e.key == "kernel.kind") {
            spec.kind = kernel_kind_from_name(e.value);
            saw_kind = true;
        } else if (e.key == "kernel.gamma") {
            spec.gamma = as_double(e.value);
        } else if (e.key == "kernel.degree") {
            spec.degree = static_cast<int>(as_double(e.value));
        } else if (e.key == "kernel.offset") {
            spec.offset = as_double(e.value);
        } else if (e.key == "kernel.slope") {
            spec.slope = as_double(e.value);
        } else if (e.key == "kernel.omega") {
            spec.omega = as_double(e.value);
        } else {
            throw validation_error("unknown config key '" + e.key + "'");
        }
    }
    if (!saw_kind) throw validation_error("kernel config missing 'kernel.kind'");
    validate(spec);
    return spec;
}

}  // namespace sdm
