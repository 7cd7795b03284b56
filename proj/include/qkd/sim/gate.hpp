// Copyright 2026 The qkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file gate.hpp
 * Gate descriptors and their dense matrix realizations.
 *
 * Two-qubit matrices act on the local basis |a b> with the first target as
 * the high bit, i.e. local index = 2*bit(targets[0]) + bit(targets[1]).
 * For CNOT and CZ targets[0] is the control.
 */
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <string_view>

#include "qkd/error.hpp"

namespace qkd::sim {

using Complex = std::complex<double>;
using Matrix2 = std::array<Complex, 4>;
using Matrix4 = std::array<Complex, 16>;

enum class GateKind { RX, RY, RZ, RZZ, CNOT, CZ, X, Y, Z, H };

[[nodiscard]] constexpr std::string_view gate_name(GateKind kind) noexcept {
    switch (kind) {
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::RZZ: return "RZZ";
    case GateKind::CNOT: return "CNOT";
    case GateKind::CZ: return "CZ";
    case GateKind::X: return "X";
    case GateKind::Y: return "Y";
    case GateKind::Z: return "Z";
    case GateKind::H: return "H";
    }
    return "?";
}

[[nodiscard]] constexpr bool is_parameterized(GateKind kind) noexcept {
    return kind == GateKind::RX || kind == GateKind::RY ||
           kind == GateKind::RZ || kind == GateKind::RZZ;
}

[[nodiscard]] constexpr std::size_t arity(GateKind kind) noexcept {
    return (kind == GateKind::RZZ || kind == GateKind::CNOT ||
            kind == GateKind::CZ)
               ? 2
               : 1;
}

struct GateOp {
    GateKind kind{GateKind::X};
    std::array<std::size_t, 2> targets{0, 0};
    double angle{0.0};

    [[nodiscard]] static GateOp single(GateKind kind, std::size_t q,
                                       double angle = 0.0) {
        if (sim::arity(kind) != 1) {
            throw ArgumentError(std::string(gate_name(kind)) +
                                " acts on two qubits");
        }
        return GateOp{kind, {q, q}, angle};
    }
    [[nodiscard]] static GateOp pair(GateKind kind, std::size_t a,
                                     std::size_t b, double angle = 0.0) {
        if (sim::arity(kind) != 2) {
            throw ArgumentError(std::string(gate_name(kind)) +
                                " acts on one qubit");
        }
        return GateOp{kind, {a, b}, angle};
    }

    [[nodiscard]] std::size_t arity() const noexcept {
        return sim::arity(kind);
    }
};

[[nodiscard]] inline Matrix2 matrix2(GateKind kind, double angle = 0.0) {
    using namespace std::complex_literals;
    const double c = std::cos(angle / 2);
    const double s = std::sin(angle / 2);
    const double r = 1.0 / std::sqrt(2.0);
    switch (kind) {
    case GateKind::RX: return {c, -1i * s, -1i * s, c};
    case GateKind::RY: return {c, -s, s, c};
    case GateKind::RZ: return {std::polar(1.0, -angle / 2), 0, 0,
                               std::polar(1.0, angle / 2)};
    case GateKind::X: return {0, 1, 1, 0};
    case GateKind::Y: return {0, -1i, 1i, 0};
    case GateKind::Z: return {1, 0, 0, -1};
    case GateKind::H: return {r, r, r, -r};
    default: break;
    }
    throw ArgumentError(std::string(gate_name(kind)) + " is not a one-qubit gate");
}

[[nodiscard]] inline Matrix4 matrix4(GateKind kind, double angle = 0.0) {
    Matrix4 m{};
    switch (kind) {
    case GateKind::RZZ: {
        const Complex even = std::polar(1.0, -angle / 2);
        const Complex odd = std::polar(1.0, angle / 2);
        m[0] = even;
        m[5] = odd;
        m[10] = odd;
        m[15] = even;
        return m;
    }
    case GateKind::CNOT:
        m[0] = m[5] = 1;
        m[11] = m[14] = 1;
        return m;
    case GateKind::CZ:
        m[0] = m[5] = m[10] = 1;
        m[15] = -1;
        return m;
    default: break;
    }
    throw ArgumentError(std::string(gate_name(kind)) + " is not a two-qubit gate");
}

/// Row-major dense unitary of a gate: 2x2 or 4x4 depending on arity.
[[nodiscard]] inline std::array<Complex, 16> dense(const GateOp &op) {
    std::array<Complex, 16> out{};
    if (op.arity() == 1) {
        const auto m = matrix2(op.kind, op.angle);
        std::copy(m.begin(), m.end(), out.begin());
    } else {
        out = matrix4(op.kind, op.angle);
    }
    return out;
}

} // namespace qkd::sim
