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
 * @file state_vector.hpp
 * Dense n-qubit statevector. Qubit q is bit q of the basis index (qubit 0 is
 * the least-significant bit).
 */
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qkd/error.hpp"
#include "qkd/sim/gate.hpp"

namespace qkd::sim {

inline constexpr std::size_t kMaxQubits = 24;

class StateVector {
  public:
    /// |0...0> on n qubits.
    explicit StateVector(std::size_t n_qubits) : n_qubits_{n_qubits} {
        if (n_qubits < 1 || n_qubits > kMaxQubits) {
            throw ConfigError("qubit count " + std::to_string(n_qubits) +
                              " outside [1, " + std::to_string(kMaxQubits) +
                              "]");
        }
        amplitudes_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
        amplitudes_[0] = 1.0;
    }

    [[nodiscard]] std::size_t n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t size() const noexcept { return amplitudes_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const noexcept {
        return amplitudes_;
    }
    [[nodiscard]] std::span<Complex> amplitudes() noexcept { return amplitudes_; }
    [[nodiscard]] const Complex &operator[](std::size_t i) const {
        return amplitudes_[i];
    }

    /// Number of gate kernels run on this state (including adjoints and
    /// generator applications).
    [[nodiscard]] std::size_t gate_applications() const noexcept {
        return applied_;
    }

    [[nodiscard]] double norm_squared() const noexcept {
        double acc = 0.0;
        for (const auto &a : amplitudes_) {
            acc += std::norm(a);
        }
        return acc;
    }

    StateVector &apply(const GateOp &op) {
        check_targets(op);
        if (op.arity() == 1) {
            apply_1q(matrix2(op.kind, op.angle), op.targets[0]);
        } else {
            apply_2q(matrix4(op.kind, op.angle), op.targets[0], op.targets[1]);
        }
        ++applied_;
        return *this;
    }

    /// Applies U^dagger. Rotations invert by negating the angle; the fixed
    /// gates are all Hermitian.
    StateVector &apply_adjoint(const GateOp &op) {
        GateOp inv = op;
        if (is_parameterized(op.kind)) {
            inv.angle = -op.angle;
        }
        return apply(inv);
    }

    /// Applies the Pauli word P with U(theta) = exp(-i theta/2 P). Only
    /// defined for rotation gates.
    StateVector &apply_generator(const GateOp &op) {
        check_targets(op);
        switch (op.kind) {
        case GateKind::RX: apply_1q(matrix2(GateKind::X), op.targets[0]); break;
        case GateKind::RY: apply_1q(matrix2(GateKind::Y), op.targets[0]); break;
        case GateKind::RZ: apply_1q(matrix2(GateKind::Z), op.targets[0]); break;
        case GateKind::RZZ: {
            const std::size_t ma = std::size_t{1} << op.targets[0];
            const std::size_t mb = std::size_t{1} << op.targets[1];
            for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
                if (((i & ma) != 0) != ((i & mb) != 0)) {
                    amplitudes_[i] = -amplitudes_[i];
                }
            }
            break;
        }
        default:
            throw ArgumentError(std::string(gate_name(op.kind)) +
                                " has no rotation generator");
        }
        ++applied_;
        return *this;
    }

    /// <Z_i> for every qubit i.
    [[nodiscard]] std::vector<double> z_expectations() const {
        std::vector<double> out(n_qubits_, 0.0);
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            const double p = std::norm(amplitudes_[i]);
            for (std::size_t q = 0; q < n_qubits_; ++q) {
                out[q] += ((i >> q) & 1U) ? -p : p;
            }
        }
        return out;
    }

  private:
    void check_targets(const GateOp &op) const {
        const auto bad = [&](std::size_t q) { return q >= n_qubits_; };
        if (bad(op.targets[0]) || (op.arity() == 2 && bad(op.targets[1]))) {
            throw ArgumentError(std::string(gate_name(op.kind)) +
                                ": qubit index out of range for " +
                                std::to_string(n_qubits_) + " qubits");
        }
        if (op.arity() == 2 && op.targets[0] == op.targets[1]) {
            throw ArgumentError(std::string(gate_name(op.kind)) +
                                ": target qubits must be distinct");
        }
    }

    void apply_1q(const Matrix2 &m, std::size_t q) {
        const std::size_t stride = std::size_t{1} << q;
        for (std::size_t base = 0; base < amplitudes_.size(); base += 2 * stride) {
            for (std::size_t off = 0; off < stride; ++off) {
                Complex &a0 = amplitudes_[base + off];
                Complex &a1 = amplitudes_[base + off + stride];
                const Complex v0 = a0;
                const Complex v1 = a1;
                a0 = m[0] * v0 + m[1] * v1;
                a1 = m[2] * v0 + m[3] * v1;
            }
        }
    }

    void apply_2q(const Matrix4 &m, std::size_t hi, std::size_t lo) {
        const std::size_t mh = std::size_t{1} << hi;
        const std::size_t ml = std::size_t{1} << lo;
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            if ((i & mh) || (i & ml)) {
                continue;
            }
            const std::array<std::size_t, 4> idx{i, i | ml, i | mh, i | mh | ml};
            std::array<Complex, 4> v{};
            for (std::size_t k = 0; k < 4; ++k) {
                v[k] = amplitudes_[idx[k]];
            }
            for (std::size_t r = 0; r < 4; ++r) {
                amplitudes_[idx[r]] = m[4 * r] * v[0] + m[4 * r + 1] * v[1] +
                                      m[4 * r + 2] * v[2] + m[4 * r + 3] * v[3];
            }
        }
    }

    std::size_t n_qubits_;
    std::vector<Complex> amplitudes_;
    std::size_t applied_{0};
};

[[nodiscard]] inline StateVector init_zero_state(std::size_t n_qubits) {
    return StateVector(n_qubits);
}

/// Value-style gate application; the input is consumed and returned.
[[nodiscard]] inline StateVector apply_gate(StateVector state, const GateOp &op) {
    state.apply(op);
    return state;
}

[[nodiscard]] inline std::vector<double> z_expectations(const StateVector &state) {
    return state.z_expectations();
}

} // namespace qkd::sim
