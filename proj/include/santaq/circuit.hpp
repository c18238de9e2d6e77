// Copyright 2026 The santaq Authors.
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
#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "santaq/errors.hpp"
#include "santaq/state_vector.hpp"

namespace santaq {

inline constexpr double kShift = std::numbers::pi / 2;

/// A gate whose angle is either fixed (`slot < 0`) or read from a parameter
/// vector at index `slot`.
struct ParamGate {
    Gate gate;
    int slot = -1;
};

/// Ordered gate list with parameter-slot bindings. Immutable once built.
class ParamCircuit {
public:
    explicit ParamCircuit(int n_qubits) : n_qubits_(n_qubits) {
        if (n_qubits < 1 || n_qubits > kMaxQubits) throw SizeError("circuit qubit count out of range");
    }

    int n_qubits() const { return n_qubits_; }
    std::size_t n_params() const { return slot_uses_.size(); }
    const std::vector<ParamGate>& gates() const { return gates_; }
    std::size_t size() const { return gates_.size(); }

    void add(Gate g) {
        detail::check_targets(g, n_qubits_);
        gates_.push_back({std::move(g), -1});
    }

    /// Appends a rotation bound to a fresh parameter slot; returns the slot.
    int add_param(Gate g) {
        detail::check_targets(g, n_qubits_);
        if (!g.is_rotation()) throw ArgumentError("only rotation gates can carry a parameter");
        const int slot = static_cast<int>(slot_uses_.size());
        slot_uses_.push_back(1);
        gates_.push_back({std::move(g), slot});
        return slot;
    }

    /// Appends a rotation reading an existing slot. A shared slot is legal for
    /// running but not for the two-point shift rule.
    void add_shared(Gate g, int slot) {
        detail::check_targets(g, n_qubits_);
        if (!g.is_rotation()) throw ArgumentError("only rotation gates can carry a parameter");
        if (slot < 0 || slot >= static_cast<int>(slot_uses_.size())) throw IndexError("no such parameter slot");
        ++slot_uses_[static_cast<std::size_t>(slot)];
        gates_.push_back({std::move(g), slot});
    }

    /// Appends `other`, shifting its parameter slots after this circuit's.
    void append(const ParamCircuit& other) {
        if (other.n_qubits_ != n_qubits_) throw ShapeError("cannot append circuits of different width");
        const int offset = static_cast<int>(slot_uses_.size());
        for (const auto& pg : other.gates_)
            gates_.push_back({pg.gate, pg.slot < 0 ? -1 : pg.slot + offset});
        slot_uses_.insert(slot_uses_.end(), other.slot_uses_.begin(), other.slot_uses_.end());
    }

    /// Number of gates referencing `slot`.
    int slot_uses(std::size_t slot) const { return slot_uses_.at(slot); }

    double angle(const ParamGate& pg, std::span<const double> params) const {
        return pg.slot < 0 ? pg.gate.angle : params[static_cast<std::size_t>(pg.slot)];
    }

    void check_params(std::span<const double> params) const {
        if (params.size() != n_params())
            throw ShapeError("parameter vector has length " + std::to_string(params.size()) +
                             ", circuit expects " + std::to_string(n_params()));
    }

    std::vector<Gate> bind(std::span<const double> params) const {
        check_params(params);
        std::vector<Gate> out;
        out.reserve(gates_.size());
        for (const auto& pg : gates_) {
            out.push_back(pg.gate);
            out.back().angle = angle(pg, params);
        }
        return out;
    }

private:
    int n_qubits_;
    std::vector<ParamGate> gates_;
    std::vector<int> slot_uses_;
};

/// Applies gates [first, last) of `circuit` to `state`.
inline void run_range(const ParamCircuit& circuit, std::span<const double> params, StateVector& state,
                      std::size_t first, std::size_t last) {
    const auto& gates = circuit.gates();
    for (std::size_t k = first; k < last; ++k)
        state.apply_unchecked(gates[k].gate, circuit.angle(gates[k], params));
}

inline StateVector run(const ParamCircuit& circuit, std::span<const double> params, StateVector initial) {
    circuit.check_params(params);
    if (initial.n_qubits() != circuit.n_qubits()) throw ShapeError("initial state width mismatch");
    run_range(circuit, params, initial, 0, circuit.size());
    return initial;
}

inline StateVector run(const ParamCircuit& circuit, std::span<const double> params) {
    return run(circuit, params, StateVector(circuit.n_qubits()));
}

inline StateVector run(const std::vector<Gate>& gates, StateVector state) {
    for (const auto& g : gates) state.apply(g);
    return state;
}

/// Hardware-efficient ansatz: an RY layer, then `depth` blocks of
/// {CZ chain on (q, q+1), RY layer, RZ layer}. n + 2 n depth parameters,
/// packed layer-major then qubit.
inline ParamCircuit tfim_ansatz(int n_qubits, int depth) {
    if (n_qubits < 2) throw ArgumentError("TFIM ansatz needs at least 2 qubits");
    if (depth < 1) throw ArgumentError("ansatz depth must be >= 1");
    ParamCircuit c(n_qubits);
    for (int q = 0; q < n_qubits; ++q) c.add_param(Gate::ry(q, 0.0));
    for (int d = 0; d < depth; ++d) {
        for (int q = 0; q + 1 < n_qubits; ++q) c.add(Gate::cz(q, q + 1));
        for (int q = 0; q < n_qubits; ++q) c.add_param(Gate::ry(q, 0.0));
        for (int q = 0; q < n_qubits; ++q) c.add_param(Gate::rz(q, 0.0));
    }
    return c;
}

/// U_z(x) H U_z(x) H with U_z(x) = exp(-i pi [sum_i x_i Z_i + sum_{i<j} x_i x_j Z_i Z_j]).
/// Each term becomes RZ(2 pi x_i) or a ZZ rotation by 2 pi x_i x_j.
inline ParamCircuit feature_map(std::span<const double> x) {
    const int n = static_cast<int>(x.size());
    if (n < 1) throw ShapeError("feature vector is empty");
    for (double v : x)
        if (!std::isfinite(v)) throw ArgumentError("feature vector has a non-finite entry");
    ParamCircuit c(n);
    for (int rep = 0; rep < 2; ++rep) {
        for (int q = 0; q < n; ++q) c.add(Gate::h(q));
        for (int i = 0; i < n; ++i) c.add(Gate::rz(i, 2 * std::numbers::pi * x[i]));
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                c.add(Gate::pauli_rotation({i, j}, {Pauli::Z, Pauli::Z}, 2 * std::numbers::pi * x[i] * x[j]));
    }
    return c;
}

/// `depth` layers of RX RY RZ on every qubit followed by a CZ chain on
/// nearest neighbours. 3 n depth parameters, layer-major, qubit, then axis.
inline ParamCircuit trainable_circuit(int n_qubits, int depth) {
    if (n_qubits < 1) throw ArgumentError("trainable circuit needs at least 1 qubit");
    if (depth < 1) throw ArgumentError("trainable circuit depth must be >= 1");
    ParamCircuit c(n_qubits);
    for (int d = 0; d < depth; ++d) {
        for (int q = 0; q < n_qubits; ++q) {
            c.add_param(Gate::rx(q, 0.0));
            c.add_param(Gate::ry(q, 0.0));
            c.add_param(Gate::rz(q, 0.0));
        }
        for (int q = 0; q + 1 < n_qubits; ++q) c.add(Gate::cz(q, q + 1));
    }
    return c;
}

/// Throws unless the two-point shift rule is exact for slot `j`: the slot must
/// exist, drive exactly one gate, and that gate must have an involutory generator.
inline void check_shift_slot(const ParamCircuit& circuit, std::size_t j) {
    if (j >= circuit.n_params())
        throw IndexError("parameter index " + std::to_string(j) + " out of range [0, " +
                         std::to_string(circuit.n_params()) + ")");
    if (circuit.slot_uses(j) != 1)
        throw ContractError("parameter " + std::to_string(j) + " drives several gates");
    for (const auto& pg : circuit.gates())
        if (pg.slot == static_cast<int>(j) && !pg.gate.psr_eligible())
            throw ContractError("parameter " + std::to_string(j) + " drives a non-shiftable gate");
}

inline std::vector<double> shifted(std::span<const double> params, std::size_t j, double delta) {
    std::vector<double> out(params.begin(), params.end());
    out[j] += delta;
    return out;
}

/// Bound circuits at params + pi/2 e_j and params - pi/2 e_j.
inline std::pair<std::vector<Gate>, std::vector<Gate>> shifted_pair(const ParamCircuit& circuit,
                                                                    std::span<const double> params,
                                                                    std::size_t j) {
    circuit.check_params(params);
    check_shift_slot(circuit, j);
    return {circuit.bind(shifted(params, j, kShift)), circuit.bind(shifted(params, j, -kShift))};
}

} // namespace santaq
