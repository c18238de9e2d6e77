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

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "santaq/errors.hpp"
#include "santaq/pauli.hpp"
#include "santaq/rng.hpp"

namespace santaq {

using cplx = std::complex<double>;

inline constexpr int kMaxQubits = 24;

enum class GateKind : std::uint8_t { H, RX, RY, RZ, CZ, PauliRotation, PauliError };

/// A concrete gate. Rotations are exp(-i angle A / 2) with A^2 = I; a
/// `PauliRotation` uses the tensor product of `paulis` over `targets` as A.
/// `PauliError` applies that Pauli product directly.
struct Gate {
    GateKind kind = GateKind::H;
    std::vector<int> targets;
    double angle = 0.0;
    std::vector<Pauli> paulis;

    static Gate h(int q) { return {GateKind::H, {q}, 0.0, {}}; }
    static Gate rx(int q, double a) { return {GateKind::RX, {q}, a, {}}; }
    static Gate ry(int q, double a) { return {GateKind::RY, {q}, a, {}}; }
    static Gate rz(int q, double a) { return {GateKind::RZ, {q}, a, {}}; }
    static Gate cz(int a, int b) { return {GateKind::CZ, {a, b}, 0.0, {}}; }
    static Gate pauli_rotation(std::vector<int> t, std::vector<Pauli> p, double a) {
        return {GateKind::PauliRotation, std::move(t), a, std::move(p)};
    }
    static Gate pauli_error(std::vector<int> t, std::vector<Pauli> p) {
        return {GateKind::PauliError, std::move(t), 0.0, std::move(p)};
    }

    bool is_rotation() const {
        return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ ||
               kind == GateKind::PauliRotation;
    }

    /// Generator is an involutory Pauli product, so the two-term shift rule holds.
    bool psr_eligible() const { return is_rotation(); }

    /// Rotation generated purely by Z operators (RZ or a Z...Z Pauli rotation).
    bool is_z_rotation() const {
        if (kind == GateKind::RZ) return true;
        if (kind != GateKind::PauliRotation) return false;
        for (Pauli p : paulis)
            if (p != Pauli::Z && p != Pauli::I) return false;
        return true;
    }
};

namespace detail {

inline void check_targets(const Gate& g, int n_qubits) {
    for (std::size_t i = 0; i < g.targets.size(); ++i) {
        const int q = g.targets[i];
        if (q < 0 || q >= n_qubits)
            throw IndexError("gate target " + std::to_string(q) + " out of range for " +
                             std::to_string(n_qubits) + " qubits");
        for (std::size_t k = 0; k < i; ++k)
            if (g.targets[k] == q) throw IndexError("gate targets are not distinct");
    }
    const bool pauli_kind = g.kind == GateKind::PauliRotation || g.kind == GateKind::PauliError;
    const std::size_t want = g.kind == GateKind::CZ ? 2 : pauli_kind ? g.paulis.size() : 1;
    if (g.targets.size() != want || (pauli_kind && g.targets.empty()))
        throw ArgumentError("gate has the wrong number of targets");
}

inline void apply_1q(std::span<cplx> amps, int q, cplx m00, cplx m01, cplx m10, cplx m11) {
    const std::size_t stride = std::size_t{1} << q;
    const std::size_t dim = amps.size();
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const cplx a0 = amps[i];
            const cplx a1 = amps[i + stride];
            amps[i] = m00 * a0 + m01 * a1;
            amps[i + stride] = m10 * a0 + m11 * a1;
        }
    }
}

struct PauliMasks {
    std::uint64_t flip = 0;
    std::uint64_t phase = 0;
    cplx global{1.0, 0.0};  // i^{#Y}
};

inline PauliMasks masks_of(std::span<const int> targets, std::span<const Pauli> paulis) {
    PauliMasks m;
    int ny = 0;
    for (std::size_t k = 0; k < targets.size(); ++k) {
        const std::uint64_t bit = std::uint64_t{1} << targets[k];
        switch (paulis[k]) {
        case Pauli::I: break;
        case Pauli::X: m.flip |= bit; break;
        case Pauli::Y: m.flip |= bit; m.phase |= bit; ++ny; break;
        case Pauli::Z: m.phase |= bit; break;
        }
    }
    static constexpr cplx powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    m.global = powers[ny % 4];
    return m;
}

inline PauliMasks masks_of(const PauliString& s) {
    PauliMasks m{s.flip_mask(), s.phase_mask(), {1, 0}};
    static constexpr cplx powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    m.global = powers[s.y_count() % 4];
    return m;
}

/// P|k> = phase(k) |k ^ flip>.
inline cplx pauli_phase(const PauliMasks& m, std::size_t k) {
    return (std::popcount(k & m.phase) & 1) ? -m.global : m.global;
}

/// amps <- c * amps - i s * (P amps)
inline void apply_pauli_rotation(std::span<cplx> amps, const PauliMasks& m, double angle) {
    const double c = std::cos(angle / 2);
    const double s = std::sin(angle / 2);
    const cplx mis{0.0, -s};
    const std::size_t dim = amps.size();
    if (m.flip == 0) {
        for (std::size_t k = 0; k < dim; ++k) amps[k] *= c + mis * pauli_phase(m, k);
        return;
    }
    const std::uint64_t low = m.flip & (~m.flip + 1);
    for (std::size_t k = 0; k < dim; ++k) {
        if (k & low) continue;
        const std::size_t j = k ^ m.flip;
        const cplx ak = amps[k];
        const cplx aj = amps[j];
        amps[k] = c * ak + mis * pauli_phase(m, j) * aj;
        amps[j] = c * aj + mis * pauli_phase(m, k) * ak;
    }
}

inline void apply_pauli(std::span<cplx> amps, const PauliMasks& m) {
    const std::size_t dim = amps.size();
    if (m.flip == 0) {
        for (std::size_t k = 0; k < dim; ++k) amps[k] *= pauli_phase(m, k);
        return;
    }
    const std::uint64_t low = m.flip & (~m.flip + 1);
    for (std::size_t k = 0; k < dim; ++k) {
        if (k & low) continue;
        const std::size_t j = k ^ m.flip;
        const cplx ak = amps[k];
        amps[k] = pauli_phase(m, j) * amps[j];
        amps[j] = pauli_phase(m, k) * ak;
    }
}

/// Applies `g` with rotation angle `angle` (ignoring `g.angle`) to raw
/// amplitudes. No target validation.
inline void apply_raw(std::span<cplx> amps, const Gate& g, double angle) {
    static const double r = 1.0 / std::numbers::sqrt2;
    switch (g.kind) {
    case GateKind::H: apply_1q(amps, g.targets[0], r, r, r, -r); break;
    case GateKind::RX: {
        const double c = std::cos(angle / 2), s = std::sin(angle / 2);
        apply_1q(amps, g.targets[0], c, {0, -s}, {0, -s}, c);
        break;
    }
    case GateKind::RY: {
        const double c = std::cos(angle / 2), s = std::sin(angle / 2);
        apply_1q(amps, g.targets[0], c, -s, s, c);
        break;
    }
    case GateKind::RZ: {
        const std::size_t stride = std::size_t{1} << g.targets[0];
        const cplx e0 = std::polar(1.0, -angle / 2), e1 = std::polar(1.0, angle / 2);
        for (std::size_t k = 0; k < amps.size(); ++k) amps[k] *= (k & stride) ? e1 : e0;
        break;
    }
    case GateKind::CZ: {
        const std::size_t both = (std::size_t{1} << g.targets[0]) | (std::size_t{1} << g.targets[1]);
        for (std::size_t k = 0; k < amps.size(); ++k)
            if ((k & both) == both) amps[k] = -amps[k];
        break;
    }
    case GateKind::PauliRotation:
        apply_pauli_rotation(amps, masks_of(g.targets, g.paulis), angle);
        break;
    case GateKind::PauliError: apply_pauli(amps, masks_of(g.targets, g.paulis)); break;
    }
}

/// <amps| P |amps> for a Pauli string (complex; real up to rounding).
inline cplx pauli_expectation(std::span<const cplx> amps, const PauliString& s) {
    const PauliMasks m = masks_of(s);
    cplx acc{0, 0};
    for (std::size_t k = 0; k < amps.size(); ++k)
        acc += std::conj(amps[k ^ m.flip]) * pauli_phase(m, k) * amps[k];
    return acc;
}

} // namespace detail

/// Dense n-qubit pure state; qubit q is bit q of the amplitude index.
class StateVector {
public:
    explicit StateVector(int n_qubits) : n_qubits_(n_qubits) {
        if (n_qubits < 1 || n_qubits > kMaxQubits)
            throw SizeError("qubit count " + std::to_string(n_qubits) + " outside [1, " +
                            std::to_string(kMaxQubits) + "]");
        amps_.assign(std::size_t{1} << n_qubits, cplx{0.0, 0.0});
        amps_[0] = 1.0;
    }

    /// Takes ownership of explicit amplitudes; length must be a power of two.
    static StateVector from_amplitudes(std::vector<cplx> amps) {
        const std::size_t dim = amps.size();
        if (dim < 2 || !std::has_single_bit(dim)) throw SizeError("amplitude count must be 2^n, n >= 1");
        StateVector s(std::countr_zero(dim));
        s.amps_ = std::move(amps);
        return s;
    }

    int n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    std::span<const cplx> amplitudes() const { return amps_; }
    cplx operator[](std::size_t k) const { return amps_[k]; }

    void apply(const Gate& g) { apply(g, g.angle); }

    /// Applies `g` with an explicit rotation angle in place of `g.angle`.
    void apply(const Gate& g, double angle) {
        detail::check_targets(g, n_qubits_);
        detail::apply_raw(amps_, g, angle);
    }

    /// As `apply(g, angle)` without target validation; for pre-validated circuits.
    void apply_unchecked(const Gate& g, double angle) { detail::apply_raw(amps_, g, angle); }

    std::span<cplx> mutable_amplitudes() { return amps_; }

    double norm_squared() const {
        double n = 0.0;
        for (const cplx& a : amps_) n += std::norm(a);
        return n;
    }

    std::vector<double> probabilities() const {
        std::vector<double> p(amps_.size());
        for (std::size_t k = 0; k < amps_.size(); ++k) p[k] = std::norm(amps_[k]);
        return p;
    }

private:
    int n_qubits_;
    std::vector<cplx> amps_;
};

inline StateVector new_state(int n_qubits) { return StateVector(n_qubits); }

inline StateVector apply_gate(StateVector state, const Gate& gate) {
    state.apply(gate);
    return state;
}

inline double expectation(const StateVector& state, const PauliString& s) {
    if (static_cast<int>(s.n_qubits()) != state.n_qubits())
        throw ShapeError("Pauli string and state disagree on qubit count");
    return s.weight * detail::pauli_expectation(state.amplitudes(), s).real();
}

inline double expectation(const StateVector& state, const PauliGroup& group) {
    double acc = 0.0;
    for (const auto& s : group.strings) acc += expectation(state, s);
    return group.coefficient * acc;
}

inline double expectation(const StateVector& state, const Observable& obs) {
    if (obs.n_qubits() != state.n_qubits())
        throw ShapeError("observable and state disagree on qubit count");
    double acc = 0.0;
    for (const auto& g : obs.groups()) acc += expectation(state, g);
    return acc;
}

/// Rotates `state` so that the group's shared basis becomes the computational
/// basis (X -> H, Y -> S^dagger then H).
inline StateVector rotate_to_basis(StateVector state, std::span<const Pauli> basis) {
    for (std::size_t q = 0; q < basis.size(); ++q) {
        const int qi = static_cast<int>(q);
        if (basis[q] == Pauli::X) {
            state.apply(Gate::h(qi));
        } else if (basis[q] == Pauli::Y) {
            state.apply(Gate::rz(qi, -std::numbers::pi / 2));
            state.apply(Gate::h(qi));
        }
    }
    return state;
}

/// Draws `shots` computational-basis bit-strings from a probability vector.
inline std::vector<std::uint64_t> sample_bits(std::span<const double> probs, int shots, Rng& rng) {
    std::discrete_distribution<std::uint64_t> dist(probs.begin(), probs.end());
    std::vector<std::uint64_t> bits(static_cast<std::size_t>(shots));
    for (auto& b : bits) b = dist(rng.engine());
    return bits;
}

/// Eigenvalue of `group` (coefficient included) on a measured bit-string in the
/// group's rotated basis.
inline double group_eigenvalue(const PauliGroup& group, std::uint64_t bits) {
    double v = 0.0;
    for (const auto& s : group.strings)
        v += (std::popcount(bits & s.support_mask()) & 1) ? -s.weight : s.weight;
    return group.coefficient * v;
}

struct GroupSample {
    std::vector<double> values;          // per-shot eigenvalues of the group operator
    std::vector<std::uint64_t> bits;     // raw bit-strings in the rotated basis
};

/// Samples `shots` outcomes of a qubit-wise commuting group. The sample mean is
/// an unbiased estimate of expectation(state, group).
inline GroupSample sample_group(const StateVector& state, const PauliGroup& group, int shots, Rng& rng) {
    if (shots < 1) throw ArgumentError("sample_group needs at least one shot");
    const auto basis = group.basis();
    if (static_cast<int>(basis.size()) != state.n_qubits())
        throw ShapeError("group and state disagree on qubit count");
    const StateVector rotated = rotate_to_basis(state, basis);
    GroupSample out;
    out.bits = sample_bits(rotated.probabilities(), shots, rng);
    out.values.reserve(out.bits.size());
    for (auto b : out.bits) out.values.push_back(group_eigenvalue(group, b));
    return out;
}

} // namespace santaq
