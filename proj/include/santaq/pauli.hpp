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
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "santaq/errors.hpp"

namespace santaq {

enum class Pauli : std::uint8_t { I, X, Y, Z };

inline char to_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

/// Weighted tensor product of single-qubit Paulis; `axes[q]` acts on qubit q.
struct PauliString {
    double weight = 1.0;
    std::vector<Pauli> axes;

    std::size_t n_qubits() const { return axes.size(); }

    /// Parses "XIZ"-style labels, leftmost character is qubit 0.
    static PauliString parse(std::string_view label, double weight = 1.0) {
        PauliString s{weight, {}};
        s.axes.reserve(label.size());
        for (char c : label) {
            switch (c) {
            case 'I': s.axes.push_back(Pauli::I); break;
            case 'X': s.axes.push_back(Pauli::X); break;
            case 'Y': s.axes.push_back(Pauli::Y); break;
            case 'Z': s.axes.push_back(Pauli::Z); break;
            default: throw ArgumentError(std::string("invalid Pauli label character '") + c + "'");
            }
        }
        return s;
    }

    std::string label() const {
        std::string out;
        for (Pauli p : axes) out.push_back(to_char(p));
        return out;
    }

    /// Bits flipped by the string (X or Y positions).
    std::uint64_t flip_mask() const {
        std::uint64_t m = 0;
        for (std::size_t q = 0; q < axes.size(); ++q)
            if (axes[q] == Pauli::X || axes[q] == Pauli::Y) m |= std::uint64_t{1} << q;
        return m;
    }

    /// Bits carrying a (-1)^b phase (Y or Z positions).
    std::uint64_t phase_mask() const {
        std::uint64_t m = 0;
        for (std::size_t q = 0; q < axes.size(); ++q)
            if (axes[q] == Pauli::Y || axes[q] == Pauli::Z) m |= std::uint64_t{1} << q;
        return m;
    }

    /// Non-identity positions.
    std::uint64_t support_mask() const { return flip_mask() | phase_mask(); }

    int y_count() const {
        int n = 0;
        for (Pauli p : axes) n += (p == Pauli::Y);
        return n;
    }
};

/// Two strings are qubit-wise commuting when, on every qubit, their axes are
/// equal or one of them is the identity. Such strings share a product
/// measurement basis.
inline bool qubitwise_commute(const PauliString& a, const PauliString& b) {
    if (a.n_qubits() != b.n_qubits()) return false;
    for (std::size_t q = 0; q < a.axes.size(); ++q)
        if (a.axes[q] != Pauli::I && b.axes[q] != Pauli::I && a.axes[q] != b.axes[q]) return false;
    return true;
}

/// coefficient * sum_k strings[k], with all strings qubit-wise commuting.
struct PauliGroup {
    double coefficient = 1.0;
    std::vector<PauliString> strings;

    /// sum_k |weight_k|; bounds the magnitude of a single-shot outcome of the
    /// group operator (without the coefficient).
    double norm_bound() const {
        double n = 0.0;
        for (const auto& s : strings) n += std::abs(s.weight);
        return n;
    }

    /// Shared measurement basis: per qubit, the non-identity axis used by any
    /// string (identity if none).
    std::vector<Pauli> basis() const {
        std::vector<Pauli> b(strings.empty() ? 0 : strings.front().n_qubits(), Pauli::I);
        for (const auto& s : strings)
            for (std::size_t q = 0; q < s.axes.size(); ++q)
                if (s.axes[q] != Pauli::I) b[q] = s.axes[q];
        return b;
    }
};

/// Weighted sum of simultaneously measurable groups.
class Observable {
public:
    Observable(int n_qubits, std::vector<PauliGroup> groups)
        : n_qubits_(n_qubits), groups_(std::move(groups)) {
        for (const auto& g : groups_) {
            if (g.strings.empty()) throw ArgumentError("observable group has no Pauli strings");
            for (std::size_t i = 0; i < g.strings.size(); ++i) {
                if (static_cast<int>(g.strings[i].n_qubits()) != n_qubits_)
                    throw ShapeError("Pauli string length does not match observable qubit count");
                for (std::size_t k = 0; k < i; ++k)
                    if (!qubitwise_commute(g.strings[i], g.strings[k]))
                        throw ArgumentError("strings " + g.strings[k].label() + " and " +
                                            g.strings[i].label() +
                                            " do not share a measurement basis");
            }
        }
    }

    /// Single group holding a single string.
    static Observable single(const PauliString& s, double coefficient = 1.0) {
        return Observable(static_cast<int>(s.n_qubits()), {PauliGroup{coefficient, {s}}});
    }

    int n_qubits() const { return n_qubits_; }
    const std::vector<PauliGroup>& groups() const { return groups_; }

    /// Allocation weights |c_g| * norm_bound(g).
    std::vector<double> allocation_weights() const {
        std::vector<double> w;
        w.reserve(groups_.size());
        for (const auto& g : groups_) w.push_back(std::abs(g.coefficient) * g.norm_bound());
        return w;
    }

private:
    int n_qubits_;
    std::vector<PauliGroup> groups_;
};

/// Open-chain transverse-field Ising Hamiltonian
/// H = -J sum_i Z_i Z_{i+1} - g sum_i X_i, as the two groups {ZZ chain, X field}.
inline Observable tfim_observable(int n, double coupling, double field) {
    if (n < 2) throw SizeError("TFIM chain needs at least 2 sites");
    PauliGroup zz{-coupling, {}};
    PauliGroup x{-field, {}};
    std::vector<PauliGroup> groups;
    for (int i = 0; i + 1 < n; ++i) {
        PauliString s{1.0, std::vector<Pauli>(n, Pauli::I)};
        s.axes[i] = s.axes[i + 1] = Pauli::Z;
        zz.strings.push_back(std::move(s));
    }
    for (int i = 0; i < n; ++i) {
        PauliString s{1.0, std::vector<Pauli>(n, Pauli::I)};
        s.axes[i] = Pauli::X;
        x.strings.push_back(std::move(s));
    }
    // Zero-coefficient terms are dropped so every group carries a positive
    // allocation weight.
    if (coupling != 0.0) groups.push_back(std::move(zz));
    if (field != 0.0) groups.push_back(std::move(x));
    return Observable(n, std::move(groups));
}

} // namespace santaq
