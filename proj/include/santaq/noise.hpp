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

#include <cstdint>
#include <span>
#include <vector>

#include "santaq/circuit.hpp"
#include "santaq/errors.hpp"
#include "santaq/rng.hpp"
#include "santaq/state_vector.hpp"

namespace santaq {

/// Local depolarizing noise: after every non-exempt one-qubit (two-qubit)
/// gate, a uniformly chosen non-identity Pauli hits its targets with
/// probability p1 (p2). Single-qubit RZ gates are always exempt; two-qubit
/// Z...Z rotations are exempt only when `exempt_zz_rotations` is set.
struct NoiseModel {
    double p1 = 0.0;
    double p2 = 0.0;
    bool exempt_zz_rotations = false;

    static NoiseModel depolarizing(double p1, double p2) {
        NoiseModel m{p1, p2, false};
        m.validate();
        return m;
    }

    void validate() const {
        if (!(p1 >= 0.0 && p1 <= 1.0) || !(p2 >= 0.0 && p2 <= 1.0))
            throw ArgumentError("depolarizing probabilities must lie in [0, 1]");
    }

    bool is_noiseless() const { return p1 == 0.0 && p2 == 0.0; }

    /// Error probability attached to the location right after `g`.
    double error_probability(const Gate& g) const {
        if (g.kind == GateKind::PauliError) return 0.0;
        if (g.kind == GateKind::RZ) return 0.0;
        if (g.targets.size() == 1) return p1;
        if (g.targets.size() == 2) {
            if (exempt_zz_rotations && g.is_z_rotation()) return 0.0;
            return p2;
        }
        throw ContractError("no depolarizing convention for gates on more than two qubits");
    }
};

/// A Pauli error inserted right after gate `after`.
struct NoiseEvent {
    std::size_t after;
    Gate error;
};

namespace detail {

/// The k-th non-identity Pauli on `n_targets` qubits, k in [1, 4^n).
inline std::vector<Pauli> nonidentity_pauli(int n_targets, std::uint64_t k) {
    std::vector<Pauli> p(static_cast<std::size_t>(n_targets));
    for (auto& a : p) {
        a = static_cast<Pauli>(k % 4);
        k /= 4;
    }
    return p;
}

} // namespace detail

/// Precomputed noisy locations of a gate sequence; draws per-shot error events.
class NoiseLocations {
public:
    NoiseLocations() = default;

    template <class GateRange, class GetGate>
    NoiseLocations(const GateRange& gates, const NoiseModel& model, GetGate get) {
        model.validate();
        std::size_t k = 0;
        for (const auto& item : gates) {
            const Gate& g = get(item);
            const double p = model.error_probability(g);
            if (p > 0.0) {
                sites_.push_back({k, p, g.targets});
                p_clean_ *= 1.0 - p;
            }
            ++k;
        }
    }

    NoiseLocations(const ParamCircuit& circuit, const NoiseModel& model)
        : NoiseLocations(circuit.gates(), model, [](const ParamGate& pg) -> const Gate& { return pg.gate; }) {}

    NoiseLocations(const std::vector<Gate>& gates, const NoiseModel& model)
        : NoiseLocations(gates, model, [](const Gate& g) -> const Gate& { return g; }) {}

    /// Fresh trajectory: events sorted by gate position. An error-free shot
    /// is decided with one draw; otherwise trajectories are redrawn until one
    /// has an error, which samples the conditional law exactly.
    std::vector<NoiseEvent> draw(Rng& rng) const {
        if (sites_.empty() || rng.uniform() < p_clean_) return {};
        for (;;) {
            auto events = draw_all(rng);
            if (!events.empty()) return events;
        }
    }

    /// Probability that a trajectory carries no error.
    double clean_probability() const { return p_clean_; }

    bool empty() const { return sites_.empty(); }

private:
    std::vector<NoiseEvent> draw_all(Rng& rng) const {
        std::vector<NoiseEvent> events;
        for (const auto& s : sites_) {
            if (rng.uniform() >= s.probability) continue;
            const int nt = static_cast<int>(s.targets.size());
            const std::uint64_t choices = (std::uint64_t{1} << (2 * nt)) - 1;
            events.push_back({s.after, Gate::pauli_error(s.targets, detail::nonidentity_pauli(nt, 1 + rng.below(choices)))});
        }
        return events;
    }

    struct Site {
        std::size_t after;
        double probability;
        std::vector<int> targets;
    };
    std::vector<Site> sites_;
    double p_clean_ = 1.0;
};

/// Concrete gate list of one noise trajectory through a bound circuit.
inline std::vector<Gate> noisy_trajectory(const std::vector<Gate>& bound, const NoiseModel& model, Rng& rng) {
    const auto events = NoiseLocations(bound, model).draw(rng);
    std::vector<Gate> out;
    out.reserve(bound.size() + events.size());
    std::size_t e = 0;
    for (std::size_t k = 0; k < bound.size(); ++k) {
        out.push_back(bound[k]);
        for (; e < events.size() && events[e].after == k; ++e) out.push_back(events[e].error);
    }
    return out;
}

/// Runs `circuit` at `params` with `events` inserted, starting from `state`,
/// which must hold the noiseless result of gates [0, first).
inline StateVector run_with_events(const ParamCircuit& circuit, std::span<const double> params,
                                   std::span<const NoiseEvent> events, StateVector state,
                                   std::size_t first = 0) {
    std::size_t e = 0;
    while (e < events.size() && events[e].after < first) ++e;
    const auto& gates = circuit.gates();
    for (std::size_t k = first; k < gates.size(); ++k) {
        state.apply_unchecked(gates[k].gate, circuit.angle(gates[k], params));
        for (; e < events.size() && events[e].after == k; ++e) state.apply_unchecked(events[e].error, 0.0);
    }
    return state;
}

/// Per-shot outcomes of `group` where every shot runs its own noise
/// trajectory through the bound circuit `bound`, starting from |0...0>.
inline std::vector<double> sample_group_noisy(const std::vector<Gate>& bound, int n_qubits, const PauliGroup& group,
                                              const NoiseModel& model, std::int64_t shots, Rng& rng) {
    if (shots < 1) throw ArgumentError("sample_group_noisy needs at least one shot");
    const NoiseLocations locations(bound, model);
    const StateVector clean = run(bound, StateVector(n_qubits));
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(shots));
    for (std::int64_t k = 0; k < shots; ++k) {
        const auto events = locations.draw(rng);
        StateVector psi = clean;
        if (!events.empty()) {
            psi = StateVector(n_qubits);
            std::size_t e = 0;
            for (std::size_t g = 0; g < bound.size(); ++g) {
                psi.apply(bound[g]);
                for (; e < events.size() && events[e].after == g; ++e) psi.apply(events[e].error);
            }
        }
        out.push_back(sample_group(psi, group, 1, rng).values.front());
    }
    return out;
}

/// Density matrix on at most four qubits, stored as columns.
class DensityMatrix {
public:
    static constexpr int kMaxQubits = 4;

    explicit DensityMatrix(int n_qubits) : n_(n_qubits) {
        if (n_qubits < 1 || n_qubits > kMaxQubits) throw SizeError("density-matrix oracle supports 1 to 4 qubits");
        const std::size_t dim = std::size_t{1} << n_;
        cols_.assign(dim, std::vector<cplx>(dim, cplx{0, 0}));
        cols_[0][0] = 1.0;
    }

    int n_qubits() const { return n_; }
    std::size_t dim() const { return cols_.size(); }
    cplx at(std::size_t row, std::size_t col) const { return cols_[col][row]; }

    /// rho <- U rho U^dagger
    void apply(const Gate& g) {
        detail::check_targets(g, n_);
        for (auto& c : cols_) detail::apply_raw(c, g, g.angle);
        dagger();
        for (auto& c : cols_) detail::apply_raw(c, g, g.angle);
        dagger();
    }

    /// rho <- (1 - p) rho + p / (4^k - 1) sum_{P != I} P rho P on the k targets.
    void depolarize(std::span<const int> targets, double p) {
        if (p == 0.0) return;
        const int nt = static_cast<int>(targets.size());
        const std::uint64_t count = (std::uint64_t{1} << (2 * nt)) - 1;
        auto acc = cols_;
        for (auto& c : acc)
            for (auto& v : c) v *= 1.0 - p;
        for (std::uint64_t k = 1; k <= count; ++k) {
            DensityMatrix term = *this;
            term.apply(Gate::pauli_error(std::vector<int>(targets.begin(), targets.end()),
                                         detail::nonidentity_pauli(nt, k)));
            for (std::size_t c = 0; c < acc.size(); ++c)
                for (std::size_t r = 0; r < acc.size(); ++r) acc[c][r] += p / static_cast<double>(count) * term.cols_[c][r];
        }
        cols_ = std::move(acc);
    }

    double expectation(const PauliString& s) const {
        const detail::PauliMasks m = detail::masks_of(s);
        cplx tr{0, 0};
        // Tr(P rho) = sum_k phase(k ^ flip) rho[k ^ flip, k]
        for (std::size_t k = 0; k < dim(); ++k) tr += detail::pauli_phase(m, k ^ m.flip) * cols_[k][k ^ m.flip];
        return s.weight * tr.real();
    }

    double expectation(const Observable& obs) const {
        if (obs.n_qubits() != n_) throw ShapeError("observable and density matrix disagree on qubit count");
        double acc = 0.0;
        for (const auto& g : obs.groups()) {
            double gs = 0.0;
            for (const auto& s : g.strings) gs += expectation(s);
            acc += g.coefficient * gs;
        }
        return acc;
    }

    double trace() const {
        double t = 0.0;
        for (std::size_t k = 0; k < dim(); ++k) t += cols_[k][k].real();
        return t;
    }

private:
    void dagger() {
        const std::size_t d = dim();
        std::vector<std::vector<cplx>> out(d, std::vector<cplx>(d));
        for (std::size_t c = 0; c < d; ++c)
            for (std::size_t r = 0; r < d; ++r) out[r][c] = std::conj(cols_[c][r]);
        cols_ = std::move(out);
    }

    int n_;
    std::vector<std::vector<cplx>> cols_;
};

/// Exact noisy expectation by explicit channel evolution. Test oracle for
/// trajectory sampling; limited to four qubits.
inline double noisy_expectation_oracle(const std::vector<Gate>& bound, const Observable& obs, const NoiseModel& model) {
    DensityMatrix rho(obs.n_qubits());
    for (const auto& g : bound) {
        rho.apply(g);
        if (g.kind == GateKind::PauliError) continue;
        const double p = model.error_probability(g);
        if (p > 0.0) rho.depolarize(g.targets, p);
    }
    return rho.expectation(obs);
}

} // namespace santaq
