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
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "santaq/circuit.hpp"
#include "santaq/pauli.hpp"
#include "santaq/rng.hpp"
#include "santaq/state_vector.hpp"

using namespace santaq;

namespace {

Gate random_gate(int n, Rng& rng) {
    const int q = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    int q2 = q;
    if (n > 1)
        while (q2 == q) q2 = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    const double a = 2 * std::numbers::pi * rng.uniform();
    switch (rng.below(n > 1 ? 7 : 4)) {
    case 0: return Gate::h(q);
    case 1: return Gate::rx(q, a);
    case 2: return Gate::ry(q, a);
    case 3: return Gate::rz(q, a);
    case 4: return Gate::cz(q, q2);
    case 5: return Gate::pauli_rotation({q, q2}, {static_cast<Pauli>(1 + rng.below(3)), static_cast<Pauli>(1 + rng.below(3))}, a);
    default: return Gate::pauli_error({q, q2}, {static_cast<Pauli>(rng.below(4)), static_cast<Pauli>(1 + rng.below(3))});
    }
}

PauliString random_string(int n, Rng& rng) {
    PauliString s{1.0, {}};
    for (int q = 0; q < n; ++q) s.axes.push_back(static_cast<Pauli>(rng.below(4)));
    return s;
}

} // namespace

TEST(NewState, BasisAmplitudes) {
    const auto s1 = new_state(1);
    ASSERT_EQ(s1.dim(), 2u);
    EXPECT_EQ(s1.amplitudes()[0], cplx(1, 0));
    EXPECT_EQ(s1.amplitudes()[1], cplx(0, 0));
    const auto s2 = new_state(2);
    ASSERT_EQ(s2.dim(), 4u);
    EXPECT_EQ(s2.amplitudes()[0], cplx(1, 0));
    for (int k = 1; k < 4; ++k) EXPECT_EQ(s2.amplitudes()[k], cplx(0, 0));
}

TEST(NewState, RejectsOutOfRangeSizes) {
    EXPECT_THROW(new_state(0), SizeError);
    EXPECT_THROW(new_state(25), SizeError);
    EXPECT_NO_THROW(new_state(kMaxQubits > 16 ? 16 : kMaxQubits));
}

TEST(ApplyGate, HadamardOnZero) {
    const auto s = apply_gate(new_state(1), Gate::h(0));
    EXPECT_NEAR(s.amplitudes()[0].real(), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(s.amplitudes()[1].real(), 1 / std::sqrt(2.0), 1e-15);
}

TEST(ApplyGate, ZeroAngleRxIsIdentity) {
    Rng rng(3);
    StateVector s(3);
    for (int k = 0; k < 10; ++k) s.apply(random_gate(3, rng));
    const auto t = apply_gate(s, Gate::rx(1, 0.0));
    for (std::size_t k = 0; k < s.dim(); ++k) EXPECT_EQ(s.amplitudes()[k], t.amplitudes()[k]);
}

TEST(ApplyGate, CzOnOneOne) {
    StateVector s = apply_gate(apply_gate(new_state(2), Gate::rx(0, std::numbers::pi)), Gate::rx(1, std::numbers::pi));
    const cplx before = s.amplitudes()[3];
    s.apply(Gate::cz(0, 1));
    EXPECT_NEAR(std::abs(s.amplitudes()[3] + before), 0.0, 1e-14);
}

TEST(ApplyGate, TargetErrors) {
    StateVector s(2);
    EXPECT_THROW(s.apply(Gate::h(2)), IndexError);
    EXPECT_THROW(s.apply(Gate::rx(-1, 0.3)), IndexError);
    EXPECT_THROW(s.apply(Gate::cz(1, 1)), IndexError);
}

TEST(ApplyGate, MatchesDenseOracle) {
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(4));
        std::vector<Gate> gates;
        for (int k = 0; k < 25; ++k) gates.push_back(random_gate(n, rng));
        StateVector s(n);
        for (const auto& g : gates) s.apply(g);
        const auto ref = oracle::run(gates, n);
        EXPECT_LT((oracle::to_vec(s) - ref).norm(), 1e-12);
    }
}

TEST(ApplyGate, NormPreservedOnLongCircuits) {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(6));
        StateVector s(n);
        for (int k = 0; k < 100; ++k) s.apply(random_gate(n, rng));
        EXPECT_LT(std::abs(s.norm_squared() - 1.0), 1e-9);
    }
}

TEST(Expectation, SimpleEigenstates) {
    EXPECT_DOUBLE_EQ(expectation(new_state(1), PauliString::parse("Z")), 1.0);
    const auto plus = apply_gate(new_state(1), Gate::h(0));
    EXPECT_NEAR(expectation(plus, PauliString::parse("X")), 1.0, 1e-14);
}

TEST(Expectation, TfimOnZeroZero) {
    const auto h = tfim_observable(2, 1.0, 1.5);
    EXPECT_NEAR(expectation(new_state(2), h), -1.0, 1e-14);
    EXPECT_NEAR(oracle::expect(oracle::observable(h), oracle::zero_state(2)), -1.0, 1e-14);
}

TEST(Expectation, MatchesDenseOnRandomStates) {
    Rng rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(3));
        std::vector<Gate> gates;
        for (int k = 0; k < 15; ++k) gates.push_back(random_gate(n, rng));
        StateVector s(n);
        for (const auto& g : gates) s.apply(g);
        const auto ref = oracle::run(gates, n);
        const PauliString p = random_string(n, rng);
        EXPECT_NEAR(expectation(s, p), oracle::expect(oracle::pauli(p.axes), ref), 1e-10);
    }
}

TEST(Expectation, QubitCountMismatchIsShapeError) {
    EXPECT_THROW(expectation(new_state(3), tfim_observable(2, 1, 1)), ShapeError);
}

TEST(Pauli, ParseAndLabel) {
    const auto s = PauliString::parse("XIZY", 0.5);
    EXPECT_EQ(s.label(), "XIZY");
    EXPECT_EQ(s.flip_mask(), 0b1001u);
    EXPECT_EQ(s.phase_mask(), 0b1100u);
    EXPECT_EQ(s.y_count(), 1);
    EXPECT_THROW(PauliString::parse("XQ"), ArgumentError);
}

TEST(Pauli, QubitwiseCommutation) {
    EXPECT_TRUE(qubitwise_commute(PauliString::parse("ZZI"), PauliString::parse("IZZ")));
    EXPECT_FALSE(qubitwise_commute(PauliString::parse("XZ"), PauliString::parse("ZZ")));
    EXPECT_THROW(Observable(2, {PauliGroup{1.0, {PauliString::parse("XI"), PauliString::parse("ZI")}}}), ArgumentError);
}

TEST(Pauli, TfimAllocationWeights) {
    const auto h = tfim_observable(6, 1.0, 1.5);
    const auto w = h.allocation_weights();
    ASSERT_EQ(w.size(), 2u);
    EXPECT_DOUBLE_EQ(w[0], 5.0);
    EXPECT_DOUBLE_EQ(w[1], 9.0);
    EXPECT_EQ(tfim_observable(4, 1.0, 0.0).groups().size(), 1u);
}

TEST(SampleGroup, ZeroVarianceEigenstates) {
    Rng rng(1);
    const PauliGroup z{1.0, {PauliString::parse("Z")}};
    for (double v : sample_group(new_state(1), z, 100, rng).values) EXPECT_EQ(v, 1.0);
    const PauliGroup x{1.0, {PauliString::parse("X")}};
    for (double v : sample_group(apply_gate(new_state(1), Gate::h(0)), x, 100, rng).values) EXPECT_EQ(v, 1.0);
}

TEST(SampleGroup, ZOnPlusBinomial) {
    Rng rng(2);
    const PauliGroup z{1.0, {PauliString::parse("Z")}};
    const int shots = 100000;
    const auto out = sample_group(apply_gate(new_state(1), Gate::h(0)), z, shots, rng);
    double mean = 0;
    for (double v : out.values) mean += v;
    mean /= shots;
    EXPECT_LT(std::abs(mean), 5.0 / std::sqrt(static_cast<double>(shots)));
    EXPECT_EQ(out.bits.size(), static_cast<std::size_t>(shots));
}

TEST(SampleGroup, ZeroShotsIsArgumentError) {
    Rng rng(2);
    const PauliGroup z{1.0, {PauliString::parse("Z")}};
    EXPECT_THROW(sample_group(new_state(1), z, 0, rng), ArgumentError);
}

TEST(SampleGroup, UnbiasedOnRandomInstances) {
    Rng rng(7);
    const int shots = 100000;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(3));
        StateVector s(n);
        for (int k = 0; k < 12; ++k) s.apply(random_gate(n, rng));
        // Two qubit-wise commuting strings sharing one basis.
        PauliString a = random_string(n, rng), b = a;
        for (auto& p : b.axes)
            if (rng.uniform() < 0.5) p = Pauli::I;
        b.weight = 0.5;
        const PauliGroup g{-1.3, {a, b}};
        const auto out = sample_group(s, g, shots, rng);
        double mean = 0, sq = 0;
        for (double v : out.values) mean += v;
        mean /= shots;
        for (double v : out.values) sq += (v - mean) * (v - mean);
        const double se = std::sqrt(sq / (shots - 1) / shots);
        EXPECT_LE(std::abs(mean - expectation(s, g)), 5 * se + 1e-9);
    }
}

TEST(SampleGroup, BasisRotationLimitMatchesDense) {
    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(3));
        std::vector<Gate> gates;
        for (int k = 0; k < 12; ++k) gates.push_back(random_gate(n, rng));
        const StateVector s = run(gates, StateVector(n));
        const PauliString p = random_string(n, rng);
        const PauliGroup g{1.0, {p}};
        const auto probs = rotate_to_basis(s, g.basis()).probabilities();
        double limit = 0.0;
        for (std::size_t k = 0; k < probs.size(); ++k) limit += probs[k] * group_eigenvalue(g, k);
        EXPECT_NEAR(limit, oracle::expect(oracle::pauli(p.axes), oracle::run(gates, n)), 1e-10);
    }
}

TEST(Rng, SplitAndReproducibility) {
    Rng a(42), b(42);
    for (int k = 0; k < 5; ++k) EXPECT_EQ(a.uniform(), b.uniform());
    Rng c = a.split(), d = b.split();
    EXPECT_EQ(c.normal(), d.normal());
    EXPECT_NE(Rng(1).uniform(), Rng(2).uniform());
}
