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
#include "santaq/rng.hpp"

using namespace santaq;

namespace {

std::vector<double> random_params(std::size_t n, Rng& rng) {
    std::vector<double> p(n);
    for (auto& x : p) x = 2 * std::numbers::pi * rng.uniform();
    return p;
}

double exact(const ParamCircuit& c, std::span<const double> p, const Observable& obs) {
    return expectation(run(c, p), obs);
}

} // namespace

TEST(TfimAnsatz, ParameterCount) {
    EXPECT_EQ(tfim_ansatz(2, 1).n_params(), 2u + 2u * 2u * 1u);
    EXPECT_EQ(tfim_ansatz(6, 3).n_params(), 42u);
    EXPECT_THROW(tfim_ansatz(2, 0), ArgumentError);
    EXPECT_THROW(tfim_ansatz(1, 1), ArgumentError);
}

TEST(TfimAnsatz, ZeroParametersMatchDenseOracle) {
    const auto c = tfim_ansatz(2, 1);
    const std::vector<double> zero(c.n_params(), 0.0);
    const auto s = run(c, zero);
    // RY(0) and RZ(0) are identities; CZ leaves |00> alone.
    const auto ref = oracle::run({Gate::cz(0, 1)}, 2);
    EXPECT_LT((oracle::to_vec(s) - ref).norm(), 1e-14);
}

TEST(TfimAnsatz, BindMatchesDense) {
    Rng rng(4);
    const auto c = tfim_ansatz(3, 2);
    const auto p = random_params(c.n_params(), rng);
    EXPECT_LT((oracle::to_vec(run(c, p)) - oracle::run(c.bind(p), 3)).norm(), 1e-12);
}

TEST(FeatureMap, ZeroVectorGivesZeroState) {
    const std::vector<double> x(3, 0.0);
    const auto s = run(feature_map(x), std::span<const double>{});
    EXPECT_NEAR(std::abs(s.amplitudes()[0]), 1.0, 1e-14);
}

TEST(FeatureMap, SingleQubitMatchesMatrixOracle) {
    const std::vector<double> x{0.5};
    const auto s = run(feature_map(x), std::span<const double>{});
    oracle::Mat h(2, 2);
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);
    const oracle::Mat rz = oracle::rotation(oracle::single(Pauli::Z), 2 * std::numbers::pi * 0.5);
    const oracle::Mat step = rz * h;
    const oracle::Vec ref = step * step * oracle::zero_state(1);
    EXPECT_LT((oracle::to_vec(s) - ref).norm(), 1e-14);
}

TEST(FeatureMap, MatchesExponentialForm) {
    // U_z(x) = exp(-i pi [sum x_i Z_i + sum x_i x_j Z_i Z_j]) is diagonal; check
    // it against its diagonal directly.
    const std::vector<double> x{0.2, 0.7, 0.4};
    const int n = 3;
    const Eigen::Index d = 8;
    oracle::Mat uz = oracle::Mat::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        double phase = 0;
        for (int i = 0; i < n; ++i) {
            const double zi = ((k >> i) & 1) ? -1 : 1;
            phase += x[i] * zi;
            for (int j = i + 1; j < n; ++j) phase += x[i] * x[j] * zi * (((k >> j) & 1) ? -1 : 1);
        }
        uz(k, k) = std::exp(oracle::cd(0, -std::numbers::pi * phase));
    }
    oracle::Mat hn = oracle::Mat::Identity(1, 1);
    oracle::Mat h(2, 2);
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);
    for (int q = 0; q < n; ++q) hn = oracle::kron(hn, h);
    const oracle::Vec ref = uz * hn * uz * hn * oracle::zero_state(n);
    const auto s = run(feature_map(x), std::span<const double>{});
    // Equal up to a global phase.
    const oracle::cd overlap = (ref.adjoint() * oracle::to_vec(s))(0, 0);
    EXPECT_NEAR(std::abs(overlap), 1.0, 1e-12);
}

TEST(FeatureMap, Deterministic) {
    const std::vector<double> x{0.1, 0.3};
    const auto a = feature_map(x).bind({}), b = feature_map(x).bind({});
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a[k].kind, b[k].kind);
        EXPECT_EQ(a[k].angle, b[k].angle);
        EXPECT_EQ(a[k].targets, b[k].targets);
    }
}

TEST(FeatureMap, RejectsBadInput) {
    const std::vector<double> bad{0.1, std::nan("")};
    EXPECT_THROW(feature_map(bad), ArgumentError);
    EXPECT_THROW(feature_map(std::vector<double>{}), ShapeError);
}

TEST(TrainableCircuit, ParameterCounts) {
    EXPECT_EQ(trainable_circuit(4, 10).n_params(), 120u);
    EXPECT_EQ(trainable_circuit(10, 2).n_params(), 60u);
    EXPECT_EQ(trainable_circuit(4, 4).n_params(), 48u);
    EXPECT_THROW(trainable_circuit(2, 0), ArgumentError);
}

TEST(TrainableCircuit, ZeroAnglesLeaveCzOnly) {
    const auto c = trainable_circuit(3, 2);
    const std::vector<double> zero(c.n_params(), 0.0);
    // CZ acts trivially on |000>.
    EXPECT_NEAR(std::abs(run(c, zero).amplitudes()[0]), 1.0, 1e-14);
}

TEST(TrainableCircuit, PackingOrder) {
    const auto c = trainable_circuit(2, 1);
    const auto& g = c.gates();
    EXPECT_EQ(g[0].gate.kind, GateKind::RX);
    EXPECT_EQ(g[1].gate.kind, GateKind::RY);
    EXPECT_EQ(g[2].gate.kind, GateKind::RZ);
    EXPECT_EQ(g[3].gate.targets[0], 1);
    EXPECT_EQ(g[3].slot, 3);
}

TEST(ShiftedPair, SingleRxGradient) {
    ParamCircuit c(1);
    c.add_param(Gate::rx(0, 0));
    const auto z = Observable::single(PauliString::parse("Z"));
    for (double th : {-2.0, -0.3, 0.0, 0.9, 2.5}) {
        const std::vector<double> p{th};
        const auto [plus, minus] = shifted_pair(c, p, 0);
        const double grad = (expectation(run(plus, StateVector(1)), z) - expectation(run(minus, StateVector(1)), z)) / 2;
        EXPECT_NEAR(grad, -std::sin(th), 1e-14);
    }
}

TEST(ShiftedPair, Errors) {
    ParamCircuit c(1);
    c.add_param(Gate::rx(0, 0));
    const std::vector<double> p{0.3};
    EXPECT_THROW(shifted_pair(c, p, 1), IndexError);
    c.add_shared(Gate::ry(0, 0), 0);
    EXPECT_THROW(shifted_pair(c, p, 0), ContractError);
    EXPECT_THROW(c.add_param(Gate::h(0)), ArgumentError);
}

TEST(ShiftedPair, DiffersOnlyInSlot) {
    Rng rng(8);
    const auto c = trainable_circuit(2, 2);
    const auto p = random_params(c.n_params(), rng);
    const auto [plus, minus] = shifted_pair(c, p, 5);
    for (std::size_t k = 0; k < plus.size(); ++k) {
        if (c.gates()[k].slot == 5) EXPECT_NEAR(plus[k].angle - minus[k].angle, std::numbers::pi, 1e-15);
        else EXPECT_EQ(plus[k].angle, minus[k].angle);
    }
}

TEST(Psr, MatchesFiniteDifferencesOnRandomThreeQubitCircuits) {
    Rng rng(12);
    const Observable obs(3, {PauliGroup{0.7, {PauliString::parse("ZZI"), PauliString::parse("IZZ")}},
                             PauliGroup{-1.1, {PauliString::parse("XIY")}}});
    for (int trial = 0; trial < 10; ++trial) {
        ParamCircuit c = trial % 2 ? tfim_ansatz(3, 2) : trainable_circuit(3, 2);
        c.add_param(Gate::pauli_rotation({0, 2}, {Pauli::X, Pauli::Z}, 0));
        const auto p = random_params(c.n_params(), rng);
        for (std::size_t j = 0; j < c.n_params(); ++j) {
            const double psr = (exact(c, shifted(p, j, kShift), obs) - exact(c, shifted(p, j, -kShift), obs)) / 2;
            const double h = 1e-5;
            const double fd = (exact(c, shifted(p, j, h), obs) - exact(c, shifted(p, j, -h), obs)) / (2 * h);
            EXPECT_NEAR(psr, fd, 1e-6);
        }
    }
}

TEST(ParamCircuit, AppendOffsetsSlots) {
    auto a = trainable_circuit(2, 1);
    const auto b = trainable_circuit(2, 1);
    a.append(b);
    EXPECT_EQ(a.n_params(), 12u);
    EXPECT_EQ(a.gates().back().slot, -1);
    EXPECT_EQ(a.gates()[a.gates().size() - 2].slot, 11);
    EXPECT_THROW(a.append(trainable_circuit(3, 1)), ShapeError);
    EXPECT_THROW(run(a, std::vector<double>(3, 0.0)), ShapeError);
}
