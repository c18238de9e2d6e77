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
#include "santaq/noise.hpp"
#include "santaq/rng.hpp"

using namespace santaq;

namespace {

std::vector<Gate> random_circuit(int n, int length, Rng& rng) {
    std::vector<Gate> out;
    for (int k = 0; k < length; ++k) {
        const int q = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        const double a = 2 * std::numbers::pi * rng.uniform();
        const auto kind = rng.below(n > 1 ? 6 : 4);
        if (kind >= 4) {
            int q2 = q;
            while (q2 == q) q2 = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
            out.push_back(kind == 4 ? Gate::cz(q, q2) : Gate::pauli_rotation({q, q2}, {Pauli::Z, Pauli::Z}, a));
        } else {
            out.push_back(kind == 0 ? Gate::h(q) : kind == 1 ? Gate::rx(q, a) : kind == 2 ? Gate::ry(q, a) : Gate::rz(q, a));
        }
    }
    return out;
}

/// Dense channel oracle: rho <- (1-p) rho + p/(4^k-1) sum P rho P.
oracle::Mat dense_noisy_rho(const std::vector<Gate>& gates, int n, const NoiseModel& m) {
    const oracle::Vec z = oracle::zero_state(n);
    oracle::Mat rho = z * z.adjoint();
    for (const auto& g : gates) {
        const oracle::Mat u = oracle::gate_matrix(g, n);
        rho = u * rho * u.adjoint();
        const double p = m.error_probability(g);
        if (p == 0.0) continue;
        const int nt = static_cast<int>(g.targets.size());
        const int count = (1 << (2 * nt)) - 1;
        oracle::Mat acc = (1 - p) * rho;
        for (int k = 1; k <= count; ++k) {
            std::vector<Pauli> ps;
            for (int t = 0, kk = k; t < nt; ++t, kk /= 4) ps.push_back(static_cast<Pauli>(kk % 4));
            const oracle::Mat P = oracle::pauli_on(n, g.targets, ps);
            acc += p / count * P * rho * P;
        }
        rho = acc;
    }
    return rho;
}

} // namespace

TEST(NoiseModel, ErrorProbabilities) {
    const auto m = NoiseModel::depolarizing(1e-3, 1e-2);
    EXPECT_EQ(m.error_probability(Gate::h(0)), 1e-3);
    EXPECT_EQ(m.error_probability(Gate::rx(0, 1)), 1e-3);
    EXPECT_EQ(m.error_probability(Gate::rz(0, 1)), 0.0);
    EXPECT_EQ(m.error_probability(Gate::cz(0, 1)), 1e-2);
    const Gate zz = Gate::pauli_rotation({0, 1}, {Pauli::Z, Pauli::Z}, 0.4);
    EXPECT_EQ(m.error_probability(zz), 1e-2);
    NoiseModel ex = m;
    ex.exempt_zz_rotations = true;
    EXPECT_EQ(ex.error_probability(zz), 0.0);
    EXPECT_EQ(ex.error_probability(Gate::cz(0, 1)), 1e-2);
    EXPECT_THROW(NoiseModel::depolarizing(1.5, 0), ArgumentError);
    EXPECT_THROW(m.error_probability(Gate::pauli_rotation({0, 1, 2}, {Pauli::Z, Pauli::Z, Pauli::Z}, 1)), ContractError);
}

TEST(NoisyTrajectory, ZeroNoiseLeavesCircuitUnchanged) {
    Rng rng(1);
    const auto c = random_circuit(3, 30, rng);
    const auto t = noisy_trajectory(c, NoiseModel{}, rng);
    ASSERT_EQ(t.size(), c.size());
    for (std::size_t k = 0; k < c.size(); ++k) EXPECT_EQ(t[k].kind, c[k].kind);
}

TEST(NoisyTrajectory, RzIsNeverFollowedByNoise) {
    Rng rng(2);
    const std::vector<Gate> c{Gate::rz(0, 0.3)};
    for (int k = 0; k < 200; ++k) EXPECT_EQ(noisy_trajectory(c, NoiseModel{1.0, 1.0}, rng).size(), 1u);
}

TEST(NoisyTrajectory, FullDepolarizingAfterHadamard) {
    Rng rng(3);
    const std::vector<Gate> c{Gate::h(0)};
    const NoiseModel m{1.0, 0.0};
    int counts[4] = {0, 0, 0, 0};
    double z = 0;
    const int shots = 30000;
    for (int k = 0; k < shots; ++k) {
        const auto t = noisy_trajectory(c, m, rng);
        ASSERT_EQ(t.size(), 2u);
        ASSERT_EQ(t[1].kind, GateKind::PauliError);
        ++counts[static_cast<int>(t[1].paulis[0])];
        z += expectation(run(t, StateVector(1)), PauliString::parse("Z"));
    }
    EXPECT_EQ(counts[0], 0);
    for (int a = 1; a < 4; ++a) EXPECT_NEAR(counts[a] / double(shots), 1.0 / 3, 0.02);
    // X and Y errors flip Z on |+>... which has <Z> = 0 anyway; the oracle agrees.
    EXPECT_NEAR(z / shots, 0.0, 1e-12);
    EXPECT_NEAR(noisy_expectation_oracle(c, Observable::single(PauliString::parse("Z")), m), 0.0, 1e-14);
}

TEST(NoiseLocations, TwoQubitErrorsAreUniformOverFifteen) {
    Rng rng(4);
    const NoiseLocations loc(std::vector<Gate>{Gate::cz(0, 1)}, NoiseModel{0.0, 1.0});
    std::vector<int> counts(16, 0);
    const int n = 45000;
    for (int k = 0; k < n; ++k) {
        const auto ev = loc.draw(rng);
        ASSERT_EQ(ev.size(), 1u);
        ++counts[static_cast<int>(ev[0].error.paulis[0]) + 4 * static_cast<int>(ev[0].error.paulis[1])];
    }
    EXPECT_EQ(counts[0], 0);
    for (int k = 1; k < 16; ++k) EXPECT_NEAR(counts[k] / double(n), 1.0 / 15, 0.006);
}

TEST(NoiseLocations, CleanProbability) {
    const NoiseLocations loc(std::vector<Gate>{Gate::h(0), Gate::rz(0, 1), Gate::cz(0, 1)}, NoiseModel{0.1, 0.2});
    EXPECT_NEAR(loc.clean_probability(), 0.9 * 0.8, 1e-15);
    Rng rng(5);
    int clean = 0;
    const int n = 40000;
    for (int k = 0; k < n; ++k) clean += loc.draw(rng).empty();
    EXPECT_NEAR(clean / double(n), 0.72, 5 * std::sqrt(0.72 * 0.28 / n));
}

TEST(DensityMatrix, NoiselessMatchesStateVector) {
    Rng rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(3));
        const auto c = random_circuit(n, 20, rng);
        const Observable obs(n, {PauliGroup{1.0, {PauliString::parse(std::string(n, 'Z'))}},
                                 PauliGroup{-0.5, {PauliString::parse("X" + std::string(n - 1, 'I'))}}});
        EXPECT_NEAR(noisy_expectation_oracle(c, obs, NoiseModel{}), expectation(run(c, StateVector(n)), obs), 1e-10);
    }
}

TEST(DensityMatrix, MatchesDenseChannelOracle) {
    Rng rng(7);
    const NoiseModel m{0.1, 0.2};
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(3));
        const auto c = random_circuit(n, 12, rng);
        const oracle::Mat rho = dense_noisy_rho(c, n, m);
        for (const std::string& label : {std::string(n, 'Z'), std::string(n, 'X'), "Y" + std::string(n - 1, 'Z')}) {
            const auto p = PauliString::parse(label);
            const double ref = (oracle::pauli(p.axes) * rho).trace().real();
            EXPECT_NEAR(noisy_expectation_oracle(c, Observable::single(p), m), ref, 1e-10);
        }
    }
}

TEST(DensityMatrix, TraceAndCapacity) {
    DensityMatrix rho(2);
    rho.apply(Gate::h(0));
    const std::vector<int> t{0, 1};
    rho.depolarize(t, 0.3);
    EXPECT_NEAR(rho.trace(), 1.0, 1e-14);
    EXPECT_THROW(DensityMatrix(5), SizeError);
    EXPECT_THROW(noisy_expectation_oracle({}, tfim_observable(5, 1, 1), NoiseModel{}), SizeError);
}

TEST(DensityMatrix, HalfDepolarizedHadamard) {
    const std::vector<Gate> c{Gate::h(0)};
    EXPECT_NEAR(noisy_expectation_oracle(c, Observable::single(PauliString::parse("Z")), NoiseModel{0.5, 0}), 0.0, 1e-14);
}

TEST(DensityMatrix, SingleLocationContraction) {
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = 2 * std::numbers::pi * rng.uniform();
        const std::vector<Gate> c{Gate::ry(0, a)};
        for (const char* l : {"X", "Y", "Z"}) {
            const auto obs = Observable::single(PauliString::parse(l));
            const double clean = expectation(run(c, StateVector(1)), obs);
            const double noisy = noisy_expectation_oracle(c, obs, NoiseModel{0.2, 0});
            EXPECT_LE(std::abs(noisy), std::abs(clean) + 1e-14);
        }
    }
}

TEST(Trajectories, MatchDensityMatrixOnRandomTwoQubitCircuit) {
    Rng rng(9);
    const auto c = random_circuit(2, 15, rng);
    const NoiseModel m{0.1, 0.1};
    const PauliGroup g{1.0, {PauliString::parse("ZZ"), PauliString::parse("ZI")}};
    const auto vals = sample_group_noisy(c, 2, g, m, 100000, rng);
    double mean = 0, sq = 0;
    for (double v : vals) mean += v;
    mean /= vals.size();
    for (double v : vals) sq += (v - mean) * (v - mean);
    const double se = std::sqrt(sq / (vals.size() - 1) / vals.size());
    const double ref = noisy_expectation_oracle(c, Observable(2, {g}), m);
    EXPECT_LE(std::abs(mean - ref), 5 * se);
}

TEST(RunWithEvents, CheckpointResumeMatchesFullRun) {
    Rng rng(10);
    auto c = feature_map(std::vector<double>{0.3, 0.8});
    const std::size_t enc = c.size();
    c.append(trainable_circuit(2, 2));
    std::vector<double> p(c.n_params());
    for (auto& x : p) x = rng.uniform() * 6;
    const NoiseLocations loc(c, NoiseModel{0.3, 0.3});
    for (int k = 0; k < 50; ++k) {
        const auto ev = loc.draw(rng);
        if (ev.empty() || ev.front().after < enc) continue;
        StateVector mid(2);
        run_range(c, p, mid, 0, enc);
        const auto a = run_with_events(c, p, ev, mid, enc);
        const auto b = run_with_events(c, p, ev, StateVector(2), 0);
        for (std::size_t i = 0; i < a.dim(); ++i) EXPECT_LT(std::abs(a.amplitudes()[i] - b.amplitudes()[i]), 1e-13);
    }
}
