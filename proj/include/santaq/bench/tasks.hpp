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

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "santaq/bench/data.hpp"
#include "santaq/circuit.hpp"
#include "santaq/errors.hpp"
#include "santaq/estimators.hpp"
#include "santaq/noise.hpp"
#include "santaq/pauli.hpp"
#include "santaq/rng.hpp"
#include "santaq/state_vector.hpp"

namespace santaq::bench {

/// Ground energy of the open TFIM chain from its free-fermion spectrum:
/// E0 = -sum of singular values of the bidiagonal matrix with g on the
/// diagonal and J above it.
inline double tfim_ground_energy(int n, double coupling, double field) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) b(i, i) = field;
    for (int i = 0; i + 1 < n; ++i) b(i, i + 1) = coupling;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
    return -svd.singularValues().sum();
}

inline std::vector<double> uniform_angles(std::size_t n, Rng& rng) {
    std::vector<double> out(n);
    for (auto& v : out) v = 2 * std::numbers::pi * rng.uniform();
    return out;
}

struct VqeTfimSpec {
    int n_qubits = 6;
    double J = 1.0;
    double g = 1.5;
    int depth = 3;
    Allocation allocation = Allocation::WDS;
};

/// Energy minimization of the TFIM chain. The reported train loss is the
/// per-site precision (E - E0) / (J N).
class VqeTfimTask final : public Task {
public:
    explicit VqeTfimTask(const VqeTfimSpec& spec)
        : spec_(spec), circuit_(tfim_ansatz(spec.n_qubits, spec.depth)),
          hamiltonian_(tfim_observable(spec.n_qubits, spec.J, spec.g)),
          ground_(tfim_ground_energy(spec.n_qubits, spec.J, spec.g)) {
        if (spec.J == 0.0) throw ArgumentError("TFIM coupling J must be non-zero");
    }

    std::string_view name() const override { return "vqe-tfim"; }
    std::size_t dim() const override { return circuit_.n_params(); }
    std::size_t train_size() const override { return 1; }
    LossKind loss_kind() const override { return LossKind::Linear; }

    GradPoint grad_point(std::span<const double> params, std::size_t, std::span<const Shots> s,
                         Rng& rng) const override {
        return grad_point_linear(circuit_, hamiltonian_, params, s, spec_.allocation, rng);
    }

    double exact_loss(std::span<const double> params) const override {
        return expectation(run(circuit_, params), hamiltonian_);
    }

    Metrics metrics(std::span<const double> params) const override {
        return {precision(exact_loss(params)), {}, {}, {}};
    }

    std::vector<double> initial_params(Rng& rng) const override { return uniform_angles(dim(), rng); }

    double ground_energy() const { return ground_; }
    double precision(double energy) const { return (energy - ground_) / (spec_.J * spec_.n_qubits); }
    const ParamCircuit& circuit() const { return circuit_; }
    const Observable& hamiltonian() const { return hamiltonian_; }

private:
    VqeTfimSpec spec_;
    ParamCircuit circuit_;
    Observable hamiltonian_;
    double ground_;
};

/// Shot source for models of the form trainable(theta) feature_map(x) |0>.
/// Noiseless shots reuse the cached encoded state; with noise each shot runs
/// its own Pauli-error trajectory through the full circuit.
class EncodedModel {
public:
    EncodedModel(const std::vector<std::vector<double>>& features, int depth, const NoiseModel& noise)
        : trainable_(trainable_circuit(static_cast<int>(features.front().size()), depth)), noise_(noise) {
        const int n = static_cast<int>(features.front().size());
        encoded_.reserve(features.size());
        for (const auto& x : features) {
            if (static_cast<int>(x.size()) != n) throw ShapeError("feature vectors differ in length");
            const ParamCircuit fm = feature_map(x);
            encoded_.push_back(run(fm, std::span<const double>{}));
            if (!noise_.is_noiseless()) {
                ParamCircuit full = fm;
                full.append(trainable_);
                encoding_gates_ = fm.size();
                locations_.emplace_back(full, noise_);
                full_.push_back(std::move(full));
            }
        }
    }

    int n_qubits() const { return trainable_.n_qubits(); }
    std::size_t n_params() const { return trainable_.n_params(); }
    const ParamCircuit& trainable() const { return trainable_; }
    const NoiseModel& noise() const { return noise_; }

    StateVector state(std::size_t point, std::span<const double> params) const {
        return run(trainable_, params, encoded_[point]);
    }

    /// Per-shot outcomes `outcome(bits)` of `shots` computational-basis measurements.
    template <class Outcome>
    std::vector<double> sample(std::size_t point, std::span<const double> params, Shots shots, Rng& rng,
                               Outcome&& outcome) const {
        const StateVector clean = state(point, params);
        const auto probs = clean.probabilities();
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(shots));
        if (noise_.is_noiseless()) {
            for (auto b : sample_bits(probs, static_cast<int>(shots), rng)) out.push_back(outcome(b));
            return out;
        }
        std::discrete_distribution<std::uint64_t> clean_dist(probs.begin(), probs.end());
        const ParamCircuit& full = full_[point];
        for (Shots k = 0; k < shots; ++k) {
            const auto events = locations_[point].draw(rng);
            if (events.empty()) {
                out.push_back(outcome(clean_dist(rng.engine())));
                continue;
            }
            const bool after_encoding = events.front().after >= encoding_gates_;
            StateVector psi = after_encoding
                                  ? run_with_events(full, params, events, encoded_[point], encoding_gates_)
                                  : run_with_events(full, params, events, StateVector(n_qubits()), 0);
            out.push_back(outcome(draw_one(psi, rng)));
        }
        return out;
    }

private:
    static std::uint64_t draw_one(const StateVector& psi, Rng& rng) {
        const double u = rng.uniform();
        double acc = 0.0;
        const auto amps = psi.amplitudes();
        for (std::size_t k = 0; k < amps.size(); ++k) {
            acc += std::norm(amps[k]);
            if (u < acc) return k;
        }
        return amps.size() - 1;
    }

    ParamCircuit trainable_;
    NoiseModel noise_;
    std::vector<StateVector> encoded_;
    std::vector<ParamCircuit> full_;
    std::vector<NoiseLocations> locations_;
    std::size_t encoding_gates_ = 0;
};

struct RegressionSpec {
    int n_qubits = 4;
    int depth = 10;
    std::size_t n_train = 880;
    std::size_t n_test = 220;
    /// Empty: synthetic uniform features.
    std::string features_path;
    NoiseModel noise;
};

/// Fits labels generated by the same model at hidden parameters,
/// y(x) = w* <Z_0>_{x, theta*}, with w* setting the label std to 1. The loss is
/// the MSE of w <Z_0>; w is the last trainable value.
class RegressionTask final : public Task {
public:
    RegressionTask(const RegressionSpec& spec, Rng& rng) : spec_(spec) {
        Dataset ds = spec.features_path.empty()
                         ? synthetic_features(spec.n_train + spec.n_test, static_cast<std::size_t>(spec.n_qubits), rng)
                         : load_feature_csv(spec.features_path, static_cast<std::size_t>(spec.n_qubits));
        split_ = random_split(ds.size(), spec.n_train, spec.n_test, rng);
        model_.emplace(ds.features, spec.depth, spec.noise);
        target_theta_ = uniform_angles(model_->n_params(), rng);
        raw_labels_.resize(ds.size());
        for (std::size_t i = 0; i < ds.size(); ++i) raw_labels_[i] = z0(model_->state(i, target_theta_));
        const double mean = sample_mean(raw_labels_);
        double var = 0.0;
        for (double v : raw_labels_) var += (v - mean) * (v - mean);
        const double sd = std::sqrt(var / static_cast<double>(raw_labels_.size()));
        if (!(sd > 1e-12)) throw DegenerateTargetError("generated labels have zero spread");
        target_weight_ = 1.0 / sd;
        labels_.resize(ds.size());
        for (std::size_t i = 0; i < ds.size(); ++i) labels_[i] = target_weight_ * raw_labels_[i];
    }

    std::string_view name() const override { return "regression"; }
    std::size_t dim() const override { return model_->n_params() + 1; }
    std::size_t train_size() const override { return split_.train.size(); }
    LossKind loss_kind() const override { return LossKind::Quadratic; }
    bool weight_trainable() const override { return true; }

    GradPoint grad_point(std::span<const double> params, std::size_t index, std::span<const Shots> s,
                         Rng& rng) const override {
        const std::size_t point = split_.train.at(index);
        const double y = labels_[point];
        const auto circuit_params = params.first(model_->n_params());
        auto sampler = [&](std::span<const double> p, Shots shots, Rng& r) {
            return model_->sample(point, p, shots, r, [](std::uint64_t b) { return (b & 1U) ? -1.0 : 1.0; });
        };
        return grad_point_quadratic(sampler, circuit_params, params.back(), true,
                                    QuadraticCoefficients{y * y, -2 * y, 1.0}, s, rng);
    }

    double exact_loss(std::span<const double> params) const override { return mse(params, split_.train); }

    Metrics metrics(std::span<const double> params) const override {
        return {mse(params, split_.train), mse(params, split_.test), {}, {}};
    }

    std::vector<double> initial_params(Rng& rng) const override {
        auto p = uniform_angles(model_->n_params(), rng);
        p.push_back(1.0);
        return p;
    }

    /// theta* followed by w*.
    std::vector<double> target_params() const {
        auto p = target_theta_;
        p.push_back(target_weight_);
        return p;
    }
    const std::vector<double>& labels() const { return labels_; }
    const Split& split() const { return split_; }
    const EncodedModel& model() const { return *model_; }

private:
    static double z0(const StateVector& psi) {
        double acc = 0.0;
        const auto amps = psi.amplitudes();
        for (std::size_t k = 0; k < amps.size(); ++k) acc += (k & 1U) ? -std::norm(amps[k]) : std::norm(amps[k]);
        return acc;
    }

    double mse(std::span<const double> params, const std::vector<std::size_t>& idx) const {
        if (idx.empty()) return 0.0;
        const auto circuit_params = params.first(model_->n_params());
        const double w = params.back();
        double acc = 0.0;
        for (std::size_t i : idx) {
            const double r = labels_[i] - w * z0(model_->state(i, circuit_params));
            acc += r * r;
        }
        return acc / static_cast<double>(idx.size());
    }

    RegressionSpec spec_;
    Split split_;
    std::optional<EncodedModel> model_;
    std::vector<double> target_theta_;
    double target_weight_ = 1.0;
    std::vector<double> raw_labels_;
    std::vector<double> labels_;
};

/// Class read off two measured bits: y(b1, b2) = b1 + 2 b2 mod 3, with b1 on
/// qubit 0 and b2 on qubit 1.
inline int iris_label(std::uint64_t bits) {
    const int b1 = static_cast<int>(bits & 1U);
    const int b2 = static_cast<int>((bits >> 1) & 1U);
    return (b1 + 2 * b2) % 3;
}

/// Fraction of points misclassified in the worst case: the top label is wrong
/// or its probability beats the runner-up by less than 2 eps.
inline double worst_case_error_rate(std::span<const std::array<double, 3>> label_probs, std::span<const int> truth,
                                    double eps) {
    if (label_probs.size() != truth.size()) throw ShapeError("probabilities and labels differ in count");
    if (label_probs.empty()) return 0.0;
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < label_probs.size(); ++i) {
        const auto& p = label_probs[i];
        std::array<int, 3> order{0, 1, 2};
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return p[a] > p[b]; });
        if (order[0] != truth[i] || p[order[0]] - p[order[1]] < 2 * eps) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(label_probs.size());
}

struct IrisSpec {
    std::string data_path = "data/iris.csv";
    int depth = 4;
    std::size_t n_train = 120;
    std::size_t n_test = 30;
    double eps = 1e-2;
    NoiseModel noise;
};

/// Three-class Iris classification; the loss is the mean squared failure
/// probability (1 - p)^2 with p the probability of reading the true label.
class IrisTask final : public Task {
public:
    IrisTask(const IrisSpec& spec, Rng& rng) : IrisTask(spec, load_iris(spec.data_path), rng) {}

    IrisTask(const IrisSpec& spec, Dataset ds, Rng& rng) : spec_(spec) {
        min_max_normalize(ds);
        split_ = random_split(ds.size(), spec.n_train, spec.n_test, rng);
        labels_ = ds.labels;
        model_.emplace(ds.features, spec.depth, spec.noise);
        if (model_->n_qubits() < 2) throw ShapeError("Iris model needs at least two qubits");
    }

    std::string_view name() const override { return "iris"; }
    std::size_t dim() const override { return model_->n_params(); }
    std::size_t train_size() const override { return split_.train.size(); }
    LossKind loss_kind() const override { return LossKind::Quadratic; }

    GradPoint grad_point(std::span<const double> params, std::size_t index, std::span<const Shots> s,
                         Rng& rng) const override {
        const std::size_t point = split_.train.at(index);
        const int y = labels_[point];
        auto sampler = [&](std::span<const double> p, Shots shots, Rng& r) {
            return model_->sample(point, p, shots, r,
                                  [y](std::uint64_t b) { return iris_label(b) == y ? 1.0 : 0.0; });
        };
        return grad_point_quadratic(sampler, params, 1.0, false, QuadraticCoefficients{1.0, -2.0, 1.0}, s, rng);
    }

    /// Exact label distribution at a data point (noiseless).
    std::array<double, 3> label_probabilities(std::size_t point, std::span<const double> params) const {
        std::array<double, 3> p{0, 0, 0};
        const StateVector psi = model_->state(point, params);
        const auto amps = psi.amplitudes();
        for (std::size_t k = 0; k < amps.size(); ++k) p[iris_label(k)] += std::norm(amps[k]);
        return p;
    }

    double exact_loss(std::span<const double> params) const override { return loss(params, split_.train); }

    Metrics metrics(std::span<const double> params) const override {
        return {loss(params, split_.train), loss(params, split_.test), error_rate(params, split_.train),
                error_rate(params, split_.test)};
    }

    double error_rate(std::span<const double> params, const std::vector<std::size_t>& idx) const {
        std::vector<std::array<double, 3>> probs;
        std::vector<int> truth;
        for (std::size_t i : idx) {
            probs.push_back(label_probabilities(i, params));
            truth.push_back(labels_[i]);
        }
        return worst_case_error_rate(probs, truth, spec_.eps);
    }

    std::vector<double> initial_params(Rng& rng) const override { return uniform_angles(dim(), rng); }

    const Split& split() const { return split_; }
    const std::vector<int>& labels() const { return labels_; }
    const EncodedModel& model() const { return *model_; }
    double eps() const { return spec_.eps; }

private:
    double loss(std::span<const double> params, const std::vector<std::size_t>& idx) const {
        if (idx.empty()) return 0.0;
        double acc = 0.0;
        for (std::size_t i : idx) {
            const double q = 1.0 - label_probabilities(i, params)[static_cast<std::size_t>(labels_[i])];
            acc += q * q;
        }
        return acc / static_cast<double>(idx.size());
    }

    IrisSpec spec_;
    Split split_;
    std::vector<int> labels_;
    std::optional<EncodedModel> model_;
};

} // namespace santaq::bench
