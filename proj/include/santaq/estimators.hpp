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
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "santaq/circuit.hpp"
#include "santaq/errors.hpp"
#include "santaq/pauli.hpp"
#include "santaq/rng.hpp"
#include "santaq/state_vector.hpp"

namespace santaq {

using Shots = std::int64_t;

enum class LossKind { Linear, Quadratic };
enum class Allocation { WDS, WRS };

// ---------------------------------------------------------------------------
// Shot allocation across observable groups

inline void check_weights(std::span<const double> weights) {
    if (weights.empty()) throw ArgumentError("no allocation weights");
    for (double w : weights)
        if (!(w > 0.0) || !std::isfinite(w)) throw ArgumentError("allocation weights must be positive and finite");
}

/// Weighted deterministic sampling: floor of the proportional share, then the
/// leftover shots one by one in descending fractional-remainder order (ties to
/// the lower index).
inline std::vector<Shots> wds_allocate(std::span<const double> weights, Shots total) {
    check_weights(weights);
    if (total < static_cast<Shots>(weights.size()))
        throw ArgumentError("WDS needs at least one shot per group");
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<Shots> out(weights.size());
    std::vector<double> frac(weights.size());
    Shots used = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double exact = static_cast<double>(total) * weights[i] / sum;
        out[i] = static_cast<Shots>(std::floor(exact));
        frac[i] = exact - static_cast<double>(out[i]);
        used += out[i];
    }
    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
    for (std::size_t k = 0; used < total; ++k, ++used) ++out[order[k % order.size()]];
    return out;
}

/// Weighted random sampling: a multinomial draw with probabilities w_i / sum w.
inline std::vector<Shots> wrs_allocate(std::span<const double> weights, Shots total, Rng& rng) {
    check_weights(weights);
    if (total < 1) throw ArgumentError("WRS needs at least one shot");
    double remaining_weight = std::accumulate(weights.begin(), weights.end(), 0.0);
    Shots remaining = total;
    std::vector<Shots> out(weights.size(), 0);
    for (std::size_t i = 0; i + 1 < weights.size() && remaining > 0; ++i) {
        const double p = std::clamp(weights[i] / remaining_weight, 0.0, 1.0);
        out[i] = std::binomial_distribution<Shots>(remaining, p)(rng.engine());
        remaining -= out[i];
        remaining_weight -= weights[i];
    }
    out.back() += remaining;
    return out;
}

// ---------------------------------------------------------------------------
// Sample statistics

inline double sample_mean(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Unbiased sample variance (denominator s - 1).
inline double sample_variance(std::span<const double> x) {
    if (x.size() < 2) throw InsufficientSamplesError("variance needs at least two samples");
    const double m = sample_mean(x);
    double acc = 0.0;
    for (double v : x) acc += (v - m) * (v - m);
    return acc / static_cast<double>(x.size() - 1);
}

/// Unbiased estimator of <h>^n: the mean of products over all size-n subsets
/// of the outcomes (elementary symmetric polynomial over C(s, n)).
inline double u_stat_power(std::span<const double> outcomes, int n) {
    if (n < 1) throw ArgumentError("power must be >= 1");
    const std::size_t s = outcomes.size();
    if (s < static_cast<std::size_t>(n))
        throw InsufficientSamplesError("U-statistic of order " + std::to_string(n) + " needs at least " +
                                       std::to_string(n) + " samples, got " + std::to_string(s));
    // e_k / C(seen, k) is updated incrementally to stay well scaled.
    std::vector<double> avg(static_cast<std::size_t>(n) + 1, 0.0);
    avg[0] = 1.0;
    for (std::size_t i = 0; i < s; ++i) {
        const double seen = static_cast<double>(i + 1);
        for (int k = std::min<int>(n, static_cast<int>(i + 1)); k >= 1; --k) {
            // e_k' = e_k + x e_{k-1}; C(seen, k) = C(seen-1, k) seen / (seen - k)
            const double keep = (seen - k) / seen;
            const double take = static_cast<double>(k) / seen;
            avg[k] = keep * avg[k] + take * avg[k - 1] * outcomes[i];
        }
    }
    return avg[static_cast<std::size_t>(n)];
}

/// Power sums p1..p4 of a sample.
struct PowerSums {
    double n = 0, p1 = 0, p2 = 0, p3 = 0, p4 = 0;

    explicit PowerSums(std::span<const double> x) : n(static_cast<double>(x.size())) {
        for (double v : x) {
            const double v2 = v * v;
            p1 += v;
            p2 += v2;
            p3 += v2 * v;
            p4 += v2 * v2;
        }
    }

    /// Unbiased estimate of Var(h) <h> (U-statistic of order 3).
    double variance_times_mean() const {
        if (n < 3) throw InsufficientSamplesError("order-3 U-statistic needs at least three samples");
        const double t21 = p1 * p2 - p3;
        const double t111 = p1 * p1 * p1 - 3 * p1 * p2 + 2 * p3;
        return ((n - 2) * t21 - t111) / (n * (n - 1) * (n - 2));
    }

    /// Unbiased estimate of Var(h) <h>^2 (U-statistic of order 4).
    double variance_times_mean_sq() const {
        if (n < 4) throw InsufficientSamplesError("order-4 U-statistic needs at least four samples");
        const double t211 = p2 * p1 * p1 - 2 * p1 * p3 + 2 * p4 - p2 * p2;
        const double t1111 = p1 * p1 * p1 * p1 - 6 * p1 * p1 * p2 + 3 * p2 * p2 + 8 * p1 * p3 - 6 * p4;
        return ((n - 3) * t211 - t1111) / (n * (n - 1) * (n - 2) * (n - 3));
    }
};

// ---------------------------------------------------------------------------
// Observable estimation from a prepared state

/// Estimate of an observable's expectation and the variance of that estimate.
struct ObservableEstimate {
    double mean = 0.0;
    double variance_of_mean = 0.0;
};

/// Splits `total` shots across the groups of `obs` and combines the group
/// means. Under WDS a group that receives a single shot has no sample
/// variance; its contribution is bounded by (|c_g| norm_bound)^2 instead.
/// Under WRS every shot measures a group drawn with probability p_g and
/// records sign(c_g) M h_g / norm_g, an i.i.d. unbiased sample of <H>.
inline ObservableEstimate estimate_observable(const StateVector& state, const Observable& obs, Shots total,
                                              Allocation alloc, Rng& rng) {
    const auto weights = obs.allocation_weights();
    const auto& groups = obs.groups();
    ObservableEstimate est;
    if (alloc == Allocation::WDS) {
        const auto shares = wds_allocate(weights, total);
        for (std::size_t g = 0; g < groups.size(); ++g) {
            if (shares[g] < 1) throw InsufficientSamplesError("observable group received no shots");
            const auto sample = sample_group(state, groups[g], static_cast<int>(shares[g]), rng);
            est.mean += sample_mean(sample.values);
            const double var = shares[g] >= 2 ? sample_variance(sample.values) : weights[g] * weights[g];
            est.variance_of_mean += var / static_cast<double>(shares[g]);
        }
        return est;
    }
    const double m_total = std::accumulate(weights.begin(), weights.end(), 0.0);
    const auto shares = wrs_allocate(weights, total, rng);
    std::vector<double> pooled;
    pooled.reserve(static_cast<std::size_t>(total));
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (shares[g] == 0) continue;
        const auto sample = sample_group(state, groups[g], static_cast<int>(shares[g]), rng);
        const double scale = m_total / weights[g];
        for (double v : sample.values) pooled.push_back(v * scale);
    }
    est.mean = sample_mean(pooled);
    est.variance_of_mean = sample_variance(pooled) / static_cast<double>(pooled.size());
    return est;
}

// ---------------------------------------------------------------------------
// Per-point gradient estimators

/// Gradient estimate f and per-component variance numerator S at one data
/// point; var(f_j) is approximately S_j / s_j.
struct GradPoint {
    std::vector<double> f;
    std::vector<double> S;
};

inline void check_shot_vector(std::span<const Shots> s, std::size_t d) {
    if (s.size() != d)
        throw ShapeError("shot vector has length " + std::to_string(s.size()) + ", expected " + std::to_string(d));
    for (Shots v : s)
        if (v < 2) throw InsufficientSamplesError("every shot count must be >= 2 for an unbiased variance");
}

/// Linear loss w <H>: shift-rule gradient from s_j shots at each shift of
/// every circuit parameter, split across the observable's groups.
inline GradPoint grad_point_linear(const ParamCircuit& circuit, const Observable& obs,
                                   std::span<const double> params, std::span<const Shots> s, Allocation alloc,
                                   Rng& rng, const std::optional<StateVector>& initial = std::nullopt,
                                   double weight = 1.0) {
    circuit.check_params(params);
    check_shot_vector(s, circuit.n_params());
    const StateVector start = initial ? *initial : StateVector(circuit.n_qubits());
    GradPoint out{std::vector<double>(s.size()), std::vector<double>(s.size())};
    std::vector<double> work(params.begin(), params.end());
    for (std::size_t j = 0; j < s.size(); ++j) {
        check_shift_slot(circuit, j);
        work[j] = params[j] + kShift;
        const auto plus = estimate_observable(run(circuit, work, start), obs, s[j], alloc, rng);
        work[j] = params[j] - kShift;
        const auto minus = estimate_observable(run(circuit, work, start), obs, s[j], alloc, rng);
        work[j] = params[j];
        out.f[j] = weight * (plus.mean - minus.mean) / 2;
        out.S[j] = static_cast<double>(s[j]) * weight * weight * (plus.variance_of_mean + minus.variance_of_mean) / 4;
    }
    return out;
}

/// Polynomial coefficients of l(E) = a0 + a1 E + a2 E^2 with E = w <h>.
struct QuadraticCoefficients {
    double a0 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
};

/// Quadratic loss estimator. `sampler(params, shots, rng)` returns per-shot
/// outcomes of h for the circuit at `params`. The last entry of `s` belongs to
/// the weight when `weight` is trainable. The unshifted circuit is measured
/// max_j s_j times.
///
/// Circuit components use the upper bound
///   S_j = w^2 [mu2^2 (var+ + var-) + mu1^2 w^2 a2^2 var0],
/// mu1 = <h>+ - <h>-, mu2 = a1/2 + w a2 <h>0, and the weight component
///   S_d = var0 [a1^2 + 8 w a1 a2 <h> + 16 w^2 a2^2 <h>^2].
/// Both are first estimated with unbiased U-statistics; a negative estimate
/// falls back to the plug-in form, which is non-negative.
template <class Sampler>
GradPoint grad_point_quadratic(Sampler&& sampler, std::span<const double> params, double w, bool weight_trainable,
                               const QuadraticCoefficients& a, std::span<const Shots> s, Rng& rng) {
    const std::size_t nc = params.size();
    check_shot_vector(s, nc + (weight_trainable ? 1 : 0));
    const Shots s0 = *std::max_element(s.begin(), s.end());

    const std::vector<double> o0 = sampler(params, s0, rng);
    const double m0 = sample_mean(o0);
    const double v0 = sample_variance(o0);
    const double sq0 = u_stat_power(o0, 2);

    GradPoint out{std::vector<double>(s.size()), std::vector<double>(s.size())};
    const double mu2_plugin = a.a1 / 2 + w * a.a2 * m0;
    const double mu2_sq = a.a1 * a.a1 / 4 + a.a1 * w * a.a2 * m0 + w * w * a.a2 * a.a2 * sq0;
    std::vector<double> work(params.begin(), params.end());
    for (std::size_t j = 0; j < nc; ++j) {
        work[j] = params[j] + kShift;
        const std::vector<double> op = sampler(std::span<const double>(work), s[j], rng);
        work[j] = params[j] - kShift;
        const std::vector<double> om = sampler(std::span<const double>(work), s[j], rng);
        work[j] = params[j];
        const double mp = sample_mean(op), mm = sample_mean(om);
        const double vp = sample_variance(op), vm = sample_variance(om);
        out.f[j] = w * (mp - mm) * mu2_plugin;
        const double mu1_sq = u_stat_power(op, 2) - 2 * mp * mm + u_stat_power(om, 2);
        double S = w * w * (mu2_sq * (vp + vm) + mu1_sq * w * w * a.a2 * a.a2 * v0);
        if (S < 0.0)
            S = w * w * (mu2_plugin * mu2_plugin * (vp + vm) + (mp - mm) * (mp - mm) * w * w * a.a2 * a.a2 * v0);
        out.S[j] = S;
    }
    if (weight_trainable) {
        out.f[nc] = a.a1 * m0 + 2 * w * a.a2 * sq0;
        double S = -1.0;
        if (o0.size() >= 4) {
            const PowerSums ps(o0);
            S = a.a1 * a.a1 * v0 + 8 * w * a.a1 * a.a2 * ps.variance_times_mean() +
                16 * w * w * a.a2 * a.a2 * ps.variance_times_mean_sq();
        }
        if (S < 0.0) {
            const double k = a.a1 + 4 * w * a.a2 * m0;
            S = v0 * k * k;
        }
        out.S[nc] = S;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Mini-batches

/// Sampling without replacement: a random permutation is consumed in chunks;
/// the last chunk of an epoch may be short; the permutation is redrawn when
/// exhausted.
class MinibatchStream {
public:
    MinibatchStream(std::size_t dataset_size, Rng rng) : n_(dataset_size), rng_(std::move(rng)) {
        if (n_ < 1) throw ArgumentError("dataset is empty");
        perm_.resize(n_);
        refresh();
    }

    std::vector<std::size_t> next(std::size_t m) {
        if (m < 1 || m > n_) throw ArgumentError("batch size must lie in [1, dataset size]");
        if (pos_ >= n_) refresh();
        const std::size_t take = std::min(m, n_ - pos_);
        std::vector<std::size_t> batch(perm_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                       perm_.begin() + static_cast<std::ptrdiff_t>(pos_ + take));
        pos_ += take;
        return batch;
    }

    std::size_t dataset_size() const { return n_; }

private:
    void refresh() {
        std::iota(perm_.begin(), perm_.end(), std::size_t{0});
        std::shuffle(perm_.begin(), perm_.end(), rng_.engine());
        pos_ = 0;
    }

    std::size_t n_;
    Rng rng_;
    std::vector<std::size_t> perm_;
    std::size_t pos_ = 0;
};

/// Fixed-size view over a MinibatchStream.
class MinibatchIter {
public:
    MinibatchIter(std::size_t dataset_size, std::size_t m, std::uint64_t seed)
        : stream_(dataset_size, Rng(seed)), m_(m) {
        if (m < 1 || m > dataset_size) throw ArgumentError("batch size must lie in [1, dataset size]");
    }
    std::vector<std::size_t> next() { return stream_.next(m_); }

private:
    MinibatchStream stream_;
    std::size_t m_;
};

/// Total shots spent by one mini-batch evaluation. Linear: two shifted
/// circuits per component. Quadratic: two shifted circuits per circuit
/// component plus max_j s_j unshifted shots; with a trainable weight the last
/// entry of `s` only enters through that maximum.
inline Shots s_count(std::span<const Shots> s, std::size_t m, LossKind kind, bool weight_trainable = false) {
    if (s.empty() || m == 0) return 0;
    if (kind == LossKind::Linear) return 2 * static_cast<Shots>(m) * std::accumulate(s.begin(), s.end(), Shots{0});
    const std::size_t nc = weight_trainable ? s.size() - 1 : s.size();
    const Shots shifted = std::accumulate(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(nc), Shots{0});
    return static_cast<Shots>(m) * (2 * shifted + *std::max_element(s.begin(), s.end()));
}

// ---------------------------------------------------------------------------
// Tasks and mini-batch evaluation

/// Exact (noiseless, sample-free) evaluation metrics; absent values are empty.
struct Metrics {
    std::optional<double> train_loss;
    std::optional<double> test_loss;
    std::optional<double> train_err;
    std::optional<double> test_err;
};

/// A training objective that can be estimated point by point from shots.
class Task {
public:
    virtual ~Task() = default;

    virtual std::string_view name() const = 0;
    /// Number of trainable values d.
    virtual std::size_t dim() const = 0;
    virtual std::size_t train_size() const = 0;
    virtual LossKind loss_kind() const = 0;
    virtual bool weight_trainable() const { return false; }

    virtual GradPoint grad_point(std::span<const double> params, std::size_t index, std::span<const Shots> s,
                                 Rng& rng) const = 0;

    /// Training loss from exact expectations; reporting only.
    virtual double exact_loss(std::span<const double> params) const = 0;

    virtual Metrics metrics(std::span<const double> params) const { return {exact_loss(params), {}, {}, {}}; }

    virtual std::vector<double> initial_params(Rng& rng) const = 0;
};

/// Mini-batch gradient estimate: batch means of per-point f and S.
struct GradSample {
    std::vector<double> f;
    std::vector<double> S;
    Shots shots_spent = 0;
};

inline GradSample i_evaluate(const Task& task, std::span<const double> params, std::span<const Shots> s,
                             std::span<const std::size_t> batch, Rng& rng) {
    if (batch.empty()) throw ArgumentError("empty mini-batch");
    if (params.size() != task.dim()) throw ShapeError("parameter vector does not match task dimension");
    GradSample out{std::vector<double>(task.dim(), 0.0), std::vector<double>(task.dim(), 0.0), 0};
    for (std::size_t idx : batch) {
        Rng point_rng = rng.split();
        const GradPoint gp = task.grad_point(params, idx, s, point_rng);
        for (std::size_t j = 0; j < out.f.size(); ++j) {
            out.f[j] += gp.f[j];
            out.S[j] += gp.S[j];
        }
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    for (std::size_t j = 0; j < out.f.size(); ++j) {
        out.f[j] *= inv;
        out.S[j] *= inv;
    }
    out.shots_spent = s_count(s, batch.size(), task.loss_kind(), task.weight_trainable());
    return out;
}

inline double exact_loss(const Task& task, std::span<const double> params) { return task.exact_loss(params); }

} // namespace santaq
