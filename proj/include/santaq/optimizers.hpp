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
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "santaq/errors.hpp"
#include "santaq/estimators.hpp"
#include "santaq/rng.hpp"

namespace santaq {

// ---------------------------------------------------------------------------
// Shot-indexed schedules

/// y0 [ (s - s0)/(s_end - s0) ((y_end/y0)^(1/a) - 1) + 1 ]^a, clamped to
/// [s0, s_end] outside the range.
struct Schedule {
    double s0 = 0.0;
    double s_end = 1.0;
    double y0 = 1.0;
    double y_end = 1.0;
    double a = 1.0;

    void validate() const {
        if (a == 0.0) throw ArgumentError("schedule exponent a must be non-zero");
        if (!(s_end > s0)) throw ArgumentError("schedule needs s_end > s0");
        if (!(y0 > 0.0) || !(y_end > 0.0)) throw ArgumentError("schedule endpoints must be positive");
    }

    double operator()(double s_tot) const {
        validate();
        const double x = (std::clamp(s_tot, s0, s_end) - s0) / (s_end - s0);
        return y0 * std::pow(x * (std::pow(y_end / y0, 1.0 / a) - 1.0) + 1.0, a);
    }
};

inline double schedule_eval(const Schedule& sched, double s_tot) { return sched(s_tot); }

// ---------------------------------------------------------------------------
// SantaQlaus

struct Hyperparams {
    double eta1 = 0.01;
    double eta_end = 0.001;
    double a_lr = 0.5;
    double sigma = 0.99;
    double C = 5.0;
    double lambda = 1e-8;
    double mu = 0.99;
    Shots s_min = 4;
    int t0 = 5;
    double beta0 = 10.0;
    double beta_b = 1e4;
    double beta_r = 1e4;
    double a1 = 5.0;
    double a2 = 5.0;
    double s_b = 8e5;
    double s_max = 1e6;
    double r = 100.0;
    /// Per-component preconditioner scale g_t; empty means all ones.
    std::vector<double> g_scale;
    double m_start = 1.0;
    double m_end = 1.0;
    double a_m = 1.0;
    /// Optional per-component shot cap; 0 disables it.
    Shots s_cap = 0;

    void validate() const {
        if (!(sigma > 0.0 && sigma < 1.0)) throw ArgumentError("sigma must lie in (0, 1)");
        if (!(mu > 0.0 && mu < 1.0)) throw ArgumentError("mu must lie in (0, 1)");
        if (s_min < 2) throw ArgumentError("s_min must be >= 2");
        if (t0 < 0) throw ArgumentError("t0 must be >= 0");
        if (!(s_max > 0.0)) throw ArgumentError("s_max must be positive");
        if (!(s_b > 0.0 && s_b < s_max)) throw ArgumentError("burn-in shots s_b must lie in (0, s_max)");
        if (!(r > 0.0)) throw ArgumentError("r must be positive");
        if (!(m_start >= 1.0) || !(m_end >= 1.0)) throw ArgumentError("batch sizes must be >= 1");
        if (s_cap != 0 && s_cap < s_min) throw ArgumentError("s_cap must be 0 or >= s_min");
    }

    double g(std::size_t j) const { return g_scale.empty() ? 1.0 : g_scale[j]; }
};

inline double learning_rate(const Hyperparams& h, double a_lr, double s_tot) {
    return Schedule{0.0, h.s_max, h.eta1, h.eta_end, a_lr}(s_tot);
}

/// Burn-in: f_{0,s_b}^{beta0,beta_b,a1}. Refinement: f_{s_b,s_max}^{beta_b,beta_r,a2} / (r eta_t).
inline double beta_schedule(const Hyperparams& h, double eta_t, double s_tot) {
    if (s_tot < h.s_b) return Schedule{0.0, h.s_b, h.beta0, h.beta_b, h.a1}(s_tot);
    return Schedule{h.s_b, h.s_max, h.beta_b, h.beta_r, h.a2}(s_tot) / (h.r * eta_t);
}

/// Scheduled batch size, rounded and clamped to [m_start, m_end] and the dataset size.
inline std::size_t batch_size(const Hyperparams& h, double s_tot, std::size_t dataset_size) {
    const double lo = std::min(h.m_start, h.m_end), hi = std::max(h.m_start, h.m_end);
    const double m = std::clamp(std::round(Schedule{0.0, h.s_max, h.m_start, h.m_end, h.a_m}(s_tot)), lo, hi);
    return std::min<std::size_t>(static_cast<std::size_t>(m), dataset_size);
}

/// Optimizer internals in the re-parameterized form u = sqrt(eta) p,
/// alpha = sqrt(eta) Xi.
struct SantaQlausState {
    std::vector<double> theta;
    std::vector<double> u;
    std::vector<double> alpha;
    std::vector<double> v;
    std::vector<double> G;
    std::vector<double> xi_raw;
    std::vector<double> chi_raw;
    std::vector<double> gamma_raw;
    std::int64_t t = 1;
    std::vector<Shots> s;
    Shots s_tot = 0;

    static SantaQlausState init(std::vector<double> theta0, const Hyperparams& h, Rng& rng) {
        const std::size_t d = theta0.size();
        SantaQlausState st;
        st.theta = std::move(theta0);
        st.u.resize(d);
        const double root = std::sqrt(h.eta1);
        for (auto& x : st.u) x = root * rng.normal();
        st.alpha.assign(d, root * h.C);
        st.v.assign(d, 0.0);
        st.G.assign(d, 0.0);
        st.xi_raw.assign(d, 0.0);
        st.chi_raw.assign(d, 0.0);
        st.gamma_raw.assign(d, 0.0);
        st.s.assign(d, h.s_min);
        return st;
    }
};

/// One A-B-O-B-A update with RMSprop preconditioner G = g / sqrt(lambda + sqrt(v)).
inline void santaqlaus_step(SantaQlausState& st, const GradSample& grad, const Hyperparams& h, double eta_t,
                            double beta_t) {
    const std::size_t d = st.theta.size();
    if (grad.f.size() != d || grad.S.size() != d) throw ShapeError("gradient sample does not match state dimension");
    for (std::size_t j = 0; j < d; ++j)
        if (!std::isfinite(grad.f[j]) || !std::isfinite(grad.S[j]))
            throw EstimatorFailure("non-finite gradient or variance estimate in component " + std::to_string(j) +
                                   " at iteration " + std::to_string(st.t));
    const double temp = eta_t / beta_t;
    for (std::size_t j = 0; j < d; ++j) {
        const double f = grad.f[j];
        st.v[j] = h.sigma * st.v[j] + (1.0 - h.sigma) * f * f;
        const double G = h.g(j) / std::sqrt(h.lambda + std::sqrt(st.v[j]));
        st.G[j] = G;
        double& th = st.theta[j];
        double& u = st.u[j];
        double& a = st.alpha[j];
        th += G * u / 2;
        a += (u * u - temp) / 2;
        u *= std::exp(-a / 2);
        u -= eta_t * G * f;
        u *= std::exp(-a / 2);
        a += (u * u - temp) / 2;
        th += G * u / 2;
    }
    ++st.t;
}

/// Shot rule for the next iteration. During warm-up (t <= t0) every
/// component gets s_min. Afterwards bias-corrected moving averages of S, f
/// and G set n = ceil(beta eta Gamma gamma xi / 2) and s = ceil(n / m).
inline std::vector<Shots> next_shots(SantaQlausState& st, const GradSample& grad, const Hyperparams& h,
                                     double beta_t, double eta_t, std::size_t m_t) {
    const std::size_t d = st.theta.size();
    std::vector<Shots> s(d, h.s_min);
    if (st.t <= h.t0) return s;
    const double correction = 1.0 - std::pow(h.mu, static_cast<double>(st.t - h.t0));
    constexpr double kHuge = 1e15;
    for (std::size_t j = 0; j < d; ++j) {
        st.xi_raw[j] = h.mu * st.xi_raw[j] + (1.0 - h.mu) * grad.S[j];
        st.chi_raw[j] = h.mu * st.chi_raw[j] + (1.0 - h.mu) * grad.f[j];
        st.gamma_raw[j] = h.mu * st.gamma_raw[j] + (1.0 - h.mu) * st.G[j];
        const double xi = st.xi_raw[j] / correction;
        const double chi = st.chi_raw[j] / correction;
        const double Gamma = st.gamma_raw[j] / correction;
        const double v_next = h.sigma * st.v[j] + (1.0 - h.sigma) * chi * chi;
        double gamma = 1.0;
        if (v_next > 0.0) {
            const double k = 1.0 - 0.5 * (1.0 - h.sigma) * chi * chi / v_next;
            gamma = k * k;
        }
        const double n = std::ceil(std::min(beta_t * eta_t * Gamma * gamma * xi / 2.0, kHuge));
        Shots sj = static_cast<Shots>(std::ceil(std::max(n, 0.0) / static_cast<double>(m_t)));
        sj = std::max(sj, h.s_min);
        if (h.s_cap > 0) sj = std::min(sj, h.s_cap);
        s[j] = sj;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Adam

struct AdamParams {
    double beta1 = 0.9;
    double beta2 = 0.99;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<double> theta;
    std::vector<double> m;
    std::vector<double> v;
    std::int64_t t = 0;

    explicit AdamState(std::vector<double> theta0)
        : theta(std::move(theta0)), m(theta.size(), 0.0), v(theta.size(), 0.0) {}
};

inline void adam_step(AdamState& st, std::span<const double> f, double eta, const AdamParams& p) {
    if (f.size() != st.theta.size()) throw ShapeError("gradient does not match Adam state dimension");
    for (double x : f)
        if (!std::isfinite(x)) throw EstimatorFailure("non-finite gradient estimate");
    ++st.t;
    const double c1 = 1.0 - std::pow(p.beta1, static_cast<double>(st.t));
    const double c2 = 1.0 - std::pow(p.beta2, static_cast<double>(st.t));
    for (std::size_t j = 0; j < f.size(); ++j) {
        st.m[j] = p.beta1 * st.m[j] + (1.0 - p.beta1) * f[j];
        st.v[j] = p.beta2 * st.v[j] + (1.0 - p.beta2) * f[j] * f[j];
        st.theta[j] -= eta * (st.m[j] / c1) / (std::sqrt(st.v[j] / c2) + p.eps);
    }
}

/// Adam with dynamic shots: one shared shot count from a shot-indexed schedule.
inline Shots adam_ds_shots(double s_tot, const Schedule& sched) {
    return static_cast<Shots>(std::llround(sched(s_tot)));
}

// ---------------------------------------------------------------------------
// Run loop

enum class Method { SantaQlaus, Adam, AdamDS };

inline std::string_view method_name(Method m) {
    switch (m) {
    case Method::SantaQlaus: return "santaqlaus";
    case Method::Adam: return "adam";
    case Method::AdamDS: return "adam-ds";
    }
    return "?";
}

inline Method parse_method(std::string_view s) {
    if (s == "santaqlaus") return Method::SantaQlaus;
    if (s == "adam") return Method::Adam;
    if (s == "adam-ds") return Method::AdamDS;
    throw ArgumentError("unknown optimizer '" + std::string(s) + "'");
}

struct OptimizerConfig {
    Method method = Method::SantaQlaus;
    Hyperparams h;
    AdamParams adam;
    double adam_a_lr = 0.5;
    Shots adam_shots = 10;
    /// Adam-DS shot schedule endpoints and exponent over [0, s_max].
    double ds_start = 4.0;
    double ds_end = 100.0;
    double ds_a = 1.0;
    /// Exact metrics are computed every this many iterations and always on
    /// the final one; other records leave them empty.
    std::int64_t metrics_every = 1;
    /// Keep theta every this many iterations in the trace; 0 keeps none.
    std::int64_t param_every = 0;

    void validate() const {
        h.validate();
        if (method == Method::Adam && adam_shots < 2) throw ArgumentError("adam shots must be >= 2");
        if (method == Method::AdamDS) {
            Schedule{0.0, h.s_max, ds_start, ds_end, ds_a}.validate();
            if (ds_start < 2 || ds_end < 2) throw ArgumentError("adam-ds shots must stay >= 2");
        }
        if (metrics_every < 1) throw ArgumentError("metrics_every must be >= 1");
    }
};

struct TraceRecord {
    std::int64_t iter = 0;
    Shots s_tot = 0;
    Metrics metrics;
    double mean_s = 0.0;
    Shots min_s = 0;
    Shots max_s = 0;
    std::size_t m = 0;
    Shots shots_spent = 0;
};

struct Trace {
    std::vector<TraceRecord> records;
    std::vector<std::pair<std::int64_t, std::vector<double>>> params;
    std::vector<double> final_params;
};

/// Raised when an estimator fails mid-run; carries the records so far.
struct RunAborted : EstimatorFailure {
    Trace partial;
    RunAborted(const std::string& what, Trace t) : EstimatorFailure(what), partial(std::move(t)) {}
};

/// Root-seed derived streams; initial parameters depend on the seed only, so
/// every optimizer starts a given seed from the same point.
struct RunStreams {
    Rng init, batch, optimizer, shots;

    explicit RunStreams(std::uint64_t seed)
        : init(Rng(seed).split()), batch(Rng(seed ^ 0x5bd1e995ULL).split()),
          optimizer(Rng(seed ^ 0x27d4eb2fULL).split()), shots(Rng(seed ^ 0x165667b1ULL).split()) {}
};

/// Runs `cfg.method` on `task` until more than s_max shots are spent.
inline Trace run_optimizer(const Task& task, const OptimizerConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const Hyperparams& h = cfg.h;
    RunStreams rs(seed);
    std::vector<double> theta0 = task.initial_params(rs.init);
    if (theta0.size() != task.dim()) throw ShapeError("task produced initial parameters of the wrong size");
    if (!h.g_scale.empty() && h.g_scale.size() != task.dim()) throw ShapeError("g_scale length differs from task dimension");

    MinibatchStream batches(task.train_size(), rs.batch);
    SantaQlausState sq;
    AdamState adam(theta0);
    if (cfg.method == Method::SantaQlaus) sq = SantaQlausState::init(theta0, h, rs.optimizer);

    const Schedule ds{0.0, h.s_max, cfg.ds_start, cfg.ds_end, cfg.ds_a};
    Trace trace;
    Shots s_tot = 0;
    std::int64_t iter = 0;
    const auto theta = [&]() -> const std::vector<double>& {
        return cfg.method == Method::SantaQlaus ? sq.theta : adam.theta;
    };

    while (static_cast<double>(s_tot) <= h.s_max) {
        ++iter;
        const double s_t = static_cast<double>(s_tot);
        const std::size_t m_t = batch_size(h, s_t, task.train_size());
        const auto batch = batches.next(m_t);

        std::vector<Shots> s;
        double eta = 0.0, beta = 0.0;
        switch (cfg.method) {
        case Method::SantaQlaus:
            eta = learning_rate(h, h.a_lr, s_t);
            beta = beta_schedule(h, eta, s_t);
            s = sq.s;
            break;
        case Method::Adam:
            eta = learning_rate(h, cfg.adam_a_lr, s_t);
            s.assign(task.dim(), cfg.adam_shots);
            break;
        case Method::AdamDS:
            eta = learning_rate(h, cfg.adam_a_lr, s_t);
            s.assign(task.dim(), std::max<Shots>(2, adam_ds_shots(s_t, ds)));
            break;
        }

        GradSample g;
        try {
            g = i_evaluate(task, theta(), s, batch, rs.shots);
            s_tot += g.shots_spent;
            if (cfg.method == Method::SantaQlaus) {
                santaqlaus_step(sq, g, h, eta, beta);
                sq.s_tot = s_tot;
            } else {
                adam_step(adam, g.f, eta, cfg.adam);
            }
        } catch (const EstimatorFailure& e) {
            trace.final_params = theta();
            throw RunAborted(e.what(), std::move(trace));
        }

        TraceRecord rec;
        rec.iter = iter;
        rec.s_tot = s_tot;
        rec.m = batch.size();
        rec.shots_spent = g.shots_spent;
        rec.min_s = *std::min_element(s.begin(), s.end());
        rec.max_s = *std::max_element(s.begin(), s.end());
        double sum = 0.0;
        for (Shots x : s) sum += static_cast<double>(x);
        rec.mean_s = sum / static_cast<double>(s.size());
        const bool last = static_cast<double>(s_tot) > h.s_max;
        if (last || iter % cfg.metrics_every == 0) rec.metrics = task.metrics(theta());
        trace.records.push_back(rec);
        if (cfg.param_every > 0 && (last || iter % cfg.param_every == 0)) trace.params.emplace_back(iter, theta());

        if (cfg.method == Method::SantaQlaus) sq.s = next_shots(sq, g, h, beta, eta, m_t);
    }
    trace.final_params = theta();
    return trace;
}

} // namespace santaq
