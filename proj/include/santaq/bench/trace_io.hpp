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
#include <cstdio>
#include <fstream>
#include <optional>
#include <span>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "santaq/errors.hpp"
#include "santaq/optimizers.hpp"

namespace santaq::bench {

inline constexpr const char* kTraceHeader = "iter,s_tot,train_loss,test_loss,train_err,test_err,mean_s,m";
inline constexpr const char* kAggregateHeader = "s_grid,median,q1,q3";
inline constexpr std::size_t kGridPoints = 200;

enum class MetricKind { TrainLoss, TestLoss, TrainErr, TestErr };
inline constexpr MetricKind kAllMetrics[] = {MetricKind::TrainLoss, MetricKind::TestLoss, MetricKind::TrainErr,
                                             MetricKind::TestErr};

inline std::string_view metric_name(MetricKind k) {
    switch (k) {
    case MetricKind::TrainLoss: return "train_loss";
    case MetricKind::TestLoss: return "test_loss";
    case MetricKind::TrainErr: return "train_err";
    case MetricKind::TestErr: return "test_err";
    }
    return "?";
}

inline const std::optional<double>& metric_of(const Metrics& m, MetricKind k) {
    switch (k) {
    case MetricKind::TrainLoss: return m.train_loss;
    case MetricKind::TestLoss: return m.test_loss;
    case MetricKind::TrainErr: return m.train_err;
    case MetricKind::TestErr: return m.test_err;
    }
    return m.train_loss;
}

/// Shortest text that round-trips through strtod; locale independent.
inline std::string format_real(double x) {
    char buf[40];
    if (std::isfinite(x) && std::floor(x) == x && std::abs(x) < 1e15) {
        std::snprintf(buf, sizeof buf, "%.0f", x);
        return buf;
    }
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

inline void write_trace_csv(std::ostream& out, const Trace& trace) {
    out << kTraceHeader << '\n';
    const auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
    for (const auto& r : trace.records) {
        out << r.iter << ',' << r.s_tot << ',' << opt(r.metrics.train_loss) << ',' << opt(r.metrics.test_loss) << ','
            << opt(r.metrics.train_err) << ',' << opt(r.metrics.test_err) << ',' << format_real(r.mean_s) << ','
            << r.m << '\n';
    }
}

inline void write_trace_csv(const std::string& path, const Trace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestionError("cannot write '" + path + "'");
    write_trace_csv(out, trace);
}

/// Reads a trace CSV back; s_tot, metrics, mean_s and m are recovered.
inline Trace read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kTraceHeader) throw IngestionError("trace CSV header mismatch");
    Trace t;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (!line.empty() && line.back() == ',') f.emplace_back();
        if (f.size() != 8) throw IngestionError("trace CSV row " + std::to_string(row) + ": expected 8 fields");
        const auto opt = [](const std::string& s) -> std::optional<double> {
            if (s.empty()) return std::nullopt;
            return std::stod(s);
        };
        try {
            TraceRecord r;
            r.iter = std::stoll(f[0]);
            r.s_tot = std::stoll(f[1]);
            r.metrics = {opt(f[2]), opt(f[3]), opt(f[4]), opt(f[5])};
            r.mean_s = std::stod(f[6]);
            r.m = static_cast<std::size_t>(std::stoull(f[7]));
            t.records.push_back(r);
        } catch (const std::exception&) {
            throw IngestionError("trace CSV row " + std::to_string(row) + ": malformed number");
        }
    }
    return t;
}

/// Linear-interpolated quantile on sorted data (the usual "type 7" rule).
inline double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw ArgumentError("quantile of an empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct AggregateRow {
    double s_grid;
    double median;
    double q1;
    double q3;
};

/// `n` log-spaced points from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || hi < lo) throw ArgumentError("log grid needs 0 < lo <= hi");
    if (n == 1 || lo == hi) return {lo};
    std::vector<double> g(n);
    const double ratio = std::log(hi / lo);
    for (std::size_t k = 0; k < n; ++k) g[k] = lo * std::exp(ratio * static_cast<double>(k) / static_cast<double>(n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

/// Value of the metric last reported at or before s (carry-forward).
inline std::optional<double> carry_forward(const Trace& t, MetricKind k, double s) {
    std::optional<double> v;
    for (const auto& r : t.records) {
        if (static_cast<double>(r.s_tot) > s) break;
        if (const auto& x = metric_of(r.metrics, k)) v = *x;
    }
    return v;
}

/// Median and quartiles across runs on a log grid running from the latest
/// first report to `s_end`. Empty when some run never reports the metric.
inline std::vector<AggregateRow> aggregate(std::span<const Trace> runs, MetricKind k, double s_end,
                                           std::size_t points = kGridPoints) {
    if (runs.empty()) return {};
    double lo = 0.0;
    for (const auto& t : runs) {
        const auto it = std::find_if(t.records.begin(), t.records.end(),
                                     [&](const TraceRecord& r) { return metric_of(r.metrics, k).has_value(); });
        if (it == t.records.end()) return {};
        lo = std::max(lo, static_cast<double>(it->s_tot));
    }
    const auto grid = log_grid(lo, std::max(lo, s_end), points);
    std::vector<AggregateRow> out;
    out.reserve(grid.size());
    std::vector<double> vals(runs.size());
    for (double s : grid) {
        for (std::size_t i = 0; i < runs.size(); ++i) vals[i] = *carry_forward(runs[i], k, s);
        std::sort(vals.begin(), vals.end());
        out.push_back({s, quantile_sorted(vals, 0.5), quantile_sorted(vals, 0.25), quantile_sorted(vals, 0.75)});
    }
    return out;
}

inline void write_aggregate_csv(std::ostream& out, std::span<const AggregateRow> rows) {
    out << kAggregateHeader << '\n';
    for (const auto& r : rows)
        out << format_real(r.s_grid) << ',' << format_real(r.median) << ',' << format_real(r.q1) << ','
            << format_real(r.q3) << '\n';
}

inline void write_aggregate_csv(const std::string& path, std::span<const AggregateRow> rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestionError("cannot write '" + path + "'");
    write_aggregate_csv(out, rows);
}

inline nlohmann::json hyperparams_json(const OptimizerConfig& o) {
    const Hyperparams& h = o.h;
    nlohmann::json j;
    j["method"] = std::string(method_name(o.method));
    j["eta1"] = h.eta1;
    j["eta_end"] = h.eta_end;
    j["s_max"] = h.s_max;
    j["metrics_every"] = o.metrics_every;
    if (o.method == Method::SantaQlaus) {
        j["a_lr"] = h.a_lr;
        j["sigma"] = h.sigma;
        j["C"] = h.C;
        j["lambda"] = h.lambda;
        j["mu"] = h.mu;
        j["s_min"] = h.s_min;
        j["t0"] = h.t0;
        j["beta0"] = h.beta0;
        j["beta_b"] = h.beta_b;
        j["beta_r"] = h.beta_r;
        j["a1"] = h.a1;
        j["a2"] = h.a2;
        j["s_b"] = h.s_b;
        j["r"] = h.r;
        j["s_cap"] = h.s_cap;
        if (!h.g_scale.empty()) j["g_scale"] = h.g_scale;
    } else {
        j["a_lr"] = o.adam_a_lr;
        j["beta1"] = o.adam.beta1;
        j["beta2"] = o.adam.beta2;
        j["eps"] = o.adam.eps;
        if (o.method == Method::Adam) {
            j["shots"] = o.adam_shots;
        } else {
            j["ds_start"] = o.ds_start;
            j["ds_end"] = o.ds_end;
            j["ds_a"] = o.ds_a;
        }
    }
    j["m_start"] = h.m_start;
    j["m_end"] = h.m_end;
    j["a_m"] = h.a_m;
    return j;
}

} // namespace santaq::bench
