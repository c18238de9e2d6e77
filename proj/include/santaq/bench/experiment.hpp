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
#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "santaq/bench/config.hpp"
#include "santaq/bench/tasks.hpp"
#include "santaq/bench/trace_io.hpp"
#include "santaq/optimizers.hpp"

namespace santaq::bench {

/// Seed of the task instance (dataset split, hidden parameters) for a run
/// seed; kept apart from the optimizer streams.
inline Rng task_rng(std::uint64_t run_seed) { return Rng(run_seed ^ 0x9e3779b97f4a7c15ULL).split(); }

inline std::unique_ptr<Task> make_task(const TaskSpec& spec, const NoiseModel& noise, bool noise_enabled,
                                       std::uint64_t run_seed) {
    Rng rng = task_rng(run_seed);
    const NoiseModel model = noise_enabled ? noise : NoiseModel{};
    switch (spec.kind) {
    case TaskKind::VqeTfim:
        if (noise_enabled) throw ConfigError("noise is only modelled for the regression and iris tasks");
        return std::make_unique<VqeTfimTask>(spec.vqe);
    case TaskKind::Regression: {
        RegressionSpec r = spec.regression;
        r.noise = model;
        return std::make_unique<RegressionTask>(r, rng);
    }
    case TaskKind::Iris: {
        IrisSpec s = spec.iris;
        s.noise = model;
        return std::make_unique<IrisTask>(s, rng);
    }
    }
    throw ConfigError("unknown task kind");
}

/// Worker count: hardware concurrency capped by BENCH_THREADS and the job count.
inline std::size_t worker_count(std::size_t jobs) {
    std::size_t n = std::max(1U, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("BENCH_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) throw ConfigError("BENCH_THREADS must be a positive integer");
        n = std::min<std::size_t>(n, static_cast<std::size_t>(v));
    }
    return std::max<std::size_t>(1, std::min(n, jobs));
}

/// Runs job(0..count-1) on `workers` threads; the first exception is rethrown.
inline void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& job) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex mu;
    const auto loop = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                job(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        loop();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(loop);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
}

inline std::string trace_stem(Method m, std::uint64_t seed) {
    return "trace_" + std::string(method_name(m)) + "_seed" + std::to_string(seed);
}

inline std::string aggregate_name(Method m, MetricKind k) {
    return "aggregate_" + std::string(method_name(m)) + "_" + std::string(metric_name(k)) + ".csv";
}

struct RunResult {
    Method method;
    std::uint64_t seed;
    Trace trace;
    bool aborted = false;
    std::string error;
};

struct ExperimentResult {
    std::vector<RunResult> runs;
    std::vector<std::string> files;
};

/// Runs every (seed, optimizer) pair, writes one trace CSV and a JSON sidecar
/// per run plus aggregate CSVs per optimizer and metric. Config errors and
/// task construction errors surface before any optimizer starts.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                                       std::size_t n_seeds) {
    cfg.validate();
    if (n_seeds < 1) throw ConfigError("need at least one seed");
    std::filesystem::create_directories(out_dir);

    std::vector<std::unique_ptr<Task>> tasks;
    for (std::size_t k = 0; k < n_seeds; ++k)
        tasks.push_back(make_task(cfg.task, cfg.noise, cfg.noise_enabled, cfg.seed_base + k));

    const std::size_t n_opt = cfg.optimizers.size();
    ExperimentResult result;
    result.runs.resize(n_seeds * n_opt);
    const std::size_t jobs = result.runs.size();

    parallel_for(jobs, worker_count(jobs), [&](std::size_t i) {
        const std::size_t k = i / n_opt;
        const OptimizerConfig& oc = cfg.optimizers[i % n_opt];
        const std::uint64_t seed = cfg.seed_base + k;
        RunResult& rr = result.runs[i];
        rr.method = oc.method;
        rr.seed = seed;
        try {
            rr.trace = run_optimizer(*tasks[k], oc, seed);
        } catch (const RunAborted& e) {
            rr.trace = e.partial;
            rr.aborted = true;
            rr.error = e.what();
        }
        const std::string stem = trace_stem(oc.method, seed);
        write_trace_csv((out_dir / (stem + ".csv")).string(), rr.trace);

        nlohmann::json meta;
        meta["task"] = std::string(task_kind_name(cfg.task.kind));
        meta["seed"] = seed;
        meta["optimizer"] = hyperparams_json(oc);
        meta["noise"] = {{"enabled", cfg.noise_enabled}, {"p1", cfg.noise.p1}, {"p2", cfg.noise.p2},
                         {"exempt_zz", cfg.noise.exempt_zz_rotations}};
        meta["iterations"] = rr.trace.records.size();
        meta["s_tot"] = rr.trace.records.empty() ? 0 : rr.trace.records.back().s_tot;
        meta["aborted"] = rr.aborted;
        if (rr.aborted) meta["error"] = rr.error;
        std::ofstream(out_dir / (stem + ".json"), std::ios::binary) << meta.dump(2) << '\n';
    });

    for (std::size_t k = 0; k < n_seeds; ++k)
        for (std::size_t o = 0; o < n_opt; ++o)
            result.files.push_back((out_dir / (trace_stem(cfg.optimizers[o].method, cfg.seed_base + k) + ".csv")).string());

    for (std::size_t o = 0; o < n_opt; ++o) {
        std::vector<Trace> traces;
        for (std::size_t k = 0; k < n_seeds; ++k) traces.push_back(result.runs[k * n_opt + o].trace);
        for (MetricKind mk : kAllMetrics) {
            const auto rows = aggregate(traces, mk, cfg.optimizers[o].h.s_max);
            if (rows.empty()) continue;
            const auto path = (out_dir / aggregate_name(cfg.optimizers[o].method, mk)).string();
            write_aggregate_csv(path, rows);
            result.files.push_back(path);
        }
    }
    return result;
}

} // namespace santaq::bench
