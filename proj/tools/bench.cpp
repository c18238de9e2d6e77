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
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "santaq/bench/experiment.hpp"

int main(int argc, char** argv) {
    using namespace santaq::bench;
    CLI::App app{"SantaQlaus benchmark harness"};
    app.require_subcommand(1);

    std::string task, config, out, optimizer, noise;
    std::size_t seeds = 1;
    CLI::App* run = app.add_subcommand("run", "run an experiment and write traces");
    run->add_option("--task", task, "benchmark task")
        ->required()
        ->check(CLI::IsMember({"vqe-tfim", "regression", "iris"}));
    run->add_option("--config", config, "TOML config file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out, "output directory")->required();
    run->add_option("--seeds", seeds, "number of seeds")->required()->check(CLI::PositiveNumber);
    run->add_option("--optimizer", optimizer, "run only this optimizer")
        ->check(CLI::IsMember({"santaqlaus", "adam", "adam-ds"}));
    run->add_option("--noise", noise, "override [noise] enabled")->check(CLI::IsMember({"on", "off"}));

    CLI11_PARSE(app, argc, argv);

    try {
        const TaskKind kind = parse_task_kind(task);
        ExperimentConfig cfg = load_experiment_config(config, kind);
        if (!optimizer.empty()) {
            const santaq::Method m = santaq::parse_method(optimizer);
            santaq::OptimizerConfig chosen = cfg.optimizers.front();
            chosen.method = m;
            cfg.optimizers = {chosen};
        }
        if (!noise.empty()) cfg.noise_enabled = noise == "on";
        const ExperimentResult res = run_experiment(cfg, out, seeds);
        int aborted = 0;
        for (const auto& r : res.runs) {
            const auto& recs = r.trace.records;
            std::printf("%-10s seed %llu: %zu iterations, s_tot %lld%s\n", std::string(santaq::method_name(r.method)).c_str(),
                        static_cast<unsigned long long>(r.seed), recs.size(),
                        recs.empty() ? 0LL : static_cast<long long>(recs.back().s_tot), r.aborted ? " (aborted)" : "");
            if (r.aborted) {
                std::fprintf(stderr, "  %s\n", r.error.c_str());
                ++aborted;
            }
        }
        return aborted == 0 ? 0 : 3;
    } catch (const santaq::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
