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

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "santaq/bench/tasks.hpp"
#include "santaq/errors.hpp"
#include "santaq/noise.hpp"
#include "santaq/optimizers.hpp"

namespace santaq::bench {

// ---------------------------------------------------------------------------
// TOML subset: [section] headers, key = value lines, '#' comments. Values are
// strings ("..."), booleans, integers, floats and flat arrays of those.

using TomlScalar = std::variant<bool, std::int64_t, double, std::string>;
using TomlValue = std::variant<bool, std::int64_t, double, std::string, std::vector<TomlScalar>>;
using TomlTable = std::map<std::string, std::map<std::string, TomlValue>>;

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_str = !in_str;
        if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

inline bool is_bare_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
    return true;
}

inline TomlScalar parse_scalar(const std::string& raw, int line_no) {
    const auto fail = [&](const std::string& why) -> ConfigError {
        return ConfigError("line " + std::to_string(line_no) + ": " + why + " '" + raw + "'");
    };
    if (raw.empty()) throw fail("missing value");
    if (raw.front() == '"') {
        if (raw.size() < 2 || raw.back() != '"') throw fail("unterminated string");
        std::string out;
        for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
            if (raw[i] == '\\' && i + 2 < raw.size()) {
                const char n = raw[++i];
                out += n == 'n' ? '\n' : n == 't' ? '\t' : n;
            } else {
                out += raw[i];
            }
        }
        return out;
    }
    if (raw == "true") return true;
    if (raw == "false") return false;
    std::string num;
    for (char c : raw)
        if (c != '_') num += c;
    const bool looks_float = num.find_first_of(".eE") != std::string::npos || num == "inf" || num == "+inf" ||
                             num == "-inf" || num == "nan";
    try {
        std::size_t used = 0;
        if (!looks_float) {
            const long long v = std::stoll(num, &used, 10);
            if (used == num.size()) return static_cast<std::int64_t>(v);
        } else {
            const double v = std::stod(num, &used);
            if (used == num.size()) return v;
        }
    } catch (const std::exception&) {
    }
    throw fail("cannot parse value");
}

inline std::vector<std::string> split_array(const std::string& body, int line_no) {
    std::vector<std::string> items;
    std::string cur;
    bool in_str = false;
    for (char c : body) {
        if (c == '"') in_str = !in_str;
        if (c == ',' && !in_str) {
            items.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (in_str) throw ConfigError("line " + std::to_string(line_no) + ": unterminated string in array");
    if (!trim(cur).empty()) items.push_back(trim(cur));
    for (const auto& it : items)
        if (it.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty array element");
    return items;
}

} // namespace detail

inline TomlTable parse_toml(std::istream& in) {
    TomlTable table;
    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = detail::trim(detail::strip_comment(line));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            section = detail::trim(s.substr(1, s.size() - 2));
            if (!detail::is_bare_key(section))
                throw ConfigError("line " + std::to_string(line_no) + ": bad section name '" + section + "'");
            if (table.count(section)) throw ConfigError("line " + std::to_string(line_no) + ": duplicate section [" + section + "]");
            table[section];
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = detail::trim(s.substr(0, eq));
        const std::string raw = detail::trim(s.substr(eq + 1));
        if (!detail::is_bare_key(key)) throw ConfigError("line " + std::to_string(line_no) + ": bad key '" + key + "'");
        if (section.empty()) throw ConfigError("line " + std::to_string(line_no) + ": key outside any section");
        auto& sec = table[section];
        if (sec.count(key)) throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        if (!raw.empty() && raw.front() == '[') {
            if (raw.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": unterminated array");
            std::vector<TomlScalar> arr;
            for (const auto& item : detail::split_array(raw.substr(1, raw.size() - 2), line_no))
                arr.push_back(detail::parse_scalar(item, line_no));
            sec[key] = std::move(arr);
        } else {
            std::visit([&](auto&& v) { sec[key] = v; }, detail::parse_scalar(raw, line_no));
        }
    }
    return table;
}

inline TomlTable parse_toml_string(const std::string& text) {
    std::istringstream in(text);
    return parse_toml(in);
}

// ---------------------------------------------------------------------------
// Typed view with unknown-key detection.

class ConfigReader {
public:
    explicit ConfigReader(const TomlTable& t) : table_(t) {
        static const std::set<std::string> known{"task", "optimizer", "schedules", "noise"};
        for (const auto& [name, _] : table_)
            if (!known.count(name)) throw ConfigError("unknown section [" + name + "]");
    }

    bool has(const std::string& sec, const std::string& key) const {
        const auto it = table_.find(sec);
        return it != table_.end() && it->second.count(key);
    }

    double number(const std::string& sec, const std::string& key, double fallback) {
        used_.insert(sec + "." + key);
        if (!has(sec, key)) return fallback;
        const auto& v = table_.at(sec).at(key);
        if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
        if (const auto* d = std::get_if<double>(&v)) return *d;
        throw ConfigError(sec + "." + key + " must be a number");
    }

    std::int64_t integer(const std::string& sec, const std::string& key, std::int64_t fallback) {
        used_.insert(sec + "." + key);
        if (!has(sec, key)) return fallback;
        const auto& v = table_.at(sec).at(key);
        if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
        if (const auto* d = std::get_if<double>(&v)) {
            if (std::floor(*d) == *d && std::abs(*d) < 9e18) return static_cast<std::int64_t>(*d);
        }
        throw ConfigError(sec + "." + key + " must be an integer");
    }

    bool boolean(const std::string& sec, const std::string& key, bool fallback) {
        used_.insert(sec + "." + key);
        if (!has(sec, key)) return fallback;
        const auto* b = std::get_if<bool>(&table_.at(sec).at(key));
        if (!b) throw ConfigError(sec + "." + key + " must be true or false");
        return *b;
    }

    std::string string(const std::string& sec, const std::string& key, const std::string& fallback) {
        used_.insert(sec + "." + key);
        if (!has(sec, key)) return fallback;
        const auto* s = std::get_if<std::string>(&table_.at(sec).at(key));
        if (!s) throw ConfigError(sec + "." + key + " must be a string");
        return *s;
    }

    std::vector<std::string> strings(const std::string& sec, const std::string& key,
                                     const std::vector<std::string>& fallback) {
        used_.insert(sec + "." + key);
        if (!has(sec, key)) return fallback;
        const auto& v = table_.at(sec).at(key);
        if (const auto* s = std::get_if<std::string>(&v)) return {*s};
        const auto* arr = std::get_if<std::vector<TomlScalar>>(&v);
        if (!arr) throw ConfigError(sec + "." + key + " must be a string or array of strings");
        std::vector<std::string> out;
        for (const auto& x : *arr) {
            const auto* s = std::get_if<std::string>(&x);
            if (!s) throw ConfigError(sec + "." + key + " must hold strings");
            out.push_back(*s);
        }
        return out;
    }

    /// Throws on any key that was never read.
    void check_all_used() const {
        for (const auto& [sec, kv] : table_)
            for (const auto& [key, _] : kv)
                if (!used_.count(sec + "." + key)) throw ConfigError("unknown key " + sec + "." + key);
    }

private:
    const TomlTable& table_;
    std::set<std::string> used_;
};

// ---------------------------------------------------------------------------
// Experiment configuration

enum class TaskKind { VqeTfim, Regression, Iris };

inline TaskKind parse_task_kind(std::string_view s) {
    if (s == "vqe-tfim") return TaskKind::VqeTfim;
    if (s == "regression") return TaskKind::Regression;
    if (s == "iris") return TaskKind::Iris;
    throw ConfigError("unknown task '" + std::string(s) + "'");
}

inline std::string_view task_kind_name(TaskKind k) {
    switch (k) {
    case TaskKind::VqeTfim: return "vqe-tfim";
    case TaskKind::Regression: return "regression";
    case TaskKind::Iris: return "iris";
    }
    return "?";
}

struct TaskSpec {
    TaskKind kind = TaskKind::VqeTfim;
    VqeTfimSpec vqe;
    RegressionSpec regression;
    IrisSpec iris;
};

struct ExperimentConfig {
    TaskSpec task;
    /// Optimizers run on every seed, in this order.
    std::vector<OptimizerConfig> optimizers;
    NoiseModel noise;
    bool noise_enabled = false;
    std::uint64_t seed_base = 0;

    void validate() const {
        if (optimizers.empty()) throw ConfigError("no optimizer selected");
        for (const auto& o : optimizers) {
            try {
                o.validate();
            } catch (const std::exception& e) {
                throw ConfigError(std::string(method_name(o.method)) + ": " + e.what());
            }
        }
        noise.validate();
        if (noise_enabled && task.kind == TaskKind::VqeTfim)
            throw ConfigError("noise is only modelled for the regression and iris tasks");
    }
};

/// Builds an experiment from a parsed table. Relative paths are taken against
/// `base_dir`. Schedules given as fractions (s_b_fraction) scale with s_max.
inline ExperimentConfig make_experiment_config(const TomlTable& table, TaskKind kind,
                                               const std::filesystem::path& base_dir = {}) {
    ConfigReader r(table);
    ExperimentConfig cfg;
    cfg.task.kind = kind;
    const std::string declared = r.string("task", "kind", std::string(task_kind_name(kind)));
    if (parse_task_kind(declared) != kind)
        throw ConfigError("config is for task '" + declared + "' but '" + std::string(task_kind_name(kind)) +
                          "' was requested");
    const auto resolve = [&](const std::string& p) {
        if (p.empty()) return p;
        const std::filesystem::path path(p);
        return path.is_absolute() || base_dir.empty() ? p : (base_dir / path).lexically_normal().string();
    };

    switch (kind) {
    case TaskKind::VqeTfim: {
        auto& v = cfg.task.vqe;
        v.n_qubits = static_cast<int>(r.integer("task", "n_qubits", v.n_qubits));
        v.J = r.number("task", "J", v.J);
        v.g = r.number("task", "g", v.g);
        v.depth = static_cast<int>(r.integer("task", "depth", v.depth));
        const std::string alloc = r.string("task", "allocation", "wds");
        if (alloc == "wds") v.allocation = Allocation::WDS;
        else if (alloc == "wrs") v.allocation = Allocation::WRS;
        else throw ConfigError("task.allocation must be \"wds\" or \"wrs\"");
        if (v.n_qubits < 2) throw ConfigError("task.n_qubits must be >= 2");
        if (v.n_qubits > kMaxQubits) throw ConfigError("task.n_qubits exceeds the simulator limit");
        if (v.depth < 1) throw ConfigError("task.depth must be >= 1");
        if (v.J == 0.0) throw ConfigError("task.J must be non-zero");
        break;
    }
    case TaskKind::Regression: {
        auto& g = cfg.task.regression;
        g.n_qubits = static_cast<int>(r.integer("task", "n_qubits", g.n_qubits));
        g.depth = static_cast<int>(r.integer("task", "depth", g.depth));
        g.n_train = static_cast<std::size_t>(r.integer("task", "n_train", static_cast<std::int64_t>(g.n_train)));
        g.n_test = static_cast<std::size_t>(r.integer("task", "n_test", static_cast<std::int64_t>(g.n_test)));
        g.features_path = resolve(r.string("task", "features", ""));
        if (g.n_qubits < 1 || g.n_qubits > 16) throw ConfigError("task.n_qubits must lie in [1, 16]");
        if (g.depth < 1) throw ConfigError("task.depth must be >= 1");
        if (g.n_train < 1) throw ConfigError("task.n_train must be >= 1");
        break;
    }
    case TaskKind::Iris: {
        auto& s = cfg.task.iris;
        s.data_path = resolve(r.string("task", "data", s.data_path));
        s.depth = static_cast<int>(r.integer("task", "depth", s.depth));
        s.n_train = static_cast<std::size_t>(r.integer("task", "n_train", static_cast<std::int64_t>(s.n_train)));
        s.n_test = static_cast<std::size_t>(r.integer("task", "n_test", static_cast<std::int64_t>(s.n_test)));
        s.eps = r.number("task", "eps", s.eps);
        if (s.depth < 1) throw ConfigError("task.depth must be >= 1");
        if (s.n_train + s.n_test != 150) throw ConfigError("task.n_train + task.n_test must equal 150");
        if (s.eps < 0.0) throw ConfigError("task.eps must be >= 0");
        break;
    }
    }

    OptimizerConfig base;
    Hyperparams& h = base.h;
    if (!r.has("optimizer", "s_max")) throw ConfigError("optimizer.s_max is required");
    h.s_max = r.number("optimizer", "s_max", h.s_max);
    h.eta1 = r.number("optimizer", "eta1", h.eta1);
    h.eta_end = r.number("optimizer", "eta_end", h.eta_end);
    h.a_lr = r.number("optimizer", "a_lr", h.a_lr);
    h.sigma = r.number("optimizer", "sigma", h.sigma);
    h.C = r.number("optimizer", "C", h.C);
    h.lambda = r.number("optimizer", "lambda", h.lambda);
    h.mu = r.number("optimizer", "mu", h.mu);
    h.s_min = r.integer("optimizer", "s_min", h.s_min);
    h.t0 = static_cast<int>(r.integer("optimizer", "t0", h.t0));
    h.r = r.number("optimizer", "r", h.r);
    h.s_cap = r.integer("optimizer", "s_cap", h.s_cap);
    const double weight_g = r.number("optimizer", "weight_g", 1.0);
    base.adam_a_lr = r.number("optimizer", "adam_a_lr", base.adam_a_lr);
    base.adam_shots = r.integer("optimizer", "adam_shots", base.adam_shots);
    base.adam.beta1 = r.number("optimizer", "adam_beta1", base.adam.beta1);
    base.adam.beta2 = r.number("optimizer", "adam_beta2", base.adam.beta2);
    base.adam.eps = r.number("optimizer", "adam_eps", base.adam.eps);
    base.metrics_every = r.integer("optimizer", "metrics_every", base.metrics_every);
    cfg.seed_base = static_cast<std::uint64_t>(r.integer("optimizer", "seed_base", 0));
    const auto methods = r.strings("optimizer", "methods", {"santaqlaus", "adam-ds"});

    h.beta0 = r.number("schedules", "beta0", h.beta0);
    h.beta_b = r.number("schedules", "beta_b", h.beta_b);
    h.beta_r = r.number("schedules", "beta_r", h.beta_r);
    h.a1 = r.number("schedules", "a1", h.a1);
    h.a2 = r.number("schedules", "a2", h.a2);
    if (r.has("schedules", "s_b") && r.has("schedules", "s_b_fraction"))
        throw ConfigError("give either schedules.s_b or schedules.s_b_fraction");
    h.s_b = r.has("schedules", "s_b_fraction") ? r.number("schedules", "s_b_fraction", 0.8) * h.s_max
                                               : r.number("schedules", "s_b", 0.8 * h.s_max);
    h.m_start = r.number("schedules", "m_start", h.m_start);
    h.m_end = r.number("schedules", "m_end", h.m_end);
    h.a_m = r.number("schedules", "a_m", h.a_m);
    base.ds_start = r.number("schedules", "ds_start", base.ds_start);
    base.ds_end = r.number("schedules", "ds_end", base.ds_end);
    base.ds_a = r.number("schedules", "ds_a", base.ds_a);

    cfg.noise_enabled = r.boolean("noise", "enabled", false);
    cfg.noise.p1 = r.number("noise", "p1", 1e-3);
    cfg.noise.p2 = r.number("noise", "p2", 1e-2);
    cfg.noise.exempt_zz_rotations = r.boolean("noise", "exempt_zz", false);

    r.check_all_used();

    if (kind == TaskKind::Regression && weight_g != 1.0) {
        const std::size_t nc = trainable_circuit(cfg.task.regression.n_qubits, cfg.task.regression.depth).n_params();
        h.g_scale.assign(nc + 1, 1.0);
        h.g_scale.back() = weight_g;
    }
    for (const auto& m : methods) {
        OptimizerConfig o = base;
        try {
            o.method = parse_method(m);
        } catch (const ArgumentError& e) {
            throw ConfigError(e.what());
        }
        cfg.optimizers.push_back(o);
    }
    return cfg;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path, TaskKind kind) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    const TomlTable t = parse_toml(in);
    return make_experiment_config(t, kind, path.parent_path());
}

} // namespace santaq::bench
