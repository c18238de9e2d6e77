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
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "santaq/errors.hpp"
#include "santaq/rng.hpp"

namespace santaq::bench {

/// Row-major feature matrix with optional integer class labels.
struct Dataset {
    std::vector<std::vector<double>> features;
    std::vector<int> labels;
    std::vector<std::string> class_names;

    std::size_t size() const { return features.size(); }
    std::size_t n_features() const { return features.empty() ? 0 : features.front().size(); }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    std::size_t used = 0;
    try {
        out = std::stod(s, &used);
    } catch (...) {
        return false;
    }
    return used == s.size() && std::isfinite(out);
}

} // namespace detail

/// Reads a CSV whose leading columns are numeric features and whose last
/// column is a class name. A first row that is not numeric is a header.
/// Class indices follow the sorted order of distinct names.
inline Dataset load_labeled_csv(const std::string& path, std::size_t n_features) {
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot open '" + path + "'");
    Dataset ds;
    std::vector<std::string> raw_labels;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = detail::split_csv_line(line);
        std::vector<double> x(n_features);
        bool numeric = cells.size() == n_features + 1;
        for (std::size_t j = 0; numeric && j < n_features; ++j) numeric = detail::parse_double(cells[j], x[j]);
        if (!numeric) {
            if (row == 1) continue;
            throw IngestionError(path + ": row " + std::to_string(row) + " is malformed (expected " +
                                 std::to_string(n_features) + " numeric features and a label)");
        }
        if (cells.back().empty()) throw IngestionError(path + ": row " + std::to_string(row) + " has an empty label");
        ds.features.push_back(std::move(x));
        raw_labels.push_back(cells.back());
    }
    if (ds.features.empty()) throw IngestionError(path + ": no data rows");
    ds.class_names = raw_labels;
    std::sort(ds.class_names.begin(), ds.class_names.end());
    ds.class_names.erase(std::unique(ds.class_names.begin(), ds.class_names.end()), ds.class_names.end());
    for (const auto& l : raw_labels)
        ds.labels.push_back(static_cast<int>(std::lower_bound(ds.class_names.begin(), ds.class_names.end(), l) -
                                             ds.class_names.begin()));
    return ds;
}

/// Iris: 150 rows, 4 features, 3 classes of 50.
inline Dataset load_iris(const std::string& path) {
    Dataset ds = load_labeled_csv(path, 4);
    if (ds.size() != 150) throw IngestionError(path + ": expected 150 rows, found " + std::to_string(ds.size()));
    if (ds.class_names.size() != 3) throw IngestionError(path + ": expected 3 classes");
    std::map<int, int> counts;
    for (int l : ds.labels) ++counts[l];
    for (const auto& [l, c] : counts)
        if (c != 50) throw IngestionError(path + ": class '" + ds.class_names[l] + "' has " + std::to_string(c) + " rows");
    return ds;
}

/// Feature CSV for regression: rows are points, every column but the last is a
/// feature; the last column is ignored. A non-numeric first row is a header.
inline Dataset load_feature_csv(const std::string& path, std::size_t n_features) {
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot open '" + path + "'");
    Dataset ds;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = detail::split_csv_line(line);
        std::vector<double> x(n_features);
        bool ok = cells.size() == n_features + 1;
        for (std::size_t j = 0; ok && j < n_features; ++j) ok = detail::parse_double(cells[j], x[j]);
        if (!ok) {
            if (row == 1) continue;
            throw IngestionError(path + ": row " + std::to_string(row) + " is malformed (expected " +
                                 std::to_string(n_features) + " features plus one trailing column)");
        }
        ds.features.push_back(std::move(x));
    }
    if (ds.features.empty()) throw IngestionError(path + ": no data rows");
    return ds;
}

/// Uniform [0, 1) features.
inline Dataset synthetic_features(std::size_t n_points, std::size_t n_features, Rng& rng) {
    Dataset ds;
    ds.features.assign(n_points, std::vector<double>(n_features));
    for (auto& row : ds.features)
        for (auto& v : row) v = rng.uniform();
    return ds;
}

/// Maps each feature column's minimum to 0 and maximum to 1. Constant
/// columns map to 0.
inline void min_max_normalize(Dataset& ds) {
    for (std::size_t j = 0; j < ds.n_features(); ++j) {
        double lo = ds.features[0][j], hi = lo;
        for (const auto& r : ds.features) {
            lo = std::min(lo, r[j]);
            hi = std::max(hi, r[j]);
        }
        for (auto& r : ds.features) r[j] = hi > lo ? (r[j] - lo) / (hi - lo) : 0.0;
    }
}

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Random partition into `n_train` training and `n_test` test indices.
inline Split random_split(std::size_t n, std::size_t n_train, std::size_t n_test, Rng& rng) {
    if (n_train + n_test != n)
        throw ArgumentError("split sizes " + std::to_string(n_train) + " + " + std::to_string(n_test) +
                            " do not sum to dataset size " + std::to_string(n));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    Split s;
    s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
    return s;
}

} // namespace santaq::bench
