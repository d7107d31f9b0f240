// Copyright 2026 The mpodistill Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// BellMPO <-> JSON. Each coefficient is the d²×d² matrix of its map, written
// row-major as nested arrays of [re, im] pairs.

#include <string>

#include "json.hpp"

#include "mpodistill/channel.hpp"
#include "mpodistill/mpo.hpp"

namespace mpodistill {

inline nlohmann::json matrix_to_json(const Matrix &m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back({m(i, j).real(), m(i, j).imag()});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const nlohmann::json &j) {
    if (!j.is_array() || j.empty()) {
        throw std::invalid_argument("matrix_from_json: expected a nonempty array of rows");
    }
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto &row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw std::invalid_argument("matrix_from_json: ragged rows");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            const auto &z = row[static_cast<std::size_t>(c)];
            if (!z.is_array() || z.size() != 2) {
                throw std::invalid_argument("matrix_from_json: entries must be [re, im]");
            }
            m(i, c) = Complex(z[0].get<double>(), z[1].get<double>());
        }
    }
    return m;
}

inline nlohmann::json to_json(const BellMPO &m) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["d"] = m.bond_dim();
    j["gauge"] = std::string(to_string(m.gauge()));
    j["A"] = matrix_to_json(m.a().matrix());
    j["B"] = matrix_to_json(m.b().matrix());
    j["C"] = matrix_to_json(m.c().matrix());
    j["D"] = matrix_to_json(m.d().matrix());
    return j;
}

/// Parses and validates (complete positivity included) a BellMPO document.
/// schema_version and gauge are optional on input.
inline BellMPO bell_mpo_from_json(const nlohmann::json &j) {
    if (j.contains("schema_version") && j.at("schema_version").get<int>() != 1) {
        throw std::invalid_argument("BellMPO json: unsupported schema_version");
    }
    const int d = j.at("d").get<int>();
    auto read = [&](const char *key) {
        ChannelMatrix c(matrix_from_json(j.at(key)));
        if (c.dim() != d) {
            throw std::invalid_argument(std::string("BellMPO json: coefficient ") + key + " does not match d");
        }
        return c;
    };
    const GaugeTag gauge = j.contains("gauge") ? gauge_tag_from_string(j.at("gauge").get<std::string>()) : GaugeTag::raw;
    return BellMPO(read("A"), read("B"), read("C"), read("D"), gauge);
}

}  // namespace mpodistill
