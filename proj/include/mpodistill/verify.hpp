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

// Report-producing verification suites: MPO steps against the circuit
// oracles, and the five-qubit tables against their simulation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "json.hpp"

#include "mpodistill/five_qubit.hpp"
#include "mpodistill/mpo.hpp"
#include "mpodistill/oracle.hpp"
#include "mpodistill/parallel.hpp"
#include "mpodistill/random.hpp"

namespace mpodistill {

/// Random Bell MPO with CP coefficients. A is trace-preserving and carries
/// most of the weight; B is TP and C, D are not, all scaled by `noise`.
/// d = 1 gives scalars (1, noise·u, noise·u, noise·u).
inline BellMPO random_bell_mpo(int d, Rng &rng, double noise = 0.3) {
    if (d == 1) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        return BellMPO::scalar(1.0, noise * u(rng), noise * u(rng), noise * u(rng));
    }
    const Complex s(noise, 0.0);
    return BellMPO(random_cp_map(d, rng, true), s * random_cp_map(d, rng, true), s * random_cp_map(d, rng, false),
                   s * random_cp_map(d, rng, false));
}

struct OracleReport {
    std::uint64_t seed = 0;
    int mpos = 0;
    /// Probability tables compared (one per MPO, protocol and block count).
    int comparisons = 0;
    int mismatches = 0;
    double max_deviation = 0.0;
    double tolerance = 1e-9;
};

/// `samples` random MPOs with d cycling through 1, 2, 3. Recurrence on 2 and
/// 4 blocks for every MPO; five-qubit on 1 and 2 blocks for d ≤ 2.
inline OracleReport verify_oracle(int samples, std::uint64_t seed) {
    struct Row {
        int comparisons = 0;
        int mismatches = 0;
        double worst = 0.0;
    };
    OracleReport r;
    r.seed = seed;
    r.mpos = samples;
    std::vector<Row> rows(static_cast<std::size_t>(std::max(samples, 0)));
    parallel_for(rows.size(), [&](std::size_t i) {
        Rng rng(derive_seed(seed, i));
        const BellMPO m = random_bell_mpo(1 + static_cast<int>(i % 3), rng);
        Row &row = rows[i];
        auto compare = [&](Protocol p, int blocks) {
            const auto a = oracle_step_distribution(m, p, blocks);
            const auto b = mpo_step_distribution(m, p, blocks);
            double w = 0.0;
            for (std::size_t k = 0; k < a.size(); ++k) {
                w = std::max(w, std::abs(a[k] - b[k]));
            }
            ++row.comparisons;
            row.mismatches += w > r.tolerance ? 1 : 0;
            row.worst = std::max(row.worst, w);
        };
        compare(Protocol::recurrence, 2);
        compare(Protocol::recurrence, 4);
        if (m.bond_dim() <= 2) {
            compare(Protocol::five_qubit, 1);
            compare(Protocol::five_qubit, 2);
        }
    });
    for (const Row &row : rows) {
        r.comparisons += row.comparisons;
        r.mismatches += row.mismatches;
        r.max_deviation = std::max(r.max_deviation, row.worst);
    }
    return r;
}

inline nlohmann::json to_json(const OracleReport &r) {
    return {{"seed", r.seed},
            {"mpos", r.mpos},
            {"comparisons", r.comparisons},
            {"mismatches", r.mismatches},
            {"max_deviation", r.max_deviation},
            {"tolerance", r.tolerance}};
}

/// Weight ≤ 2 monomials every output class must contain: (class, noise
/// letters in chain order).
inline const std::vector<std::pair<Bell, std::vector<Bell>>> &expected_leading_terms() {
    using B = Bell;
    static const std::vector<std::pair<Bell, std::vector<Bell>>> t = {
        {B::phi_plus, {}},
        {B::phi_plus, {B::phi_minus}},
        {B::phi_plus, {B::psi_plus}},
        {B::phi_plus, {B::psi_minus}},
        {B::phi_minus, {B::phi_minus, B::phi_minus}},
        {B::phi_minus, {B::psi_plus, B::psi_minus}},
        {B::phi_minus, {B::psi_minus, B::psi_plus}},
        {B::psi_plus, {B::phi_minus, B::psi_plus}},
        {B::psi_plus, {B::psi_plus, B::phi_minus}},
        {B::psi_plus, {B::psi_minus, B::psi_minus}},
        {B::psi_minus, {B::phi_minus, B::psi_minus}},
        {B::psi_minus, {B::psi_plus, B::psi_plus}},
        {B::psi_minus, {B::psi_minus, B::phi_minus}},
    };
    return t;
}

struct TablesReport {
    std::array<int, 4> class_sizes{};
    int low_weight = 0;
    /// Weight ≤ 1 patterns that decode to φ⁺.
    int low_weight_corrected = 0;
    /// Patterns where the symplectic tables and the simulation disagree on
    /// syndrome or class.
    int disagreements = 0;
    int leading_terms_found = 0;
    int leading_terms_total = 0;

    bool ok() const {
        return std::all_of(class_sizes.begin(), class_sizes.end(), [](int n) { return n == 256; }) &&
               low_weight == 16 && low_weight_corrected == 16 && disagreements == 0 &&
               leading_terms_found == leading_terms_total;
    }
};

inline TablesReport verify_tables() {
    const PatternClassification &t = pattern_tables();
    const FiveQubitSimulation &sim = five_qubit_simulation();
    TablesReport r;
    r.class_sizes = class_sizes(t);
    for (int p = 0; p < kPatternCount; ++p) {
        int weight = 0;
        for (int q = 0; q < 5; ++q) {
            weight += pattern_digit(p, q) != Bell::phi_plus ? 1 : 0;
        }
        const auto i = static_cast<std::size_t>(p);
        if (weight <= 1) {
            ++r.low_weight;
            r.low_weight_corrected += t.class_of[i] == Bell::phi_plus ? 1 : 0;
        }
        if (sim.class_of[i] != t.class_of[i] || sim.syndrome[i] != t.syndrome_of[i]) {
            ++r.disagreements;
        }
    }
    for (const auto &[k, noise] : expected_leading_terms()) {
        ++r.leading_terms_total;
        r.leading_terms_found += has_monomial(t, k, noise) ? 1 : 0;
    }
    return r;
}

inline nlohmann::json to_json(const TablesReport &r) {
    return {{"class_sizes", r.class_sizes},
            {"low_weight", r.low_weight},
            {"low_weight_corrected", r.low_weight_corrected},
            {"disagreements", r.disagreements},
            {"leading_terms_found", r.leading_terms_found},
            {"leading_terms_total", r.leading_terms_total},
            {"ok", r.ok()}};
}

}  // namespace mpodistill
