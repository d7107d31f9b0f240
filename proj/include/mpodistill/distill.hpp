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

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "mpodistill/common.hpp"
#include "mpodistill/five_qubit.hpp"
#include "mpodistill/linalg.hpp"
#include "mpodistill/mpo.hpp"
#include "mpodistill/norms.hpp"
#include "mpodistill/recurrence.hpp"

namespace mpodistill {

enum class Protocol { recurrence, five_qubit };

inline constexpr std::string_view to_string(Protocol p) {
    return p == Protocol::recurrence ? "recurrence" : "five-qubit";
}

inline Protocol protocol_from_string(std::string_view s) {
    if (s == "recurrence") return Protocol::recurrence;
    if (s == "five-qubit" || s == "five_qubit") return Protocol::five_qubit;
    throw std::invalid_argument("unknown protocol '" + std::string(s) + "'");
}

/// Tr[E_out^{L/2}] / Tr[E_in^L] for one recurrence step of `in`: the
/// probability that all L/2 parity checks on a chain of L pairs agree.
inline double success_probability(const BellMPO &in, const BellMPO &out, long length) {
    if (length < 2 || length % 2 != 0) {
        throw std::invalid_argument("success_probability: L must be even and >= 2");
    }
    const ChannelMatrix e_in = transfer(in);
    const double s = detail::chain_scale(e_in);
    const double z_in = detail::normaliser(e_in.matrix() * s, length);
    // Each output coefficient is quadratic in the input ones.
    const Matrix e_out = transfer(out).matrix() * (s * s);
    const double z_out = detail::real_trace(matrix_power(e_out, length / 2), "success_probability");
    return std::clamp(z_out / z_in, 0.0, 1.0 + 1e-9);
}

inline double success_probability(const BellMPO &in, long length) {
    return success_probability(in, recurrence_single_step(in), length);
}

struct FlowRound {
    int n = 0;
    /// Chain length at this round, if still ≥ 1.
    std::optional<long> length;
    double epsilon = 0.0;
    double tau = 0.0;
    double kappa = 1.0;
    std::optional<double> fidelity;
    double fidelity_limit = 0.0;
    /// p_B + p_C + p_D, summed directly so small values keep their digits.
    std::optional<double> infidelity;
    double infidelity_limit = 0.0;
    /// Probability that the rounds leading here succeeded (recurrence only).
    std::optional<double> success_probability;
};

enum class FlowStatus { converging, diverging, gauge_failure };

inline constexpr std::string_view to_string(FlowStatus s) {
    switch (s) {
        case FlowStatus::converging:
            return "converging";
        case FlowStatus::diverging:
            return "diverging";
        default:
            return "gauge_failure";
    }
}

inline FlowStatus flow_status_from_string(std::string_view s) {
    if (s == "converging") return FlowStatus::converging;
    if (s == "diverging") return FlowStatus::diverging;
    if (s == "gauge_failure") return FlowStatus::gauge_failure;
    throw std::invalid_argument("unknown flow status '" + std::string(s) + "'");
}

struct FlowTrace {
    Protocol protocol = Protocol::recurrence;
    int d = 1;
    long l0 = 64;
    std::vector<FlowRound> rounds;
    FlowStatus status = FlowStatus::converging;
    std::string error;
};

struct FlowOptions {
    OptimizerOptions optimizer{};
    /// Skip the τ optimisation (reported as 0) when only fidelities matter.
    bool compute_tau = true;
};

namespace detail {

inline FlowRound describe(const BellMPO &m, int n, std::optional<long> length, double kappa,
                          const FlowOptions &opts) {
    FlowRound r;
    r.n = n;
    r.length = length;
    r.epsilon = epsilon(m);
    r.tau = opts.compute_tau ? tau_a(m, opts.optimizer) : 0.0;
    r.kappa = kappa;
    if (length) {
        const auto p = local_marginal(m, *length);
        r.fidelity = p[0];
        r.infidelity = p[1] + p[2] + p[3];
    }
    const auto p = local_marginal_limit(m);
    r.fidelity_limit = p[0];
    r.infidelity_limit = p[1] + p[2] + p[3];
    return r;
}

inline std::optional<long> chain_length(long l0, long divisor) {
    if (divisor <= 0 || l0 / divisor < 1) {
        return std::nullopt;
    }
    return l0 / divisor;
}

}  // namespace detail

/// Runs `rounds` rounds of a protocol. Recurrence rounds are double steps,
/// each followed by an A-anchored regauge; the five-qubit flow is gauged once
/// (E anchored) and then iterated as is. Round 0 describes the input.
inline FlowTrace distill_flow(const BellMPO &input, Protocol protocol, int rounds, long l0 = 64,
                              const FlowOptions &opts = {}) {
    if (rounds < 1) {
        throw std::invalid_argument("distill_flow: rounds must be >= 1");
    }
    if (l0 < 1) {
        throw std::invalid_argument("distill_flow: L0 must be >= 1");
    }
    FlowTrace trace;
    trace.protocol = protocol;
    trace.d = input.bond_dim();
    trace.l0 = l0;

    const Anchor anchor = protocol == Protocol::recurrence ? Anchor::a : Anchor::e;
    BellMPO m = input;
    try {
        auto [g, info] = canonical_gauge(input, anchor);
        m = std::move(g);
        trace.rounds.push_back(detail::describe(m, 0, l0, info.kappa, opts));
        trace.rounds.back().success_probability = 1.0;
    } catch (const Error &e) {
        trace.status = FlowStatus::gauge_failure;
        trace.error = e.what();
        return trace;
    }

    double success = 1.0;
    long divisor = 1;
    for (int n = 1; n <= rounds; ++n) {
        try {
            double kappa = 1.0;
            std::optional<double> p_round;
            if (protocol == Protocol::recurrence) {
                const long length = l0 / divisor;
                const BellMPO m1 = recurrence_single_step(m);
                const BellMPO m2 = recurrence_single_step(m1);
                if (length >= 4 && length % 4 == 0) {
                    success *= success_probability(m, m1, length) * success_probability(m1, m2, length / 2);
                    p_round = success;
                }
                divisor *= 4;
                auto [g, info] = canonical_gauge(m2, Anchor::a);
                m = std::move(g);
                kappa = info.kappa;
            } else {
                m = five_qubit_step(m);
                divisor *= 5;
            }
            trace.rounds.push_back(detail::describe(m, n, detail::chain_length(l0, divisor), kappa, opts));
            if (protocol == Protocol::recurrence) {
                trace.rounds.back().success_probability = p_round;
            }
        } catch (const Error &e) {
            trace.status = FlowStatus::gauge_failure;
            trace.error = e.what();
            return trace;
        }
    }
    trace.status = trace.rounds.back().epsilon > trace.rounds.front().epsilon ? FlowStatus::diverging
                                                                              : FlowStatus::converging;
    return trace;
}

namespace detail {

template <typename T>
nlohmann::json optional_json(const std::optional<T> &v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <typename T>
std::optional<T> optional_from_json(const nlohmann::json &j) {
    if (j.is_null()) {
        return std::nullopt;
    }
    return j.get<T>();
}

}  // namespace detail

inline nlohmann::json to_json(const FlowTrace &t) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["protocol"] = std::string(to_string(t.protocol));
    j["d"] = t.d;
    j["L0"] = t.l0;
    j["status"] = std::string(to_string(t.status));
    j["error"] = t.error;
    nlohmann::json rounds = nlohmann::json::array();
    for (const FlowRound &r : t.rounds) {
        rounds.push_back({{"n", r.n},
                          {"L", detail::optional_json(r.length)},
                          {"epsilon", r.epsilon},
                          {"tau", r.tau},
                          {"kappa", r.kappa},
                          {"fidelity", detail::optional_json(r.fidelity)},
                          {"fidelity_limit", r.fidelity_limit},
                          {"infidelity", detail::optional_json(r.infidelity)},
                          {"infidelity_limit", r.infidelity_limit},
                          {"success_probability", detail::optional_json(r.success_probability)}});
    }
    j["rounds"] = rounds;
    return j;
}

inline FlowTrace flow_trace_from_json(const nlohmann::json &j) {
    if (j.at("schema_version").get<int>() != 1) {
        throw std::invalid_argument("flow trace: unsupported schema_version");
    }
    FlowTrace t;
    t.protocol = protocol_from_string(j.at("protocol").get<std::string>());
    t.d = j.at("d").get<int>();
    t.l0 = j.at("L0").get<long>();
    t.status = flow_status_from_string(j.at("status").get<std::string>());
    t.error = j.at("error").get<std::string>();
    for (const auto &jr : j.at("rounds")) {
        FlowRound r;
        r.n = jr.at("n").get<int>();
        r.length = detail::optional_from_json<long>(jr.at("L"));
        r.epsilon = jr.at("epsilon").get<double>();
        r.tau = jr.at("tau").get<double>();
        r.kappa = jr.at("kappa").get<double>();
        r.fidelity = detail::optional_from_json<double>(jr.at("fidelity"));
        r.fidelity_limit = jr.at("fidelity_limit").get<double>();
        r.infidelity = detail::optional_from_json<double>(jr.at("infidelity"));
        r.infidelity_limit = jr.at("infidelity_limit").get<double>();
        r.success_probability = detail::optional_from_json<double>(jr.at("success_probability"));
        t.rounds.push_back(r);
    }
    return t;
}

}  // namespace mpodistill
