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

// Randomised checks of the analytic inequalities behind the bound flow.
// Each sample yields zero or more (lhs, rhs) pairs; samples whose hypotheses
// fail contribute nothing. Norms of non-positive maps come from the
// multistart optimiser, which returns lower bounds: on the left-hand side
// that can only hide a violation, on the right-hand side it can only
// invent one.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mpodistill/mpo.hpp"
#include "mpodistill/norms.hpp"
#include "mpodistill/parallel.hpp"
#include "mpodistill/perron.hpp"
#include "mpodistill/random.hpp"
#include "mpodistill/recurrence.hpp"
#include "mpodistill/bound_flow.hpp"

namespace mpodistill {

/// Absolute slack for rounding and optimiser tolerance.
inline constexpr double kInequalitySlack = 1e-8;

struct InequalityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    std::string label;
};

struct InequalityReport {
    std::string name;
    int samples = 0;
    /// Number of (lhs, rhs) pairs actually evaluated.
    int checks = 0;
    int violations = 0;
    /// min(rhs − lhs) over all checks; +inf when nothing was checked.
    double worst_margin = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;
    std::string worst_label;
};

using SampleFn = std::function<std::vector<InequalityCheck>(Rng &, const OptimizerOptions &)>;

inline InequalityReport run_inequality(const std::string &name, const SampleFn &fn, int samples,
                                       std::uint64_t seed, const OptimizerOptions &base = {}) {
    std::vector<std::vector<InequalityCheck>> results(static_cast<std::size_t>(samples));
    parallel_for(static_cast<std::size_t>(samples), [&](std::size_t i) {
        const std::uint64_t s = derive_seed(seed, i);
        Rng rng(s);
        OptimizerOptions opts = base;
        opts.seed = derive_seed(s, 0x6f7074);
        try {
            results[i] = fn(rng, opts);
        } catch (const Error &) {
            // degenerate draw (e.g. no unique Perron vector): hypotheses fail
            results[i].clear();
        }
    });
    InequalityReport r;
    r.name = name;
    r.samples = samples;
    r.seed = seed;
    for (std::size_t i = 0; i < results.size(); ++i) {
        for (const auto &c : results[i]) {
            ++r.checks;
            const double margin = c.rhs - c.lhs;
            if (margin < -kInequalitySlack || !std::isfinite(margin)) {
                ++r.violations;
            }
            if (margin < r.worst_margin) {
                r.worst_margin = margin;
                r.worst_label = "sample " + std::to_string(i) + ": " + c.label;
            }
        }
    }
    return r;
}

namespace detail {

inline int random_dim(Rng &rng) {
    return std::uniform_int_distribution<int>(2, 3)(rng);
}

inline double log_uniform(Rng &rng, double lo, double hi) {
    return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
}

/// CP map rescaled to ‖·‖₁→₁ = target.
inline ChannelMatrix cp_with_norm(int d, Rng &rng, double target) {
    ChannelMatrix g = random_cp_map(d, rng, false);
    return g * Complex(target / norm_1to1_positive(g));
}

/// A_TP MPO: random channel A plus noise maps of norm at most eps.
inline BellMPO noisy_a_tp_mpo(int d, Rng &rng, double eps) {
    std::uniform_real_distribution<double> frac(0.2, 1.0);
    ChannelMatrix a = random_cp_map(d, rng, true);
    ChannelMatrix b = cp_with_norm(d, rng, eps);
    ChannelMatrix c = cp_with_norm(d, rng, eps * frac(rng));
    ChannelMatrix dd = cp_with_norm(d, rng, eps * frac(rng));
    return BellMPO(std::move(a), std::move(b), std::move(c), std::move(dd), GaugeTag::a_tp);
}

inline std::string fmt(const char *what, double v) {
    std::ostringstream os;
    os << what << "=" << v;
    return os.str();
}

/// Perturbed pair F1 (channel) and F2 (CP, spectral radius 1) for the
/// eigenvector perturbation bounds. ξ is F2's left Perron vector, checked
/// both with Tr(ρ₁ ξ) = 1 (ρ₁ the fixed point of F1) and with Tr ξ = d.
struct PerturbedPair {
    ChannelMatrix f1;
    ChannelMatrix f2;
    double distance = 0.0;
    double tau1 = 0.0;
    double deviation = 0.0;
    /// Same with Tr ξ = d.
    double deviation_trace = 0.0;
};

inline PerturbedPair perturbed_pair(Rng &rng, const OptimizerOptions &opts) {
    const int d = random_dim(rng);
    PerturbedPair p;
    p.f1 = random_cp_map(d, rng, true);
    const double eta = log_uniform(rng, 1e-4, 0.3);
    ChannelMatrix sum = p.f1 + cp_with_norm(d, rng, eta);
    p.f2 = sum * Complex(1.0 / spectral_radius(sum.matrix()));
    p.distance = norm_1to1_general(p.f1 - p.f2, opts).value;
    p.tau1 = ergodicity(p.f1, opts);
    const Operator rho1 = steady_state(p.f1);
    Operator xi = perron_left(p.f2).xi;
    p.deviation_trace = spectral_norm(identity_operator(d) - xi);
    xi /= (rho1 * xi).trace().real();
    p.deviation = spectral_norm(identity_operator(d) - xi);
    return p;
}

}  // namespace detail

/// |Tr E^L − 1| ≤ d^{5/2} τ(E)^L for channels E, L = 1..8.
inline InequalityReport check_trace_bound(int samples, std::uint64_t seed) {
    return run_inequality("trace_bound", [](Rng &rng, const OptimizerOptions &opts) {
        const int d = detail::random_dim(rng);
        const ChannelMatrix e = random_cp_map(d, rng, true);
        const double tau = ergodicity(e, opts);
        const double c = std::pow(static_cast<double>(d), 2.5);
        std::vector<InequalityCheck> out;
        for (long l = 1; l <= 8; ++l) {
            out.push_back({std::abs(contract_trace(e, l) - 1.0), c * std::pow(tau, static_cast<double>(l)),
                           detail::fmt("L", static_cast<double>(l))});
        }
        return out;
    }, samples, seed);
}

/// p_X(L) ≤ ‖X‖ (1 + d^{5/2}τ^{L−1}) / (1 − d^{5/2}τ^L) in the E_TP gauge,
/// wherever the denominator is positive.
inline InequalityReport check_norm_bound(int samples, std::uint64_t seed) {
    return run_inequality("norm_bound", [](Rng &rng, const OptimizerOptions &opts) {
        const int d = detail::random_dim(rng);
        const BellMPO raw(random_cp_map(d, rng, true), random_cp_map(d, rng, false) * Complex(0.2),
                          random_cp_map(d, rng, false) * Complex(0.1), random_cp_map(d, rng, false) * Complex(0.1));
        const BellMPO m = canonical_gauge(raw, Anchor::e).first;
        const double tau = ergodicity(transfer(m), opts);
        const double c = std::pow(static_cast<double>(d), 2.5);
        std::vector<InequalityCheck> out;
        for (long l = 2; l <= 24; ++l) {
            const double den = 1.0 - c * std::pow(tau, static_cast<double>(l));
            if (!(den > 0.0)) {
                continue;
            }
            const double num = 1.0 + c * std::pow(tau, static_cast<double>(l - 1));
            const auto p = local_marginal(m, l);
            for (Bell x : kAllBell) {
                out.push_back({p[static_cast<std::size_t>(index(x))], norm_1to1_positive(m[x]) * num / den,
                               std::string(to_string(x)) + " " + detail::fmt("L", static_cast<double>(l))});
            }
        }
        return out;
    }, samples, seed);
}

/// ‖1 − ξ‖∞ ≤ k/(1−k), k = (1+τ(F1))/(1−τ(F1)) ‖F1 − F2‖, for k < 1.
inline InequalityReport check_eigenvector_perturbation(int samples, std::uint64_t seed) {
    return run_inequality("eigenvector_perturbation", [](Rng &rng, const OptimizerOptions &opts) {
        const auto p = detail::perturbed_pair(rng, opts);
        const double k = (1.0 + p.tau1) / (1.0 - p.tau1) * p.distance;
        if (!(k < 1.0)) {
            return std::vector<InequalityCheck>{};
        }
        return std::vector<InequalityCheck>{{p.deviation, k / (1.0 - k), "rho1 " + detail::fmt("k", k)},
                                            {p.deviation_trace, k / (1.0 - k), "trace " + detail::fmt("k", k)}};
    }, samples, seed);
}

/// ‖1 − ξ‖∞ ≤ ‖Z₁‖δ/(1 − ‖Z₁‖δ) with Z₁ the fundamental channel of F1.
inline InequalityReport check_fundamental_perturbation(int samples, std::uint64_t seed) {
    return run_inequality("fundamental_perturbation", [](Rng &rng, const OptimizerOptions &opts) {
        const auto p = detail::perturbed_pair(rng, opts);
        const double z = norm_1to1_general(fundamental_channel(p.f1), opts).value;
        const double x = z * p.distance;
        if (!(x < 1.0)) {
            return std::vector<InequalityCheck>{};
        }
        return std::vector<InequalityCheck>{{p.deviation, x / (1.0 - x), "rho1 " + detail::fmt("z*delta", x)},
                                            {p.deviation_trace, x / (1.0 - x), "trace " + detail::fmt("z*delta", x)}};
    }, samples, seed);
}

/// ‖Z‖₁→₁ ≤ (1+τ)/(1−τ) for channels.
inline InequalityReport check_fundamental_norm(int samples, std::uint64_t seed) {
    return run_inequality("fundamental_norm", [](Rng &rng, const OptimizerOptions &opts) {
        const int d = detail::random_dim(rng);
        const ChannelMatrix f = random_cp_map(d, rng, true);
        const double tau = ergodicity(f, opts);
        const double z = norm_1to1_general(fundamental_channel(f), opts).value;
        return std::vector<InequalityCheck>{{z, (1.0 + tau) / (1.0 - tau), detail::fmt("tau", tau)}};
    }, samples, seed);
}

/// |τ(F1) − τ(F2)| ≤ τ(F1 − F2) for channel pairs at random distance.
inline InequalityReport check_ergodicity_difference(int samples, std::uint64_t seed) {
    return run_inequality("ergodicity_difference", [](Rng &rng, const OptimizerOptions &opts) {
        const int d = detail::random_dim(rng);
        const ChannelMatrix f1 = random_cp_map(d, rng, true);
        const double s = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const ChannelMatrix f2 = f1 * Complex(1.0 - s) + random_cp_map(d, rng, true) * Complex(s);
        const double lhs = std::abs(ergodicity(f1, opts) - ergodicity(f2, opts));
        return std::vector<InequalityCheck>{{lhs, ergodicity(f1 - f2, opts), detail::fmt("s", s)}};
    }, samples, seed);
}

/// Bounds on S(ρ) = ξ^{1/2} ρ ξ^{1/2} in terms of Δ = ‖1 − ξ‖∞ < 1.
inline InequalityReport check_gauge_maps(int samples, std::uint64_t seed) {
    return run_inequality("gauge_maps", [](Rng &rng, const OptimizerOptions &opts) {
        const int d = detail::random_dim(rng);
        const Matrix g = random_gaussian_matrix(d, d, rng);
        const Operator h = (g + g.adjoint()) / 2.0;
        const double delta = std::uniform_real_distribution<double>(1e-3, 0.99)(rng);
        const Operator one = identity_operator(d);
        const Operator xi = one + delta * h / spectral_norm(h);
        const Operator root = hermitian_power(xi, 0.5);
        const Operator inv_root = hermitian_power(xi, -0.5);
        const ChannelMatrix id = ChannelMatrix::identity(d);
        const double n_s = norm_1to1_general(id - ChannelMatrix::sandwich(root, root), opts).value;
        const double n_si = norm_1to1_general(id - ChannelMatrix::sandwich(inv_root, inv_root), opts).value;
        const double inv_norm = spectral_norm(hermitian_power(xi, -1.0));
        const std::string tag = detail::fmt("delta", delta);
        return std::vector<InequalityCheck>{
            {spectral_norm(xi), 1.0 + delta, "xi " + tag},
            {inv_norm, 1.0 / (1.0 - delta), "xi^-1 " + tag},
            {n_s, 3.0 * delta, "id-S " + tag},
            {n_si, 3.0 * delta / (1.0 - delta), "id-S^-1 " + tag},
            {spectral_norm(xi) * inv_norm, (1.0 + delta) / (1.0 - delta), "kappa " + tag},
        };
    }, samples, seed);
}

namespace detail {

/// One recurrence double step from a random A_TP MPO with small noise.
struct DoubleStepSample {
    double eps = 0.0;
    double tau = 0.0;
    BellMPO raw_next;
    BellMPO next;
    GaugeResult gauge;
    ChannelMatrix a4;
};

inline DoubleStepSample double_step_sample(Rng &rng, const OptimizerOptions &opts, double eps_max) {
    const int d = random_dim(rng);
    const double target = std::uniform_real_distribution<double>(1e-3, eps_max)(rng);
    const BellMPO m = noisy_a_tp_mpo(d, rng, target);
    DoubleStepSample s{epsilon(m), tau_a(m, opts), recurrence_double_step(m), m, {}, m.a().pow(4)};
    auto [g, info] = canonical_gauge(s.raw_next, Anchor::a);
    s.next = std::move(g);
    s.gauge = std::move(info);
    return s;
}

}  // namespace detail

/// κ(S) ≤ 1/(1 − 2k), k = (1+τ⁴)/(1−τ⁴)(4ε² + 10ε⁴), for k < 1/2.
inline InequalityReport check_condition_number(int samples, std::uint64_t seed) {
    return run_inequality("condition_number", [](Rng &rng, const OptimizerOptions &opts) {
        const auto s = detail::double_step_sample(rng, opts, 0.25);
        const double t4 = std::pow(s.tau, 4);
        const double k = (1.0 + t4) / (1.0 - t4) * (4.0 * s.eps * s.eps + 10.0 * std::pow(s.eps, 4));
        if (!(k < 0.5)) {
            return std::vector<InequalityCheck>{};
        }
        return std::vector<InequalityCheck>{{s.gauge.kappa, 1.0 / (1.0 - 2.0 * k), detail::fmt("k", k)}};
    }, samples, seed);
}

/// Noise after a double step: before regauging ε' ≤ 4(1+ε²)ε², after it
/// ε ≤ 4κ(1+ε²)ε².
inline InequalityReport check_epsilon_step(int samples, std::uint64_t seed) {
    return run_inequality("epsilon_step", [](Rng &rng, const OptimizerOptions &opts) {
        const auto s = detail::double_step_sample(rng, opts, 0.5);
        const double base = 4.0 * (1.0 + s.eps * s.eps) * s.eps * s.eps;
        const std::string tag = detail::fmt("eps", s.eps);
        return std::vector<InequalityCheck>{
            {epsilon(s.raw_next), base, "raw " + tag},
            {epsilon(s.next), s.gauge.kappa * base, "regauged " + tag},
        };
    }, samples, seed);
}

/// ‖A'' − A⁴‖₁→₁ ≤ 2ε² + 5ε⁴ (the difference is CP).
inline InequalityReport check_p_bound(int samples, std::uint64_t seed) {
    return run_inequality("p_bound", [](Rng &rng, const OptimizerOptions &opts) {
        const auto s = detail::double_step_sample(rng, opts, 0.5);
        const double lhs = norm_1to1_positive(s.raw_next.a() - s.a4);
        return std::vector<InequalityCheck>{
            {lhs, 2.0 * s.eps * s.eps + 5.0 * std::pow(s.eps, 4), detail::fmt("eps", s.eps)}};
    }, samples, seed);
}

/// Measured (ε, τ) after a regauged double step never exceed one step of
/// the bound recursion, inside its domain.
inline InequalityReport check_bound_dominance(int samples, std::uint64_t seed) {
    return run_inequality("bound_dominance", [](Rng &rng, const OptimizerOptions &opts) {
        const auto s = detail::double_step_sample(rng, opts, 0.2);
        const BoundState b = make_bound_state(s.eps, s.tau);
        if (!b.in_domain) {
            return std::vector<InequalityCheck>{};
        }
        const BoundState next = recurrence_bound_step(b);
        const std::string tag = detail::fmt("eps", s.eps) + " " + detail::fmt("tau", s.tau);
        return std::vector<InequalityCheck>{
            {epsilon(s.next), next.eps, "eps " + tag},
            {tau_a(s.next, opts), next.tau, "tau " + tag},
        };
    }, samples, seed);
}

struct InequalityEntry {
    const char *name;
    InequalityReport (*run)(int, std::uint64_t);
};

inline const std::vector<InequalityEntry> &inequality_registry() {
    static const std::vector<InequalityEntry> r = {
        {"trace_bound", check_trace_bound},
        {"norm_bound", check_norm_bound},
        {"eigenvector_perturbation", check_eigenvector_perturbation},
        {"fundamental_perturbation", check_fundamental_perturbation},
        {"fundamental_norm", check_fundamental_norm},
        {"ergodicity_difference", check_ergodicity_difference},
        {"gauge_maps", check_gauge_maps},
        {"condition_number", check_condition_number},
        {"epsilon_step", check_epsilon_step},
        {"p_bound", check_p_bound},
        {"bound_dominance", check_bound_dominance},
    };
    return r;
}

/// Runs every registered inequality with its own derived seed.
inline std::vector<InequalityReport> run_inequality_suite(int samples, std::uint64_t seed = kDefaultSeed) {
    std::vector<InequalityReport> out;
    const auto &reg = inequality_registry();
    for (std::size_t i = 0; i < reg.size(); ++i) {
        out.push_back(reg[i].run(samples, derive_seed(seed, i)));
    }
    return out;
}

inline nlohmann::json to_json(const InequalityReport &r) {
    return {{"name", r.name},
            {"samples", r.samples},
            {"checks", r.checks},
            {"violations", r.violations},
            {"worst_margin", std::isfinite(r.worst_margin) ? nlohmann::json(r.worst_margin) : nlohmann::json()},
            {"worst_case", r.worst_label},
            {"seed", r.seed}};
}

inline nlohmann::json inequality_suite_json(const std::vector<InequalityReport> &reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto &r : reports) {
        arr.push_back(to_json(r));
    }
    return {{"schema_version", 1}, {"inequalities", arr}};
}

}  // namespace mpodistill
