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

// Worst-case recursions for the noise ε and the ergodicity τ of A under the
// recurrence protocol (one step here is a double step of the protocol), and
// the polynomial ε recursion of the five-qubit protocol.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpodistill/distill.hpp"

namespace mpodistill {

struct BoundState {
    double eps = 0.0;
    double tau = 0.0;
    /// (1+τ⁴)/(1−τ⁴)
    double z = 1.0;
    /// 2ε² + 5ε⁴
    double p = 0.0;
    /// 2ZP
    double k = 0.0;
    /// k/(1−k)
    double delta = 0.0;
    /// False when τ ≥ 1 or k ≥ 1/2; the recursion is then undefined.
    bool in_domain = true;
};

inline BoundState make_bound_state(double eps, double tau) {
    BoundState s;
    s.eps = eps;
    s.tau = tau;
    if (!(eps >= 0.0) || !(tau >= 0.0) || !std::isfinite(eps) || !std::isfinite(tau)) {
        throw std::invalid_argument("make_bound_state: need finite eps, tau >= 0");
    }
    const double t4 = std::pow(tau, 4);
    if (t4 >= 1.0) {
        s.in_domain = false;
        return s;
    }
    s.z = (1.0 + t4) / (1.0 - t4);
    s.p = 2.0 * eps * eps + 5.0 * std::pow(eps, 4);
    s.k = 2.0 * s.z * s.p;
    if (s.k >= 0.5) {
        s.in_domain = false;
        return s;
    }
    s.delta = s.k / (1.0 - s.k);
    return s;
}

/// One double step of the recurrence bounds, with each inequality taken as
/// an equality. Throws std::domain_error outside the domain.
inline BoundState recurrence_bound_step(const BoundState &s) {
    if (!s.in_domain) {
        throw std::domain_error("recurrence_bound_step: state is out of domain");
    }
    const double t4 = std::pow(s.tau, 4);
    const double ratio = (1.0 + s.delta) / (1.0 - s.delta);
    const double tau = t4 * (1.0 + 3.0 * s.delta) + ratio * (3.0 * s.delta + s.p);
    const double eps = 4.0 * ratio * (s.eps * s.eps + std::pow(s.eps, 4));
    return make_bound_state(eps, tau);
}

inline BoundState recurrence_bound_step(double eps, double tau) {
    return recurrence_bound_step(make_bound_state(eps, tau));
}

inline double five_qubit_bound_step(double eps) {
    if (!(eps >= 0.0)) {
        throw std::invalid_argument("five_qubit_bound_step: eps must be >= 0");
    }
    const double e2 = eps * eps;
    return e2 * (30.0 + eps * (70.0 + eps * (90.0 + eps * 66.0)));
}

struct ConvergenceResult {
    bool converged = false;
    /// Double steps until ε < target (or until the iteration stopped).
    int rounds = 0;
};

inline ConvergenceResult converge_rounds(double eps0, double tau0, int max_iter = 200, double target = 1e-12) {
    BoundState s = make_bound_state(eps0, tau0);
    for (int n = 0; n <= max_iter; ++n) {
        if (!s.in_domain) {
            return {false, n};
        }
        if (s.eps < target) {
            return {true, n};
        }
        if (n == max_iter) {
            break;
        }
        s = recurrence_bound_step(s);
    }
    return {false, max_iter};
}

inline bool converges(double eps0, double tau0, int max_iter = 200, double target = 1e-12) {
    return converge_rounds(eps0, tau0, max_iter, target).converged;
}

/// Closed-form sufficient condition: ε₀ ≤ (1/7)(1−τ₀⁴)/(1+τ₀⁴).
inline double analytic_threshold(double tau0) {
    if (!(tau0 >= 0.0 && tau0 < 1.0)) {
        throw std::invalid_argument("analytic_threshold: tau0 must lie in [0, 1)");
    }
    const double t4 = std::pow(tau0, 4);
    return (1.0 - t4) / (1.0 + t4) / 7.0;
}

struct GridSpec {
    int n_eps = 100;
    int n_tau = 100;
    double eps_max = 0.25;
    double tau_max = 0.99;
};

struct RegionPoint {
    double eps0 = 0.0;
    double tau0 = 0.0;
    bool converged = false;
    int rounds = 0;
};

/// Grid coordinate i of n points on [0, max], endpoints included.
inline double grid_value(int i, int n, double max) {
    return n == 1 ? 0.0 : max * static_cast<double>(i) / static_cast<double>(n - 1);
}

/// Row-major scan: ε outer, τ inner.
inline std::vector<RegionPoint> region_scan(const GridSpec &g) {
    if (g.n_eps < 2 || g.n_tau < 2) {
        throw std::invalid_argument("region_scan: need at least 2 points per axis");
    }
    if (!(g.eps_max > 0.0 && g.eps_max < 1.0) || !(g.tau_max > 0.0 && g.tau_max < 1.0)) {
        throw std::invalid_argument("region_scan: eps_max and tau_max must lie in (0, 1)");
    }
    std::vector<RegionPoint> out;
    out.reserve(static_cast<std::size_t>(g.n_eps) * static_cast<std::size_t>(g.n_tau));
    for (int i = 0; i < g.n_eps; ++i) {
        for (int j = 0; j < g.n_tau; ++j) {
            RegionPoint p;
            p.eps0 = grid_value(i, g.n_eps, g.eps_max);
            p.tau0 = grid_value(j, g.n_tau, g.tau_max);
            const auto r = converge_rounds(p.eps0, p.tau0);
            p.converged = r.converged;
            p.rounds = r.rounds;
            out.push_back(p);
        }
    }
    return out;
}

/// Largest ε that the recursion still drives to 0, on a τ grid: the
/// numerically improved boundary of the region.
inline double numeric_threshold(double tau0, double tol = 1e-10) {
    double lo = 0.0;
    double hi = 0.5;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (converges(mid, tau0) ? lo : hi) = mid;
    }
    return lo;
}

/// Closed-form convergence speed bounds. For the recurrence protocol n
/// counts single steps and must be even.
inline double speed_bound(Protocol protocol, double eps0, int n) {
    if (n < 0) {
        throw std::invalid_argument("speed_bound: n must be >= 0");
    }
    if (protocol == Protocol::five_qubit) {
        return std::pow(33.0 * eps0, std::ldexp(1.0, n)) / 33.0;
    }
    if (n % 2 != 0) {
        throw std::invalid_argument("speed_bound: recurrence bound needs an even step count");
    }
    return std::pow(5.0 * eps0, std::ldexp(1.0, n / 2)) / 5.0;
}

/// ε sequence of the five-qubit recursion, ε_0..ε_n.
inline std::vector<double> five_qubit_bound_sequence(double eps0, int n) {
    std::vector<double> out = {eps0};
    for (int i = 0; i < n; ++i) {
        out.push_back(five_qubit_bound_step(out.back()));
    }
    return out;
}

inline bool five_qubit_converges(double eps0, int max_iter = 200, double target = 1e-12) {
    double e = eps0;
    for (int n = 0; n < max_iter; ++n) {
        if (e < target) {
            return true;
        }
        e = five_qubit_bound_step(e);
        if (!std::isfinite(e) || e > 1.0) {
            return false;
        }
    }
    return e < target;
}

/// Bisection for the largest ε₀ the five-qubit recursion drives to zero.
inline double five_qubit_threshold(double tol = 1e-12) {
    double lo = 0.0;
    double hi = 0.1;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (five_qubit_converges(mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace mpodistill
