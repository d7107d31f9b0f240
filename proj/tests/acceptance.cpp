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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Optional arguments select criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mpodistill/bound_flow.hpp"
#include "mpodistill/distill.hpp"
#include "mpodistill/five_qubit.hpp"
#include "mpodistill/inequalities.hpp"
#include "mpodistill/oracle.hpp"
#include "mpodistill/physmodel.hpp"
#include "test_util.hpp"

using namespace mpodistill;

namespace {

struct Outcome {
    std::vector<std::string> failures;
    std::ostringstream info;

    bool pass() const {
        return failures.empty();
    }
    void require(bool ok, const std::string &what) {
        if (!ok) {
            failures.push_back(what);
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Outcome analytic_threshold_check() {
    Outcome o;
    o.require(analytic_threshold(0.0) == 1.0 / 7.0, "threshold(0) != 1/7");
    int bad = 0;
    int worst_rounds = 0;
    for (int i = 0; i < 100; ++i) {
        const double tau = 0.99 * i / 99.0;
        const auto r = converge_rounds(0.95 * analytic_threshold(tau), tau, 200);
        bad += r.converged ? 0 : 1;
        worst_rounds = std::max(worst_rounds, r.rounds);
    }
    o.require(bad == 0, std::to_string(bad) + " grid points failed to converge");
    o.info << "threshold(0) = " << num(analytic_threshold(0.0)) << ", " << 100 - bad << "/100 converge, max "
           << worst_rounds << " double steps";
    return o;
}

Outcome region_check() {
    Outcome o;
    const auto pts = region_scan(GridSpec{100, 100, 0.25, 0.99});
    int inside = 0;
    int missing = 0;
    int above = 0;
    for (const auto &p : pts) {
        if (p.eps0 <= analytic_threshold(p.tau0)) {
            ++inside;
            missing += p.converged ? 0 : 1;
        } else if (p.converged) {
            ++above;
        }
    }
    o.require(missing == 0, std::to_string(missing) + " analytic-region points do not converge");
    o.require(above > 0, "no converging point above the analytic curve");
    o.info << inside - missing << "/" << inside << " analytic-region points converge, " << above
           << " converging points above the curve";
    return o;
}

Outcome five_qubit_threshold_check() {
    Outcome o;
    int bad = 0;
    for (int i = 0; i <= 200; ++i) {
        bad += five_qubit_converges((1.0 / 33.0) * i / 200.0) ? 0 : 1;
    }
    const double t = five_qubit_threshold();
    o.require(bad == 0, std::to_string(bad) + " grid points up to 1/33 diverge");
    o.require(t >= 0.030 && t <= 0.032, "threshold " + num(t) + " outside [0.030, 0.032]");
    o.info << 201 - bad << "/201 grid points up to 1/33 converge, threshold " << num(t);
    return o;
}

Outcome speed_check() {
    Outcome o;
    const double e0 = 0.02;
    double worst = -1.0;
    const auto seq = five_qubit_bound_sequence(e0, 6);
    for (int n = 0; n <= 6; ++n) {
        const double gap = seq[static_cast<std::size_t>(n)] - speed_bound(Protocol::five_qubit, e0, n);
        worst = std::max(worst, gap);
        o.require(gap <= 1e-12, "five-qubit n=" + std::to_string(n) + " exceeds bound by " + num(gap));
    }
    BoundState s = make_bound_state(e0, 0.0);
    for (int n = 0; n <= 6; n += 2) {
        const double gap = s.eps - speed_bound(Protocol::recurrence, e0, n);
        worst = std::max(worst, gap);
        o.require(gap <= 1e-12, "recurrence n=" + std::to_string(n) + " exceeds bound by " + num(gap));
        s = recurrence_bound_step(s);
    }
    o.info << "largest (value - bound) " << num(worst);
    return o;
}

Outcome oracle_check() {
    Outcome o;
    const auto corpus = testing::mpo_corpus({1, 2, 3}, 50, 505);
    double worst = 0.0;
    int five = 0;
    for (const auto &m : corpus) {
        for (int blocks : {2, 4}) {
            const auto a = oracle_step_distribution(m, Protocol::recurrence, blocks);
            const auto b = mpo_step_distribution(m, Protocol::recurrence, blocks);
            for (std::size_t k = 0; k < a.size(); ++k) {
                worst = std::max(worst, std::abs(a[k] - b[k]));
            }
        }
        if (m.bond_dim() > 2) {
            continue;
        }
        ++five;
        for (int blocks : {1, 2}) {
            const auto a = oracle_step_distribution(m, Protocol::five_qubit, blocks);
            const auto b = mpo_step_distribution(m, Protocol::five_qubit, blocks);
            for (std::size_t k = 0; k < a.size(); ++k) {
                worst = std::max(worst, std::abs(a[k] - b[k]));
            }
        }
    }
    o.require(worst <= 1e-9, "max deviation " + num(worst));
    o.info << "50 MPOs (recurrence, 2 and 4 blocks), " << five
           << " with d <= 2 (five-qubit, 1 and 2 blocks), max deviation " << num(worst);
    return o;
}

Outcome tables_check() {
    Outcome o;
    const auto &t = pattern_tables();
    const auto sizes = class_sizes(t);
    for (int n : sizes) {
        o.require(n == 256, "class size " + std::to_string(n));
    }
    int low = 0;
    for (int p = 0; p < kPatternCount; ++p) {
        int weight = 0;
        for (int q = 0; q < 5; ++q) {
            weight += pattern_digit(p, q) != Bell::phi_plus ? 1 : 0;
        }
        if (weight <= 1) {
            ++low;
            o.require(t.class_of[static_cast<std::size_t>(p)] == Bell::phi_plus,
                      "weight-1 pattern " + pattern_string(p) + " not corrected");
        }
    }
    o.require(low == 16, std::to_string(low) + " weight <= 1 patterns");
    const auto &sim = five_qubit_simulation();
    int disagree = 0;
    for (int p = 0; p < kPatternCount; ++p) {
        disagree += sim.class_of[static_cast<std::size_t>(p)] != t.class_of[static_cast<std::size_t>(p)] ? 1 : 0;
    }
    o.require(disagree == 0, std::to_string(disagree) + " patterns where the derivations disagree");
    const Bell a = Bell::phi_plus;
    const Bell b = Bell::phi_minus;
    const Bell c = Bell::psi_plus;
    const Bell d = Bell::psi_minus;
    const std::vector<std::pair<Bell, std::vector<Bell>>> terms = {
        {a, {}},     {a, {b}},    {a, {c}},    {a, {d}},     // A⁵, A⁴B, A⁴C, A⁴D
        {b, {b, b}}, {b, {c, d}}, {b, {d, c}},               // A³B², A³CD, A³DC
        {c, {b, c}}, {c, {c, b}}, {c, {d, d}},               // A³BC, A³CB, A³D²
        {d, {b, d}}, {d, {c, c}}, {d, {d, b}},               // A³BD, A³C², A³DB
    };
    int missing = 0;
    for (const auto &[k, noise] : terms) {
        missing += has_monomial(t, k, noise) ? 0 : 1;
    }
    o.require(missing == 0, std::to_string(missing) + " of 13 leading terms missing");
    o.info << "class sizes " << sizes[0] << "/" << sizes[1] << "/" << sizes[2] << "/" << sizes[3] << ", " << low
           << " low-weight patterns, " << kPatternCount - disagree << "/1024 agree, " << 13 - missing
           << "/13 leading terms";
    return o;
}

Outcome transfer_power_check() {
    Outcome o;
    double worst = 0.0;
    for (const auto &m : testing::mpo_corpus({1, 2, 3}, 30, 707)) {
        const Matrix e = transfer(m).matrix();
        const Matrix e5 = e * e * e * e * e;
        const Matrix out = transfer(five_qubit_step(m)).matrix();
        worst = std::max(worst, (out - e5).cwiseAbs().maxCoeff() / std::max(1.0, e5.cwiseAbs().maxCoeff()));
    }
    o.require(worst <= 1e-10, "max deviation " + num(worst));
    o.info << "30 MPOs, max relative deviation " << num(worst);
    return o;
}

Outcome scalar_check() {
    Outcome o;
    const FlowTrace t = distill_flow(BellMPO::werner(0.7), Protocol::recurrence, 8, 256);
    double a = 0.7;
    double b = 0.1;
    double c = 0.1;
    double d = 0.1;
    double worst = 0.0;
    int reached = -1;
    for (const auto &r : t.rounds) {
        worst = std::max(worst, std::abs(r.fidelity_limit - a));
        if (reached < 0 && r.infidelity_limit < 1e-6) {
            reached = r.n;
        }
        for (int k = 0; k < 2; ++k) {
            const double na = a * a + b * b;
            const double nb = c * c + d * d;
            const double nc = 2 * a * b;
            const double nd = 2 * c * d;
            const double z = na + nb + nc + nd;
            a = na / z;
            b = nb / z;
            c = nc / z;
            d = nd / z;
        }
    }
    o.require(t.rounds.size() == 9, "flow stopped after " + std::to_string(t.rounds.size()) + " rounds");
    o.require(reached >= 0 && reached <= 8, "infidelity stays above 1e-6");
    o.require(worst <= 1e-12, "closed-form mismatch " + num(worst));
    o.info << "infidelity < 1e-6 after " << reached << " double steps, max mismatch " << num(worst);
    return o;
}

Outcome inequality_check() {
    Outcome o;
    const auto reports = run_inequality_suite(1000);
    int checks = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto &r : reports) {
        checks += r.checks;
        worst = std::min(worst, r.worst_margin);
        o.require(r.samples >= 1000, r.name + ": only " + std::to_string(r.samples) + " samples");
        o.require(r.checks > 0, r.name + ": nothing checked");
        o.require(r.worst_margin >= -1e-6, r.name + ": worst margin " + num(r.worst_margin) + " at " + r.worst_label);
    }
    o.info << reports.size() << " inequalities x 1000 samples, " << checks << " checks, worst margin "
             << num(worst);
    return o;
}

Outcome physmodel_check() {
    Outcome o;
    PhysicalParams p;
    p.f0 = 0.9;
    p.j = 1.0;
    p.cd = 0.04;

    p.t = 0.0;
    const auto r0 = relative_noise(p, 3);
    double dev = r0.gamma.size() == 3 ? 0.0 : 1.0;
    for (double g : r0.gamma) {
        dev = std::max(dev, std::abs(g - 1.0));
    }
    o.require(dev <= 1e-10, "t = 0: |gamma - 1| = " + num(dev));

    p.t = 0.1;
    const auto r1 = relative_noise(p, 1);
    const double g1 = r1.gamma.empty() ? NAN : r1.gamma[0];
    o.require(g1 >= 0.85 && g1 <= 0.95, "t = 0.1: gamma_1 = " + num(g1));

    p.t = 0.47;
    const auto r2 = relative_noise(p, 3);
    const double f = r2.fidelity_mpo.empty() ? NAN : r2.fidelity_mpo[0];
    o.require(f <= 0.4, "t = 0.47: single-pair fidelity " + num(f) + " > 0.4");
    bool mpo_up = r2.fidelity_mpo.size() == 4;
    bool iid_down = r2.fidelity_iid.size() == 4;
    for (std::size_t n = 1; n < r2.fidelity_mpo.size(); ++n) {
        mpo_up = mpo_up && r2.fidelity_mpo[n] > r2.fidelity_mpo[n - 1];
    }
    for (std::size_t n = 1; n < r2.fidelity_iid.size(); ++n) {
        iid_down = iid_down && r2.fidelity_iid[n] < r2.fidelity_iid[n - 1];
    }
    o.require(mpo_up, "t = 0.47: MPO fidelity does not increase over 3 rounds");
    o.require(iid_down, "t = 0.47: i.i.d. fidelity does not decrease over 3 rounds");
    o.info << "t = 0: max |gamma - 1| " << num(dev) << ", t = 0.1: gamma_1 " << num(g1) << ", t = 0.47: F0 "
           << num(f);
    if (r2.fidelity_mpo.size() == 4 && r2.fidelity_iid.size() == 4) {
        o.info << ", MPO flow " << num(r2.fidelity_mpo[0]) << " -> " << num(r2.fidelity_mpo[3]) << ", i.i.d. flow "
               << num(r2.fidelity_iid[0]) << " -> " << num(r2.fidelity_iid[3]);
    }
    return o;
}

struct Criterion {
    int id;
    const char *name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char **argv) {
    const std::vector<Criterion> all = {
        {1, "analytic threshold", 5, analytic_threshold_check},
        {2, "numeric region contains analytic region", 30, region_check},
        {3, "five-qubit threshold", 5, five_qubit_threshold_check},
        {4, "speed bounds", 1e9, speed_check},
        {5, "oracle equivalence", 180, oracle_check},
        {6, "five-qubit pattern tables", 1e9, tables_check},
        {7, "transfer map fifth power", 1e9, transfer_power_check},
        {8, "scalar limit", 1e9, scalar_check},
        {9, "lemma inequality suite", 300, inequality_check},
        {10, "physical model", 1e9, physmodel_check},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        only.insert(std::atoi(argv[i]));
    }
    int failed = 0;
    for (const auto &c : all) {
        if (!only.empty() && !only.count(c.id)) {
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception &e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double dt = seconds_since(t0);
        if (dt > c.budget_s) {
            o.require(false, "took " + num(dt) + " s, budget " + num(c.budget_s) + " s");
        }
        failed += o.pass() ? 0 : 1;
        std::string text;
        for (const auto &f : o.failures) {
            text += f + "; ";
        }
        text += o.info.str();
        std::printf("%s criterion %d: %s: %s [%.1f s]\n", o.pass() ? "PASS" : "FAIL", c.id, c.name, text.c_str(), dt);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
