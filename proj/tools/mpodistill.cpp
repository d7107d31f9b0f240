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

// mpodistill command-line tool.
//
// Exit codes: 0 success, 1 verification failure, 2 runtime or gauge
// failure, 64 usage error. Output goes to --out, or stdout when absent.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mpodistill/bound_flow.hpp"
#include "mpodistill/distill.hpp"
#include "mpodistill/five_qubit.hpp"
#include "mpodistill/inequalities.hpp"
#include "mpodistill/mpo_json.hpp"
#include "mpodistill/parallel.hpp"
#include "mpodistill/physmodel.hpp"
#include "mpodistill/verify.hpp"

namespace {

using namespace mpodistill;

constexpr int kExitVerify = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitUsage = 64;

/// Bad flag values that CLI11 cannot see (ranges, grids).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr const char *kCsvSchema = "# schema_version: 1\n";

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_output(const std::string &path, const std::string &text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    f << text;
    if (!f) {
        throw std::runtime_error("write to '" + path + "' failed");
    }
}

nlohmann::json read_json(const std::string &path) {
    std::ifstream f(path);
    if (!f) {
        throw UsageError("cannot read '" + path + "'");
    }
    try {
        return nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception &e) {
        throw UsageError("'" + path + "' is not valid JSON: " + e.what());
    }
}

std::pair<int, int> parse_grid(const std::string &s) {
    const auto x = s.find('x');
    std::size_t used_a = 0;
    std::size_t used_b = 0;
    int a = 0;
    int b = 0;
    try {
        if (x == std::string::npos) {
            throw std::invalid_argument("");
        }
        a = std::stoi(s.substr(0, x), &used_a);
        b = std::stoi(s.substr(x + 1), &used_b);
    } catch (const std::exception &) {
        throw UsageError("--grid expects NxM, got '" + s + "'");
    }
    if (used_a != x || used_b != s.size() - x - 1 || a < 2 || b < 2) {
        throw UsageError("--grid expects NxM with N, M >= 2, got '" + s + "'");
    }
    return {a, b};
}

/// "lo:hi:n" → n evenly spaced values, endpoints included.
std::vector<double> parse_range(const std::string &flag, const std::string &s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, ':');) {
        parts.push_back(p);
    }
    double lo = 0.0;
    double hi = 0.0;
    int n = 0;
    try {
        if (parts.size() != 3) {
            throw std::invalid_argument("");
        }
        lo = std::stod(parts[0]);
        hi = std::stod(parts[1]);
        n = std::stoi(parts[2]);
    } catch (const std::exception &) {
        throw UsageError(flag + " expects lo:hi:n, got '" + s + "'");
    }
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo || n < 1 || (n == 1 && hi != lo)) {
        throw UsageError(flag + ": need finite lo <= hi and n >= 1 (n = 1 only when lo = hi)");
    }
    std::vector<double> v;
    for (int i = 0; i < n; ++i) {
        v.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    }
    return v;
}

// ---------------------------------------------------------------- region

struct RegionArgs {
    std::string grid = "100x100";
    double eps_max = 0.25;
    double tau_max = 0.99;
    std::string out = "region.csv";
    std::string analytic_out;
};

std::string analytic_path(const RegionArgs &a) {
    if (!a.analytic_out.empty()) {
        return a.analytic_out;
    }
    const std::string &p = a.out;
    if (p.size() > 4 && p.compare(p.size() - 4, 4, ".csv") == 0) {
        return p.substr(0, p.size() - 4) + "_analytic.csv";
    }
    return p + "_analytic.csv";
}

int cmd_region(const RegionArgs &a) {
    const auto [n_eps, n_tau] = parse_grid(a.grid);
    if (!(a.eps_max > 0.0 && a.eps_max < 1.0) || !(a.tau_max > 0.0 && a.tau_max < 1.0)) {
        throw UsageError("--eps-max and --tau-max must lie in (0, 1)");
    }
    if (a.out.empty() || a.out == "-") {
        throw UsageError("region needs a file for --out (it also writes a companion file)");
    }
    const GridSpec g{n_eps, n_tau, a.eps_max, a.tau_max};
    const auto pts = region_scan(g);
    std::string csv = kCsvSchema;
    csv += "eps0,tau0,converged,rounds\n";
    for (const auto &p : pts) {
        csv += fmt(p.eps0) + "," + fmt(p.tau0) + "," + (p.converged ? "1" : "0") + "," + std::to_string(p.rounds) +
               "\n";
    }
    write_output(a.out, csv);

    std::vector<double> numeric(static_cast<std::size_t>(n_tau));
    parallel_for(numeric.size(), [&](std::size_t j) {
        numeric[j] = numeric_threshold(grid_value(static_cast<int>(j), n_tau, a.tau_max));
    });
    std::string curve = kCsvSchema;
    curve += "tau0,analytic_eps0,numeric_eps0\n";
    for (int j = 0; j < n_tau; ++j) {
        const double tau = grid_value(j, n_tau, a.tau_max);
        curve += fmt(tau) + "," + fmt(analytic_threshold(tau)) + "," + fmt(numeric[static_cast<std::size_t>(j)]) + "\n";
    }
    write_output(analytic_path(a), curve);
    return 0;
}

// ---------------------------------------------------------------- distill

struct DistillArgs {
    std::string mpo;
    std::optional<double> werner;
    std::string physmodel;
    std::string protocol = "recurrence";
    int rounds = 4;
    long chain = 64;
    bool skip_tau = false;
    std::string out;
};

int cmd_distill(const DistillArgs &a) {
    const int sources = (a.mpo.empty() ? 0 : 1) + (a.werner ? 1 : 0) + (a.physmodel.empty() ? 0 : 1);
    if (sources != 1) {
        throw UsageError("distill needs exactly one of --mpo, --werner, --physmodel");
    }
    Protocol protocol;
    try {
        protocol = protocol_from_string(a.protocol);
    } catch (const std::invalid_argument &e) {
        throw UsageError(e.what());
    }
    if (a.rounds < 1 || a.chain < 1) {
        throw UsageError("--rounds and --chain must be >= 1");
    }
    BellMPO input = BellMPO::werner(0.5);
    if (a.werner) {
        if (!(*a.werner > 0.25 && *a.werner <= 1.0)) {
            throw UsageError("--werner needs a fidelity in (1/4, 1]");
        }
        input = BellMPO::werner(*a.werner);
    } else if (!a.mpo.empty()) {
        try {
            input = bell_mpo_from_json(read_json(a.mpo));
        } catch (const std::invalid_argument &e) {
            throw UsageError(a.mpo + ": " + e.what());
        } catch (const nlohmann::json::exception &e) {
            throw UsageError(a.mpo + ": " + e.what());
        }
    } else {
        PhysicalParams p;
        try {
            p = physical_params_from_json(read_json(a.physmodel));
        } catch (const std::invalid_argument &e) {
            throw UsageError(a.physmodel + ": " + e.what());
        } catch (const nlohmann::json::exception &e) {
            throw UsageError(a.physmodel + ": " + e.what());
        }
        input = build_memory_mpo(p);
    }
    FlowOptions opts;
    opts.compute_tau = !a.skip_tau;
    const FlowTrace t = distill_flow(input, protocol, a.rounds, a.chain, opts);
    write_output(a.out, to_json(t).dump(2) + "\n");
    if (t.status == FlowStatus::gauge_failure) {
        std::cerr << "mpodistill: gauge failure: " << t.error << "\n";
        return kExitRuntime;
    }
    return 0;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
    std::string suite = "all";
    std::uint64_t seed = kDefaultSeed;
    std::optional<int> samples;
    std::string out = "verify_report.json";
};

int cmd_verify(const VerifyArgs &a) {
    const bool all = a.suite == "all";
    if (!all && a.suite != "oracle" && a.suite != "inequalities" && a.suite != "tables") {
        throw UsageError("--suite must be all, oracle, inequalities or tables");
    }
    if (a.samples && *a.samples < 1) {
        throw UsageError("--samples must be >= 1");
    }
    nlohmann::json report;
    report["schema_version"] = 1;
    report["seed"] = a.seed;
    bool ok = true;
    if (all || a.suite == "tables") {
        const TablesReport t = verify_tables();
        report["tables"] = to_json(t);
        ok = ok && t.ok();
        std::cout << "tables: class sizes " << t.class_sizes[0] << "," << t.class_sizes[1] << "," << t.class_sizes[2]
                  << "," << t.class_sizes[3] << "; " << t.disagreements << " disagreements; "
                  << t.leading_terms_found << "/" << t.leading_terms_total << " leading terms\n";
    }
    if (all || a.suite == "oracle") {
        const OracleReport o = verify_oracle(a.samples.value_or(50), derive_seed(a.seed, 1));
        report["oracle"] = to_json(o);
        ok = ok && o.mismatches == 0;
        std::cout << "oracle: " << o.comparisons << " comparisons, " << o.mismatches << " mismatches, max deviation "
                  << fmt(o.max_deviation) << "\n";
    }
    if (all || a.suite == "inequalities") {
        const auto reports = run_inequality_suite(a.samples.value_or(1000), derive_seed(a.seed, 2));
        report["inequalities"] = inequality_suite_json(reports)["inequalities"];
        for (const auto &r : reports) {
            ok = ok && r.violations == 0;
            std::cout << "inequality " << r.name << ": " << r.checks << " checks, " << r.violations
                      << " violations\n";
        }
    }
    report["ok"] = ok;
    write_output(a.out, report.dump(2) + "\n");
    std::cout << (ok ? "verify: ok" : "verify: FAILED") << "\n";
    return ok ? 0 : kExitVerify;
}

// ---------------------------------------------------------------- physmodel

struct PhysmodelArgs {
    std::string f0_range = "0.5:0.98:25";
    std::string j_range = "0:2:21";
    double t = 0.1;
    double cd = 0.04;
    int rounds = 3;
    std::string out;
};

int cmd_physmodel(const PhysmodelArgs &a) {
    const auto f0s = parse_range("--f0-range", a.f0_range);
    const auto js = parse_range("--j-range", a.j_range);
    if (f0s.front() <= 0.25 || f0s.back() > 1.0) {
        throw UsageError("--f0-range must lie in (1/4, 1]");
    }
    if (!(a.cd >= 0.0 && a.cd <= 1.0) || !std::isfinite(a.t)) {
        throw UsageError("--cd must lie in [0, 1] and --t must be finite");
    }
    if (a.rounds < 1) {
        throw UsageError("--rounds must be >= 1");
    }
    std::vector<double> gamma(f0s.size() * js.size(), NAN);
    parallel_for(gamma.size(), [&](std::size_t k) {
        PhysicalParams p;
        p.f0 = f0s[k / js.size()];
        p.j = js[k % js.size()];
        p.t = a.t;
        p.cd = a.cd;
        try {
            const auto r = relative_noise(p, a.rounds);
            if (static_cast<int>(r.gamma.size()) == a.rounds) {
                gamma[k] = r.gamma.back();
            }
        } catch (const Error &) {
            // left as nan: the point has no well-defined flow
        }
    });
    std::string csv = kCsvSchema;
    csv += "F0,J,gamma\n";
    for (std::size_t k = 0; k < gamma.size(); ++k) {
        csv += fmt(f0s[k / js.size()]) + "," + fmt(js[k % js.size()]) + "," +
               (std::isnan(gamma[k]) ? std::string("nan") : fmt(gamma[k])) + "\n";
    }
    write_output(a.out, csv);
    return 0;
}

// ---------------------------------------------------------------- tables

int cmd_tables(const std::string &out) {
    write_output(out, pattern_tables_json(pattern_tables()).dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Distillation of correlated Bell pairs described by matrix product operators"};
    app.require_subcommand(1);

    RegionArgs region;
    auto *r = app.add_subcommand("region", "Scan the convergence region of the (eps, tau) bound recursion");
    r->add_option("--grid", region.grid, "Grid points, eps x tau")->capture_default_str();
    r->add_option("--eps-max", region.eps_max, "Largest eps0")->capture_default_str();
    r->add_option("--tau-max", region.tau_max, "Largest tau0")->capture_default_str();
    r->add_option("--out", region.out, "CSV of grid points")->capture_default_str();
    r->add_option("--analytic-out", region.analytic_out, "CSV of threshold curves (default: <out>_analytic.csv)");

    DistillArgs distill;
    auto *d = app.add_subcommand("distill", "Run a distillation flow and write the trace as JSON");
    auto *src_mpo = d->add_option("--mpo", distill.mpo, "Bell MPO JSON file");
    auto *src_w = d->add_option("--werner", distill.werner, "Werner pairs of this fidelity");
    auto *src_p = d->add_option("--physmodel", distill.physmodel, "Memory-model parameter JSON file");
    src_mpo->excludes(src_w)->excludes(src_p);
    src_w->excludes(src_p);
    d->add_option("--protocol", distill.protocol, "recurrence or five-qubit")->capture_default_str();
    d->add_option("--rounds", distill.rounds, "Rounds to run")->capture_default_str();
    d->add_option("--chain", distill.chain, "Initial chain length")->capture_default_str();
    d->add_flag("--skip-tau", distill.skip_tau, "Do not estimate the ergodicity coefficient");
    d->add_option("--out", distill.out, "Output file (default stdout)");

    VerifyArgs verify;
    auto *v = app.add_subcommand("verify", "Run the verification suites");
    v->add_option("--suite", verify.suite, "all, oracle, inequalities or tables")->capture_default_str();
    v->add_option("--seed", verify.seed, "Base seed")->capture_default_str();
    v->add_option("--samples", verify.samples, "Samples per suite (default 50 oracle, 1000 inequalities)");
    v->add_option("--out", verify.out, "JSON report file")->capture_default_str();

    PhysmodelArgs phys;
    auto *p = app.add_subcommand("physmodel", "Relative-noise grid of the Heisenberg memory model");
    p->add_option("--f0-range", phys.f0_range, "Initial fidelities lo:hi:n")->capture_default_str();
    p->add_option("--j-range", phys.j_range, "Couplings lo:hi:n")->capture_default_str();
    p->add_option("--t", phys.t, "Interaction time")->capture_default_str();
    p->add_option("--cd", phys.cd, "Dephasing strength")->capture_default_str();
    p->add_option("--rounds", phys.rounds, "Recurrence rounds; gamma is reported for the last")
        ->capture_default_str();
    p->add_option("--out", phys.out, "Output file (default stdout)");

    std::string tables_out;
    auto *t = app.add_subcommand("tables", "Write the five-qubit decoding tables as JSON");
    t->add_option("--out", tables_out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (r->parsed()) return cmd_region(region);
        if (d->parsed()) return cmd_distill(distill);
        if (v->parsed()) return cmd_verify(verify);
        if (p->parsed()) return cmd_physmodel(phys);
        if (t->parsed()) return cmd_tables(tables_out);
    } catch (const UsageError &e) {
        std::cerr << "mpodistill: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        std::cerr << "mpodistill: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
