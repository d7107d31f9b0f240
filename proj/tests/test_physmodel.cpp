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

// Heisenberg-memory model.

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <vector>

#include "mpodistill/norms.hpp"
#include "mpodistill/physmodel.hpp"
#include "test_util.hpp"

namespace mpodistill {
namespace {

using testing::max_abs;

Matrix taylor_exp(const Matrix &a) {
    // scaling and squaring with a long Taylor tail; plenty for 4x4
    int k = 0;
    double n = a.cwiseAbs().rowwise().sum().maxCoeff();
    while (n > 0.5) {
        n /= 2.0;
        ++k;
    }
    const Matrix b = a / std::ldexp(1.0, k);
    Matrix term = Matrix::Identity(a.rows(), a.cols());
    Matrix sum = term;
    for (int i = 1; i < 30; ++i) {
        term = term * b / static_cast<double>(i);
        sum += term;
    }
    for (int i = 0; i < k; ++i) {
        sum = sum * sum;
    }
    return sum;
}

Matrix pauli(char c) {
    Matrix p = Matrix::Zero(2, 2);
    if (c == 'I') {
        p(0, 0) = p(1, 1) = 1.0;
    } else if (c == 'X') {
        p(0, 1) = p(1, 0) = 1.0;
    } else if (c == 'Y') {
        p(0, 1) = Complex(0, -1);
        p(1, 0) = Complex(0, 1);
    } else {
        p(0, 0) = 1.0;
        p(1, 1) = -1.0;
    }
    return p;
}

Matrix kron2(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

// Bell projectors on (Alice, Bob), written out by hand.
Matrix bell_projector(int x) {
    Vector v = Vector::Zero(4);
    const double r = std::sqrt(0.5);
    if (x == 0) { v(0) = r; v(3) = r; }
    if (x == 1) { v(0) = r; v(3) = -r; }
    if (x == 2) { v(1) = r; v(2) = r; }
    if (x == 3) { v(1) = r; v(2) = -r; }
    return v * v.adjoint();
}

Matrix werner(double f) {
    Matrix rho = f * bell_projector(0);
    for (int x = 1; x < 4; ++x) {
        rho += (1.0 - f) / 3.0 * bell_projector(x);
    }
    return rho;
}

// Direct simulation: a memory in state `mem` meets `n` Werner pairs in turn,
// with the memory dephased between pairs. Returns the joint Bell
// probabilities of the pairs, index x1*4^(n-1) + ... + xn.
std::vector<double> simulate_pairs(double f0, double j, double t, double cd, const Matrix &mem, int n) {
    const Matrix h = j * (kron2(pauli('X'), pauli('X')) + kron2(pauli('Y'), pauli('Y')) +
                          kron2(pauli('Z'), pauli('Z'))) +
                     kron2(pauli('Z'), pauli('I')) + kron2(pauli('I'), pauli('Z'));
    const Matrix u = kron2(pauli('I'), taylor_exp(Complex(0.0, t) * h));
    // unnormalized memory state per outcome string
    std::vector<Matrix> branches = {mem};
    for (int k = 0; k < n; ++k) {
        std::vector<Matrix> next;
        for (const Matrix &m : branches) {
            Matrix sigma = m;
            if (k > 0) {
                sigma = (1.0 - cd) * m + cd * m.trace() * Matrix::Identity(2, 2) / 2.0;
            }
            const Matrix omega = u * kron2(werner(f0), sigma) * u.adjoint();
            for (int x = 0; x < 4; ++x) {
                const Matrix p = kron2(bell_projector(x), pauli('I'));
                const Matrix post = p * omega * p;
                // trace out the pair: diagonal 2x2 memory blocks
                Matrix red = Matrix::Zero(2, 2);
                for (int a = 0; a < 4; ++a) {
                    red += post.block(2 * a, 2 * a, 2, 2);
                }
                next.push_back(red);
            }
        }
        branches = std::move(next);
    }
    std::vector<double> out;
    for (const Matrix &m : branches) {
        out.push_back(m.trace().real());
    }
    return out;
}

PhysicalParams params(double f0, double j, double cd, double t) {
    PhysicalParams p;
    p.f0 = f0;
    p.j = j;
    p.cd = cd;
    p.t = t;
    return p;
}

const std::vector<PhysicalParams> &corpus() {
    static const std::vector<PhysicalParams> c = [] {
        std::vector<PhysicalParams> out;
        for (double f0 : {0.6, 0.9, 0.99}) {
            for (double j : {0.0, 1.0, 2.5}) {
                for (double cd : {0.04, 0.5, 1.0}) {
                    for (double t : {0.1, 0.47, 1.3}) {
                        out.push_back(params(f0, j, cd, t));
                    }
                }
            }
        }
        return out;
    }();
    return c;
}

// ---------------------------------------------------------------- pieces

TEST(Heisenberg, TimeZeroAndUnitarity) {
    EXPECT_LT(max_abs(heisenberg_unitary(1.0, 0.0) - Matrix::Identity(4, 4)), 1e-14);
    for (auto [j, t] : {std::pair{1.0, 0.1}, std::pair{0.3, 2.0}, std::pair{-1.7, 0.47}}) {
        const Matrix u = heisenberg_unitary(j, t);
        EXPECT_LT(max_abs(u.adjoint() * u - Matrix::Identity(4, 4)), 1e-12);
    }
}

TEST(Heisenberg, MatchesTaylorExponential) {
    for (auto [j, t] : {std::pair{1.0, 0.1}, std::pair{0.3, 2.0}, std::pair{-1.7, 0.47}}) {
        const Matrix h = j * (kron2(pauli('X'), pauli('X')) + kron2(pauli('Y'), pauli('Y')) +
                              kron2(pauli('Z'), pauli('Z'))) +
                         kron2(pauli('Z'), pauli('I')) + kron2(pauli('I'), pauli('Z'));
        EXPECT_LT(max_abs(heisenberg_unitary(j, t) - taylor_exp(Complex(0.0, t) * h)), 1e-12);
    }
}

TEST(Heisenberg, NoCouplingGivesLocalPhases) {
    const double t = 0.8;
    const Matrix u = heisenberg_unitary(0.0, t);
    Matrix expect = Matrix::Zero(4, 4);
    expect(0, 0) = std::exp(Complex(0.0, 2.0 * t));
    expect(1, 1) = 1.0;
    expect(2, 2) = 1.0;
    expect(3, 3) = std::exp(Complex(0.0, -2.0 * t));
    EXPECT_LT(max_abs(u - expect), 1e-12);
}

TEST(Dephasing, EndpointsAndTrace) {
    EXPECT_LT(max_abs(dephasing_channel(0.0).matrix() - ChannelMatrix::identity(2).matrix()), 1e-15);
    const ChannelMatrix full = dephasing_channel(1.0);
    EXPECT_LT(max_abs(full.matrix() - ChannelMatrix::depolarizing(2).matrix()), 1e-15);
    EXPECT_LT(ergodicity(full), 1e-12);
    const ChannelMatrix d = dephasing_channel(0.04);
    EXPECT_LT(max_abs(mpodistill::apply(d.dual(), Operator::Identity(2, 2)) - Operator::Identity(2, 2)), 1e-12);
    EXPECT_TRUE(d.is_cp());
    EXPECT_THROW(dephasing_channel(-0.1), std::invalid_argument);
    EXPECT_THROW(dephasing_channel(1.1), std::invalid_argument);
}

// ---------------------------------------------------------------- the MPO

TEST(MemoryMpo, NoInteractionIsWerner) {
    const BellMPO m = build_memory_mpo(params(0.8, 1.0, 0.04, 0.0));
    const ChannelMatrix base = m.a();
    const std::array<double, 4> w = {0.8, 0.2 / 3, 0.2 / 3, 0.2 / 3};
    for (Bell x : kAllBell) {
        EXPECT_LT(max_abs(m[x].matrix() * w[0] - base.matrix() * w[static_cast<std::size_t>(index(x))]), 1e-12);
    }
    const std::vector<Bell> s = {Bell::phi_plus, Bell::psi_minus, Bell::phi_minus, Bell::phi_plus};
    double prod = 1.0;
    for (Bell x : s) {
        prod *= w[static_cast<std::size_t>(index(x))];
    }
    EXPECT_NEAR(string_probability(m, s), prod, 1e-12);
}

TEST(MemoryMpo, FullResetFactorizes) {
    for (double t : {0.1, 0.47, 1.3}) {
        const BellMPO m = build_memory_mpo(params(0.85, 1.0, 1.0, t));
        const auto p = local_marginal(m, 5);
        for (int code = 0; code < 64; ++code) {
            const std::vector<Bell> s = {static_cast<Bell>(code & 3), static_cast<Bell>((code >> 2) & 3),
                                         static_cast<Bell>(code >> 4)};
            double prod = 1.0;
            for (Bell x : s) {
                prod *= p[static_cast<std::size_t>(index(x))];
            }
            EXPECT_NEAR(string_probability(m, s), prod, 1e-10);
        }
    }
}

TEST(MemoryMpo, MarginalsMatchDirectSimulation) {
    // Long chains approach an open chain fed by the stationary memory state,
    // which is maximally mixed because the memory channel is unital.
    const Matrix mixed = Matrix::Identity(2, 2) / 2.0;
    for (const auto &p : corpus()) {
        const BellMPO m = build_memory_mpo(p);
        const auto lim = local_marginal_limit(m);
        const auto one = simulate_pairs(p.f0, p.j, p.t, p.cd, mixed, 1);
        for (int x = 0; x < 4; ++x) {
            EXPECT_NEAR(lim[static_cast<std::size_t>(x)], one[static_cast<std::size_t>(x)], 1e-10);
        }
        // neighbouring pairs, chain order = operator product order
        const auto two = simulate_pairs(p.f0, p.j, p.t, p.cd, mixed, 2);
        const ChannelMatrix e = transfer(m);
        const double z = contract_trace(e, 4000);
        const Matrix rest = matrix_power(e.matrix(), 3998);
        for (int x = 0; x < 4; ++x) {
            for (int y = 0; y < 4; ++y) {
                const double ring =
                    (m[static_cast<Bell>(y)].matrix() * m[static_cast<Bell>(x)].matrix() * rest).trace().real() / z;
                EXPECT_NEAR(ring, two[static_cast<std::size_t>(4 * x + y)], 1e-9);
            }
        }
    }
}

TEST(MemoryMpo, UntouchedMemoryIsNotErgodic) {
    // No coupling and no dephasing: the memory only picks up a Z rotation.
    const BellMPO m = build_memory_mpo(params(0.9, 0.0, 0.0, 0.47));
    Eigen::ComplexEigenSolver<Matrix> es(transfer(m).matrix());
    for (int k = 0; k < 4; ++k) {
        EXPECT_NEAR(std::abs(es.eigenvalues()(k)), 1.0, 1e-12);
    }
    EXPECT_THROW(local_marginal_limit(m), DegenerateSpectrum);
}

TEST(MemoryMpo, OffDiagonalBlocksVanishAfterTwirl) {
    for (const auto &p : corpus()) {
        MemoryMPOReport report;
        build_memory_mpo(p, &report);
        EXPECT_LE(report.max_offdiagonal, 1e-10);
    }
}

TEST(MemoryMpo, CompletelyPositiveAndErgodic) {
    for (const auto &p : corpus()) {
        const BellMPO m = build_memory_mpo(p);
        for (Bell x : kAllBell) {
            EXPECT_TRUE(m[x].is_cp());
        }
        const auto [g, info] = canonical_gauge(m, Anchor::e);
        const double tau = ergodicity(transfer(g));
        EXPECT_GE(tau, 0.0);
        EXPECT_LT(tau, 1.0);
    }
}

TEST(MemoryMpo, ForgettingIsMonotoneInDephasing) {
    for (double t : {0.1, 0.47, 1.3}) {
        for (double j : {0.5, 1.0, 2.5}) {
            double prev = 2.0;
            for (int k = 0; k <= 10; ++k) {
                const BellMPO m = build_memory_mpo(params(0.9, j, 0.1 * k, t));
                const auto [g, info] = canonical_gauge(m, Anchor::e);
                const double tau = ergodicity(transfer(g));
                EXPECT_LE(tau, prev + 1e-9) << "t=" << t << " J=" << j << " cD=" << 0.1 * k;
                prev = tau;
            }
        }
    }
}

TEST(MemoryMpo, RejectsBadParameters) {
    EXPECT_THROW(build_memory_mpo(params(0.2, 1.0, 0.04, 0.1)), std::invalid_argument);
    EXPECT_THROW(build_memory_mpo(params(0.9, 1.0, 1.5, 0.1)), std::invalid_argument);
    EXPECT_THROW(build_memory_mpo(params(0.9, NAN, 0.04, 0.1)), std::invalid_argument);
}

// ---------------------------------------------------------------- γ

TEST(RelativeNoise, NoInteractionIsOne) {
    for (long length : {0L, 256L}) {
        const auto r = relative_noise(params(0.8, 1.0, 0.04, 0.0), 3, length);
        ASSERT_EQ(r.gamma.size(), 3u) << r.tag;
        for (double g : r.gamma) {
            EXPECT_NEAR(g, 1.0, 1e-10);
        }
    }
}

TEST(RelativeNoise, ReferencePoint) {
    const auto p = params(0.9, 1.0, 0.04, 0.1);
    const auto lim = local_marginal_limit(build_memory_mpo(p));
    EXPECT_GE(lim[0], 0.85);
    EXPECT_LE(lim[0], 0.95);
    const auto r = relative_noise(p, 1);
    ASSERT_EQ(r.gamma.size(), 1u);
    EXPECT_GE(r.gamma[0], 0.85);
    EXPECT_LE(r.gamma[0], 0.95);
}

TEST(RelativeNoise, GaugeInvariant) {
    Rng rng(77);
    for (double t : {0.1, 0.47}) {
        const BellMPO m = build_memory_mpo(params(0.9, 1.0, 0.04, t));
        // conjugation by an invertible operator keeps the coefficients CP
        const Operator k = Operator::Identity(2, 2) + 0.4 * random_gaussian_matrix(2, 2, rng);
        const ChannelMatrix s = ChannelMatrix::sandwich(k, k.adjoint());
        const ChannelMatrix s_inv = ChannelMatrix::sandwich(k.inverse(), k.inverse().adjoint());
        const BellMPO g = similarity_transform(m, s.matrix(), s_inv.matrix(), 1.7);
        const auto a = relative_noise(m, 3);
        const auto b = relative_noise(g, 3);
        ASSERT_EQ(a.gamma.size(), b.gamma.size());
        for (std::size_t i = 0; i < a.gamma.size(); ++i) {
            EXPECT_NEAR(a.gamma[i], b.gamma[i], 1e-9);
        }
    }
}

TEST(RelativeNoise, StrongInteractionFlows) {
    // At t = 0.47 the i.i.d. pairs sit below the recurrence threshold while
    // the correlated chain still distills.
    const auto r = relative_noise(params(0.9, 1.0, 0.04, 0.47), 3);
    ASSERT_EQ(r.fidelity_mpo.size(), 4u);
    for (int n = 0; n < 3; ++n) {
        EXPECT_GT(r.fidelity_mpo[n + 1], r.fidelity_mpo[n]);
        EXPECT_LT(r.fidelity_iid[n + 1], r.fidelity_iid[n]);
    }
}

// ---------------------------------------------------------------- json

TEST(PhysicalParamsJson, Parses) {
    const auto p = physical_params_from_json(
        nlohmann::json::parse(R"({"F0": 0.9, "J": 1.0, "t": 0.1, "cD": 0.04, "mem_init": "zero"})"));
    EXPECT_DOUBLE_EQ(p.f0, 0.9);
    EXPECT_DOUBLE_EQ(p.cd, 0.04);
    EXPECT_NEAR(p.mem_init(0, 0).real(), 1.0, 0.0);
    const auto q = physical_params_from_json(nlohmann::json::parse(
        R"({"F0": 0.7, "J": 2, "t": 1, "cD": 0, "mem_init": [[[0.5,0],[0,0]],[[0,0],[0.5,0]]]})"));
    EXPECT_NEAR(q.mem_init(1, 1).real(), 0.5, 0.0);
    EXPECT_THROW(physical_params_from_json(nlohmann::json::parse(R"({"F0": 0.1, "J": 1, "t": 0, "cD": 0})")),
                 std::invalid_argument);
    EXPECT_THROW(physical_params_from_json(
                     nlohmann::json::parse(R"({"F0": 0.9, "J": 1, "t": 0, "cD": 0, "mem_init": "plus"})")),
                 std::invalid_argument);
    EXPECT_THROW(physical_params_from_json(nlohmann::json::parse(R"({"F0": 0.9, "J": 1})")), nlohmann::json::exception);
    EXPECT_THROW(physical_params_from_json(nlohmann::json::parse(
                     R"({"F0": 0.9, "J": 1, "t": 0, "cD": 0, "mem_init": [[[1,0],[0,0]],[[0,0],[1,0]]]})")),
                 std::invalid_argument);
}

}  // namespace
}  // namespace mpodistill
