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

// Werner pairs whose Bob half interacts with a qubit memory through a
// Heisenberg coupling; the memory is dephased between interactions.
//
// Three-qubit ordering is (Alice, Bob, memory), index a*4 + b*2 + m.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "mpodistill/channel.hpp"
#include "mpodistill/common.hpp"
#include "mpodistill/distill.hpp"
#include "mpodistill/linalg.hpp"
#include "mpodistill/mpo.hpp"

namespace mpodistill {

struct PhysicalParams {
    double f0 = 0.9;
    double j = 1.0;
    double t = 0.1;
    double cd = 0.04;
    /// Initial memory state. On a periodic chain the memory never starts
    /// anywhere, so this is validated but does not enter the MPO.
    Operator mem_init = Operator::Identity(2, 2) / 2.0;
};

inline void validate(const PhysicalParams &p) {
    if (!(p.f0 > 0.25 && p.f0 <= 1.0)) {
        throw std::invalid_argument("PhysicalParams: F0 must lie in (1/4, 1]");
    }
    if (!(p.cd >= 0.0 && p.cd <= 1.0)) {
        throw std::invalid_argument("PhysicalParams: cD must lie in [0, 1]");
    }
    if (!std::isfinite(p.j) || !std::isfinite(p.t)) {
        throw std::invalid_argument("PhysicalParams: J and t must be finite");
    }
    const Operator &m = p.mem_init;
    if (m.rows() != 2 || m.cols() != 2 || !all_finite(m) || (m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12 ||
        std::abs(m.trace() - 1.0) > 1e-12 || min_hermitian_eigenvalue(m) < -1e-12) {
        throw std::invalid_argument("PhysicalParams: mem_init must be a 2x2 density matrix");
    }
}

inline PhysicalParams physical_params_from_json(const nlohmann::json &j) {
    PhysicalParams p;
    p.f0 = j.at("F0").get<double>();
    p.j = j.at("J").get<double>();
    p.t = j.at("t").get<double>();
    p.cd = j.at("cD").get<double>();
    if (j.contains("mem_init")) {
        const auto &m = j.at("mem_init");
        if (m.is_string()) {
            const auto s = m.get<std::string>();
            if (s == "mixed") {
                p.mem_init = Operator::Identity(2, 2) / 2.0;
            } else if (s == "zero") {
                p.mem_init = Operator::Zero(2, 2);
                p.mem_init(0, 0) = 1.0;
            } else if (s == "one") {
                p.mem_init = Operator::Zero(2, 2);
                p.mem_init(1, 1) = 1.0;
            } else {
                throw std::invalid_argument("mem_init: expected mixed, zero or one");
            }
        } else {
            p.mem_init = Operator::Zero(2, 2);
            for (int r = 0; r < 2; ++r) {
                for (int c = 0; c < 2; ++c) {
                    const auto &z = m.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c));
                    p.mem_init(r, c) = Complex(z.at(0).get<double>(), z.at(1).get<double>());
                }
            }
        }
    }
    validate(p);
    return p;
}

namespace detail {

inline Operator pauli(int k) {
    Operator p = Operator::Zero(2, 2);
    switch (k) {
        case 0:
            p(0, 0) = p(1, 1) = 1.0;
            break;
        case 1:  // X
            p(0, 1) = p(1, 0) = 1.0;
            break;
        case 2:  // Y
            p(0, 1) = Complex(0, -1);
            p(1, 0) = Complex(0, 1);
            break;
        default:  // Z
            p(0, 0) = 1.0;
            p(1, 1) = -1.0;
    }
    return p;
}

/// Bell vector on (Alice, Bob), computational index a*2 + b.
inline Vector bell_vector(Bell x) {
    const double r = 1.0 / std::sqrt(2.0);
    Vector v = Vector::Zero(4);
    switch (x) {
        case Bell::phi_plus:
            v(0) = r;
            v(3) = r;
            break;
        case Bell::phi_minus:
            v(0) = r;
            v(3) = -r;
            break;
        case Bell::psi_plus:
            v(1) = r;
            v(2) = r;
            break;
        case Bell::psi_minus:
            v(1) = r;
            v(2) = -r;
            break;
    }
    return v;
}

}  // namespace detail

/// exp(itH), H = J(XX + YY + ZZ) + Z⊗𝟙 + 𝟙⊗Z on (Bob, memory).
inline Matrix heisenberg_unitary(double j, double t) {
    Matrix h = j * (kron(detail::pauli(1), detail::pauli(1)) + kron(detail::pauli(2), detail::pauli(2)) +
                    kron(detail::pauli(3), detail::pauli(3)));
    h += kron(detail::pauli(3), detail::pauli(0)) + kron(detail::pauli(0), detail::pauli(3));
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Vector phase(4);
    for (int k = 0; k < 4; ++k) {
        phase(k) = std::exp(Complex(0.0, t * es.eigenvalues()(k)));
    }
    return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

/// σ ↦ (1 − c)σ + c·Tr(σ)·𝟙/2.
inline ChannelMatrix dephasing_channel(double cd) {
    if (!(cd >= 0.0 && cd <= 1.0)) {
        throw std::invalid_argument("dephasing_channel: cD must lie in [0, 1]");
    }
    return ChannelMatrix(Complex(1.0 - cd) * ChannelMatrix::identity(2).matrix() +
                         Complex(cd) * ChannelMatrix::depolarizing(2).matrix());
}

/// Werner state of fidelity F on (Alice, Bob).
inline Operator werner_state(double f) {
    Operator rho = Operator::Zero(4, 4);
    for (Bell x : kAllBell) {
        const Vector v = detail::bell_vector(x);
        const double w = x == Bell::phi_plus ? f : (1.0 - f) / 3.0;
        rho += w * v * v.adjoint();
    }
    return rho;
}

struct MemoryMPOReport {
    /// Largest entry of the twirled off-diagonal Bell blocks.
    double max_offdiagonal = 0.0;
};

/// d = 2 Bell-diagonal MPO of the memory model: the coefficient for Bell
/// index x is σ ↦ ⟨φ_x|U(ρ_W ⊗ D(σ))U†|φ_x⟩, twirled over the bilateral
/// Paulis {II, XX, YY, ZZ}.
inline BellMPO build_memory_mpo(const PhysicalParams &p, MemoryMPOReport *report = nullptr) {
    validate(p);
    const Matrix u = kron(detail::pauli(0), heisenberg_unitary(p.j, p.t));
    const Operator rho_w = werner_state(p.f0);
    const ChannelMatrix deph = dephasing_channel(p.cd);

    std::array<Matrix, 4> bell;
    for (Bell x : kAllBell) {
        bell[static_cast<std::size_t>(index(x))] = kron(detail::bell_vector(x), Matrix::Identity(2, 2));
    }
    std::array<Matrix, 4> twirl;
    for (int k = 0; k < 4; ++k) {
        const Operator q = detail::pauli(k);
        twirl[static_cast<std::size_t>(k)] = kron(kron(q, q), detail::pauli(0));
    }

    std::array<Matrix, 4> coeff;
    coeff.fill(Matrix::Zero(4, 4));
    double off = 0.0;
    for (int col = 0; col < 4; ++col) {
        // column stacking: column i + 2j holds the image of |i⟩⟨j|.
        Operator sigma = Operator::Zero(2, 2);
        sigma(col % 2, col / 2) = 1.0;
        const Matrix omega = u * kron(rho_w, sigma) * u.adjoint();
        Matrix twirled = Matrix::Zero(8, 8);
        for (const Matrix &g : twirl) {
            twirled += g * omega * g.adjoint();
        }
        twirled /= 4.0;
        for (Bell x : kAllBell) {
            for (Bell y : kAllBell) {
                const Operator block = bell[static_cast<std::size_t>(index(x))].adjoint() * twirled *
                                       bell[static_cast<std::size_t>(index(y))];
                if (x == y) {
                    coeff[static_cast<std::size_t>(index(x))].col(col) = vec(block);
                } else {
                    off = std::max(off, block.cwiseAbs().maxCoeff());
                }
            }
        }
    }
    if (off > 1e-10) {
        throw ConstructionError("build_memory_mpo: off-diagonal Bell blocks survive the twirl");
    }
    if (report) {
        report->max_offdiagonal = off;
    }
    std::array<ChannelMatrix, 4> maps;
    for (int k = 0; k < 4; ++k) {
        maps[static_cast<std::size_t>(k)] = ChannelMatrix(coeff[static_cast<std::size_t>(k)]) * deph;
    }
    try {
        return BellMPO(maps[0], maps[1], maps[2], maps[3]);
    } catch (const ConstructionError &e) {
        throw ConstructionError(std::string("build_memory_mpo: ") + e.what());
    }
}

/// i.i.d. Werner pairs with the fidelity of the given single-pair marginal.
inline BellMPO iid_reference(const std::array<double, 4> &marginal) {
    return BellMPO::werner(std::clamp(marginal[0], 0.0, 1.0));
}

struct RelativeNoise {
    /// γ_1..γ_n.
    std::vector<double> gamma;
    /// Fidelities of both flows, rounds 0..n.
    std::vector<double> fidelity_mpo;
    std::vector<double> fidelity_iid;
    /// Set when the sequence stopped early.
    std::string tag;
};

/// γ_n = (1 − F_n^MPO)/(1 − F_n^iid) along the recurrence flow (rounds are
/// double steps), against i.i.d. Werner pairs of the same single-pair
/// fidelity. Fidelities are taken on a chain of `length` pairs at round 0
/// and L/4^n afterwards; length = 0 selects the infinite-chain limit.
inline RelativeNoise relative_noise(const BellMPO &mpo, int rounds, long length = 0) {
    FlowOptions opts;
    opts.compute_tau = false;
    const long l0 = length > 0 ? length : 64;
    const auto marginal = length > 0 ? local_marginal(mpo, length) : local_marginal_limit(mpo);
    const FlowTrace a = distill_flow(mpo, Protocol::recurrence, rounds, l0, opts);
    const FlowTrace b = distill_flow(iid_reference(marginal), Protocol::recurrence, rounds, l0, opts);
    RelativeNoise out;
    auto fid = [&](const FlowRound &r) { return length > 0 && r.fidelity ? *r.fidelity : r.fidelity_limit; };
    auto infid = [&](const FlowRound &r) { return length > 0 && r.infidelity ? *r.infidelity : r.infidelity_limit; };
    const std::size_t n = std::min(a.rounds.size(), b.rounds.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (length > 0 && (!a.rounds[i].fidelity || !b.rounds[i].fidelity)) {
            out.tag = "chain_exhausted";
            break;
        }
        out.fidelity_mpo.push_back(fid(a.rounds[i]));
        out.fidelity_iid.push_back(fid(b.rounds[i]));
        if (i == 0) {
            continue;
        }
        const double denom = infid(b.rounds[i]);
        if (!(denom > 1e-14)) {
            out.tag = "iid_infidelity_vanished";
            break;
        }
        out.gamma.push_back(infid(a.rounds[i]) / denom);
    }
    if (out.tag.empty() && (a.status == FlowStatus::gauge_failure || b.status == FlowStatus::gauge_failure)) {
        out.tag = "gauge_failure";
    }
    return out;
}

inline RelativeNoise relative_noise(const PhysicalParams &p, int rounds, long length = 0) {
    return relative_noise(build_memory_mpo(p), rounds, length);
}

}  // namespace mpodistill
