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

#include <array>
#include <utility>

#include "mpodistill/channel.hpp"
#include "mpodistill/mpo.hpp"

namespace mpodistill {

/// One recurrence step (bilateral CNOT + post-selection, then bilateral
/// Hadamard): A → A²+B², B → C²+D², C → {A,B}, D → {C,D}.
/// Unnormalised and not gauge-fixed.
inline BellMPO recurrence_single_step(const BellMPO &m) {
    const ChannelMatrix &a = m.a();
    const ChannelMatrix &b = m.b();
    const ChannelMatrix &c = m.c();
    const ChannelMatrix &d = m.d();
    return BellMPO(BellMPO::Unchecked{},
                   {a * a + b * b, c * c + d * d, anticommutator(a, b), anticommutator(c, d)});
}

/// Two recurrence steps written out in closed form.
inline BellMPO recurrence_double_step(const BellMPO &m) {
    const ChannelMatrix &a = m.a();
    const ChannelMatrix &b = m.b();
    const ChannelMatrix &c = m.c();
    const ChannelMatrix &d = m.d();
    const ChannelMatrix aa = a * a + b * b;
    const ChannelMatrix cc = c * c + d * d;
    const ChannelMatrix ab = anticommutator(a, b);
    const ChannelMatrix cd = anticommutator(c, d);
    return BellMPO(BellMPO::Unchecked{},
                   {aa * aa + cc * cc, ab * ab + cd * cd, anticommutator(aa, cc), anticommutator(ab, cd)});
}

/// The sixteen blocks X^{x,y} of an MPO in the two-qubit computational basis,
/// x, y ∈ {00, 01, 10, 11} stored as 0..3.
struct ComputationalMPO {
    int d = 1;
    std::array<std::array<ChannelMatrix, 4>, 4> x;

    const ChannelMatrix &operator()(int row, int col) const {
        return x[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
    }
    ChannelMatrix &operator()(int row, int col) {
        return x[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
    }
};

// Scaling: X^{00,00} = A + B and A = (X^{00,00} + X^{00,11} + X^{11,00} + X^{11,11})/4,
// so the two conversions are exact inverses and block squaring followed by
// the conversion back yields (A²+B², {A,B}, C²+D², {C,D}).

inline ComputationalMPO computational_from_bell(const BellMPO &m) {
    const int d = m.bond_dim();
    ComputationalMPO out;
    out.d = d;
    for (auto &row : out.x) {
        row.fill(ChannelMatrix::zero(d));
    }
    const ChannelMatrix ab_plus = m.a() + m.b();
    const ChannelMatrix ab_minus = m.a() - m.b();
    const ChannelMatrix cd_plus = m.c() + m.d();
    const ChannelMatrix cd_minus = m.c() - m.d();
    out(0, 0) = ab_plus;
    out(3, 3) = ab_plus;
    out(0, 3) = ab_minus;
    out(3, 0) = ab_minus;
    out(1, 1) = cd_plus;
    out(2, 2) = cd_plus;
    out(1, 2) = cd_minus;
    out(2, 1) = cd_minus;
    return out;
}

/// Reads off the Bell-diagonal part; other blocks are ignored.
inline BellMPO bell_from_computational(const ComputationalMPO &x) {
    const Complex q(0.25, 0.0);
    ChannelMatrix a = q * (x(0, 0) + x(0, 3) + x(3, 0) + x(3, 3));
    ChannelMatrix b = q * (x(0, 0) - x(0, 3) - x(3, 0) + x(3, 3));
    ChannelMatrix c = q * (x(1, 1) + x(1, 2) + x(2, 1) + x(2, 2));
    ChannelMatrix d = q * (x(1, 1) - x(1, 2) - x(2, 1) + x(2, 2));
    return BellMPO(BellMPO::Unchecked{}, {std::move(a), std::move(b), std::move(c), std::move(d)});
}

/// X^{x,y} ↦ (X^{x,y})², the isometry K = |0⟩⟨00| + |1⟩⟨11| on both sides.
inline ComputationalMPO computational_step(const ComputationalMPO &in) {
    ComputationalMPO out = in;
    for (auto &row : out.x) {
        for (auto &blk : row) {
            blk = blk * blk;
        }
    }
    return out;
}

/// Bilateral Hadamard in the Bell basis: φ⁻ ↔ ψ⁺.
inline BellMPO bilateral_hadamard(const BellMPO &m) {
    return BellMPO(BellMPO::Unchecked{}, {m.a(), m.c(), m.b(), m.d()}, m.gauge());
}

}  // namespace mpodistill
