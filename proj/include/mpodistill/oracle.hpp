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

// Brute-force circuit simulation of both protocols on Bell strings. Nothing
// here uses the polynomial step formulas or the symplectic tables.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "mpodistill/common.hpp"
#include "mpodistill/distill.hpp"
#include "mpodistill/mpo.hpp"

namespace mpodistill {

/// Dense state vector; qubit q is bit q of the basis index.
class StateVector {
   public:
    explicit StateVector(int n) : n_(n), amp_(std::size_t{1} << n, Complex(0.0)) {
        if (n < 1 || n > 20) {
            throw std::invalid_argument("StateVector: qubit count out of range");
        }
        amp_[0] = 1.0;
    }

    int qubits() const {
        return n_;
    }
    const std::vector<Complex> &amplitudes() const {
        return amp_;
    }

    void apply_1q(int q, const std::array<Complex, 4> &g) {
        const std::size_t bit = std::size_t{1} << q;
        for (std::size_t i = 0; i < amp_.size(); ++i) {
            if (i & bit) continue;
            const Complex a0 = amp_[i];
            const Complex a1 = amp_[i | bit];
            amp_[i] = g[0] * a0 + g[1] * a1;
            amp_[i | bit] = g[2] * a0 + g[3] * a1;
        }
    }

    void h(int q) {
        const double r = 1.0 / std::sqrt(2.0);
        apply_1q(q, {r, r, r, -r});
    }

    void cnot(int control, int target) {
        const std::size_t cb = std::size_t{1} << control;
        const std::size_t tb = std::size_t{1} << target;
        for (std::size_t i = 0; i < amp_.size(); ++i) {
            if ((i & cb) && !(i & tb)) {
                std::swap(amp_[i], amp_[i | tb]);
            }
        }
    }

    /// Applies ⊗ X^x Z^z (times i per Y), masks over all qubits.
    void pauli(std::uint32_t x, std::uint32_t z) {
        std::vector<Complex> out(amp_.size());
        const Complex phase = ipow(std::popcount(x & z));
        for (std::size_t i = 0; i < amp_.size(); ++i) {
            const double sign = (std::popcount(static_cast<std::uint32_t>(i) & z) & 1) ? -1.0 : 1.0;
            out[i ^ x] = phase * sign * amp_[i];
        }
        amp_ = std::move(out);
    }

    Complex expectation(std::uint32_t x, std::uint32_t z) const {
        StateVector tmp = *this;
        tmp.pauli(x, z);
        Complex s = 0.0;
        for (std::size_t i = 0; i < amp_.size(); ++i) {
            s += std::conj(amp_[i]) * tmp.amp_[i];
        }
        return s;
    }

    /// Zeroes the amplitudes where the predicate on the index is false.
    template <typename Pred>
    double keep(Pred &&pred) {
        double p = 0.0;
        for (std::size_t i = 0; i < amp_.size(); ++i) {
            if (pred(i)) {
                p += std::norm(amp_[i]);
            } else {
                amp_[i] = 0.0;
            }
        }
        return p;
    }

    /// Prepares φ⁺ on (a, b) from |00⟩ on those qubits.
    void bell_pair(int a, int b) {
        h(a);
        cnot(a, b);
    }

   private:
    static Complex ipow(int k) {
        constexpr std::array<Complex, 4> p = {Complex(1, 0), Complex(0, 1), Complex(-1, 0), Complex(0, -1)};
        return p[static_cast<std::size_t>(k & 3)];
    }

    int n_;
    std::vector<Complex> amp_;
};

namespace detail {

/// (x, z) bits of the Pauli that maps φ⁺ to Bell state b on Bob's side.
inline std::pair<std::uint32_t, std::uint32_t> bell_pauli(Bell b) {
    switch (b) {
        case Bell::phi_minus:
            return {0u, 1u};
        case Bell::psi_plus:
            return {1u, 0u};
        case Bell::psi_minus:
            return {1u, 1u};
        default:
            return {0u, 0u};
    }
}

/// Bell index of pair (a, b) read from ⟨XX⟩ and ⟨ZZ⟩, or -1 if the pair is
/// not in a Bell eigenstate of both.
inline int read_bell(const StateVector &s, int a, int b, double norm = 1.0) {
    const std::uint32_t mask = (1u << a) | (1u << b);
    const double xx = s.expectation(mask, 0).real() / norm;
    const double zz = s.expectation(0, mask).real() / norm;
    auto sgn = [](double v) { return std::abs(std::abs(v) - 1.0) < 1e-9 ? (v > 0 ? 1 : -1) : 0; };
    const int sx = sgn(xx);
    const int sz = sgn(zz);
    if (sx == 0 || sz == 0) {
        return -1;
    }
    // φ⁺: (+,+), φ⁻: (−,+), ψ⁺: (+,−), ψ⁻: (−,−)
    if (sz > 0) {
        return sx > 0 ? 0 : 1;
    }
    return sx > 0 ? 2 : 3;
}

}  // namespace detail

struct BlockOutcome {
    bool kept = false;
    Bell output = Bell::phi_plus;
    /// Post-selection probability of this input pair (0 or 1 for Bell inputs).
    double weight = 0.0;
};

using RecurrenceTable = std::array<std::array<BlockOutcome, 4>, 4>;

/// Two Bell pairs (A1,B1) = qubits (0,1), (A2,B2) = (2,3): bilateral CNOT
/// from pair 1 onto pair 2, keep agreeing target outcomes, bilateral
/// Hadamard on pair 1. Index [i][j] for pair 1 in Bell state i.
inline RecurrenceTable recurrence_block_table() {
    RecurrenceTable t;
    for (Bell i : kAllBell) {
        for (Bell j : kAllBell) {
            StateVector s(4);
            s.bell_pair(0, 1);
            s.bell_pair(2, 3);
            const auto [xi, zi] = detail::bell_pauli(i);
            const auto [xj, zj] = detail::bell_pauli(j);
            s.pauli((xi << 1) | (xj << 3), (zi << 1) | (zj << 3));
            s.cnot(0, 2);
            s.cnot(1, 3);
            const double p = s.keep([](std::size_t k) { return ((k >> 2) & 1) == ((k >> 3) & 1); });
            BlockOutcome &o = t[static_cast<std::size_t>(index(i))][static_cast<std::size_t>(index(j))];
            o.weight = p;
            if (p < 1e-12) {
                continue;
            }
            if (std::abs(p - 1.0) > 1e-12) {
                throw ConstructionError("recurrence_block_table: non-deterministic post-selection");
            }
            s.h(0);
            s.h(1);
            const int y = detail::read_bell(s, 0, 1, p);
            if (y < 0) {
                throw ConstructionError("recurrence_block_table: output pair is not a Bell state");
            }
            o.kept = true;
            o.output = static_cast<Bell>(y);
        }
    }
    return t;
}

struct FiveQubitSimulation {
    /// Syndrome bits from ⟨S_A ⊗ S_B⟩ = −1, generator i at bit i.
    std::array<int, 1024> syndrome{};
    /// Bob-side correction for each syndrome, as (x, z) masks over qubits 0..4.
    std::array<std::pair<std::uint32_t, std::uint32_t>, 16> correction{};
    std::array<Bell, 1024> class_of{};
};

namespace detail {

inline std::pair<std::uint32_t, std::uint32_t> parse_pauli(std::string_view s) {
    std::uint32_t x = 0;
    std::uint32_t z = 0;
    for (int q = 0; q < 5; ++q) {
        const char c = s[q];
        if (c == 'X' || c == 'Y') x |= 1u << q;
        if (c == 'Z' || c == 'Y') z |= 1u << q;
    }
    return {x, z};
}

/// φ⁺ on pairs (q, q+5) with Bob-side Pauli error (ex, ez) on qubits 5..9.
inline StateVector noisy_pairs(std::uint32_t ex, std::uint32_t ez) {
    StateVector s(10);
    for (int q = 0; q < 5; ++q) {
        s.bell_pair(q, q + 5);
    }
    s.pauli(ex << 5, ez << 5);
    return s;
}

inline int measured_syndrome(const StateVector &s) {
    static const char *gens[4] = {"XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"};
    int syn = 0;
    for (int i = 0; i < 4; ++i) {
        const auto [x, z] = parse_pauli(gens[i]);
        const double v = s.expectation(x | (x << 5), z | (z << 5)).real();
        if (std::abs(std::abs(v) - 1.0) > 1e-9) {
            throw ConstructionError("five-qubit simulation: syndrome is not deterministic");
        }
        if (v < 0) {
            syn |= 1 << i;
        }
    }
    return syn;
}

}  // namespace detail

/// Ten-qubit simulation of the five-qubit code on five noisy Bell pairs.
inline FiveQubitSimulation simulate_five_qubit_code() {
    FiveQubitSimulation sim;
    // Corrections: syndromes of the sixteen weight ≤ 1 errors, by simulation.
    std::array<bool, 16> seen{};
    std::vector<std::pair<std::uint32_t, std::uint32_t>> low = {{0u, 0u}};
    for (int q = 0; q < 5; ++q) {
        for (auto [x, z] : {std::pair{1u, 0u}, std::pair{0u, 1u}, std::pair{1u, 1u}}) {
            low.emplace_back(x << q, z << q);
        }
    }
    for (const auto &[x, z] : low) {
        const int syn = detail::measured_syndrome(detail::noisy_pairs(x, z));
        if (seen[static_cast<std::size_t>(syn)]) {
            throw ConstructionError("five-qubit simulation: syndrome collision among weight-1 errors");
        }
        seen[static_cast<std::size_t>(syn)] = true;
        sim.correction[static_cast<std::size_t>(syn)] = {x, z};
    }
    // Bilateral logical parities, X̄ = ZZZZZ and Z̄ = XXXXX.
    const auto [lxx, lxz] = detail::parse_pauli(kLogicalX);
    const auto [lzx, lzz] = detail::parse_pauli(kLogicalZ);
    for (int p = 0; p < 1024; ++p) {
        std::uint32_t ex = 0;
        std::uint32_t ez = 0;
        for (int q = 0; q < 5; ++q) {
            const Bell b = static_cast<Bell>((p >> (2 * (4 - q))) & 3);
            const auto [x, z] = detail::bell_pauli(b);
            ex |= x << q;
            ez |= z << q;
        }
        StateVector s = detail::noisy_pairs(ex, ez);
        const int syn = detail::measured_syndrome(s);
        sim.syndrome[static_cast<std::size_t>(p)] = syn;
        const auto [cx, cz] = sim.correction[static_cast<std::size_t>(syn)];
        s.pauli(cx << 5, cz << 5);
        const double xx = s.expectation(lxx | (lxx << 5), lxz | (lxz << 5)).real();
        const double zz = s.expectation(lzx | (lzx << 5), lzz | (lzz << 5)).real();
        if (std::abs(std::abs(xx) - 1.0) > 1e-9 || std::abs(std::abs(zz) - 1.0) > 1e-9) {
            throw ConstructionError("five-qubit simulation: logical pair is not a Bell state");
        }
        Bell k;
        if (zz > 0) {
            k = xx > 0 ? Bell::phi_plus : Bell::phi_minus;
        } else {
            k = xx > 0 ? Bell::psi_plus : Bell::psi_minus;
        }
        sim.class_of[static_cast<std::size_t>(p)] = k;
    }
    return sim;
}

inline const FiveQubitSimulation &five_qubit_simulation() {
    static const FiveQubitSimulation sim = simulate_five_qubit_code();
    return sim;
}

/// Output-string distribution of one protocol step applied to a periodic
/// chain of `blocks` blocks (2 pairs per block for the recurrence protocol,
/// 5 for the five-qubit code). Keys are output strings read as base-4
/// numbers with the first pair most significant. Recurrence results are
/// conditioned on success.
inline std::vector<double> oracle_step_distribution(const BellMPO &mpo, Protocol protocol, int blocks) {
    const int per_block = protocol == Protocol::recurrence ? 2 : 5;
    const int length = per_block * blocks;
    if (blocks < 1 || length > 10) {
        throw std::invalid_argument("oracle_step_distribution: at most 10 input pairs");
    }
    const ChannelMatrix e = transfer(mpo);
    const double s = detail::chain_scale(e);
    const double z = detail::normaliser(e.matrix() * s, length);
    std::array<Matrix, 4> m;
    for (Bell b : kAllBell) {
        m[static_cast<std::size_t>(index(b))] = mpo[b].matrix() * s;
    }

    RecurrenceTable rt{};
    if (protocol == Protocol::recurrence) {
        rt = recurrence_block_table();
    }
    const FiveQubitSimulation *sim = protocol == Protocol::five_qubit ? &five_qubit_simulation() : nullptr;

    std::vector<double> out(std::size_t{1} << (2 * blocks), 0.0);
    std::vector<int> digits(static_cast<std::size_t>(length));
    // Depth-first over input strings with prefix products.
    std::vector<Matrix> prefix(static_cast<std::size_t>(length) + 1);
    prefix[0] = Matrix::Identity(m[0].rows(), m[0].cols());
    auto visit = [&](auto &&self, int pos) -> void {
        if (pos == length) {
            const double prob = detail::real_trace(prefix[static_cast<std::size_t>(length)], "oracle") / z;
            std::size_t key = 0;
            for (int b = 0; b < blocks; ++b) {
                int y = 0;
                if (protocol == Protocol::recurrence) {
                    const BlockOutcome &o = rt[static_cast<std::size_t>(digits[static_cast<std::size_t>(2 * b)])]
                                              [static_cast<std::size_t>(digits[static_cast<std::size_t>(2 * b + 1)])];
                    if (!o.kept) {
                        return;
                    }
                    y = index(o.output);
                } else {
                    int pattern = 0;
                    for (int q = 0; q < 5; ++q) {
                        pattern = pattern * 4 + digits[static_cast<std::size_t>(5 * b + q)];
                    }
                    y = index(sim->class_of[static_cast<std::size_t>(pattern)]);
                }
                key = key * 4 + static_cast<std::size_t>(y);
            }
            out[key] += prob;
            return;
        }
        for (int x = 0; x < 4; ++x) {
            digits[static_cast<std::size_t>(pos)] = x;
            prefix[static_cast<std::size_t>(pos) + 1] = prefix[static_cast<std::size_t>(pos)] * m[static_cast<std::size_t>(x)];
            self(self, pos + 1);
        }
    };
    visit(visit, 0);

    if (protocol == Protocol::recurrence) {
        double total = 0.0;
        for (double v : out) total += v;
        if (!(total > 1e-14)) {
            throw DegenerateState("oracle_step_distribution: post-selection never succeeds");
        }
        for (double &v : out) v /= total;
    }
    return out;
}

/// The same distribution predicted by the MPO step: step, then contract.
inline std::vector<double> mpo_step_distribution(const BellMPO &mpo, Protocol protocol, int blocks) {
    const BellMPO stepped = protocol == Protocol::recurrence ? recurrence_single_step(mpo) : five_qubit_step(mpo);
    std::vector<double> out(std::size_t{1} << (2 * blocks), 0.0);
    std::vector<Bell> x(static_cast<std::size_t>(blocks));
    for (std::size_t key = 0; key < out.size(); ++key) {
        std::size_t k = key;
        for (int b = blocks - 1; b >= 0; --b) {
            x[static_cast<std::size_t>(b)] = static_cast<Bell>(k & 3);
            k >>= 2;
        }
        out[key] = string_probability(stepped, x);
    }
    return out;
}

}  // namespace mpodistill
