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

// Syndrome decoding tables of the [[5,1,3]] code acting on five Bell pairs,
// and the resulting one-step map on Bell-diagonal MPOs.
//
// A Bell index is read as the Pauli on Bob's half of φ⁺: φ⁺,φ⁻,ψ⁺,ψ⁻ ↔ I,Z,X,Y.
// Paulis on five qubits are bit masks (x, z) with qubit q at bit q; qubit 0 is
// pattern position 1, the leftmost factor of the chain.

#include <array>
#include <bit>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "mpodistill/channel.hpp"
#include "mpodistill/common.hpp"
#include "mpodistill/mpo.hpp"

namespace mpodistill {

inline constexpr int kPatternCount = 1024;
inline constexpr int kSyndromeCount = 16;

struct Pauli5 {
    std::uint8_t x = 0;
    std::uint8_t z = 0;

    friend bool operator==(const Pauli5 &, const Pauli5 &) = default;
    Pauli5 operator*(const Pauli5 &o) const {
        return {static_cast<std::uint8_t>(x ^ o.x), static_cast<std::uint8_t>(z ^ o.z)};
    }
    int weight() const {
        return std::popcount(static_cast<unsigned>(x | z));
    }
};

/// 1 iff the two Paulis anticommute.
inline int symplectic(const Pauli5 &a, const Pauli5 &b) {
    return std::popcount(static_cast<unsigned>((a.x & b.z) ^ (a.z & b.x))) & 1;
}

/// Parses a five-letter string over {I, X, Y, Z}.
inline Pauli5 pauli_from_string(std::string_view s) {
    if (s.size() != 5) {
        throw std::invalid_argument("pauli_from_string: need 5 letters");
    }
    Pauli5 p;
    for (int q = 0; q < 5; ++q) {
        const char c = s[static_cast<std::size_t>(q)];
        const bool px = c == 'X' || c == 'Y';
        const bool pz = c == 'Z' || c == 'Y';
        if (!px && !pz && c != 'I') {
            throw std::invalid_argument("pauli_from_string: bad letter");
        }
        p.x |= static_cast<std::uint8_t>(px << q);
        p.z |= static_cast<std::uint8_t>(pz << q);
    }
    return p;
}

inline std::string to_string(const Pauli5 &p) {
    std::string s(5, 'I');
    for (int q = 0; q < 5; ++q) {
        const bool px = (p.x >> q) & 1;
        const bool pz = (p.z >> q) & 1;
        s[static_cast<std::size_t>(q)] = px ? (pz ? 'Y' : 'X') : (pz ? 'Z' : 'I');
    }
    return s;
}

inline const std::array<Pauli5, 4> &five_qubit_generators() {
    static const std::array<Pauli5, 4> g = {pauli_from_string("XZZXI"), pauli_from_string("IXZZX"),
                                            pauli_from_string("XIXZZ"), pauli_from_string("ZXIXZ")};
    return g;
}

/// Bell index at pattern position `pos` (0-based); position 0 is the most
/// significant base-4 digit.
inline Bell pattern_digit(int pattern, int pos) {
    return static_cast<Bell>((pattern >> (2 * (4 - pos))) & 3);
}

inline int pattern_from_digits(const std::array<Bell, 5> &digits) {
    int p = 0;
    for (Bell b : digits) {
        p = p * 4 + index(b);
    }
    return p;
}

inline Pauli5 pauli_of_pattern(int pattern) {
    Pauli5 e;
    for (int q = 0; q < 5; ++q) {
        const int b = index(pattern_digit(pattern, q));
        // φ⁻ = Z, ψ⁺ = X, ψ⁻ = Y
        const bool px = b == 2 || b == 3;
        const bool pz = b == 1 || b == 3;
        e.x |= static_cast<std::uint8_t>(px << q);
        e.z |= static_cast<std::uint8_t>(pz << q);
    }
    return e;
}

/// Bit i is the commutation of the error with generator i.
inline int syndrome_of_pauli(const Pauli5 &e) {
    int s = 0;
    const auto &g = five_qubit_generators();
    for (int i = 0; i < 4; ++i) {
        s |= symplectic(g[static_cast<std::size_t>(i)], e) << i;
    }
    return s;
}

/// Logical operators of the decoded pair. With this basis the decoded pair
/// is the XXXXX/ZZZZZ readout followed by a bilateral Hadamard, which fixes
/// φ⁺ and exchanges φ⁻ and ψ⁺.
inline constexpr std::string_view kLogicalX = "ZZZZZ";
inline constexpr std::string_view kLogicalZ = "XXXXX";

/// Logical class of an error commuting with the stabilizer: the X̄ part is
/// detected by Z̄, the Z̄ part by X̄.
inline Bell logical_class(const Pauli5 &r) {
    const int lx = symplectic(r, pauli_from_string(kLogicalZ));
    const int lz = symplectic(r, pauli_from_string(kLogicalX));
    if (lx == 0) {
        return lz == 0 ? Bell::phi_plus : Bell::phi_minus;
    }
    return lz == 0 ? Bell::psi_plus : Bell::psi_minus;
}

struct PatternClassification {
    std::array<Bell, kPatternCount> class_of{};
    std::array<std::uint8_t, kPatternCount> syndrome_of{};
    std::array<Pauli5, kSyndromeCount> correction_of{};
};

/// Symplectic derivation of the decoding tables.
inline PatternClassification build_pattern_tables() {
    PatternClassification t;
    std::array<bool, kSyndromeCount> seen{};
    // Weight ≤ 1 Paulis in a fixed order: identity, then X, Z, Y on qubit 0..4.
    std::vector<Pauli5> low = {Pauli5{}};
    for (int q = 0; q < 5; ++q) {
        const auto bit = static_cast<std::uint8_t>(1u << q);
        low.push_back({bit, 0});
        low.push_back({0, bit});
        low.push_back({bit, bit});
    }
    for (const Pauli5 &e : low) {
        const int s = syndrome_of_pauli(e);
        if (seen[static_cast<std::size_t>(s)]) {
            throw ConstructionError("build_pattern_tables: two weight-1 errors share a syndrome");
        }
        seen[static_cast<std::size_t>(s)] = true;
        t.correction_of[static_cast<std::size_t>(s)] = e;
    }
    std::array<int, 4> sizes{};
    for (int p = 0; p < kPatternCount; ++p) {
        const Pauli5 e = pauli_of_pattern(p);
        const int s = syndrome_of_pauli(e);
        const Pauli5 r = e * t.correction_of[static_cast<std::size_t>(s)];
        if (syndrome_of_pauli(r) != 0) {
            throw ConstructionError("build_pattern_tables: residual error has nonzero syndrome");
        }
        const Bell k = logical_class(r);
        t.syndrome_of[static_cast<std::size_t>(p)] = static_cast<std::uint8_t>(s);
        t.class_of[static_cast<std::size_t>(p)] = k;
        ++sizes[static_cast<std::size_t>(index(k))];
    }
    for (int n : sizes) {
        if (n != 256) {
            throw ConstructionError("build_pattern_tables: class sizes are not 256 each");
        }
    }
    return t;
}

/// Cached copy of build_pattern_tables().
inline const PatternClassification &pattern_tables() {
    static const PatternClassification t = build_pattern_tables();
    return t;
}

inline std::array<int, 4> class_sizes(const PatternClassification &t) {
    std::array<int, 4> n{};
    for (Bell k : t.class_of) {
        ++n[static_cast<std::size_t>(index(k))];
    }
    return n;
}

inline std::string pattern_string(int pattern) {
    std::string s;
    for (int q = 0; q < 5; ++q) {
        if (q) s += ',';
        s += to_string(pattern_digit(pattern, q));
    }
    return s;
}

inline nlohmann::json pattern_tables_json(const PatternClassification &t) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["generators"] = nlohmann::json::array();
    for (const auto &g : five_qubit_generators()) {
        j["generators"].push_back(to_string(g));
    }
    j["logical_x"] = std::string(kLogicalX);
    j["logical_z"] = std::string(kLogicalZ);
    nlohmann::json corr = nlohmann::json::array();
    for (int s = 0; s < kSyndromeCount; ++s) {
        corr.push_back({{"syndrome", s}, {"correction", to_string(t.correction_of[static_cast<std::size_t>(s)])}});
    }
    j["corrections"] = corr;
    nlohmann::json pats = nlohmann::json::array();
    for (int p = 0; p < kPatternCount; ++p) {
        const auto s = t.syndrome_of[static_cast<std::size_t>(p)];
        pats.push_back({{"pattern", pattern_string(p)},
                        {"syndrome", s},
                        {"correction", to_string(t.correction_of[s])},
                        {"class", std::string(to_string(t.class_of[static_cast<std::size_t>(p)]))}});
    }
    j["patterns"] = pats;
    const auto n = class_sizes(t);
    j["class_sizes"] = n;
    return j;
}

/// True if some pattern of class k has exactly the non-φ⁺ letters `noise`,
/// in that order, with φ⁺ in the remaining positions. A-slot terms such as
/// A⁴B are monomials with one noise letter.
inline bool has_monomial(const PatternClassification &t, Bell k, const std::vector<Bell> &noise) {
    for (int p = 0; p < kPatternCount; ++p) {
        if (t.class_of[static_cast<std::size_t>(p)] != k) {
            continue;
        }
        std::vector<Bell> letters;
        for (int q = 0; q < 5; ++q) {
            if (pattern_digit(p, q) != Bell::phi_plus) {
                letters.push_back(pattern_digit(p, q));
            }
        }
        if (letters == noise) {
            return true;
        }
    }
    return false;
}

/// One 5→1 step: M_out^k = Σ_{p in class k} M^{p₁}···M^{p₅}. The transfer
/// map of the output is E⁵.
inline BellMPO five_qubit_step(const BellMPO &m, const PatternClassification &t = pattern_tables()) {
    const int d = m.bond_dim();
    const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
    // prefix[level][q] is the product of the first `level` factors of prefix q.
    std::vector<Matrix> prev = {Matrix::Identity(n, n)};
    for (int level = 1; level <= 4; ++level) {
        std::vector<Matrix> next;
        next.reserve(prev.size() * 4);
        for (const Matrix &p : prev) {
            for (Bell b : kAllBell) {
                next.push_back(p * m[b].matrix());
            }
        }
        prev = std::move(next);
    }
    std::array<Matrix, 4> out;
    out.fill(Matrix::Zero(n, n));
    for (int p = 0; p < kPatternCount; ++p) {
        const Bell last = static_cast<Bell>(p & 3);
        out[static_cast<std::size_t>(index(t.class_of[static_cast<std::size_t>(p)]))] +=
            prev[static_cast<std::size_t>(p >> 2)] * m[last].matrix();
    }
    return BellMPO(BellMPO::Unchecked{},
                   {ChannelMatrix(std::move(out[0])), ChannelMatrix(std::move(out[1])),
                    ChannelMatrix(std::move(out[2])), ChannelMatrix(std::move(out[3]))},
                   m.gauge() == GaugeTag::e_tp ? GaugeTag::e_tp : GaugeTag::raw);
}

}  // namespace mpodistill
