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

#include <cstdint>
#include <random>
#include <vector>

#include "mpodistill/channel.hpp"
#include "mpodistill/common.hpp"
#include "mpodistill/linalg.hpp"

namespace mpodistill {

using Rng = std::mt19937_64;

/// Derives an independent stream seed from (seed, index); splitmix64 mixing.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline Matrix random_gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            m(i, j) = Complex(re, im);
        }
    }
    return m;
}

inline Vector random_unit_vector(int d, Rng &rng) {
    Vector v = random_gaussian_matrix(d, 1, rng).col(0);
    return v / v.norm();
}

/// CP map from `n_kraus` Kraus operators with standard complex Gaussian
/// entries. With `trace_preserving`, the Kraus set is renormalised by
/// (Σ K†K)^{-1/2}.
inline ChannelMatrix random_cp_map(int d, int n_kraus, Rng &rng, bool trace_preserving) {
    std::vector<Operator> kraus;
    kraus.reserve(n_kraus);
    for (int k = 0; k < n_kraus; ++k) {
        kraus.push_back(random_gaussian_matrix(d, d, rng));
    }
    if (trace_preserving) {
        Operator s = Operator::Zero(d, d);
        for (const auto &k : kraus) {
            s += k.adjoint() * k;
        }
        const Operator inv_sqrt = hermitian_power(s, -0.5);
        for (auto &k : kraus) {
            k = k * inv_sqrt;
        }
    }
    return ChannelMatrix::from_kraus(kraus);
}

/// Kraus count drawn uniformly from {2, 3, 4}.
inline ChannelMatrix random_cp_map(int d, Rng &rng, bool trace_preserving) {
    std::uniform_int_distribution<int> count(2, 4);
    return random_cp_map(d, count(rng), rng, trace_preserving);
}

/// Random density matrix G G† / Tr(G G†).
inline Operator random_density_matrix(int d, Rng &rng) {
    const Matrix g = random_gaussian_matrix(d, d, rng);
    Operator rho = g * g.adjoint();
    return rho / rho.trace().real();
}

}  // namespace mpodistill
