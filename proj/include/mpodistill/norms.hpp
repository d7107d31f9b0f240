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

// Induced 1→1 norm and ergodicity coefficient of general maps.
//
// Both quantities are maxima of a convex function over a compact set, so
// they are attained at extreme points: rank-one |x⟩⟨y| for the norm, and
// (|x⟩⟨x| − |y⟩⟨y|)/2 for the ergodicity coefficient. We maximise over unit
// x, y by alternating ascent. Writing ‖M‖₁ = max_W Re Tr(W†M) over unitaries
// W, each sweep first fixes W to the polar factor of F(σ), then maximises
// the resulting linear functional of σ exactly (top singular pair, or
// top/bottom eigenvectors). The objective never decreases, and every value
// reported is attained by the returned vectors, so results are lower bounds
// on the true maximum.

#include <cstdint>
#include <limits>

#include "mpodistill/channel.hpp"
#include "mpodistill/common.hpp"
#include "mpodistill/linalg.hpp"
#include "mpodistill/random.hpp"

namespace mpodistill {

struct OptimizerOptions {
    int restarts = 32;
    int max_iterations = 500;
    /// Stop a restart once one sweep improves the objective by less than this.
    double tolerance = 1e-10;
    std::uint64_t seed = kDefaultSeed;
};

struct OptimizationResult {
    double value = 0.0;
    Vector x;
    Vector y;
    /// False if the restart that produced `value` hit the iteration cap.
    bool converged = true;
};

namespace detail {

inline Vector rank_one_vec(const Vector &x, const Vector &y) {
    // vec(|x⟩⟨y|) under column stacking.
    return kron(y.conjugate(), x).col(0);
}

/// Polar unitary U·V† of m; writes the trace norm to `norm`.
inline Matrix polar_unitary(const Matrix &m, double &norm) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    norm = svd.singularValues().sum();
    return svd.matrixU() * svd.matrixV().adjoint();
}

template <typename Sweep>
OptimizationResult multistart(int d, const OptimizerOptions &opts, Sweep &&sweep) {
    OptimizationResult best;
    best.value = -1.0;
    for (int r = 0; r < opts.restarts; ++r) {
        Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(r)));
        Vector x = random_unit_vector(d, rng);
        Vector y = random_unit_vector(d, rng);
        double prev = -std::numeric_limits<double>::infinity();
        bool converged = false;
        double value = 0.0;
        Vector best_x = x;
        Vector best_y = y;
        for (int it = 0; it < opts.max_iterations; ++it) {
            // sweep() evaluates at (x, y) and moves (x, y) to the next iterate.
            Vector nx = x;
            Vector ny = y;
            value = sweep(x, y, nx, ny);
            best_x = x;
            best_y = y;
            if (value - prev <= opts.tolerance * std::max(1.0, value)) {
                converged = true;
                break;
            }
            prev = value;
            x = std::move(nx);
            y = std::move(ny);
        }
        if (value > best.value) {
            best.value = value;
            best.x = best_x;
            best.y = best_y;
            best.converged = converged;
        }
    }
    best.value = std::max(best.value, 0.0);
    return best;
}

}  // namespace detail

/// max over unit x, y of ‖F(|x⟩⟨y|)‖₁, which equals ‖F‖₁→₁ for any linear map.
inline OptimizationResult norm_1to1_general(const ChannelMatrix &f, const OptimizerOptions &opts = {}) {
    const int d = f.dim();
    const Matrix &mat = f.matrix();
    const Matrix dual_mat = f.dual().matrix();
    return detail::multistart(d, opts, [&](const Vector &x, const Vector &y, Vector &nx, Vector &ny) {
        const Matrix m = unvec(mat * detail::rank_one_vec(x, y), d);
        double value = 0.0;
        const Matrix w = detail::polar_unitary(m, value);
        // Re Tr(W† F(|x⟩⟨y|)) = Re ⟨y|G|x⟩ with G = F†(W†).
        const Matrix g = unvec(dual_mat * vec(w.adjoint()), d);
        Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
        nx = svd.matrixV().col(0);
        ny = svd.matrixU().col(0);
        return value;
    });
}

/// Ergodicity coefficient: max of ‖F(σ)‖₁ over Hermitian traceless σ with
/// ‖σ‖₁ = 1, searched over σ = (|x⟩⟨x| − |y⟩⟨y|)/2. Zero for d = 1.
inline OptimizationResult ergodicity_search(const ChannelMatrix &f, const OptimizerOptions &opts = {}) {
    const int d = f.dim();
    if (d == 1) {
        OptimizationResult r;
        r.x = Vector::Ones(1);
        r.y = Vector::Ones(1);
        return r;
    }
    const Matrix &mat = f.matrix();
    const Matrix dual_mat = f.dual().matrix();
    return detail::multistart(d, opts, [&](const Vector &x, const Vector &y, Vector &nx, Vector &ny) {
        const Operator sigma = (x * x.adjoint() - y * y.adjoint()) / 2.0;
        const Matrix m = unvec(mat * vec(sigma), d);
        double value = 0.0;
        const Matrix w = detail::polar_unitary(m, value);
        const Matrix g = unvec(dual_mat * vec(w.adjoint()), d);
        Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(g));
        nx = es.eigenvectors().col(d - 1);
        ny = es.eigenvectors().col(0);
        return value;
    });
}

inline double ergodicity(const ChannelMatrix &f, const OptimizerOptions &opts = {}) {
    return ergodicity_search(f, opts).value;
}

}  // namespace mpodistill
