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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "mpodistill/channel.hpp"
#include "mpodistill/common.hpp"
#include "mpodistill/linalg.hpp"

namespace mpodistill {

struct PerronPair {
    double lambda = 1.0;
    /// Hermitian, positive definite, Tr ξ = d.
    Operator xi;
};

namespace detail {

/// Indices of eigenvalues sorted by decreasing modulus.
inline std::vector<Eigen::Index> by_decreasing_modulus(const Vector &w) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(w.size()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return std::abs(w(a)) > std::abs(w(b)); });
    return idx;
}

}  // namespace detail

/// Left Perron pair of a CP map: F†(ξ) = λξ with λ the spectral radius.
///
/// Throws DegenerateSpectrum when the two leading eigenvalue moduli agree to
/// a relative 1e-9, and SingularPerron when ξ is not positive definite.
inline PerronPair perron_left(const ChannelMatrix &f) {
    const int d = f.dim();
    const ChannelMatrix fd = f.dual();
    const Operator one = identity_operator(d);

    // F†(𝟙) = c𝟙 already fixes the pair; this also covers maps such as
    // unitary channels whose leading eigenvalue is degenerate.
    const Operator image = fd(one);
    const Complex c = image.trace() / static_cast<double>(d);
    if (c.real() > 0.0 && spectral_norm(image - c * one) <= 1e-12 * std::max(1.0, std::abs(c))) {
        return {c.real(), one};
    }

    Eigen::ComplexEigenSolver<Matrix> es(fd.matrix());
    const Vector &w = es.eigenvalues();
    const auto order = detail::by_decreasing_modulus(w);
    const Complex mu = w(order[0]);
    const double radius = std::abs(mu);
    if (radius == 0.0) {
        throw DegenerateSpectrum("perron_left: map is nilpotent");
    }
    if (order.size() > 1 && radius - std::abs(w(order[1])) <= kDegeneracyTolerance * radius) {
        throw DegenerateSpectrum("perron_left: leading eigenvalue is degenerate");
    }

    Operator xi = unvec(es.eigenvectors().col(order[0]), d);
    const Complex tr = xi.trace();
    if (std::abs(tr) == 0.0) {
        throw SingularPerron("perron_left: Perron operator is traceless");
    }
    xi *= static_cast<double>(d) / tr;
    xi = hermitian_part(xi);
    double lambda = mu.real();

    // One step of inverse iteration tightens the residual on ill-conditioned inputs.
    auto residual = [&](const Operator &x) { return spectral_norm(fd(x) - lambda * x); };
    if (residual(xi) > 1e-11 * std::max(1.0, lambda)) {
        const Eigen::Index n = fd.matrix().rows();
        const Matrix shifted = fd.matrix() - Complex(lambda * (1.0 + 1e-13)) * Matrix::Identity(n, n);
        Vector v = shifted.fullPivLu().solve(vec(xi));
        Operator refined = unvec(v, d);
        refined *= static_cast<double>(d) / refined.trace();
        refined = hermitian_part(refined);
        if (residual(refined) < residual(xi)) {
            xi = refined;
        }
    }
    if (min_hermitian_eigenvalue(xi) <= kEigenFloor) {
        throw SingularPerron("perron_left: Perron operator is not positive definite");
    }
    if (residual(xi) > 1e-9 * std::max(1.0, lambda)) {
        throw NumericalInconsistency("perron_left: eigen-residual above 1e-9");
    }
    return {lambda, xi};
}

/// Spectral projection of f onto its eigenvalue-1 eigenspace, assuming the
/// eigenvalue is semisimple (true for trace-preserving CP maps).
inline ChannelMatrix stationary_projection(const ChannelMatrix &f, double tol = 1e-8) {
    const Matrix &m = f.matrix();
    Eigen::ComplexEigenSolver<Matrix> right(m);
    Eigen::ComplexEigenSolver<Matrix> left(m.transpose().eval());
    std::vector<Eigen::Index> ri;
    std::vector<Eigen::Index> li;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (std::abs(right.eigenvalues()(i) - 1.0) < tol) {
            ri.push_back(i);
        }
        if (std::abs(left.eigenvalues()(i) - 1.0) < tol) {
            li.push_back(i);
        }
    }
    if (ri.empty() || ri.size() != li.size()) {
        throw SingularFundamental("stationary_projection: eigenvalue 1 missing or not semisimple");
    }
    const auto k = static_cast<Eigen::Index>(ri.size());
    Matrix r(m.rows(), k);
    Matrix l(m.rows(), k);
    for (Eigen::Index j = 0; j < k; ++j) {
        r.col(j) = right.eigenvectors().col(ri[static_cast<std::size_t>(j)]);
        l.col(j) = left.eigenvectors().col(li[static_cast<std::size_t>(j)]);
    }
    const Matrix overlap = l.transpose() * r;
    Eigen::FullPivLU<Matrix> lu(overlap);
    if (!lu.isInvertible()) {
        throw SingularFundamental("stationary_projection: left/right eigenvectors are not dual");
    }
    return ChannelMatrix(r * lu.inverse() * l.transpose());
}

/// Fixed point of a trace-preserving map, normalised to unit trace.
inline Operator steady_state(const ChannelMatrix &f) {
    const int d = f.dim();
    const ChannelMatrix p = stationary_projection(f);
    Operator rho = p(identity_operator(d) / static_cast<double>(d));
    rho = hermitian_part(rho / rho.trace());
    return rho;
}

/// Fundamental channel (id − F + F∞)⁻¹ of a trace-preserving CP map.
inline ChannelMatrix fundamental_channel(const ChannelMatrix &f) {
    if (!f.is_tp(1e-9)) {
        throw std::invalid_argument("fundamental_channel: map is not trace-preserving");
    }
    const Eigen::Index n = f.matrix().rows();
    const ChannelMatrix p = stationary_projection(f);
    const Matrix inv = Matrix::Identity(n, n) - f.matrix() + p.matrix();
    Eigen::FullPivLU<Matrix> lu(inv);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) {
        throw SingularFundamental("fundamental_channel: id - F + F_inf is singular");
    }
    return ChannelMatrix(lu.inverse());
}

}  // namespace mpodistill
