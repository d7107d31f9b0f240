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

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "mpodistill/common.hpp"

namespace mpodistill {

// Vectorisation is column stacking throughout: vec(|i><j|) = e_{i + d*j},
// hence vec(L X R) = (R^T kron L) vec(X).

inline Vector vec(const Operator &op) {
    return Eigen::Map<const Vector>(op.data(), op.size());
}

inline Operator unvec(const Vector &v, int d) {
    if (v.size() != static_cast<Eigen::Index>(d) * d) {
        throw std::invalid_argument("unvec: vector length is not d*d");
    }
    return Eigen::Map<const Matrix>(v.data(), d, d);
}

inline Matrix kron(const Matrix &a, const Matrix &b) {
    return Eigen::kroneckerProduct(a, b).eval();
}

inline Operator identity_operator(int d) {
    return Operator::Identity(d, d);
}

/// Largest singular value.
inline double spectral_norm(const Matrix &m) {
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

/// Sum of singular values.
inline double trace_norm(const Matrix &m) {
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues().sum();
}

inline Operator hermitian_part(const Operator &op) {
    return (op + op.adjoint()) / 2.0;
}

inline bool all_finite(const Matrix &m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const Complex z = m.data()[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            return false;
        }
    }
    return true;
}

/// Smallest eigenvalue of the Hermitian part of op.
inline double min_hermitian_eigenvalue(const Operator &op) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(op), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

/// op^p for a Hermitian positive definite op; throws if an eigenvalue is
/// at or below `floor`.
inline Operator hermitian_power(const Operator &op, double p, double floor = kEigenFloor) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(op));
    const Eigen::VectorXd &w = es.eigenvalues();
    if (w(0) <= floor) {
        throw std::domain_error("hermitian_power: operator is not positive definite");
    }
    Eigen::VectorXd wp(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        wp(i) = std::pow(w(i), p);
    }
    return es.eigenvectors() * wp.asDiagonal() * es.eigenvectors().adjoint();
}

/// Binary exponentiation of a square matrix, p >= 0.
inline Matrix matrix_power(const Matrix &m, long p) {
    if (p < 0) {
        throw std::invalid_argument("matrix_power: negative exponent");
    }
    Matrix result = Matrix::Identity(m.rows(), m.cols());
    Matrix base = m;
    while (p > 0) {
        if (p & 1) {
            result = result * base;
        }
        p >>= 1;
        if (p > 0) {
            base = base * base;
        }
    }
    return result;
}

/// Largest eigenvalue modulus.
inline double spectral_radius(const Matrix &m) {
    Eigen::ComplexEigenSolver<Matrix> es(m, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace mpodistill
