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
#include <span>
#include <stdexcept>
#include <string>

#include "mpodistill/common.hpp"
#include "mpodistill/linalg.hpp"

namespace mpodistill {

/// A linear map on d×d operators, stored as the d²×d² matrix acting on
/// column-stacked operators: vec(F(σ)) = matrix() · vec(σ).
///
/// Composition of maps is the matrix product, so `f * g` is the map
/// σ ↦ f(g(σ)). Nothing here assumes complete positivity; `is_cp()` checks
/// it on demand through the Choi matrix.
class ChannelMatrix {
   public:
    ChannelMatrix() = default;

    explicit ChannelMatrix(Matrix mat) : mat_(std::move(mat)) {
        if (mat_.rows() != mat_.cols()) {
            throw std::invalid_argument("ChannelMatrix: matrix is not square");
        }
        const auto n = mat_.rows();
        dim_ = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
        if (dim_ < 1 || static_cast<Eigen::Index>(dim_) * dim_ != n) {
            throw std::invalid_argument("ChannelMatrix: size " + std::to_string(n) + " is not a perfect square");
        }
        if (!all_finite(mat_)) {
            throw std::invalid_argument("ChannelMatrix: non-finite entry");
        }
    }

    static ChannelMatrix identity(int d) {
        return ChannelMatrix(Matrix::Identity(d * d, d * d));
    }

    static ChannelMatrix zero(int d) {
        return ChannelMatrix(Matrix::Zero(d * d, d * d));
    }

    /// σ ↦ left · σ · right.
    static ChannelMatrix sandwich(const Operator &left, const Operator &right) {
        return ChannelMatrix(kron(right.transpose(), left));
    }

    /// σ ↦ K σ K†.
    static ChannelMatrix conjugation(const Operator &k) {
        return ChannelMatrix(kron(k.conjugate(), k));
    }

    /// σ ↦ Σ_k K_k σ K_k†.
    static ChannelMatrix from_kraus(std::span<const Operator> kraus) {
        if (kraus.empty()) {
            throw std::invalid_argument("from_kraus: empty Kraus set");
        }
        const auto d = kraus.front().rows();
        Matrix m = Matrix::Zero(d * d, d * d);
        for (const auto &k : kraus) {
            if (k.rows() != d || k.cols() != d) {
                throw std::invalid_argument("from_kraus: Kraus operators must all be d×d");
            }
            m += kron(k.conjugate(), k);
        }
        return ChannelMatrix(std::move(m));
    }

    /// σ ↦ Tr(σ)·ρ0.
    static ChannelMatrix replacer(const Operator &rho0) {
        const auto d = rho0.rows();
        return ChannelMatrix(vec(rho0) * vec(Operator::Identity(d, d)).transpose());
    }

    /// σ ↦ Tr(σ)·𝟙/d.
    static ChannelMatrix depolarizing(int d) {
        return replacer(Operator::Identity(d, d) / static_cast<double>(d));
    }

    int dim() const {
        return dim_;
    }
    const Matrix &matrix() const {
        return mat_;
    }

    Operator operator()(const Operator &sigma) const {
        if (sigma.rows() != dim_ || sigma.cols() != dim_) {
            throw std::invalid_argument("ChannelMatrix: operator dimension mismatch");
        }
        return unvec(mat_ * vec(sigma), dim_);
    }

    /// The map F† with Tr(A·F(B)) = Tr(F†(A)·B). For Hermiticity-preserving
    /// maps this is also the Hilbert-Schmidt adjoint.
    ChannelMatrix dual() const {
        const int d = dim_;
        const Eigen::Index n = mat_.rows();
        Matrix out(n, n);
        // T is the transposition permutation on vec indices; dual = T·matᵀ·T.
        auto t = [d](Eigen::Index p) { return (p % d) * d + p / d; };
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = 0; q < n; ++q) {
                out(p, q) = mat_(t(q), t(p));
            }
        }
        return ChannelMatrix(std::move(out));
    }

    /// Choi matrix Σ_ij |i⟩⟨j| ⊗ F(|i⟩⟨j|), input factor first.
    Matrix choi() const {
        const int d = dim_;
        Matrix j(d * d, d * d);
        for (int a = 0; a < d; ++a) {
            for (int b = 0; b < d; ++b) {
                for (int k = 0; k < d; ++k) {
                    for (int l = 0; l < d; ++l) {
                        j(a * d + k, b * d + l) = mat_(k + d * l, a + d * b);
                    }
                }
            }
        }
        return j;
    }

    double min_choi_eigenvalue() const {
        return min_hermitian_eigenvalue(choi());
    }

    bool is_hermiticity_preserving(double tol = 1e-10) const {
        const Matrix c = choi();
        return (c - c.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, c.cwiseAbs().maxCoeff());
    }

    /// Choi matrix Hermitian and PSD within `tol`.
    bool is_cp(double tol = kPsdTolerance) const {
        const Matrix c = choi();
        const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
        if ((c - c.adjoint()).cwiseAbs().maxCoeff() > tol * scale) {
            return false;
        }
        return min_hermitian_eigenvalue(c) >= -tol * scale;
    }

    /// ‖F†(𝟙) − 𝟙‖∞ ≤ tol.
    bool is_tp(double tol = 1e-9) const {
        const Operator one = identity_operator(dim_);
        return spectral_norm(dual()(one) - one) <= tol;
    }

    ChannelMatrix pow(long p) const {
        return ChannelMatrix(matrix_power(mat_, p));
    }

    ChannelMatrix &operator+=(const ChannelMatrix &o) {
        check_same_dim(o);
        mat_ += o.mat_;
        return *this;
    }
    ChannelMatrix &operator-=(const ChannelMatrix &o) {
        check_same_dim(o);
        mat_ -= o.mat_;
        return *this;
    }
    ChannelMatrix &operator*=(Complex c) {
        mat_ *= c;
        return *this;
    }

    friend ChannelMatrix operator+(ChannelMatrix a, const ChannelMatrix &b) {
        return a += b;
    }
    friend ChannelMatrix operator-(ChannelMatrix a, const ChannelMatrix &b) {
        return a -= b;
    }
    friend ChannelMatrix operator*(ChannelMatrix a, Complex c) {
        return a *= c;
    }
    friend ChannelMatrix operator*(Complex c, ChannelMatrix a) {
        return a *= c;
    }
    /// Composition: (a * b)(σ) = a(b(σ)).
    friend ChannelMatrix operator*(const ChannelMatrix &a, const ChannelMatrix &b) {
        a.check_same_dim(b);
        return ChannelMatrix(a.mat_ * b.mat_);
    }

   private:
    void check_same_dim(const ChannelMatrix &o) const {
        if (o.dim_ != dim_) {
            throw std::invalid_argument("ChannelMatrix: dimension mismatch");
        }
    }

    Matrix mat_ = Matrix::Identity(1, 1);
    int dim_ = 1;
};

/// Anticommutator {a, b} = ab + ba.
inline ChannelMatrix anticommutator(const ChannelMatrix &a, const ChannelMatrix &b) {
    return a * b + b * a;
}

inline Operator apply(const ChannelMatrix &f, const Operator &sigma) {
    return f(sigma);
}

inline ChannelMatrix dual(const ChannelMatrix &f) {
    return f.dual();
}

/// ‖F‖₁→₁ for a positive map, evaluated as ‖F†(𝟙)‖∞.
inline double norm_1to1_positive(const ChannelMatrix &f) {
    return spectral_norm(f.dual()(identity_operator(f.dim())));
}

}  // namespace mpodistill
