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
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "mpodistill/channel.hpp"
#include "mpodistill/common.hpp"
#include "mpodistill/linalg.hpp"
#include "mpodistill/norms.hpp"
#include "mpodistill/perron.hpp"

namespace mpodistill {

/// Bell basis in the order φ⁺, φ⁻, ψ⁺, ψ⁻; these correspond to the Paulis
/// I, Z, X, Y applied to one half of φ⁺.
enum class Bell : int { phi_plus = 0, phi_minus = 1, psi_plus = 2, psi_minus = 3 };

inline constexpr std::array<Bell, 4> kAllBell = {Bell::phi_plus, Bell::phi_minus, Bell::psi_plus, Bell::psi_minus};

inline constexpr int index(Bell b) {
    return static_cast<int>(b);
}

inline constexpr std::string_view to_string(Bell b) {
    constexpr std::array<std::string_view, 4> names = {"phi+", "phi-", "psi+", "psi-"};
    return names[static_cast<std::size_t>(b)];
}

/// Which coefficient map is trace-preserving in the current gauge.
enum class GaugeTag { raw, a_tp, e_tp };

inline constexpr std::string_view to_string(GaugeTag g) {
    switch (g) {
        case GaugeTag::a_tp:
            return "A_TP";
        case GaugeTag::e_tp:
            return "E_TP";
        default:
            return "RAW";
    }
}

inline GaugeTag gauge_tag_from_string(std::string_view s) {
    if (s == "A_TP") return GaugeTag::a_tp;
    if (s == "E_TP") return GaugeTag::e_tp;
    if (s == "RAW") return GaugeTag::raw;
    throw std::invalid_argument("unknown gauge tag '" + std::string(s) + "'");
}

/// Translationally invariant Bell-diagonal MPO with periodic boundary
/// conditions. The four coefficient maps A, B, C, D act on d×d bond
/// operators; the probability of a Bell string x is
/// Tr[M^{x₁}···M^{x_L}] / Tr[E^L] with E = A + B + C + D.
class BellMPO {
   public:
    struct Unchecked {};

    /// Validates equal dimensions and complete positivity of every coefficient.
    BellMPO(ChannelMatrix a, ChannelMatrix b, ChannelMatrix c, ChannelMatrix d, GaugeTag gauge = GaugeTag::raw)
        : BellMPO(Unchecked{}, {std::move(a), std::move(b), std::move(c), std::move(d)}, gauge) {
        for (Bell x : kAllBell) {
            if (!coeff_[index(x)].is_cp()) {
                throw ConstructionError("BellMPO: coefficient " + std::string(to_string(x)) +
                                        " is not completely positive");
            }
        }
        if (gauge_ == GaugeTag::a_tp && !coeff_[0].is_tp()) {
            throw ConstructionError("BellMPO: gauge A_TP but A is not trace-preserving");
        }
        if (gauge_ == GaugeTag::e_tp && !(coeff_[0] + coeff_[1] + coeff_[2] + coeff_[3]).is_tp()) {
            throw ConstructionError("BellMPO: gauge E_TP but E is not trace-preserving");
        }
    }

    /// No positivity check; used for algebraic images and similarity transforms.
    BellMPO(Unchecked, std::array<ChannelMatrix, 4> coeffs, GaugeTag gauge = GaugeTag::raw)
        : coeff_(std::move(coeffs)), gauge_(gauge) {
        const int d = coeff_[0].dim();
        for (const auto &m : coeff_) {
            if (m.dim() != d) {
                throw std::invalid_argument("BellMPO: coefficient dimensions differ");
            }
        }
    }

    /// d = 1 MPO with nonnegative scalar coefficients.
    static BellMPO scalar(double a, double b, double c, double d) {
        auto s = [](double v) {
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw std::invalid_argument("BellMPO::scalar: weights must be finite and nonnegative");
            }
            return ChannelMatrix(Matrix::Constant(1, 1, v));
        };
        return BellMPO(s(a), s(b), s(c), s(d));
    }

    /// i.i.d. Werner pairs of fidelity F.
    static BellMPO werner(double fidelity) {
        if (!(fidelity >= 0.0 && fidelity <= 1.0)) {
            throw std::invalid_argument("BellMPO::werner: fidelity must lie in [0, 1]");
        }
        const double noise = (1.0 - fidelity) / 3.0;
        return scalar(fidelity, noise, noise, noise);
    }

    int bond_dim() const {
        return coeff_[0].dim();
    }
    GaugeTag gauge() const {
        return gauge_;
    }
    const ChannelMatrix &operator[](Bell x) const {
        return coeff_[static_cast<std::size_t>(index(x))];
    }
    const std::array<ChannelMatrix, 4> &coefficients() const {
        return coeff_;
    }
    const ChannelMatrix &a() const {
        return coeff_[0];
    }
    const ChannelMatrix &b() const {
        return coeff_[1];
    }
    const ChannelMatrix &c() const {
        return coeff_[2];
    }
    const ChannelMatrix &d() const {
        return coeff_[3];
    }

   private:
    std::array<ChannelMatrix, 4> coeff_;
    GaugeTag gauge_ = GaugeTag::raw;
};

/// Data produced by fixing the canonical gauge.
struct GaugeResult {
    double lambda = 1.0;
    Operator xi;
    /// ρ ↦ ξ^{1/2} ρ ξ^{1/2}.
    ChannelMatrix s;
    /// ‖ξ‖∞ · ‖ξ⁻¹‖∞.
    double kappa = 1.0;
    /// ‖𝟙 − ξ‖∞.
    double delta = 0.0;
};

enum class Anchor { a, e };

/// E = A + B + C + D.
inline ChannelMatrix transfer(const BellMPO &mpo) {
    return mpo.a() + mpo.b() + mpo.c() + mpo.d();
}

namespace detail {

inline double real_trace(const Matrix &m, const char *what) {
    const Complex t = m.trace();
    if (std::abs(t.imag()) > 1e-8 * std::max(1.0, std::abs(t.real()))) {
        throw NumericalInconsistency(std::string(what) + ": trace has imaginary part " + std::to_string(t.imag()));
    }
    return t.real();
}

/// 1/ρ(E) for an MPO, or 1 when E is nilpotent; used to keep long chains in range.
inline double chain_scale(const ChannelMatrix &e) {
    const double r = spectral_radius(e.matrix());
    return r > 0.0 ? 1.0 / r : 1.0;
}

inline double normaliser(const Matrix &e_scaled, long length) {
    const double z = real_trace(matrix_power(e_scaled, length), "chain normaliser");
    if (!(z > 1e-14)) {
        throw DegenerateState("chain normaliser Tr[E^L] vanishes");
    }
    return z;
}

}  // namespace detail

/// Tr[E^L], real part after checking the imaginary residue.
inline double contract_trace(const ChannelMatrix &e, long length) {
    if (length < 1) {
        throw std::invalid_argument("contract_trace: L must be >= 1");
    }
    return detail::real_trace(matrix_power(e.matrix(), length), "contract_trace");
}

/// Probability of the Bell string x on a periodic chain of length |x|.
inline double string_probability(const BellMPO &mpo, std::span<const Bell> x) {
    if (x.empty()) {
        throw std::invalid_argument("string_probability: empty string");
    }
    const ChannelMatrix e = transfer(mpo);
    const double s = detail::chain_scale(e);
    const double z = detail::normaliser(e.matrix() * s, static_cast<long>(x.size()));
    Matrix prod = mpo[x[0]].matrix() * s;
    for (std::size_t i = 1; i < x.size(); ++i) {
        prod = prod * (mpo[x[i]].matrix() * s);
    }
    return detail::real_trace(prod, "string_probability") / z;
}

/// Single-pair Bell probabilities (p_A, p_B, p_C, p_D) on a chain of L pairs:
/// p_X = Tr[X E^{L−1}] / Tr[E^L].
inline std::array<double, 4> local_marginal(const BellMPO &mpo, long length) {
    if (length < 1) {
        throw std::invalid_argument("local_marginal: L must be >= 1");
    }
    const ChannelMatrix e = transfer(mpo);
    const double s = detail::chain_scale(e);
    const Matrix es = e.matrix() * s;
    const double z = detail::normaliser(es, length);
    const Matrix rest = matrix_power(es, length - 1);
    std::array<double, 4> p{};
    for (Bell x : kAllBell) {
        p[static_cast<std::size_t>(index(x))] =
            detail::real_trace(mpo[x].matrix() * s * rest, "local_marginal") / z;
    }
    return p;
}

struct LocalInfidelity {
    double p_b = 0.0;
    double p_c = 0.0;
    double p_d = 0.0;
};

inline LocalInfidelity local_infidelity(const BellMPO &mpo, long length) {
    const auto p = local_marginal(mpo, length);
    return {p[1], p[2], p[3]};
}

/// L → ∞ limit of local_marginal, from the dominant left/right eigenvectors
/// of E: p_X = lᵀ X r / (λ lᵀ r).
inline std::array<double, 4> local_marginal_limit(const BellMPO &mpo) {
    const Matrix e = transfer(mpo).matrix();
    Eigen::ComplexEigenSolver<Matrix> right(e);
    Eigen::ComplexEigenSolver<Matrix> left(e.transpose().eval());
    const auto ro = detail::by_decreasing_modulus(right.eigenvalues());
    const auto lo = detail::by_decreasing_modulus(left.eigenvalues());
    const Complex lambda = right.eigenvalues()(ro[0]);
    if (ro.size() > 1 && std::abs(lambda) - std::abs(right.eigenvalues()(ro[1])) <= kDegeneracyTolerance * std::abs(lambda)) {
        throw DegenerateSpectrum("local_marginal_limit: transfer map has no unique dominant eigenvalue");
    }
    const Vector r = right.eigenvectors().col(ro[0]);
    const Vector l = left.eigenvectors().col(lo[0]);
    const Complex norm = lambda * (l.transpose() * r)(0);
    if (std::abs(norm) < 1e-300) {
        throw DegenerateState("local_marginal_limit: vanishing eigenvector overlap");
    }
    std::array<double, 4> p{};
    for (Bell x : kAllBell) {
        const Complex v = (l.transpose() * mpo[x].matrix() * r)(0) / norm;
        p[static_cast<std::size_t>(index(x))] = v.real();
    }
    return p;
}

/// Applies X ↦ factor · S X S⁻¹ to every coefficient (no positivity check).
inline BellMPO similarity_transform(const BellMPO &mpo, const Matrix &s, const Matrix &s_inv, double factor = 1.0,
                                    GaugeTag tag = GaugeTag::raw) {
    std::array<ChannelMatrix, 4> out;
    for (Bell x : kAllBell) {
        out[static_cast<std::size_t>(index(x))] = ChannelMatrix(factor * s * mpo[x].matrix() * s_inv);
    }
    return BellMPO(BellMPO::Unchecked{}, std::move(out), tag);
}

/// Gauge and scale in which the anchor map (A or E) is trace-preserving:
/// X ↦ λ⁻¹ S X S⁻¹ with S(ρ) = ξ^{1/2} ρ ξ^{1/2} and (λ, ξ) the left Perron
/// pair of the anchor.
inline std::pair<BellMPO, GaugeResult> canonical_gauge(const BellMPO &mpo, Anchor anchor) {
    const ChannelMatrix target = anchor == Anchor::a ? mpo.a() : transfer(mpo);
    const PerronPair pp = perron_left(target);
    Operator sqrt_xi;
    Operator inv_sqrt_xi;
    Operator inv_xi;
    try {
        sqrt_xi = hermitian_power(pp.xi, 0.5);
        inv_sqrt_xi = hermitian_power(pp.xi, -0.5);
        inv_xi = hermitian_power(pp.xi, -1.0);
    } catch (const std::domain_error &) {
        throw SingularPerron("canonical_gauge: Perron operator below eigenvalue floor");
    }
    GaugeResult g;
    g.lambda = pp.lambda;
    g.xi = pp.xi;
    g.s = ChannelMatrix::sandwich(sqrt_xi, sqrt_xi);
    const ChannelMatrix s_inv = ChannelMatrix::sandwich(inv_sqrt_xi, inv_sqrt_xi);
    g.kappa = spectral_norm(pp.xi) * spectral_norm(inv_xi);
    g.delta = spectral_norm(identity_operator(mpo.bond_dim()) - pp.xi);
    const GaugeTag tag = anchor == Anchor::a ? GaugeTag::a_tp : GaugeTag::e_tp;
    return {similarity_transform(mpo, g.s.matrix(), s_inv.matrix(), 1.0 / pp.lambda, tag), g};
}

/// max(‖B‖₁→₁, ‖C‖₁→₁, ‖D‖₁→₁) in the MPO's current gauge.
inline double epsilon(const BellMPO &mpo) {
    return std::max({norm_1to1_positive(mpo.b()), norm_1to1_positive(mpo.c()), norm_1to1_positive(mpo.d())});
}

/// Ergodicity coefficient of the A map.
inline double tau_a(const BellMPO &mpo, const OptimizerOptions &opts = {}) {
    return ergodicity(mpo.a(), opts);
}

}  // namespace mpodistill
