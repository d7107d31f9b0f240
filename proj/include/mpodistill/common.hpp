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

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mpodistill {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// A d×d operator on the bond (memory) space.
using Operator = Matrix;

/// Seed used when a caller does not supply one.
inline constexpr std::uint64_t kDefaultSeed = 0x6d706f2d64697374ULL;

/// Smallest Choi eigenvalue tolerated for a completely positive map.
inline constexpr double kPsdTolerance = 1e-10;

/// Relative gap below which two leading eigenvalues count as degenerate.
inline constexpr double kDegeneracyTolerance = 1e-9;

/// Eigenvalue floor for square roots and inverses of Perron operators.
inline constexpr double kEigenFloor = 1e-12;

/// Base class of every library failure that is not a plain bad argument.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Leading eigenvalue of a map is not separated from the rest of the spectrum.
class DegenerateSpectrum : public Error {
   public:
    using Error::Error;
};

/// Left Perron operator is not positive definite, so no gauge exists.
class SingularPerron : public Error {
   public:
    using Error::Error;
};

/// id - F + F_inf cannot be inverted.
class SingularFundamental : public Error {
   public:
    using Error::Error;
};

/// A quantity that must be real came out with a sizeable imaginary part.
class NumericalInconsistency : public Error {
   public:
    using Error::Error;
};

/// Chain normalisation vanished.
class DegenerateState : public Error {
   public:
    using Error::Error;
};

/// An object could not be built with its invariants intact.
class ConstructionError : public Error {
   public:
    using Error::Error;
};

}  // namespace mpodistill
