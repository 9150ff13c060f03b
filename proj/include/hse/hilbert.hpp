// Copyright 2026 The HSE-QKD Authors
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

// Pure-state arithmetic over C^d: inner products, Born probabilities,
// projective measurement sampling and orthonormality checks. Vectors and
// bases are plain Eigen complex types; a basis stores its vectors as columns.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include "hse/error.hpp"
#include "hse/random.hpp"

namespace hse {

/// Tolerance for every normalization and orthonormality check.
inline constexpr double kNormTolerance = 1e-10;

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using ComplexVector = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using ComplexMatrix = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using RealMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const auto z = m(i, j);
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        }
    return true;
}

inline void require_same_dim(Eigen::Index a, Eigen::Index b) {
    if (a != b)
        throw DimensionError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace detail

/// Normalized pure state, dim >= 2.
template <typename Scalar = double>
class StateVector {
public:
    using RealScalar = Scalar;
    using Vector = ComplexVector<Scalar>;

    explicit StateVector(Vector amplitudes) : amps_(std::move(amplitudes)) {
        if (amps_.size() < 2) throw InvalidParameter("state dimension must be >= 2");
        if (!detail::all_finite(amps_)) throw NumericalError("state has non-finite amplitude");
        const Scalar norm2 = amps_.squaredNorm();
        if (std::abs(norm2 - Scalar(1)) > Scalar(kNormTolerance))
            throw NumericalError("state is not normalized: |psi|^2 = " + std::to_string(static_cast<double>(norm2)));
    }

    template <typename Derived>
    static StateVector from(const Eigen::MatrixBase<Derived>& column) {
        return StateVector(Vector(column));
    }

    /// Computational basis state e_i.
    static StateVector unit(Eigen::Index dim, Eigen::Index i) {
        Vector v = Vector::Zero(dim);
        if (i < 0 || i >= dim) throw InvalidParameter("basis index out of range");
        v(i) = Complex<Scalar>(1);
        return StateVector(std::move(v));
    }

    Eigen::Index dim() const noexcept { return amps_.size(); }
    const Vector& amplitudes() const noexcept { return amps_; }
    Complex<Scalar> operator[](Eigen::Index i) const { return amps_(i); }

    friend bool operator==(const StateVector& a, const StateVector& b) {
        return a.amps_.size() == b.amps_.size() && a.amps_ == b.amps_;
    }

private:
    Vector amps_;
};

/// <u|v> = sum_k conj(u_k) v_k.
template <typename DerivedU, typename DerivedV>
auto overlap(const Eigen::MatrixBase<DerivedU>& u, const Eigen::MatrixBase<DerivedV>& v) {
    detail::require_same_dim(u.size(), v.size());
    return u.dot(v);
}

template <typename Scalar>
Complex<Scalar> overlap(const StateVector<Scalar>& u, const StateVector<Scalar>& v) {
    return overlap(u.amplitudes(), v.amplitudes());
}

/// Clamp a computed probability into [0, 1]; values outside by more than
/// kNormTolerance are logic errors, not rounding.
template <typename Scalar>
Scalar clamp_probability(Scalar p) {
    if (!(p >= -Scalar(kNormTolerance) && p <= Scalar(1) + Scalar(kNormTolerance)))
        throw NumericalError("probability out of range: " + std::to_string(static_cast<double>(p)));
    return std::clamp(p, Scalar(0), Scalar(1));
}

/// |<u|v>|^2, clamped.
template <typename DerivedU, typename DerivedV>
auto transition_prob(const Eigen::MatrixBase<DerivedU>& u, const Eigen::MatrixBase<DerivedV>& v) {
    return clamp_probability(std::norm(overlap(u, v)));
}

template <typename Scalar>
Scalar transition_prob(const StateVector<Scalar>& u, const StateVector<Scalar>& v) {
    return transition_prob(u.amplitudes(), v.amplitudes());
}

template <typename Scalar>
struct OrthonormalityReport {
    bool ok = false;
    Scalar max_deviation = Scalar(0);
};

/// Checks max_ij |<c_i|c_j> - delta_ij| <= tol over the columns of `columns`.
template <typename Derived>
auto verify_orthonormal(const Eigen::MatrixBase<Derived>& columns, double tol) {
    using Scalar = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
    if (!(tol > 0)) throw InvalidParameter("tolerance must be positive");
    const ComplexMatrix<Scalar> gram = columns.adjoint() * columns;
    Scalar worst(0);
    for (Eigen::Index j = 0; j < gram.cols(); ++j)
        for (Eigen::Index i = 0; i < gram.rows(); ++i) {
            const Complex<Scalar> target = (i == j) ? Complex<Scalar>(1) : Complex<Scalar>(0);
            worst = std::max(worst, std::abs(gram(i, j) - target));
        }
    return OrthonormalityReport<Scalar>{worst <= Scalar(tol), worst};
}

/// Orthonormal basis of C^d; vector i is column i of `matrix()`.
template <typename Scalar = double>
class Basis {
public:
    using RealScalar = Scalar;
    using Matrix = ComplexMatrix<Scalar>;

    Basis(std::string label, Matrix columns) : label_(std::move(label)), columns_(std::move(columns)) {
        if (columns_.rows() != columns_.cols())
            throw DimensionError("basis matrix must be square");
        if (columns_.rows() < 2) throw InvalidParameter("basis dimension must be >= 2");
        if (!detail::all_finite(columns_)) throw NumericalError("basis has non-finite entry");
        const auto report = verify_orthonormal(columns_, kNormTolerance);
        if (!report.ok)
            throw ConstructionError("basis '" + label_ + "' is not orthonormal (deviation " +
                                    std::to_string(static_cast<double>(report.max_deviation)) + ")");
    }

    const std::string& label() const noexcept { return label_; }
    Eigen::Index dim() const noexcept { return columns_.rows(); }
    const Matrix& matrix() const noexcept { return columns_; }
    auto column(Eigen::Index i) const { return columns_.col(i); }
    StateVector<Scalar> vector(Eigen::Index i) const {
        if (i < 0 || i >= dim()) throw InvalidParameter("basis index out of range");
        return StateVector<Scalar>::from(columns_.col(i));
    }

    Basis relabeled(std::string label) const {
        Basis copy = *this;
        copy.label_ = std::move(label);
        return copy;
    }

private:
    std::string label_;
    Matrix columns_;
};

template <typename Scalar>
OrthonormalityReport<Scalar> verify_orthonormal(const Basis<Scalar>& basis, double tol) {
    return verify_orthonormal(basis.matrix(), tol);
}

/// Born distribution of `state` over the vectors of `basis`:
/// entry i is |<b_i|state>|^2.
template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> born_probabilities(const Basis<Scalar>& basis,
                                                           const Eigen::MatrixBase<Derived>& state) {
    detail::require_same_dim(basis.dim(), state.size());
    const ComplexVector<Scalar> amps = basis.matrix().adjoint() * state;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> p(basis.dim());
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = clamp_probability(std::norm(amps(i)));
    return p;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> born_probabilities(const Basis<Scalar>& basis, const StateVector<Scalar>& state) {
    return born_probabilities(basis, state.amplitudes());
}

/// Projective measurement of `state` in `basis`; returns the 0-based outcome.
/// One uniform draw, cumulative inversion in ascending index order.
template <typename Scalar, typename Derived>
Eigen::Index born_sample(const Eigen::MatrixBase<Derived>& state, const Basis<Scalar>& basis, RandomStream& rng) {
    const auto p = born_probabilities(basis, state);
    const Scalar total = p.sum();
    const auto d = static_cast<Scalar>(p.size());
    if (std::abs(total - Scalar(1)) > d * Scalar(kNormTolerance))
        throw NumericalError("Born probabilities sum to " + std::to_string(static_cast<double>(total)));
    const Scalar u = static_cast<Scalar>(rng.uniform()) * total;
    Scalar cumulative(0);
    for (Eigen::Index i = 0; i + 1 < p.size(); ++i) {
        cumulative += p(i);
        if (u < cumulative) return i;
    }
    // Rounding can leave u just above the running sum; the remaining mass
    // belongs to the last outcome with nonzero probability.
    Eigen::Index last = p.size() - 1;
    while (last > 0 && p(last) == Scalar(0)) --last;
    return last;
}

template <typename Scalar>
Eigen::Index born_sample(const StateVector<Scalar>& state, const Basis<Scalar>& basis, RandomStream& rng) {
    return born_sample(state.amplitudes(), basis, rng);
}

using StateVectord = StateVector<double>;
using Basisd = Basis<double>;

}  // namespace hse
