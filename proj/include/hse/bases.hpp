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

// Basis families used by the protocol and the chordal Grassmannian distance
// between bases. D^2(A, B) is evaluated from the quartic overlap formula
// 1 - (1/d) sum_ij |<a_i|b_j>|^4; projector embeddings are never built.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hse/error.hpp"
#include "hse/hilbert.hpp"

namespace hse {

/// Two bases "share a state" when some cross transition probability exceeds
/// 1 - kDistinctTolerance.
inline constexpr double kDistinctTolerance = 1e-6;

/// Tolerance of the internal unbiasedness gate in prime_complete_set.
inline constexpr double kMutuallyUnbiasedTolerance = 1e-10;

constexpr bool is_odd_prime(long n) noexcept {
    if (n < 3 || n % 2 == 0) return false;
    for (long k = 3; k * k <= n; k += 2)
        if (n % k == 0) return false;
    return true;
}

/// Matrix of cross transition probabilities |<a_i|b_j>|^2.
template <typename Scalar>
RealMatrix<Scalar> transition_matrix(const Basis<Scalar>& a, const Basis<Scalar>& b) {
    detail::require_same_dim(a.dim(), b.dim());
    return (a.matrix().adjoint() * b.matrix()).cwiseAbs2();
}

/// Ordered collection of c >= 2 bases of C^d in which no two bases share a
/// state. Bases are labelled B0..B{c-1} by position.
template <typename Scalar = double>
class BasisSet {
public:
    using RealScalar = Scalar;

    BasisSet(std::string id, std::vector<Basis<Scalar>> bases) : id_(std::move(id)) {
        if (bases.size() < 2) throw InvalidParameter("a basis set needs at least two bases");
        const auto d = bases.front().dim();
        for (std::size_t x = 0; x < bases.size(); ++x) {
            detail::require_same_dim(bases[x].dim(), d);
            bases_.push_back(bases[x].relabeled("B" + std::to_string(x)));
        }
        for (std::size_t x = 0; x < bases_.size(); ++x)
            for (std::size_t y = x + 1; y < bases_.size(); ++y) {
                const Scalar shared = transition_matrix(bases_[x], bases_[y]).maxCoeff();
                if (shared > Scalar(1) - Scalar(kDistinctTolerance))
                    throw ConstructionError("bases B" + std::to_string(x) + " and B" + std::to_string(y) +
                                            " share a state");
            }
    }

    const std::string& id() const noexcept { return id_; }
    int c() const noexcept { return static_cast<int>(bases_.size()); }
    Eigen::Index d() const noexcept { return bases_.front().dim(); }
    const Basis<Scalar>& operator[](int x) const { return bases_.at(static_cast<std::size_t>(x)); }
    std::span<const Basis<Scalar>> bases() const noexcept { return bases_; }

private:
    std::string id_;
    std::vector<Basis<Scalar>> bases_;
};

template <typename Scalar = double>
Basis<Scalar> standard_basis(Eigen::Index d) {
    if (d < 2) throw InvalidParameter("dimension must be >= 2");
    return Basis<Scalar>("standard", ComplexMatrix<Scalar>::Identity(d, d));
}

/// F_jk = omega^{jk} / sqrt(d), omega = exp(2 pi i / d); vector k is column k.
template <typename Scalar = double>
Basis<Scalar> fourier_basis(Eigen::Index d) {
    if (d < 2) throw InvalidParameter("dimension must be >= 2");
    ComplexMatrix<Scalar> f(d, d);
    const Scalar norm = Scalar(1) / std::sqrt(static_cast<Scalar>(d));
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index k = 0; k < d; ++k) {
            // Reduce the exponent mod d before taking the phase to keep the
            // angle small and the entries exact at multiples of pi/2.
            const auto e = static_cast<Scalar>((j * k) % d);
            f(j, k) = std::polar(norm, Scalar(2) * std::numbers::pi_v<Scalar> * e / static_cast<Scalar>(d));
        }
    return Basis<Scalar>("fourier", std::move(f));
}

/// The four mutually unbiased qutrit bases written out explicitly; column i
/// of each matrix is vector i.
template <typename Scalar = double>
BasisSet<Scalar> qutrit_complete_set() {
    using C = Complex<Scalar>;
    const C one(1);
    const C w = std::polar(Scalar(1), Scalar(2) * std::numbers::pi_v<Scalar> / Scalar(3));
    const C w2 = w * w;
    const Scalar s = Scalar(1) / std::sqrt(Scalar(3));

    ComplexMatrix<Scalar> b1(3, 3), b2(3, 3), b3(3, 3);
    b1 << one, one, one,
          one, w,   w2,
          one, w2,  w;
    b2 << one, one, one,
          w2,  one, w,
          w2,  w,   one;
    b3 << one, one, one,
          w,   w2,  one,
          w,   one, w2;

    std::vector<Basis<Scalar>> bases;
    bases.push_back(standard_basis<Scalar>(3));
    bases.emplace_back("qutrit1", ComplexMatrix<Scalar>(b1 * s));
    bases.emplace_back("qutrit2", ComplexMatrix<Scalar>(b2 * s));
    bases.emplace_back("qutrit3", ComplexMatrix<Scalar>(b3 * s));
    return BasisSet<Scalar>("qutrit4", std::move(bases));
}

/// {|0>,|1>}, {(|0> +- |1>)/sqrt2}, {(|0> +- i|1>)/sqrt2}.
template <typename Scalar = double>
BasisSet<Scalar> qubit_six_state_set() {
    using C = Complex<Scalar>;
    const Scalar s = Scalar(1) / std::sqrt(Scalar(2));
    ComplexMatrix<Scalar> diag(2, 2), circ(2, 2);
    diag << C(s), C(s),
            C(s), C(-s);
    circ << C(s), C(s),
            C(0, s), C(0, -s);
    std::vector<Basis<Scalar>> bases;
    bases.push_back(standard_basis<Scalar>(2));
    bases.emplace_back("diagonal", std::move(diag));
    bases.emplace_back("circular", std::move(circ));
    return BasisSet<Scalar>("sixstate", std::move(bases));
}

/// The d = 2 basis rotated by pi/8 from the standard basis, halfway between
/// the standard and Hadamard bases.
template <typename Scalar = double>
Basis<Scalar> breidbart_basis() {
    const Scalar theta = std::numbers::pi_v<Scalar> / Scalar(8);
    const Scalar cs = std::cos(theta), sn = std::sin(theta);
    ComplexMatrix<Scalar> m(2, 2);
    m << Complex<Scalar>(cs), Complex<Scalar>(-sn),
         Complex<Scalar>(sn), Complex<Scalar>(cs);
    return Basis<Scalar>("breidbart", std::move(m));
}

template <typename Scalar>
struct UnbiasednessReport {
    bool ok = false;
    Scalar max_dev = Scalar(0);
};

/// ok iff every |<a_i|b_j>|^2 is within tol of 1/d.
template <typename Scalar>
UnbiasednessReport<Scalar> is_mutually_unbiased(const Basis<Scalar>& a, const Basis<Scalar>& b, double tol) {
    if (!(tol > 0)) throw InvalidParameter("tolerance must be positive");
    const RealMatrix<Scalar> t = transition_matrix(a, b);
    const Scalar target = Scalar(1) / static_cast<Scalar>(a.dim());
    const Scalar dev = (t.array() - target).abs().maxCoeff();
    return {dev <= Scalar(tol), dev};
}

/// Standard basis followed by c - 1 quadratic-phase bases
/// v_j^a[k] = omega^{a k^2 + j k} / sqrt(d), a = 0..c-2.
/// Every pair is checked for unbiasedness before returning.
template <typename Scalar = double>
BasisSet<Scalar> prime_complete_set(long d, int c) {
    if (!is_odd_prime(d)) throw InvalidParameter(std::to_string(d) + " is not an odd prime");
    if (c < 2 || c > d + 1) throw InvalidParameter("need 2 <= c <= d + 1");
    const Scalar norm = Scalar(1) / std::sqrt(static_cast<Scalar>(d));
    const Scalar step = Scalar(2) * std::numbers::pi_v<Scalar> / static_cast<Scalar>(d);

    std::vector<Basis<Scalar>> bases;
    bases.push_back(standard_basis<Scalar>(d));
    for (long a = 0; a + 1 < c; ++a) {
        ComplexMatrix<Scalar> m(d, d);
        for (long j = 0; j < d; ++j)
            for (long k = 0; k < d; ++k) {
                const long e = (a * k % d * k + j * k) % d;
                m(k, j) = std::polar(norm, step * static_cast<Scalar>(e));
            }
        bases.emplace_back("quadratic" + std::to_string(a), std::move(m));
    }
    for (std::size_t x = 0; x < bases.size(); ++x)
        for (std::size_t y = x + 1; y < bases.size(); ++y)
            if (!is_mutually_unbiased(bases[x], bases[y], kMutuallyUnbiasedTolerance).ok)
                throw ConstructionError("quadratic-phase bases " + std::to_string(x) + ", " + std::to_string(y) +
                                        " are not mutually unbiased");
    return BasisSet<Scalar>("prime:" + std::to_string(d) + ":" + std::to_string(c), std::move(bases));
}

/// Standard basis and the Fourier basis of C^d, the canonical MU pair.
template <typename Scalar = double>
BasisSet<Scalar> fourier_pair(Eigen::Index d) {
    std::vector<Basis<Scalar>> bases{standard_basis<Scalar>(d), fourier_basis<Scalar>(d)};
    return BasisSet<Scalar>("fourier:" + std::to_string(d), std::move(bases));
}

/// Up to five MU bases of C^4. Basis m is the common eigenbasis of one class
/// of commuting two-qubit Pauli operators:
///   {ZI, IZ}, {XI, IX}, {YI, IY}, {XZ, ZY}, {ZX, YZ}
/// Each eigenvector is rephased so its first nonzero amplitude is real and
/// positive.
template <typename Scalar = double>
BasisSet<Scalar> two_qubit_complete_set(int c) {
    if (c < 2 || c > 5) throw InvalidParameter("need 2 <= c <= 5 for two qubits");
    using C = Complex<Scalar>;
    using M2 = Eigen::Matrix<C, 2, 2>;
    M2 id, px, py, pz;
    id << C(1), C(0), C(0), C(1);
    px << C(0), C(1), C(1), C(0);
    py << C(0), C(0, -1), C(0, 1), C(0);
    pz << C(1), C(0), C(0), C(-1);
    auto kron = [](const M2& a, const M2& b) {
        ComplexMatrix<Scalar> k(4, 4);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) k.block(2 * i, 2 * j, 2, 2) = a(i, j) * b;
        return k;
    };
    const std::pair<ComplexMatrix<Scalar>, ComplexMatrix<Scalar>> classes[] = {
        {kron(pz, id), kron(id, pz)}, {kron(px, id), kron(id, px)}, {kron(py, id), kron(id, py)},
        {kron(px, pz), kron(pz, py)}, {kron(pz, px), kron(py, pz)},
    };

    std::vector<Basis<Scalar>> bases;
    bases.push_back(standard_basis<Scalar>(4));
    for (int m = 1; m < c; ++m) {
        // Eigenvalues of A + 2B are -3, -1, 1, 3: nondegenerate.
        const ComplexMatrix<Scalar> h = classes[m].first + Scalar(2) * classes[m].second;
        Eigen::SelfAdjointEigenSolver<ComplexMatrix<Scalar>> solver(h);
        ComplexMatrix<Scalar> v = solver.eigenvectors();
        for (Eigen::Index j = 0; j < 4; ++j) {
            Eigen::Index k = 0;
            while (std::abs(v(k, j)) < Scalar(1e-8)) ++k;
            v.col(j) *= std::conj(v(k, j)) / std::abs(v(k, j));
        }
        bases.emplace_back("pauli" + std::to_string(m), std::move(v));
    }
    for (std::size_t x = 0; x < bases.size(); ++x)
        for (std::size_t y = x + 1; y < bases.size(); ++y)
            if (!is_mutually_unbiased(bases[x], bases[y], kMutuallyUnbiasedTolerance).ok)
                throw ConstructionError("two-qubit bases " + std::to_string(x) + ", " + std::to_string(y) +
                                        " are not mutually unbiased");
    return BasisSet<Scalar>("pauli4:" + std::to_string(c), std::move(bases));
}

/// A known set of c mutually unbiased bases in dimension d, when one of the
/// constructions above provides it.
template <typename Scalar = double>
std::optional<BasisSet<Scalar>> known_mub_set(long d, int c) {
    if (d < 2 || c < 2) return std::nullopt;
    if (c == 2) return fourier_pair<Scalar>(d);
    if (d == 2 && c == 3) return qubit_six_state_set<Scalar>();
    if (d == 3 && c == 4) return qutrit_complete_set<Scalar>();
    if (is_odd_prime(d) && c <= d + 1) return prime_complete_set<Scalar>(d, c);
    if (d == 4 && c <= 5) return two_qubit_complete_set<Scalar>(c);
    return std::nullopt;
}

/// Chordal Grassmannian distance D^2 between the planes of two bases.
template <typename Scalar>
Scalar grassmannian_distance(const Basis<Scalar>& a, const Basis<Scalar>& b) {
    const RealMatrix<Scalar> t = transition_matrix(a, b);
    return Scalar(1) - t.array().square().sum() / static_cast<Scalar>(a.dim());
}

/// (1/c) sum_x D^2(B^x, eve).
template <typename Scalar>
Scalar average_distance(const Basis<Scalar>& eve, std::span<const Basis<Scalar>> bases) {
    if (bases.empty()) throw InvalidParameter("average over an empty basis list");
    Scalar total(0);
    for (const auto& b : bases) total += grassmannian_distance(b, eve);
    return total / static_cast<Scalar>(bases.size());
}

template <typename Scalar>
Scalar average_distance(const Basis<Scalar>& eve, const BasisSet<Scalar>& set) {
    detail::require_same_dim(eve.dim(), set.d());
    return average_distance(eve, set.bases());
}

/// max over x != y and i, j of |<psi_i^x|psi_j^y>|.
template <typename Scalar>
Scalar max_cross_overlap(const BasisSet<Scalar>& set) {
    Scalar worst(0);
    for (int x = 0; x < set.c(); ++x)
        for (int y = x + 1; y < set.c(); ++y)
            worst = std::max(worst, std::sqrt(transition_matrix(set[x], set[y]).maxCoeff()));
    return worst;
}

template <typename Scalar>
struct DistanceReport {
    RealMatrix<Scalar> pairwise;
    std::optional<Scalar> average_to_eve;
    std::optional<RealMatrix<Scalar>> to_eve;  ///< D^2(B^x, eve) per x, as a column
};

template <typename Scalar>
DistanceReport<Scalar> distance_report(const BasisSet<Scalar>& set, const Basis<Scalar>* eve = nullptr) {
    DistanceReport<Scalar> report;
    report.pairwise = RealMatrix<Scalar>::Zero(set.c(), set.c());
    for (int x = 0; x < set.c(); ++x)
        for (int y = x + 1; y < set.c(); ++y)
            report.pairwise(x, y) = report.pairwise(y, x) = grassmannian_distance(set[x], set[y]);
    if (eve != nullptr) {
        RealMatrix<Scalar> col(set.c(), 1);
        for (int x = 0; x < set.c(); ++x) col(x, 0) = grassmannian_distance(set[x], *eve);
        report.to_eve = col;
        report.average_to_eve = average_distance(*eve, set);
    }
    return report;
}

using BasisSetd = BasisSet<double>;

}  // namespace hse
