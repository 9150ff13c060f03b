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

// Reference computations for the tests. Everything here is written from the
// definitions with plain loops and std::complex, without calling the rate
// code under test.

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hse/bases.hpp"
#include "hse/random.hpp"

namespace hse::testing {

using cd = std::complex<double>;

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// R's diagonal moved into Q.
inline ComplexMatrix<double> random_unitary(Eigen::Index d, RandomStream& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexMatrix<double> z(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) z(i, j) = cd(g(rng), g(rng));
    Eigen::HouseholderQR<ComplexMatrix<double>> qr(z);
    ComplexMatrix<double> q = qr.householderQ();
    const ComplexMatrix<double> r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < d; ++j) {
        const cd diag = r(j, j);
        q.col(j) *= diag / std::abs(diag);
    }
    return q;
}

inline Basisd random_basis(Eigen::Index d, RandomStream& rng, const std::string& label = "R") {
    return Basisd(label, random_unitary(d, rng));
}

inline BasisSetd random_basis_set(int c, Eigen::Index d, RandomStream& rng) {
    std::vector<Basisd> bases;
    for (int x = 0; x < c; ++x) bases.push_back(random_basis(d, rng));
    return BasisSetd("random", std::move(bases));
}

/// |<u|v>|^2 by explicit summation.
inline double prob(const Basisd& u, Eigen::Index i, const Basisd& v, Eigen::Index j) {
    cd s = 0;
    for (Eigen::Index k = 0; k < u.dim(); ++k) s += std::conj(u.matrix()(k, i)) * v.matrix()(k, j);
    return std::norm(s);
}

/// Probability that Bob's outcome differs from i, from the physical process:
/// Alice sends |psi_i^x>, Eve (if any) measures in E and resends, Bob measures
/// in B^y.
inline double change_prob(const BasisSetd& set, const Basisd* eve, int i, int x, int y) {
    const auto d = set.d();
    double same = 0;
    if (eve == nullptr) {
        same = prob(set[x], i, set[y], i);
    } else {
        for (Eigen::Index k = 0; k < d; ++k) same += prob(set[x], i, *eve, k) * prob(*eve, k, set[y], i);
    }
    return 1.0 - same;
}

/// Every tuple of `len` values from 0..base-1.
inline void for_each_tuple(int len, int base, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> t(static_cast<std::size_t>(len), 0);
    while (true) {
        fn(t);
        int k = len - 1;
        while (k >= 0 && ++t[static_cast<std::size_t>(k)] == base) t[static_cast<std::size_t>(k--)] = 0;
        if (k < 0) return;
    }
}

inline bool distinct(const std::vector<int>& t) {
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = i + 1; j < t.size(); ++j)
            if (t[i] == t[j]) return false;
    return true;
}

struct BruteRates {
    double r_k = 0;
    double r_be = 0;
    double qber = 0;
    std::uint64_t y_count = 0;
    std::uint64_t z_count = 0;
};

/// R_K and R_BE by direct summation over x, Bob's tuples and every a in I
/// (no factorization).
inline BruteRates brute_rates(const BasisSetd& set, const Basisd* eve) {
    const int c = set.c();
    const int d = static_cast<int>(set.d());
    BruteRates out;
    double sum_k = 0, sum_be = 0;
    std::uint64_t y_count = 0, z_count = 0;
    for (int x = 0; x < c; ++x) {
        for_each_tuple(c - 1, c, [&](const std::vector<int>& y) {
            if (!distinct(y)) return;
            if (x == 0) ++y_count;
            const bool in_z = y.front() == x;
            if (in_z && x == 0) ++z_count;
            for_each_tuple(c - 1, d, [&](const std::vector<int>& a) {
                double p = 1;
                for (int k = 0; k < c - 1; ++k) p *= change_prob(set, eve, a[k], x, y[k]);
                sum_k += p;
                if (in_z) sum_be += p;
            });
        });
    }
    const double i_size = std::pow(static_cast<double>(d), c - 1);
    out.y_count = y_count;
    out.z_count = z_count;
    out.r_k = sum_k / (c * static_cast<double>(y_count) * i_size);
    out.r_be = sum_be / (c * static_cast<double>(z_count) * i_size);
    out.qber = (c - 1.0) / c * out.r_be / out.r_k;
    return out;
}

/// Exact probabilities of one HSE round, summing over every random choice of
/// Alice, Bob and Eve and every measurement outcome: P(kept), and P(kept and
/// Bob's letter differs from x).
struct ExactRound {
    double kept = 0;
    double kept_wrong = 0;
};

/// fraction: per-state probability that Eve intercepts.
inline ExactRound exact_round(const BasisSetd& set, const Basisd* eve, double fraction = 1.0) {
    const int c = set.c();
    const int d = static_cast<int>(set.d());
    std::vector<std::vector<int>> ys;
    for_each_tuple(c - 1, c, [&](const std::vector<int>& y) {
        if (distinct(y)) ys.push_back(y);
    });
    ExactRound out;
    const double w = 1.0 / (c * static_cast<double>(ys.size()) * std::pow(static_cast<double>(d), c - 1));
    for (int x = 0; x < c; ++x)
        for (const auto& y : ys) {
            std::vector<int> sorted = y;
            std::sort(sorted.begin(), sorted.end());
            int letter = 0;
            while (letter < c - 1 && sorted[static_cast<std::size_t>(letter)] == letter) ++letter;
            for_each_tuple(c - 1, d, [&](const std::vector<int>& a) {
                // P(all b_k != a_k), slot by slot, summing over Bob's outcomes.
                double p = 1;
                for (int k = 0; k < c - 1; ++k) {
                    double direct = 0, attacked = 0;
                    for (int b = 0; b < d; ++b) {
                        if (b == a[k]) continue;
                        direct += prob(set[x], a[k], set[y[k]], b);
                        if (eve != nullptr)
                            for (int e = 0; e < d; ++e)
                                attacked += prob(set[x], a[k], *eve, e) * prob(*eve, e, set[y[k]], b);
                    }
                    p *= eve == nullptr ? direct : fraction * attacked + (1 - fraction) * direct;
                }
                out.kept += w * p;
                if (letter != x) out.kept_wrong += w * p;
            });
        }
    return out;
}

/// 1 - (1/cd) sum_x sum_i sum_k |<psi_i^x|e_k>|^4
inline double brute_iter(const BasisSetd& set, const Basisd& eve) {
    double s = 0;
    for (int x = 0; x < set.c(); ++x)
        for (Eigen::Index i = 0; i < set.d(); ++i)
            for (Eigen::Index k = 0; k < set.d(); ++k) s += std::pow(prob(set[x], i, eve, k), 2);
    return 1.0 - s / (set.c() * static_cast<double>(set.d()));
}

inline std::uint64_t exact_factorial(int n) {
    std::uint64_t f = 1;
    for (int k = 2; k <= n; ++k) f *= static_cast<std::uint64_t>(k);
    return f;
}

}  // namespace hse::testing
