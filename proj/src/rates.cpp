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

#include "hse/rates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hse {
namespace {

void require_letter(int x, int c) {
    if (x < 0 || x >= c) throw InvalidParameter("letter " + std::to_string(x) + " outside 0.." + std::to_string(c - 1));
}

void require_budget(const BasisSetd& set, std::uint64_t budget) {
    const int c = set.c();
    const std::uint64_t cost = static_cast<std::uint64_t>(c) * factorial(c) * static_cast<std::uint64_t>(c - 1);
    if (c > 20 || cost > budget)
        throw BudgetError("exact enumeration over c = " + std::to_string(c) + " exceeds the budget of " +
                          std::to_string(budget) + " terms");
}

/// (1 / (c |tuples|)) sum_x sum_tuple prod_k (sum_a p_a(x, t_k)) / d.
template <typename ForEach>
double average_sift_probability(const IndexChangeTable& table, ForEach&& for_each_tuple) {
    const int c = table.c();
    const double d = table.d();
    double total = 0;
    std::uint64_t count = 0;
    for (int x = 0; x < c; ++x) {
        for_each_tuple(x, [&](std::span<const int> tuple) {
            double product = 1;
            for (int y : tuple) product *= table.index_sum(x, y) / d;
            total += product;
            ++count;
        });
    }
    return total / static_cast<double>(count);
}

}  // namespace

IndexChangeTable::IndexChangeTable(const BasisSetd& set, const Basisd* eve, double fraction)
    : c_(set.c()), d_(static_cast<int>(set.d())) {
    if (eve != nullptr) detail::require_same_dim(eve->dim(), set.d());
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw InvalidParameter("intercept fraction must lie in [0, 1]");
    if (fraction == 0.0) eve = nullptr;
    p_.assign(static_cast<std::size_t>(c_) * c_ * d_, 0.0);
    sums_.assign(static_cast<std::size_t>(c_) * c_, 0.0);

    std::vector<RealMatrix<double>> to_eve;
    if (eve != nullptr)
        for (int x = 0; x < c_; ++x) to_eve.push_back(transition_matrix(set[x], *eve));

    for (int x = 0; x < c_; ++x)
        for (int y = 0; y < c_; ++y) {
            RealMatrix<double> direct;
            if (eve == nullptr || fraction < 1.0) direct = transition_matrix(set[x], set[y]);
            double sum = 0;
            for (int i = 0; i < d_; ++i) {
                double keep = eve != nullptr ? to_eve[x].row(i).dot(to_eve[y].row(i)) : direct(i, i);
                if (eve != nullptr && fraction < 1.0) keep = fraction * keep + (1.0 - fraction) * direct(i, i);
                const double p = clamp_probability(1.0 - keep);
                p_[index(i, x, y)] = p;
                sum += p;
            }
            sums_[static_cast<std::size_t>(x * c_ + y)] = sum;
        }
}

std::uint64_t factorial(int n) {
    std::uint64_t f = 1;
    for (int k = 2; k <= n; ++k) f *= static_cast<std::uint64_t>(k);
    return f;
}

void for_each_bob_tuple(int c, const std::function<void(std::span<const int>)>& fn) {
    if (c < 2) throw InvalidParameter("alphabet size must be >= 2");
    std::vector<int> letters(static_cast<std::size_t>(c));
    std::iota(letters.begin(), letters.end(), 0);
    do {
        fn(std::span<const int>(letters.data(), letters.size() - 1));
    } while (std::next_permutation(letters.begin(), letters.end()));
}

void for_each_error_tuple(int c, int x, const std::function<void(std::span<const int>)>& fn) {
    if (c < 2) throw InvalidParameter("alphabet size must be >= 2");
    require_letter(x, c);
    std::vector<int> others;
    for (int l = 0; l < c; ++l)
        if (l != x) others.push_back(l);
    std::vector<int> tuple(static_cast<std::size_t>(c - 1));
    tuple[0] = x;
    do {
        std::copy(others.begin(), others.end() - 1, tuple.begin() + 1);
        fn(tuple);
    } while (std::next_permutation(others.begin(), others.end()));
}

double index_change_prob(const BasisSetd& set, const Basisd* eve, int i, int x, int y) {
    require_letter(x, set.c());
    require_letter(y, set.c());
    if (i < 0 || i >= set.d()) throw InvalidParameter("index " + std::to_string(i) + " out of range");
    if (eve != nullptr) detail::require_same_dim(eve->dim(), set.d());
    double keep = 0;
    if (eve == nullptr) {
        keep = transition_prob(set[x].column(i), set[y].column(i));
    } else {
        for (Eigen::Index k = 0; k < set.d(); ++k)
            keep += transition_prob(set[x].column(i), eve->column(k)) * transition_prob(eve->column(k), set[y].column(i));
    }
    return clamp_probability(1.0 - keep);
}

namespace {

double key_rate_at(const BasisSetd& set, const Basisd* eve, double fraction, std::uint64_t budget) {
    require_budget(set, budget);
    const IndexChangeTable table(set, eve, fraction);
    return average_sift_probability(table, [&](int, const auto& visit) { for_each_bob_tuple(set.c(), visit); });
}

double bob_error_rate_at(const BasisSetd& set, const Basisd* eve, double fraction, std::uint64_t budget) {
    require_budget(set, budget);
    const IndexChangeTable table(set, eve, fraction);
    return average_sift_probability(table, [&](int x, const auto& visit) { for_each_error_tuple(set.c(), x, visit); });
}

double qber_at(const BasisSetd& set, const Basisd* eve, double fraction, std::uint64_t budget) {
    const double r_k = key_rate_at(set, eve, fraction, budget);
    const double r_be = bob_error_rate_at(set, eve, fraction, budget);
    if (r_k <= 0) throw NumericalError("key rate is zero; QBER undefined");
    const double c = set.c();
    return clamp_probability((c - 1) / c * r_be / r_k);
}

}  // namespace

double key_rate(const BasisSetd& set, const Basisd* eve, std::uint64_t budget) {
    return key_rate_at(set, eve, 1.0, budget);
}

double bob_error_rate(const BasisSetd& set, const Basisd* eve, std::uint64_t budget) {
    return bob_error_rate_at(set, eve, 1.0, budget);
}

double qber(const BasisSetd& set, const Basisd* eve, std::uint64_t budget) { return qber_at(set, eve, 1.0, budget); }

double key_rate(const ProtocolConfig& config, std::uint64_t budget) {
    return key_rate_at(config.set, config.eve_basis(), config.intercept_fraction, budget);
}

double bob_error_rate(const ProtocolConfig& config, std::uint64_t budget) {
    return bob_error_rate_at(config.set, config.eve_basis(), config.intercept_fraction, budget);
}

double qber(const ProtocolConfig& config, std::uint64_t budget) {
    return qber_at(config.set, config.eve_basis(), config.intercept_fraction, budget);
}

double iter(const ProtocolConfig& config) { return config.intercept_fraction * iter(config.set, config.eve_basis()); }

double success_rate(const BasisSetd& set) { return key_rate(set, nullptr); }

double bit_transmission_rate(const BasisSetd& set) { return std::log2(static_cast<double>(set.c())) * success_rate(set); }

double iter(const BasisSetd& set, const Basisd* eve) {
    if (eve == nullptr) return 0.0;
    detail::require_same_dim(eve->dim(), set.d());
    double quartic = 0;
    for (const auto& b : set.bases()) quartic += transition_matrix(b, *eve).array().square().sum();
    return 1.0 - quartic / (static_cast<double>(set.c()) * static_cast<double>(set.d()));
}

MubClosedForms mub_closed_forms(int c, int d) {
    if (c < 2 || d < 2) throw InvalidParameter("need c >= 2 and d >= 2");
    MubClosedForms f;
    f.c = c;
    f.d = d;
    const double cc = c, dd = d;
    const double miss = std::pow(1.0 - 1.0 / dd, cc - 1);
    f.r_it = (cc - 1) * (dd - 1) / (cc * dd);
    f.r_qb = std::pow(1.0 - 1.0 / cc, 2) / (1.0 - 1.0 / cc + 1.0 / (cc * cc));
    f.r_s = miss / cc;
    f.r_t = std::log2(cc) * f.r_s;
    f.n_s = (cc - 1) / f.r_t;
    f.r_k = (1.0 - 1.0 / cc + 1.0 / (cc * cc)) * miss;
    f.r_be = (1.0 - 1.0 / cc) * miss;
    f.beyond_complete_set = c > d + 1;
    return f;
}

double amub_iter_lower_bound(double d, double K) {
    if (!(d >= 2)) throw InvalidParameter("need d >= 2");
    if (!(K >= 0)) throw InvalidParameter("need K >= 0");
    const double overlap = 2.0 + K * std::pow(d, -0.1);
    const double bracket = d + (d * d - 1.0) * std::pow(overlap, 4);
    return std::max(0.0, 1.0 - bracket / (d * d * d));
}

Bkb01Rates bkb01_rates(int c, int d) {
    if (c < 2 || d < 2) throw InvalidParameter("need c >= 2 and d >= 2");
    Bkb01Rates r;
    r.r_qb = static_cast<double>(c - 1) * (d - 1) / (static_cast<double>(c) * d);
    r.r_t = std::log2(static_cast<double>(d)) / c;
    r.n_s = 1.0 / r.r_t;
    return r;
}

std::string to_string(RateMethod method) {
    switch (method) {
        case RateMethod::closed_form_mub: return "closed_form_mub";
        case RateMethod::enumeration: return "enumeration";
        case RateMethod::monte_carlo: return "monte_carlo";
    }
    return "unknown";
}

RateReport hse_report(const ProtocolConfig& config) {
    RateReport r;
    r.protocol = config.c() == 2 ? "KMB09" : "HSE";
    r.d = config.d();
    r.c = config.c();
    r.method = RateMethod::enumeration;
    const Basisd* eve = config.eve_basis();
    r.r_s = RateValue::exact(success_rate(config.set));
    const double r_t = std::log2(static_cast<double>(config.c())) * r.r_s->value;
    r.r_t = RateValue::exact(r_t);
    r.n_s = RateValue::exact((config.c() - 1) / r_t);
    r.r_it = RateValue::exact(iter(config));
    const double r_k = key_rate(config);
    const double r_be = bob_error_rate(config);
    r.r_k = RateValue::exact(r_k);
    r.r_be = RateValue::exact(r_be);
    r.r_qb = RateValue::exact(qber(config));
    if (eve == nullptr) r.notes.push_back("no eavesdropper: error rates are zero");
    return r;
}

RateReport hse_closed_form_report(int c, int d) {
    const auto f = mub_closed_forms(c, d);
    RateReport r;
    r.protocol = c == 2 ? "KMB09" : "HSE";
    r.d = d;
    r.c = c;
    r.method = RateMethod::closed_form_mub;
    r.r_s = RateValue::exact(f.r_s);
    r.r_t = RateValue::exact(f.r_t);
    r.n_s = RateValue::exact(f.n_s);
    r.r_it = RateValue::exact(f.r_it);
    r.r_qb = RateValue::exact(f.r_qb);
    r.r_k = RateValue::exact(f.r_k);
    r.r_be = RateValue::exact(f.r_be);
    if (f.beyond_complete_set)
        r.notes.push_back("c > d + 1: no set of " + std::to_string(c) + " MU bases exists in dimension " +
                          std::to_string(d));
    return r;
}

RateReport bkb01_report(int c, int d, std::string protocol) {
    const auto b = bkb01_rates(c, d);
    RateReport r;
    r.protocol = std::move(protocol);
    r.d = d;
    r.c = c;
    r.method = RateMethod::closed_form_mub;
    r.r_qb = RateValue::exact(b.r_qb);
    r.r_t = RateValue::exact(b.r_t);
    r.n_s = RateValue::exact(b.n_s);
    if (c > d + 1)
        r.notes.push_back("c > d + 1: no set of " + std::to_string(c) + " MU bases exists in dimension " +
                          std::to_string(d));
    return r;
}

std::vector<Table1Row> table1() {
    auto hse_row = [](BasisSetd set) { return hse_report(ProtocolConfig::with_default_eve(std::move(set))); };
    std::vector<Table1Row> rows;
    rows.push_back({bkb01_report(2, 2, "BB84"), std::nullopt});
    rows.push_back({hse_row(fourier_pair(2)),
                    "ITER for Eve measuring in B0, (c-1)(d-1)/(cd) = 25.0%; 25.5% is also in circulation "
                    "for this entry"});
    rows.push_back({bkb01_report(3, 2, "BKB01 (6-state)"), std::nullopt});
    rows.push_back({hse_row(qubit_six_state_set()),
                    "N_s = 2 / R_t = 15.14 from the unrounded R_t; dividing by the rounded 13.2% gives 15.2"});
    rows.push_back({bkb01_report(2, 3), std::nullopt});
    rows.push_back({hse_row(fourier_pair(3)), std::nullopt});
    rows.push_back({bkb01_report(4, 3), std::nullopt});
    rows.push_back({hse_row(qutrit_complete_set()), std::nullopt});
    rows.push_back({bkb01_report(2, 7), std::nullopt});
    rows.push_back({hse_row(fourier_pair(7)), std::nullopt});
    rows.push_back({bkb01_report(8, 7), std::nullopt});
    rows.push_back({hse_row(prime_complete_set(7, 8)), std::nullopt});
    return rows;
}

}  // namespace hse
