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

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "hse/error.hpp"
#include "hse/rates.hpp"
#include "oracles.hpp"

namespace hse {
namespace {

using testing::brute_rates;
using testing::exact_round;

std::vector<ProtocolConfig> small_configs() {
    std::vector<ProtocolConfig> out;
    RandomStream rng(31337);
    for (int c = 2; c <= 3; ++c)
        for (int d = 2; d <= 3; ++d) {
            if (auto mub = known_mub_set(d, c)) out.push_back(ProtocolConfig::with_default_eve(*mub));
            auto set = testing::random_basis_set(c, d, rng);
            out.push_back(ProtocolConfig(set, testing::random_basis(d, rng)));
            out.push_back(ProtocolConfig(set));
        }
    return out;
}

TEST(Enumeration, TupleCounts) {
    for (int c = 2; c <= 6; ++c) {
        std::uint64_t n = 0;
        std::set<std::vector<int>> seen;
        for_each_bob_tuple(c, [&](std::span<const int> y) {
            ASSERT_EQ(y.size(), std::size_t(c - 1));
            std::vector<int> v(y.begin(), y.end());
            ASSERT_TRUE(testing::distinct(v));
            seen.insert(v);
            ++n;
        });
        EXPECT_EQ(n, testing::exact_factorial(c));
        EXPECT_EQ(seen.size(), n);
        for (int x = 0; x < c; ++x) {
            std::uint64_t m = 0;
            for_each_error_tuple(c, x, [&](std::span<const int> z) {
                ASSERT_EQ(z.front(), x);
                ASSERT_TRUE(testing::distinct(std::vector<int>(z.begin(), z.end())));
                ++m;
            });
            EXPECT_EQ(m, testing::exact_factorial(c - 1));
        }
    }
    EXPECT_EQ(factorial(10), 3628800u);
}

TEST(IndexChangeTable, MatchesPhysicalDefinition) {
    for (const auto& cfg : small_configs()) {
        const IndexChangeTable t(cfg.set, cfg.eve_basis());
        for (int x = 0; x < cfg.c(); ++x)
            for (int y = 0; y < cfg.c(); ++y) {
                double sum = 0;
                for (int i = 0; i < cfg.d(); ++i) {
                    const double expect = testing::change_prob(cfg.set, cfg.eve_basis(), i, x, y);
                    EXPECT_NEAR(t(i, x, y), expect, 1e-14);
                    EXPECT_NEAR(index_change_prob(cfg.set, cfg.eve_basis(), i, x, y), expect, 1e-14);
                    sum += expect;
                }
                EXPECT_NEAR(t.index_sum(x, y), sum, 1e-13);
            }
    }
}

TEST(Rates, FactorizationEqualsBruteForce) {
    for (const auto& cfg : small_configs()) {
        const auto brute = brute_rates(cfg.set, cfg.eve_basis());
        EXPECT_NEAR(key_rate(cfg.set, cfg.eve_basis()), brute.r_k, 1e-14) << cfg.set.id();
        EXPECT_NEAR(bob_error_rate(cfg.set, cfg.eve_basis()), brute.r_be, 1e-14) << cfg.set.id();
    }
}

TEST(Rates, MatchExactRoundProbabilities) {
    // QBER = P(kept and wrong) / P(kept) from the full physical process.
    auto configs = small_configs();
    configs.push_back(ProtocolConfig::with_default_eve(qutrit_complete_set()));
    RandomStream rng(4);
    configs.push_back(ProtocolConfig(testing::random_basis_set(4, 2, rng), breidbart_basis()));
    for (const auto& cfg : configs) {
        const auto round = exact_round(cfg.set, cfg.eve_basis());
        EXPECT_NEAR(key_rate(cfg.set, cfg.eve_basis()), round.kept, 1e-13);
        EXPECT_NEAR(qber(cfg.set, cfg.eve_basis()), round.kept_wrong / round.kept, 1e-12);
    }
}

TEST(Rates, WorkedExamples) {
    EXPECT_NEAR(success_rate(qutrit_complete_set()), 2.0 / 27, 1e-12);
    EXPECT_NEAR(bit_transmission_rate(qutrit_complete_set()), 4.0 / 27, 1e-12);
    EXPECT_NEAR(qber(qubit_six_state_set(), &qubit_six_state_set()[0]), 4.0 / 7, 1e-12);
    // Without Eve nothing is ever wrong.
    EXPECT_NEAR(qber(qutrit_complete_set(), nullptr), 0, 1e-15);
    EXPECT_EQ(iter(qutrit_complete_set(), nullptr), 0);
}

TEST(Rates, ClosedFormsMatchEnumeration) {
    for (int c = 2; c <= 4; ++c)
        for (int d = 2; d <= 5; ++d) {
            auto set = known_mub_set(d, c);
            if (!set) continue;
            const ProtocolConfig cfg = ProtocolConfig::with_default_eve(*set);
            const auto f = mub_closed_forms(c, d);
            EXPECT_NEAR(iter(cfg.set, cfg.eve_basis()), f.r_it, 1e-10) << c << "," << d;
            EXPECT_NEAR(qber(cfg.set, cfg.eve_basis()), f.r_qb, 1e-10) << c << "," << d;
            EXPECT_NEAR(key_rate(cfg.set, cfg.eve_basis()), f.r_k, 1e-10) << c << "," << d;
            EXPECT_NEAR(bob_error_rate(cfg.set, cfg.eve_basis()), f.r_be, 1e-10) << c << "," << d;
            EXPECT_NEAR(success_rate(cfg.set), f.r_s, 1e-10) << c << "," << d;
            EXPECT_NEAR(f.r_t, std::log2(c) * f.r_s, 1e-15);
            EXPECT_NEAR(f.n_s, (c - 1) / f.r_t, 1e-12);
        }
}

TEST(Rates, ClosedFormValues) {
    const auto f = mub_closed_forms(3, 2);
    EXPECT_NEAR(f.r_qb, 4.0 / 7, 1e-15);
    EXPECT_NEAR(f.r_it, 1.0 / 3, 1e-15);
    EXPECT_NEAR(f.r_s, 1.0 / 12, 1e-15);
    EXPECT_NEAR(mub_closed_forms(4, 3).r_qb, 9.0 / 13, 1e-15);
    EXPECT_TRUE(mub_closed_forms(5, 3).beyond_complete_set);
    EXPECT_FALSE(mub_closed_forms(4, 3).beyond_complete_set);
    EXPECT_THROW(mub_closed_forms(1, 3), InvalidParameter);
}

TEST(Rates, IterEqualsAverageDistance) {
    RandomStream rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 2 + trial % 4;
        const int c = 2 + trial % 3;
        const auto set = testing::random_basis_set(c, d, rng);
        const auto eve = testing::random_basis(d, rng);
        EXPECT_NEAR(iter(set, &eve), average_distance(eve, set), 1e-10);
        EXPECT_NEAR(iter(set, &eve), testing::brute_iter(set, eve), 1e-12);
    }
}

TEST(Rates, TwoBasesReduceToKmb09Form) {
    RandomStream rng(8);
    for (int d = 2; d <= 5; ++d) {
        const auto set = testing::random_basis_set(2, d, rng);
        const auto eve = testing::random_basis(d, rng);
        EXPECT_NEAR(bob_error_rate(set, &eve), iter(set, &eve), 1e-13);
        EXPECT_NEAR(qber(set, &eve), iter(set, &eve) / (2 * key_rate(set, &eve)), 1e-13);
    }
}

TEST(Rates, MonotoneInAlphabetAndDimension) {
    for (int d = 2; d <= 13; ++d)
        for (int c = 2; c <= d; ++c) {
            EXPECT_LT(mub_closed_forms(c, d).r_qb, mub_closed_forms(c + 1, d).r_qb);
            EXPECT_LT(mub_closed_forms(c, d).r_it, mub_closed_forms(c + 1, d).r_it);
            EXPECT_LT(mub_closed_forms(c, d).r_it, mub_closed_forms(c, d + 1).r_it);
        }
}

TEST(Rates, CompleteSetLimits) {
    for (int d = 2; d <= 13; ++d) EXPECT_NEAR(mub_closed_forms(d + 1, d).r_it, (d - 1.0) / (d + 1), 1e-15);
    // (d-1)/(d+1) reaches 0.9 at d = 19 and exceeds it from d = 20 on.
    EXPECT_NEAR(mub_closed_forms(20, 19).r_it, 0.9, 1e-15);
    EXPECT_LT(mub_closed_forms(19, 18).r_it, 0.9);
    for (int d = 20; d <= 60; ++d) EXPECT_GT(mub_closed_forms(d + 1, d).r_it, 0.9);
    EXPECT_GT(amub_iter_lower_bound(1e6, 0), 0.99998);
    EXPECT_EQ(amub_iter_lower_bound(2, 0), 0.0);
    EXPECT_LT(amub_iter_lower_bound(1e6, 5), amub_iter_lower_bound(1e6, 0));
}

TEST(Rates, Bkb01) {
    const auto b = bkb01_rates(4, 3);
    EXPECT_NEAR(b.r_qb, 0.5, 1e-15);
    EXPECT_NEAR(b.r_t, std::log2(3) / 4, 1e-15);
    EXPECT_NEAR(b.n_s, 1 / b.r_t, 1e-15);
    EXPECT_NEAR(bkb01_rates(2, 2).r_qb, 0.25, 1e-15);
}

TEST(Rates, BudgetIsEnforced) {
    const auto big = prime_complete_set(11, 12);
    EXPECT_THROW(key_rate(big, &big[0]), BudgetError);
    EXPECT_THROW(key_rate(qutrit_complete_set(), nullptr, 10), BudgetError);
}

TEST(Rates, ReportFieldsAreConsistent) {
    const auto r = hse_report(ProtocolConfig::with_default_eve(qutrit_complete_set()));
    EXPECT_EQ(r.protocol, "HSE");
    EXPECT_EQ(r.method, RateMethod::enumeration);
    EXPECT_NEAR(r.r_t->value, 2 * r.r_s->value, 1e-15);
    EXPECT_NEAR(r.n_s->value, 3 / r.r_t->value, 1e-12);
    EXPECT_NEAR(r.r_qb->value, 9.0 / 13, 1e-12);
    EXPECT_TRUE(r.r_qb->is_exact());
    EXPECT_EQ(hse_report(ProtocolConfig::with_default_eve(fourier_pair(3))).protocol, "KMB09");
}

// Table values as printed: percentages to one decimal, N_s to one decimal.
// KMB09 (2,2) ITER is the closed-form 25.0 (the row carries a footnote).
struct Printed {
    const char* protocol;
    int d, c;
    double r_qb, r_it, r_t, n_s;  // r_it < 0: n/a
};

TEST(Table1, ValuesRoundToThePrintedEntries) {
    const Printed printed[] = {
        {"BB84", 2, 2, 25.0, -1, 50.0, 2.0},          {"KMB09", 2, 2, 33.3, 25.0, 25.0, 4.0},
        {"BKB01 (6-state)", 2, 3, 33.3, -1, 33.3, 3.0}, {"HSE", 2, 3, 57.1, 33.3, 13.2, 15.1},
        {"BKB01", 3, 2, 33.3, -1, 79.2, 1.3},          {"KMB09", 3, 2, 33.3, 33.3, 33.3, 3.0},
        {"BKB01", 3, 4, 50.0, -1, 39.6, 2.5},          {"HSE", 3, 4, 69.2, 50.0, 14.8, 20.3},
        {"BKB01", 7, 2, 42.9, -1, 140.4, 0.7},         {"KMB09", 7, 2, 33.3, 42.9, 42.9, 2.3},
        {"BKB01", 7, 8, 75.0, -1, 35.1, 2.8},          {"HSE", 7, 8, 86.0, 75.0, 12.7, 54.9},
    };
    const auto rows = table1();
    ASSERT_EQ(rows.size(), 12u);
    auto shown = [](double v) { return std::floor(v * 10 + 0.5 + 1e-9) / 10; };
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k].report;
        const auto& p = printed[k];
        EXPECT_EQ(r.protocol, p.protocol);
        EXPECT_EQ(r.d, p.d);
        EXPECT_EQ(r.c, p.c);
        EXPECT_DOUBLE_EQ(shown(100 * r.r_qb->value), p.r_qb) << k;
        EXPECT_DOUBLE_EQ(shown(100 * r.r_t->value), p.r_t) << k;
        EXPECT_DOUBLE_EQ(shown(r.n_s->value), p.n_s) << k;
        if (p.r_it < 0)
            EXPECT_FALSE(r.r_it.has_value()) << k;
        else
            EXPECT_DOUBLE_EQ(shown(100 * r.r_it->value), p.r_it) << k;
    }
    EXPECT_TRUE(rows[1].footnote.has_value());
    EXPECT_TRUE(rows[3].footnote.has_value());
    int notes = 0;
    for (const auto& row : rows) notes += row.footnote.has_value();
    EXPECT_EQ(notes, 2);
}


TEST(PartialIntercept, TableMixesAttackedAndDirect) {
    for (const auto& cfg : small_configs()) {
        if (!cfg.eve) continue;
        for (double f : {0.0, 0.25, 0.6, 1.0}) {
            const IndexChangeTable t(cfg.set, cfg.eve_basis(), f);
            for (int x = 0; x < cfg.c(); ++x)
                for (int y = 0; y < cfg.c(); ++y)
                    for (int i = 0; i < cfg.d(); ++i) {
                        const double expect = f * testing::change_prob(cfg.set, cfg.eve_basis(), i, x, y) +
                                              (1 - f) * testing::change_prob(cfg.set, nullptr, i, x, y);
                        EXPECT_NEAR(t(i, x, y), expect, 1e-14);
                    }
        }
    }
}

TEST(PartialIntercept, MatchesExactRound) {
    RandomStream rng(8);
    std::vector<ProtocolConfig> configs{ProtocolConfig::with_default_eve(qutrit_complete_set()),
                                        ProtocolConfig::with_default_eve(qubit_six_state_set()),
                                        ProtocolConfig(testing::random_basis_set(3, 3, rng), testing::random_basis(3, rng))};
    for (const auto& base : configs)
        for (double f : {0.1, 0.5, 0.9}) {
            const ProtocolConfig cfg(base.set, base.eve, f);
            const auto round = exact_round(cfg.set, cfg.eve_basis(), f);
            EXPECT_NEAR(key_rate(cfg), round.kept, 1e-13);
            EXPECT_NEAR(qber(cfg), round.kept_wrong / round.kept, 1e-12);
            EXPECT_NEAR(iter(cfg), f * iter(cfg.set, cfg.eve_basis()), 1e-15);
        }
}

TEST(PartialIntercept, EndpointsAndMonotonicity) {
    const auto set = qutrit_complete_set();
    const ProtocolConfig none(set, set[0], 0.0);
    const ProtocolConfig full(set, set[0], 1.0);
    EXPECT_NEAR(key_rate(none), key_rate(set, nullptr), 1e-15);
    EXPECT_NEAR(qber(none), 0.0, 1e-15);
    EXPECT_EQ(iter(none), 0.0);
    EXPECT_EQ(key_rate(full), key_rate(set, &set[0]));
    EXPECT_EQ(qber(full), qber(set, &set[0]));
    double prev = -1;
    for (int k = 0; k <= 10; ++k) {
        const double q = qber(ProtocolConfig(set, set[0], k / 10.0));
        EXPECT_GT(q, prev);
        prev = q;
    }
    EXPECT_THROW(ProtocolConfig(set, set[0], 1.5), InvalidParameter);
    EXPECT_THROW(ProtocolConfig(set, set[0], -0.1), InvalidParameter);
    EXPECT_THROW(IndexChangeTable(set, &set[0], std::nan("")), InvalidParameter);
}

TEST(Rates, HonestQutritSuccessRate) {
    const ProtocolConfig cfg(qutrit_complete_set());
    EXPECT_NEAR(key_rate(cfg), 2.0 / 27, 1e-15);
    EXPECT_EQ(qber(cfg), 0.0);
}

TEST(Rates, MonotoneOverFullGrid) {
    for (int d = 2; d <= 12; ++d)
        for (int c = 2; c <= 12; ++c) {
            EXPECT_LT(mub_closed_forms(c, d).r_qb, mub_closed_forms(c + 1, d).r_qb) << c << ' ' << d;
            EXPECT_LT(mub_closed_forms(c, d).r_it, mub_closed_forms(c, d + 1).r_it) << c << ' ' << d;
        }
}

TEST(Table1, Bb84RowIsTwoBasisBkb01) {
    const auto b = bkb01_rates(2, 2);
    const auto rows = table1();
    const auto& row = rows[0].report;
    EXPECT_EQ(row.protocol, "BB84");
    EXPECT_EQ(row.r_qb->value, b.r_qb);
    EXPECT_EQ(row.r_t->value, b.r_t);
    EXPECT_EQ(row.n_s->value, b.n_s);
    EXPECT_NEAR(b.r_qb, 0.25, 1e-15);
    EXPECT_NEAR(b.r_t, 0.5, 1e-15);
}

}  // namespace
}  // namespace hse
