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

// Analytic rates of the protocol under an intercept-and-resend attack.
//
// p_i(x, y) is the probability that Bob reads an index other than i when
// Alice prepared vector i of B^x, Eve (if present) measured and resent in her
// basis E, and Bob measured in B^y:
//
//   with Eve:     p_i(x, y) = 1 - sum_k |<psi_i^x|e_k>|^2 |<e_k|psi_i^y>|^2
//   without Eve:  p_i(x, y) = 1 - |<psi_i^x|psi_i^y>|^2
//
// The key rate and Bob's error rate average prod_k p_{a_k}(x, y_k) over the
// letter x, Alice's index tuple a in I = {0..d-1}^{c-1} and Bob's basis tuple
// (Y: ordered tuples of c - 1 distinct letters; Z: those that contain x).
// Because the factors are independent in a, the I-sum factorizes:
//
//   sum_{a in I} prod_k p_{a_k}(x, y_k) = prod_k sum_a p_a(x, y_k)

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hse/config.hpp"

namespace hse {

/// Upper bound on product terms evaluated by key_rate / bob_error_rate.
inline constexpr std::uint64_t kEnumerationBudget = 100'000'000;

/// p_i(x, y) for every (x, y, i), precomputed.
class IndexChangeTable {
public:
    /// fraction: probability that Eve intercepts a given state.
    IndexChangeTable(const BasisSetd& set, const Basisd* eve, double fraction = 1.0);

    int c() const noexcept { return c_; }
    int d() const noexcept { return d_; }
    double operator()(int i, int x, int y) const noexcept { return p_[index(i, x, y)]; }
    /// sum over i of p_i(x, y).
    double index_sum(int x, int y) const noexcept { return sums_[static_cast<std::size_t>(x * c_ + y)]; }

private:
    std::size_t index(int i, int x, int y) const noexcept {
        return (static_cast<std::size_t>(x) * c_ + y) * d_ + i;
    }
    int c_, d_;
    std::vector<double> p_;
    std::vector<double> sums_;
};

/// Calls fn once per ordered tuple of c - 1 distinct letters from 0..c-1
/// (the set Y, c! tuples), in lexicographic order.
void for_each_bob_tuple(int c, const std::function<void(std::span<const int>)>& fn);

/// Calls fn once per tuple (x, z_2, ..., z_{c-1}) of distinct letters that
/// starts with x (the set Z, (c-1)! tuples).
void for_each_error_tuple(int c, int x, const std::function<void(std::span<const int>)>& fn);

std::uint64_t factorial(int n);

/// p_i(x, y); i in 0..d-1, x and y in 0..c-1. eve == nullptr means no Eve.
double index_change_prob(const BasisSetd& set, const Basisd* eve, int i, int x, int y);

/// Probability that a round is kept and Bob's missing basis is Alice's, with
/// no eavesdropper.
double success_rate(const BasisSetd& set);
double bit_transmission_rate(const BasisSetd& set);

/// Index transmission error rate, 1 - (1/cd) sum_x sum_i sum_k |<psi_i^x|e_k>|^4.
/// Zero without Eve.
double iter(const BasisSetd& set, const Basisd* eve);

/// R_K: probability that a round survives sifting.
double key_rate(const BasisSetd& set, const Basisd* eve, std::uint64_t budget = kEnumerationBudget);
/// R_BE: probability that a round survives sifting given Bob's tuple contains x.
double bob_error_rate(const BasisSetd& set, const Basisd* eve, std::uint64_t budget = kEnumerationBudget);
/// R_QB = ((c - 1)/c) R_BE / R_K, the error fraction of the sifted key.
double qber(const BasisSetd& set, const Basisd* eve, std::uint64_t budget = kEnumerationBudget);

// Same quantities for a full config, honouring its intercept fraction.
double iter(const ProtocolConfig& config);
double key_rate(const ProtocolConfig& config, std::uint64_t budget = kEnumerationBudget);
double bob_error_rate(const ProtocolConfig& config, std::uint64_t budget = kEnumerationBudget);
double qber(const ProtocolConfig& config, std::uint64_t budget = kEnumerationBudget);

struct MubClosedForms {
    int c = 0;
    int d = 0;
    double r_it = 0;
    double r_qb = 0;
    double r_s = 0;
    double r_t = 0;
    double n_s = 0;
    double r_k = 0;
    double r_be = 0;
    /// c exceeds d + 1, so no such MU set exists.
    bool beyond_complete_set = false;
};

/// Closed forms for c mutually unbiased bases with Eve measuring in B0.
MubClosedForms mub_closed_forms(int c, int d);

/// Lower bound on the ITER for d^2 approximately unbiased bases with
/// cross-overlap (2 + K d^{-1/10}) / sqrt(d); clamped at 0.
double amub_iter_lower_bound(double d, double K);

struct Bkb01Rates {
    double r_qb = 0;
    double r_t = 0;
    double n_s = 0;
};

/// Basis-announcing protocol with c MU bases in dimension d.
Bkb01Rates bkb01_rates(int c, int d);

enum class RateMethod { closed_form_mub, enumeration, monte_carlo };

std::string to_string(RateMethod method);

/// An exact analytic value, or an estimate with its standard error.
struct RateValue {
    double value = 0;
    std::optional<double> std_error;

    static RateValue exact(double v) { return {v, std::nullopt}; }
    static RateValue estimate(double v, double se) { return {v, se}; }
    bool is_exact() const noexcept { return !std_error.has_value(); }
};

struct RateReport {
    std::string protocol;
    int d = 0;
    int c = 0;
    RateMethod method = RateMethod::enumeration;
    std::optional<RateValue> r_s, r_t, r_it, r_qb, r_k, r_be, n_s;
    std::vector<std::string> notes;
};

/// Full analytic report for the protocol on an explicit basis set
/// (enumeration). protocol is "HSE" or, for c == 2, "KMB09".
RateReport hse_report(const ProtocolConfig& config);
RateReport hse_closed_form_report(int c, int d);
RateReport bkb01_report(int c, int d, std::string protocol = "BKB01");

struct Table1Row {
    RateReport report;
    std::optional<std::string> footnote;
};

/// The comparison table: BB84, KMB09, six-state, BKB01 and HSE rows for
/// d = 2, 3, 7, in display order. Rows with the same d form a group.
std::vector<Table1Row> table1();

}  // namespace hse
