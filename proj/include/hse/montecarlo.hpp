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

// Monte Carlo estimation of the protocol rates and comparison with the
// analytic values.
//
//   r_s  = kept rounds / rounds
//   r_it = same-basis slots with b_k != a_k / same-basis slots
//   r_qb = kept rounds with Bob's letter != x / kept rounds
//
// Each proportion carries stderr = sqrt(p(1 - p)/n) and z = (p - p0)/stderr.
// With Eve present, the analytic counterpart of r_s is the key rate R_K
// (the probability that a round survives sifting under attack).

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hse/config.hpp"
#include "hse/protocol.hpp"

namespace hse {

/// |z| above this marks a simulation/theory disagreement.
inline constexpr double kZThreshold = 4.0;
inline constexpr std::uint64_t kDefaultTrials = 200'000;

struct Tally {
    std::uint64_t trials = 0;
    std::uint64_t sifted = 0;
    std::uint64_t same_basis_slots = 0;
    std::uint64_t index_errors = 0;
    std::uint64_t key_errors = 0;

    void add(const TrialOutcome& outcome);
    Tally& operator+=(const Tally& other);
    friend bool operator==(const Tally&, const Tally&) = default;
};

Tally tally(std::span<const TrialOutcome> outcomes);

struct Metric {
    std::string name;
    std::uint64_t hits = 0;
    std::uint64_t total = 0;
    std::optional<double> empirical;  ///< absent when total == 0
    double std_error = 0;
    std::optional<double> analytic;
    std::optional<double> z;

    static Metric proportion(std::string name, std::uint64_t hits, std::uint64_t total, std::optional<double> analytic);
    bool flagged(double threshold = kZThreshold) const { return z && !(std::abs(*z) <= threshold); }
};

struct SimReport {
    std::string protocol;
    int d = 0;
    int c = 0;
    std::string set_id;
    std::string eve;  ///< "none" or the label of Eve's basis
    std::uint64_t n_trials = 0;
    std::uint64_t seed = 0;
    Tally counts;
    std::vector<Metric> metrics;
    double elapsed_seconds = 0;

    const Metric* metric(std::string_view name) const;
    double worst_abs_z() const;
    bool passed(double threshold = kZThreshold) const;
};

/// Builds the HSE report for already-collected outcomes.
SimReport summarize(const ProtocolConfig& config, const Tally& counts, std::uint64_t seed);

/// Runs trials 0..n_trials-1. threads == 0 uses the hardware concurrency.
/// Counts are independent of the thread count.
SimReport estimate_rates(const ProtocolConfig& config, std::uint64_t n_trials, std::uint64_t seed,
                         unsigned threads = 0);

/// The basis-announcing protocol on the same bases: Alice sends vector i of a
/// uniformly chosen basis, Bob measures in a uniformly chosen basis, the round
/// is kept when the bases agree and is an error when Bob's outcome differs
/// from i. Analytic r_qb is iter(set, eve), which is (c-1)(d-1)/(cd) for MU
/// bases with Eve in B0.
SimReport simulate_bkb01(const ProtocolConfig& config, std::uint64_t n_trials, std::uint64_t seed,
                         unsigned threads = 0);

struct SweepItem {
    std::string name;
    ProtocolConfig config;
};

struct SweepReport {
    std::vector<SimReport> reports;
    double worst_abs_z = 0;
    bool passed = true;
};

SweepReport sweep(std::span<const SweepItem> items, std::uint64_t n_trials, std::uint64_t seed, unsigned threads = 0);

}  // namespace hse
