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

#include "hse/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "hse/rates.hpp"

namespace hse {
namespace {

/// Splits [0, n) across workers; fn(first, last) returns a partial T.
template <typename T, typename Fn>
T parallel_sum(std::uint64_t n, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(1, n / 1024)));
    if (threads <= 1) return fn(std::uint64_t{0}, n);

    std::vector<T> partial(threads);
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < threads; ++w) {
        const std::uint64_t first = n * w / threads;
        const std::uint64_t last = n * (w + 1) / threads;
        workers.emplace_back([&, w, first, last] {
            try {
                partial[w] = fn(first, last);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : workers) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    T total{};
    for (const auto& p : partial) total += p;
    return total;
}

std::string eve_name(const ProtocolConfig& config) { return config.eve ? config.eve->label() : "none"; }

}  // namespace

void Tally::add(const TrialOutcome& outcome) {
    ++trials;
    if (outcome.sifted) {
        ++sifted;
        if (outcome.key_error()) ++key_errors;
    }
    for (std::size_t k = 0; k < outcome.y.size(); ++k)
        if (outcome.y[k] == outcome.x) ++same_basis_slots;
    index_errors += outcome.index_error_slots.size();
}

Tally& Tally::operator+=(const Tally& other) {
    trials += other.trials;
    sifted += other.sifted;
    same_basis_slots += other.same_basis_slots;
    index_errors += other.index_errors;
    key_errors += other.key_errors;
    return *this;
}

Tally tally(std::span<const TrialOutcome> outcomes) {
    Tally t;
    for (const auto& o : outcomes) t.add(o);
    return t;
}

Metric Metric::proportion(std::string name, std::uint64_t hits, std::uint64_t total, std::optional<double> analytic) {
    Metric m;
    m.name = std::move(name);
    m.hits = hits;
    m.total = total;
    m.analytic = analytic;
    if (total == 0) return m;
    const double p = static_cast<double>(hits) / static_cast<double>(total);
    m.empirical = p;
    m.std_error = std::sqrt(p * (1 - p) / static_cast<double>(total));
    if (analytic) {
        const double diff = p - *analytic;
        if (m.std_error > 0)
            m.z = diff / m.std_error;
        else
            // A degenerate sample (all hits or none) agrees only if theory is exact there.
            m.z = std::abs(diff) <= 1e-12 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
    return m;
}

const Metric* SimReport::metric(std::string_view name) const {
    for (const auto& m : metrics)
        if (m.name == name) return &m;
    return nullptr;
}

double SimReport::worst_abs_z() const {
    double worst = 0;
    for (const auto& m : metrics)
        if (m.z) worst = std::max(worst, std::abs(*m.z));
    return worst;
}

bool SimReport::passed(double threshold) const {
    return std::none_of(metrics.begin(), metrics.end(), [&](const Metric& m) { return m.flagged(threshold); });
}

SimReport summarize(const ProtocolConfig& config, const Tally& counts, std::uint64_t seed) {
    const Basisd* eve = config.eve_basis();
    SimReport r;
    r.protocol = config.c() == 2 ? "KMB09" : "HSE";
    r.d = config.d();
    r.c = config.c();
    r.set_id = config.set.id();
    r.eve = eve_name(config);
    r.n_trials = counts.trials;
    r.seed = seed;
    r.counts = counts;
    r.metrics.push_back(Metric::proportion("r_s", counts.sifted, counts.trials, key_rate(config)));
    r.metrics.push_back(Metric::proportion("r_it", counts.index_errors, counts.same_basis_slots, iter(config)));
    r.metrics.push_back(Metric::proportion("r_qb", counts.key_errors, counts.sifted,
                                           eve != nullptr && config.intercept_fraction > 0 ? qber(config) : 0.0));
    return r;
}

SimReport estimate_rates(const ProtocolConfig& config, std::uint64_t n_trials, std::uint64_t seed, unsigned threads) {
    if (n_trials == 0) throw InvalidParameter("need at least one trial");
    const auto start = std::chrono::steady_clock::now();
    const Tally counts = parallel_sum<Tally>(n_trials, threads, [&](std::uint64_t first, std::uint64_t last) {
        Tally t;
        for (std::uint64_t id = first; id < last; ++id) t.add(run_trial(config, id, seed));
        return t;
    });
    SimReport r = summarize(config, counts, seed);
    r.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

SimReport simulate_bkb01(const ProtocolConfig& config, std::uint64_t n_trials, std::uint64_t seed, unsigned threads) {
    if (n_trials == 0) throw InvalidParameter("need at least one trial");
    const auto start = std::chrono::steady_clock::now();
    const int c = config.c();
    const int d = config.d();
    const Tally counts = parallel_sum<Tally>(n_trials, threads, [&](std::uint64_t first, std::uint64_t last) {
        Tally t;
        for (std::uint64_t id = first; id < last; ++id) {
            RandomStream alice = trial_stream(seed, Role::alice, id);
            const int basis = static_cast<int>(alice.below(static_cast<std::uint32_t>(c)));
            const int index = static_cast<int>(alice.below(static_cast<std::uint32_t>(d)));
            StateVectord state = config.set[basis].vector(index);
            if (config.eve) {
                RandomStream eve = trial_stream(seed, Role::eve, id);
                state = eve_intercept(state, *config.eve, config.intercept_fraction, eve).resent;
            }
            RandomStream bob = trial_stream(seed, Role::bob, id);
            const int bob_basis = static_cast<int>(bob.below(static_cast<std::uint32_t>(c)));
            const auto outcome = born_sample(state, config.set[bob_basis], bob);
            ++t.trials;
            if (bob_basis == basis) {
                ++t.sifted;
                if (outcome != index) ++t.key_errors;
            }
        }
        return t;
    });

    SimReport r;
    r.protocol = "BKB01";
    r.d = d;
    r.c = c;
    r.set_id = config.set.id();
    r.eve = eve_name(config);
    r.n_trials = n_trials;
    r.seed = seed;
    r.counts = counts;
    r.metrics.push_back(Metric::proportion("r_s", counts.sifted, counts.trials, 1.0 / c));
    r.metrics.push_back(Metric::proportion("r_qb", counts.key_errors, counts.sifted, iter(config)));
    r.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

SweepReport sweep(std::span<const SweepItem> items, std::uint64_t n_trials, std::uint64_t seed, unsigned threads) {
    SweepReport out;
    for (const auto& item : items) {
        SimReport r = estimate_rates(item.config, n_trials, seed, threads);
        if (!item.name.empty()) r.protocol = item.name;
        out.worst_abs_z = std::max(out.worst_abs_z, r.worst_abs_z());
        out.passed = out.passed && r.passed();
        out.reports.push_back(std::move(r));
    }
    return out;
}

}  // namespace hse
