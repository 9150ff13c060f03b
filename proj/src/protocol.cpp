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

#include "hse/protocol.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace hse {

RandomStream trial_stream(std::uint64_t seed, Role role, std::uint64_t trial_id) {
    return RandomStream(seed, static_cast<std::uint32_t>(role), trial_id);
}

Preparation alice_prepare(int x, const ProtocolConfig& config, RandomStream& rng) {
    if (x < 0 || x >= config.c()) throw InvalidParameter("letter " + std::to_string(x) + " outside the alphabet");
    Preparation p;
    p.x = x;
    const auto slots = static_cast<std::size_t>(config.c() - 1);
    p.a.reserve(slots);
    p.states.reserve(slots);
    const Basisd& basis = config.set[x];
    for (std::size_t k = 0; k < slots; ++k) {
        const int index = static_cast<int>(rng.below(static_cast<std::uint32_t>(config.d())));
        p.a.push_back(index);
        p.states.push_back(basis.vector(index));
    }
    return p;
}

Interception eve_intercept(const StateVectord& state, const Basisd& eve, RandomStream& rng) {
    const Eigen::Index outcome = born_sample(state, eve, rng);
    return {outcome, eve.vector(outcome)};
}

Interception eve_intercept(const StateVectord& state, const Basisd& eve, double fraction, RandomStream& rng) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw InvalidParameter("intercept fraction must lie in [0, 1]");
    if (fraction < 1.0 && rng.uniform() >= fraction) return {0, state, false};
    return eve_intercept(state, eve, rng);
}

std::vector<int> bob_choose_bases(int c, RandomStream& rng) {
    if (c < 2) throw InvalidParameter("alphabet size must be >= 2");
    std::vector<int> letters(static_cast<std::size_t>(c));
    std::iota(letters.begin(), letters.end(), 0);
    for (int k = 0; k + 1 < c; ++k) {
        const int j = k + static_cast<int>(rng.below(static_cast<std::uint32_t>(c - k)));
        std::swap(letters[static_cast<std::size_t>(k)], letters[static_cast<std::size_t>(j)]);
    }
    letters.pop_back();
    return letters;
}

bool sift(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) throw InvalidParameter("index tuples differ in length");
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k] == b[k]) return false;
    return true;
}

int infer_letter(std::span<const int> y, int c) {
    if (static_cast<int>(y.size()) != c - 1) throw InvalidParameter("basis tuple must have c - 1 letters");
    std::vector<bool> seen(static_cast<std::size_t>(c), false);
    for (int letter : y) {
        if (letter < 0 || letter >= c || seen[static_cast<std::size_t>(letter)])
            throw InvalidParameter("basis tuple letters must be distinct and in range");
        seen[static_cast<std::size_t>(letter)] = true;
    }
    return static_cast<int>(std::find(seen.begin(), seen.end(), false) - seen.begin());
}

TrialOutcome make_outcome(std::uint64_t trial_id, int x, std::vector<int> a, std::vector<int> y, std::vector<int> b,
                          int c) {
    TrialOutcome out;
    out.trial_id = trial_id;
    out.x = x;
    out.sifted = sift(a, b);
    if (out.sifted) out.bob_letter = infer_letter(y, c);
    for (std::size_t k = 0; k < y.size(); ++k)
        if (y[k] == x && b[k] != a[k]) out.index_error_slots.push_back(static_cast<int>(k));
    out.a = std::move(a);
    out.y = std::move(y);
    out.b = std::move(b);
    return out;
}

AliceSession::AliceSession(const ProtocolConfig& config, std::uint64_t seed, std::optional<std::vector<int>> letters)
    : config_(config), seed_(seed), letters_(std::move(letters)) {
    if (letters_)
        for (int x : *letters_)
            if (x < 0 || x >= config_.c()) throw InvalidParameter("raw string holds a letter outside the alphabet");
}

const Preparation& AliceSession::prepare(std::uint64_t trial_id) {
    RandomStream rng = trial_stream(seed_, Role::alice, trial_id);
    int x = 0;
    if (letters_) {
        if (trial_id >= letters_->size()) throw InvalidParameter("raw string exhausted");
        x = (*letters_)[trial_id];
    } else {
        x = static_cast<int>(rng.below(static_cast<std::uint32_t>(config_.c())));
    }
    raw_.push_back(x);
    pending_ = alice_prepare(x, config_, rng);
    pending_id_ = trial_id;
    return *pending_;
}

void AliceSession::on_sift(std::uint64_t trial_id, bool sifted) {
    if (!pending_ || trial_id != pending_id_)
        throw ProtocolError("sift verdict for trial " + std::to_string(trial_id) + " which is not pending");
    if (sifted) key_.push_back(pending_->x);
    pending_.reset();
}

BobSession::BobSession(const ProtocolConfig& config, std::uint64_t seed) : config_(config), seed_(seed) {}

void BobSession::begin_trial(std::uint64_t trial_id) {
    trial_id_ = trial_id;
    rng_.emplace(trial_stream(seed_, Role::bob, trial_id));
    y_ = bob_choose_bases(config_.c(), *rng_);
    b_.clear();
    active_ = true;
}

int BobSession::measure(int slot, const StateVectord& state) {
    if (!active_) throw ProtocolError("state received outside a trial");
    if (slot != static_cast<int>(b_.size()) || slot >= config_.c() - 1)
        throw ProtocolError("unexpected slot " + std::to_string(slot));
    const Basisd& basis = config_.set[y_[static_cast<std::size_t>(slot)]];
    const int outcome = static_cast<int>(born_sample(state, basis, *rng_));
    b_.push_back(outcome);
    return outcome;
}

BobSession::Verdict BobSession::on_announce(std::span<const int> a) {
    if (!active_) throw ProtocolError("announcement outside a trial");
    if (static_cast<int>(a.size()) != config_.c() - 1)
        throw ProtocolError("announcement carries " + std::to_string(a.size()) + " indices, expected " +
                            std::to_string(config_.c() - 1));
    if (b_.size() != a.size()) throw ProtocolError("announcement before every slot was measured");
    for (int index : a)
        if (index < 0 || index >= config_.d()) throw ProtocolError("announced index out of range");
    active_ = false;
    Verdict v;
    v.sifted = sift(a, b_);
    if (v.sifted) {
        v.letter = infer_letter(y_, config_.c());
        key_.push_back(*v.letter);
    }
    return v;
}

EveInterceptor::EveInterceptor(Basisd basis, std::uint64_t seed, double fraction)
    : basis_(std::move(basis)), seed_(seed), fraction_(fraction) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw InvalidParameter("intercept fraction must lie in [0, 1]");
}

Interception EveInterceptor::intercept(std::uint64_t trial_id, const StateVectord& state) {
    if (!trial_id_ || *trial_id_ != trial_id) {
        trial_id_ = trial_id;
        rng_.emplace(trial_stream(seed_, Role::eve, trial_id));
    }
    return eve_intercept(state, basis_, fraction_, *rng_);
}

TrialOutcome run_trial(const ProtocolConfig& config, std::uint64_t trial_id, std::uint64_t seed,
                       std::optional<int> letter) {
    RandomStream alice_rng = trial_stream(seed, Role::alice, trial_id);
    const int x = letter ? *letter : static_cast<int>(alice_rng.below(static_cast<std::uint32_t>(config.c())));
    Preparation prep = alice_prepare(x, config, alice_rng);

    RandomStream bob_rng = trial_stream(seed, Role::bob, trial_id);
    std::vector<int> y = bob_choose_bases(config.c(), bob_rng);

    std::optional<RandomStream> eve_rng;
    if (config.eve) eve_rng.emplace(trial_stream(seed, Role::eve, trial_id));

    std::vector<int> b;
    b.reserve(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) {
        const StateVectord& sent = prep.states[k];
        std::optional<Interception> intercepted;
        if (eve_rng) intercepted = eve_intercept(sent, *config.eve, config.intercept_fraction, *eve_rng);
        const StateVectord& received = intercepted ? intercepted->resent : sent;
        b.push_back(static_cast<int>(born_sample(received, config.set[y[k]], bob_rng)));
    }
    return make_outcome(trial_id, x, std::move(prep.a), std::move(y), std::move(b), config.c());
}

}  // namespace hse
