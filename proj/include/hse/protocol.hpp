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

// Per-round state machines for Alice, Bob and an intercept-and-resend Eve.
//
// One round ("trial"): Alice picks a letter x and c - 1 indices a_k, sends
// vector a_k of B^x for each slot k; Bob measures slot k in B^{y_k} for a
// tuple y of c - 1 distinct letters; Alice announces a (never x); the round
// is kept iff a_k != b_k for every k, and Bob takes the letter missing from y.
//
// Randomness: trial t of role r draws from RandomStream(seed, r, t), so a
// trial replays identically regardless of which other trials ran, and adding
// or removing Eve leaves Alice's and Bob's draws untouched.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hse/config.hpp"
#include "hse/random.hpp"

namespace hse {

enum class Role : std::uint32_t { alice = 1, bob = 2, eve = 3 };

RandomStream trial_stream(std::uint64_t seed, Role role, std::uint64_t trial_id);

struct Preparation {
    int x = 0;
    std::vector<int> a;                ///< c - 1 indices, 0..d-1, repeats allowed
    std::vector<StateVectord> states;  ///< states[k] = vector a[k] of B^x
};

/// Draws the c - 1 indices for letter x and builds the states to send.
Preparation alice_prepare(int x, const ProtocolConfig& config, RandomStream& rng);

/// Measures `state` in Eve's basis and returns the eigenvector she resends,
/// together with her outcome.
struct Interception {
    Eigen::Index outcome = 0;
    StateVectord resent;
    /// False when Eve let the state through untouched.
    bool measured = true;
};
Interception eve_intercept(const StateVectord& state, const Basisd& eve, RandomStream& rng);
/// Intercepts with probability fraction. For fraction == 1 no extra draw is
/// made, so the stream matches eve_intercept.
Interception eve_intercept(const StateVectord& state, const Basisd& eve, double fraction, RandomStream& rng);

/// Uniform ordered tuple of c - 1 distinct letters.
std::vector<int> bob_choose_bases(int c, RandomStream& rng);

/// True iff a[k] != b[k] for every k.
bool sift(std::span<const int> a, std::span<const int> b);

/// The unique letter of 0..c-1 absent from y.
int infer_letter(std::span<const int> y, int c);

struct TrialOutcome {
    std::uint64_t trial_id = 0;
    int x = 0;
    std::vector<int> a;
    std::vector<int> y;
    std::vector<int> b;
    bool sifted = false;
    std::optional<int> bob_letter;
    /// Slots measured in Alice's basis whose outcome differs from a[k].
    std::vector<int> index_error_slots;

    bool key_error() const noexcept { return sifted && bob_letter && *bob_letter != x; }
    friend bool operator==(const TrialOutcome&, const TrialOutcome&) = default;
};

/// Assembles the outcome record once x, a, y and b are known.
TrialOutcome make_outcome(std::uint64_t trial_id, int x, std::vector<int> a, std::vector<int> y, std::vector<int> b,
                          int c);

class AliceSession {
public:
    /// letters, when given, is the raw string S (trial t uses letters[t]);
    /// otherwise letters are drawn uniformly.
    AliceSession(const ProtocolConfig& config, std::uint64_t seed, std::optional<std::vector<int>> letters = std::nullopt);

    /// Chooses x and a for trial_id and returns the states to send.
    const Preparation& prepare(std::uint64_t trial_id);
    /// Bob's verdict for the pending trial; kept letters join the key.
    void on_sift(std::uint64_t trial_id, bool sifted);

    const std::vector<int>& raw_string() const noexcept { return raw_; }
    const std::vector<int>& key() const noexcept { return key_; }
    const std::optional<Preparation>& pending() const noexcept { return pending_; }

private:
    const ProtocolConfig& config_;
    std::uint64_t seed_;
    std::optional<std::vector<int>> letters_;
    std::vector<int> raw_;
    std::vector<int> key_;
    std::optional<Preparation> pending_;
    std::uint64_t pending_id_ = 0;
};

class BobSession {
public:
    struct Verdict {
        bool sifted = false;
        std::optional<int> letter;
    };

    BobSession(const ProtocolConfig& config, std::uint64_t seed);

    /// Picks Bob's basis tuple for trial_id.
    void begin_trial(std::uint64_t trial_id);
    /// Measures slot k (slots arrive in order 0..c-2); returns b_k.
    int measure(int slot, const StateVectord& state);
    /// Applies the sifting rule to Alice's announced indices.
    Verdict on_announce(std::span<const int> a);

    std::uint64_t trial_id() const noexcept { return trial_id_; }
    const std::vector<int>& y() const noexcept { return y_; }
    const std::vector<int>& b() const noexcept { return b_; }
    const std::vector<int>& key() const noexcept { return key_; }

private:
    const ProtocolConfig& config_;
    std::uint64_t seed_;
    std::uint64_t trial_id_ = 0;
    bool active_ = false;
    std::optional<RandomStream> rng_;
    std::vector<int> y_;
    std::vector<int> b_;
    std::vector<int> key_;
};

class EveInterceptor {
public:
    EveInterceptor(Basisd basis, std::uint64_t seed, double fraction = 1.0);

    /// Slots of one trial must be intercepted in order.
    Interception intercept(std::uint64_t trial_id, const StateVectord& state);
    const Basisd& basis() const noexcept { return basis_; }

private:
    Basisd basis_;
    std::uint64_t seed_;
    double fraction_;
    std::optional<std::uint64_t> trial_id_;
    std::optional<RandomStream> rng_;
};

/// One complete round, Eve included when the config has one.
TrialOutcome run_trial(const ProtocolConfig& config, std::uint64_t trial_id, std::uint64_t seed,
                       std::optional<int> letter = std::nullopt);

}  // namespace hse
