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

// Alice and Bob endpoints over a Transport, and an intercept-and-resend relay.
//
// Session flow, lock-step:
//   alice -> bob   hello            bob -> alice  hello (must match)
//   per trial t:
//     alice -> bob   quantum_state(t, 0) ... quantum_state(t, c-2)
//     alice -> bob   index_announce(t, a)
//     bob -> alice   sift_report(t, sifted)
//   alice -> bob   key_compare(...)   letters of the disclosed trials
//   alice -> bob   bye                bob -> alice  bye
//
// Alice's letter never travels with a trial; it is disclosed only after the
// last sift report so both sides can estimate the error rates.

#include <cstdint>
#include <optional>
#include <vector>

#include "hse/config.hpp"
#include "hse/protocol.hpp"
#include "hse/transport.hpp"

namespace hse {

struct AliceOptions {
    /// Fraction of trials (a prefix of the run) whose letters are disclosed.
    double disclose_fraction = 1.0;
    /// Raw string S; drawn at random when absent.
    std::optional<std::vector<int>> letters;
    std::size_t disclose_chunk = 4096;
};

struct AliceLog {
    std::vector<int> raw_string;
    std::vector<int> key;
    std::uint64_t trials = 0;
    std::uint64_t states_sent = 0;
    std::uint64_t disclosed = 0;
};

AliceLog run_alice_session(Transport& transport, const ProtocolConfig& config, std::uint64_t n_trials,
                           std::uint64_t seed, const AliceOptions& options = {});

/// Bob's view of one trial; x is known only once disclosed.
struct BobRecord {
    std::uint64_t trial_id = 0;
    std::vector<int> a;
    std::vector<int> y;
    std::vector<int> b;
    bool sifted = false;
    std::optional<int> bob_letter;
    std::optional<int> x;
};

struct BobLog {
    std::vector<BobRecord> records;
    std::vector<int> key;

    /// Full outcomes of the disclosed trials, in trial order.
    std::vector<TrialOutcome> outcomes(int c) const;
};

/// Runs Bob until Alice says bye. When expected_trials is given, a different
/// trial count is a ProtocolError.
BobLog run_bob_session(Transport& transport, const ProtocolConfig& config, std::uint64_t seed,
                       std::optional<std::uint64_t> expected_trials = std::nullopt);

struct InterceptionLog {
    struct Entry {
        std::uint64_t trial_id = 0;
        int slot = 0;
        int outcome = 0;
    };
    std::vector<Entry> entries;
    std::uint64_t relayed_to_bob = 0;
    std::uint64_t relayed_to_alice = 0;
};

/// Relays every line between the two transports. quantum_state payloads from
/// Alice are measured in Eve's basis and replaced by the resent eigenvector;
/// every other line is forwarded byte for byte. Returns once each side has
/// said bye (or closed), after closing both transports.
InterceptionLog run_mitm(Transport& alice_side, Transport& bob_side, EveInterceptor& eve);

}  // namespace hse
