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

#include "hse/session.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>
#include <unordered_map>

namespace hse {
namespace {

Hello hello_for(const ProtocolConfig& config) {
    return Hello{kProtocolVersion, config.c(), config.d(), config.set.id()};
}

void check_hello(const Hello& ours, const Hello& theirs) {
    if (ours.protocol_version != theirs.protocol_version)
        throw HandshakeError("protocol version " + std::to_string(theirs.protocol_version) + ", expected " +
                             std::to_string(ours.protocol_version));
    if (ours.c != theirs.c || ours.d != theirs.d)
        throw HandshakeError("peer runs (c, d) = (" + std::to_string(theirs.c) + ", " + std::to_string(theirs.d) +
                             "), expected (" + std::to_string(ours.c) + ", " + std::to_string(ours.d) + ")");
    if (ours.basis_set_id != theirs.basis_set_id)
        throw HandshakeError("peer uses basis set '" + theirs.basis_set_id + "', expected '" + ours.basis_set_id + "'");
}

Message expect_message(Transport& t, const char* waiting_for) {
    auto msg = receive(t);
    if (!msg) throw SessionError(std::string("peer closed while waiting for ") + waiting_for);
    if (const auto* bye = std::get_if<Bye>(&*msg); bye && std::string_view(waiting_for) != "bye")
        throw ProtocolError(std::string("peer said bye (") + bye->reason + ") while waiting for " + waiting_for);
    return *msg;
}

void say_bye_quietly(Transport& t, const std::string& reason) {
    try {
        send(t, Bye{reason});
    } catch (...) {
    }
}

}  // namespace

AliceLog run_alice_session(Transport& transport, const ProtocolConfig& config, std::uint64_t n_trials,
                           std::uint64_t seed, const AliceOptions& options) {
    if (!(options.disclose_fraction >= 0 && options.disclose_fraction <= 1))
        throw InvalidParameter("disclose fraction must lie in [0, 1]");
    AliceSession alice(config, seed, options.letters);
    AliceLog log;

    const Hello ours = hello_for(config);
    send(transport, ours);
    const Message reply = expect_message(transport, "hello");
    const auto* theirs = std::get_if<Hello>(&reply);
    if (theirs == nullptr) throw ProtocolError("expected hello, got " + std::string(message_type(reply)));
    try {
        check_hello(ours, *theirs);
    } catch (const HandshakeError& e) {
        say_bye_quietly(transport, std::string("handshake: ") + e.what());
        throw;
    }

    for (std::uint64_t t = 0; t < n_trials; ++t) {
        const Preparation& prep = alice.prepare(t);
        for (std::size_t k = 0; k < prep.states.size(); ++k) {
            const auto& amps = prep.states[k].amplitudes();
            send(transport, QuantumState{t, static_cast<int>(k), {amps.begin(), amps.end()}});
            ++log.states_sent;
        }
        send(transport, IndexAnnounce{t, prep.a});
        const Message msg = expect_message(transport, "sift_report");
        const auto* report = std::get_if<SiftReport>(&msg);
        if (report == nullptr) throw ProtocolError("expected sift_report, got " + std::string(message_type(msg)));
        if (report->trial_id != t)
            throw ProtocolError("sift_report for trial " + std::to_string(report->trial_id) + ", expected " +
                                std::to_string(t));
        alice.on_sift(t, report->sifted);
    }

    const auto disclosed = static_cast<std::uint64_t>(std::ceil(options.disclose_fraction * static_cast<double>(n_trials)));
    const auto& raw = alice.raw_string();
    const std::size_t chunk = std::max<std::size_t>(1, options.disclose_chunk);
    for (std::uint64_t first = 0; first < disclosed; first += chunk) {
        const std::uint64_t last = std::min<std::uint64_t>(disclosed, first + chunk);
        send(transport, KeyCompare{first, {raw.begin() + static_cast<std::ptrdiff_t>(first),
                                           raw.begin() + static_cast<std::ptrdiff_t>(last)}});
    }
    send(transport, Bye{"done"});
    const Message bye = expect_message(transport, "bye");
    if (!std::holds_alternative<Bye>(bye)) throw ProtocolError("expected bye, got " + std::string(message_type(bye)));

    log.raw_string = alice.raw_string();
    log.key = alice.key();
    log.trials = n_trials;
    log.disclosed = disclosed;
    return log;
}

std::vector<TrialOutcome> BobLog::outcomes(int c) const {
    std::vector<TrialOutcome> out;
    for (const auto& r : records)
        if (r.x) out.push_back(make_outcome(r.trial_id, *r.x, r.a, r.y, r.b, c));
    return out;
}

BobLog run_bob_session(Transport& transport, const ProtocolConfig& config, std::uint64_t seed,
                       std::optional<std::uint64_t> expected_trials) {
    BobSession bob(config, seed);
    BobLog log;
    std::unordered_map<std::uint64_t, std::size_t> by_trial;

    const Message first = expect_message(transport, "hello");
    const auto* theirs = std::get_if<Hello>(&first);
    if (theirs == nullptr) throw ProtocolError("expected hello, got " + std::string(message_type(first)));
    const Hello ours = hello_for(config);
    send(transport, ours);
    check_hello(ours, *theirs);

    bool in_trial = false;
    std::optional<std::uint64_t> last_trial;
    try {
        for (;;) {
            const Message msg = expect_message(transport, "bye");
            if (const auto* qs = std::get_if<QuantumState>(&msg)) {
                if (!in_trial) {
                    if (last_trial && qs->trial_id <= *last_trial)
                        throw ProtocolError("trial ids must increase (" + std::to_string(qs->trial_id) + " after " +
                                            std::to_string(*last_trial) + ")");
                    if (qs->slot != 0) throw ProtocolError("trial " + std::to_string(qs->trial_id) + " opens at slot " +
                                                           std::to_string(qs->slot));
                    bob.begin_trial(qs->trial_id);
                    in_trial = true;
                } else if (qs->trial_id != bob.trial_id()) {
                    throw ProtocolError("state for trial " + std::to_string(qs->trial_id) + " while trial " +
                                        std::to_string(bob.trial_id()) + " is open");
                }
                if (static_cast<int>(qs->amps.size()) != config.d())
                    throw ProtocolError("state of dimension " + std::to_string(qs->amps.size()));
                ComplexVector<double> amps(config.d());
                for (int k = 0; k < config.d(); ++k) amps(k) = qs->amps[static_cast<std::size_t>(k)];
                bob.measure(qs->slot, StateVectord(std::move(amps)));
            } else if (const auto* ann = std::get_if<IndexAnnounce>(&msg)) {
                if (!in_trial || ann->trial_id != bob.trial_id())
                    throw ProtocolError("announcement for trial " + std::to_string(ann->trial_id) + " is out of order");
                const auto verdict = bob.on_announce(ann->a);
                in_trial = false;
                last_trial = ann->trial_id;
                by_trial.emplace(ann->trial_id, log.records.size());
                log.records.push_back({ann->trial_id, ann->a, bob.y(), bob.b(), verdict.sifted, verdict.letter, {}});
                send(transport, SiftReport{ann->trial_id, verdict.sifted});
            } else if (const auto* kc = std::get_if<KeyCompare>(&msg)) {
                for (std::size_t i = 0; i < kc->letters.size(); ++i) {
                    const auto it = by_trial.find(kc->trial_id + i);
                    if (it == by_trial.end())
                        throw ProtocolError("key_compare names unknown trial " + std::to_string(kc->trial_id + i));
                    if (kc->letters[i] >= config.c()) throw ProtocolError("key_compare letter outside the alphabet");
                    log.records[it->second].x = kc->letters[i];
                }
            } else if (std::holds_alternative<Bye>(msg)) {
                if (in_trial) throw ProtocolError("bye in the middle of a trial");
                send(transport, Bye{"done"});
                break;
            } else {
                throw ProtocolError("unexpected " + std::string(message_type(msg)) + " message");
            }
        }
    } catch (const ProtocolError& e) {
        say_bye_quietly(transport, std::string("protocol error: ") + e.what());
        throw;
    }
    if (expected_trials && log.records.size() != *expected_trials)
        throw ProtocolError("session carried " + std::to_string(log.records.size()) + " trials, expected " +
                            std::to_string(*expected_trials));
    log.key = bob.key();
    return log;
}

InterceptionLog run_mitm(Transport& alice_side, Transport& bob_side, EveInterceptor& eve) {
    InterceptionLog log;
    std::exception_ptr back_error;

    // Each direction ends after relaying its sender's bye, or at end of stream.
    std::thread backward([&] {
        try {
            while (auto line = bob_side.receive_line()) {
                alice_side.send_line(*line);
                ++log.relayed_to_alice;
                if (std::holds_alternative<Bye>(decode(*line, bob_side.lines_received()))) break;
            }
        } catch (...) {
            back_error = std::current_exception();
            alice_side.close();
            bob_side.close();
        }
    });

    std::exception_ptr forward_error;
    try {
        while (auto line = alice_side.receive_line()) {
            const Message msg = decode(*line, alice_side.lines_received());
            if (const auto* hello = std::get_if<Hello>(&msg); hello && hello->d != eve.basis().dim())
                throw HandshakeError("eavesdropper basis has dimension " + std::to_string(eve.basis().dim()) +
                                     " but the session runs d = " + std::to_string(hello->d));
            if (const auto* qs = std::get_if<QuantumState>(&msg)) {
                ComplexVector<double> amps(static_cast<Eigen::Index>(qs->amps.size()));
                for (std::size_t k = 0; k < qs->amps.size(); ++k) amps(static_cast<Eigen::Index>(k)) = qs->amps[k];
                const auto hit = eve.intercept(qs->trial_id, StateVectord(std::move(amps)));
                if (hit.measured) {
                    log.entries.push_back({qs->trial_id, qs->slot, static_cast<int>(hit.outcome)});
                    const auto& resent = hit.resent.amplitudes();
                    send(bob_side, QuantumState{qs->trial_id, qs->slot, {resent.begin(), resent.end()}});
                } else {
                    bob_side.send_line(*line);
                }
            } else {
                bob_side.send_line(*line);
            }
            ++log.relayed_to_bob;
            if (std::holds_alternative<Bye>(msg)) break;
        }
    } catch (...) {
        forward_error = std::current_exception();
        alice_side.close();
        bob_side.close();
    }
    backward.join();
    alice_side.close();
    bob_side.close();
    if (forward_error) std::rethrow_exception(forward_error);
    if (back_error) std::rethrow_exception(back_error);
    return log;
}

}  // namespace hse
