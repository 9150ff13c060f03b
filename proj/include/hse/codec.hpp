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

// Wire messages. One message per line, UTF-8 JSON object with a "type"
// discriminator:
//
//   {"type":"hello","protocol_version":1,"c":3,"d":2,"basis_set_id":"sixstate"}
//   {"type":"quantum_state","trial_id":0,"slot":0,"amps":[[0.7071067811865476,0.0],[0.0,0.0]]}
//   {"type":"index_announce","trial_id":0,"a":[1,0]}
//   {"type":"sift_report","trial_id":0,"sifted":true}
//   {"type":"key_compare","trial_id":0,"letters":[2,0,1]}
//   {"type":"bye","reason":"done"}
//
// key_compare discloses Alice's letters for trials trial_id ..
// trial_id + letters.size() - 1. Numbers are written in shortest round-trip
// form, so decode(encode(m)) == m exactly.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hse {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::uint16_t kDefaultPort = 7117;

struct Hello {
    int protocol_version = kProtocolVersion;
    int c = 0;
    int d = 0;
    std::string basis_set_id;
    friend bool operator==(const Hello&, const Hello&) = default;
};

struct QuantumState {
    std::uint64_t trial_id = 0;
    int slot = 0;
    std::vector<std::complex<double>> amps;
    friend bool operator==(const QuantumState&, const QuantumState&) = default;
};

struct IndexAnnounce {
    std::uint64_t trial_id = 0;
    std::vector<int> a;
    friend bool operator==(const IndexAnnounce&, const IndexAnnounce&) = default;
};

struct SiftReport {
    std::uint64_t trial_id = 0;
    bool sifted = false;
    friend bool operator==(const SiftReport&, const SiftReport&) = default;
};

struct KeyCompare {
    std::uint64_t trial_id = 0;
    std::vector<int> letters;
    friend bool operator==(const KeyCompare&, const KeyCompare&) = default;
};

struct Bye {
    std::string reason;
    friend bool operator==(const Bye&, const Bye&) = default;
};

using Message = std::variant<Hello, QuantumState, IndexAnnounce, SiftReport, KeyCompare, Bye>;

/// Type discriminator of a message ("hello", "quantum_state", ...).
std::string_view message_type(const Message& msg);

/// One line of text, without the trailing newline.
std::string encode(const Message& msg);

/// Parses one line (a trailing "\n" or "\r\n" is accepted). Throws CodecError
/// carrying line_no for anything that is not exactly a valid message.
Message decode(std::string_view line, std::size_t line_no = 0);

}  // namespace hse
