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
#include <string>

#include "hse/codec.hpp"
#include "hse/error.hpp"
#include "hse/random.hpp"

namespace hse {
namespace {

using cd = std::complex<double>;

Message random_message(RandomStream& rng) {
    switch (rng.below(6)) {
        case 0:
            return Hello{kProtocolVersion, 2 + int(rng.below(20)), 2 + int(rng.below(20)), "set-" + std::to_string(rng.below(1000))};
        case 1: {
            const int d = 2 + int(rng.below(8));
            std::vector<cd> amps;
            double norm = 0;
            for (int i = 0; i < d; ++i) {
                amps.emplace_back(rng.uniform() - 0.5, rng.uniform() - 0.5);
                norm += std::norm(amps.back());
            }
            for (auto& a : amps) a /= std::sqrt(norm);
            return QuantumState{rng.next_u64() >> 12, int(rng.below(10)), amps};
        }
        case 2: {
            std::vector<int> a(1 + rng.below(6));
            for (auto& v : a) v = int(rng.below(9));
            return IndexAnnounce{rng.next_u64() >> 12, a};
        }
        case 3:
            return SiftReport{rng.next_u64() >> 12, rng.below(2) == 1};
        case 4: {
            std::vector<int> letters(rng.below(50));
            for (auto& v : letters) v = int(rng.below(9));
            return KeyCompare{rng.next_u64() >> 12, letters};
        }
        default:
            return Bye{rng.below(2) ? "done" : "protocol error: \"quoted\"\n"};
    }
}

TEST(Codec, RoundTripIsExact) {
    RandomStream rng(1);
    for (int i = 0; i < 5000; ++i) {
        const auto msg = random_message(rng);
        const auto line = encode(msg);
        ASSERT_EQ(line.find('\n'), std::string::npos);
        EXPECT_EQ(decode(line), msg) << line;
        EXPECT_EQ(decode(line + "\n"), msg);
        EXPECT_EQ(decode(line + "\r\n"), msg);
    }
}

TEST(Codec, WireShape) {
    EXPECT_EQ(encode(SiftReport{7, true}), R"({"sifted":true,"trial_id":7,"type":"sift_report"})");
    EXPECT_EQ(message_type(Hello{}), "hello");
    EXPECT_EQ(message_type(KeyCompare{}), "key_compare");
    const auto m = decode(R"({"type":"index_announce","trial_id":3,"a":[1,0]})");
    EXPECT_EQ(std::get<IndexAnnounce>(m), (IndexAnnounce{3, {1, 0}}));
}

void expect_codec_error(const std::string& line) {
    try {
        decode(line, 12);
        ADD_FAILURE() << "accepted: " << line;
    } catch (const CodecError& e) {
        EXPECT_EQ(e.line_no(), 12u);
        EXPECT_FALSE(e.reason().empty());
    }
}

TEST(Codec, RejectsInvalidLines) {
    expect_codec_error("");
    expect_codec_error("{");
    expect_codec_error("[]");
    expect_codec_error(R"({"type":"nope"})");
    expect_codec_error(R"({"trial_id":1,"sifted":true})");
    expect_codec_error(R"({"type":"sift_report","trial_id":1})");
    expect_codec_error(R"({"type":"sift_report","trial_id":1,"sifted":true,"x":2})");
    expect_codec_error(R"({"type":"sift_report","trial_id":-1,"sifted":true})");
    expect_codec_error(R"({"type":"sift_report","trial_id":1.5,"sifted":true})");
    expect_codec_error(R"({"type":"sift_report","trial_id":1,"sifted":1})");
    expect_codec_error(R"({"type":"hello","protocol_version":1,"c":1,"d":2,"basis_set_id":"s"})");
    expect_codec_error(R"({"type":"quantum_state","trial_id":0,"slot":0,"amps":[[1,0],[1,0]]})");
    expect_codec_error(R"({"type":"quantum_state","trial_id":0,"slot":0,"amps":[[1,0,0]]})");
    expect_codec_error(R"({"type":"index_announce","trial_id":0,"a":[-1]})");
    expect_codec_error(R"({"type":"bye"})");
    expect_codec_error("{\"type\":\"bye\",\"reason\":\"ok\"}\n{}");
}

// Random byte edits of valid lines either decode to a valid message or raise
// CodecError; nothing else escapes.
TEST(Codec, FuzzedLinesOnlyRaiseCodecError) {
    RandomStream rng(99);
    const std::string alphabet = "{}[]\":,0123456789.-eE truefalsnul\\";
    int rejected = 0;
    for (int i = 0; i < 20000; ++i) {
        std::string line = encode(random_message(rng));
        const int edits = 1 + int(rng.below(3));
        for (int k = 0; k < edits && !line.empty(); ++k) {
            const auto pos = rng.below(static_cast<std::uint32_t>(line.size()));
            switch (rng.below(3)) {
                case 0: line[pos] = alphabet[rng.below(static_cast<std::uint32_t>(alphabet.size()))]; break;
                case 1: line.erase(pos, 1); break;
                default: line.insert(line.begin() + pos, alphabet[rng.below(static_cast<std::uint32_t>(alphabet.size()))]);
            }
        }
        try {
            const auto m = decode(line);
            EXPECT_EQ(decode(encode(m)), m);
        } catch (const CodecError&) {
            ++rejected;
        }
    }
    EXPECT_GT(rejected, 10000);
}


TEST(Codec, PlusStateAndTruncation) {
    const double s = 1 / std::sqrt(2.0);
    const QuantumState plus{4, 1, {cd(s, 0), cd(s, 0)}};
    const auto line = encode(plus);
    EXPECT_EQ(std::get<QuantumState>(decode(line)), plus);
    EXPECT_THROW(decode(line.substr(0, line.size() / 2)), CodecError);
}

}  // namespace
}  // namespace hse
