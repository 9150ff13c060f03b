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

#include <array>
#include <cmath>
#include <set>
#include <vector>

#include "hse/random.hpp"

namespace hse {
namespace {

using Block = RandomStream::Block;
using Key = RandomStream::Key;

// Published Philox4x32-10 known-answer vectors.
TEST(Philox, KnownAnswerZero) {
    EXPECT_EQ(RandomStream::philox({0, 0, 0, 0}, {0, 0}), (Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(Philox, KnownAnswerOnes) {
    EXPECT_EQ(RandomStream::philox({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
              (Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, KnownAnswerPi) {
    EXPECT_EQ(RandomStream::philox({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RandomStream, SameIdentitySameSequence) {
    RandomStream a(42, 3, 17), b(42, 3, 17);
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomStream, IdentitiesDiffer) {
    std::set<std::uint64_t> firsts;
    for (std::uint64_t seed : {1u, 2u})
        for (std::uint32_t tag : {0u, 1u, 2u})
            for (std::uint64_t stream : {0ull, 1ull, 1ull << 40}) firsts.insert(RandomStream(seed, tag, stream).next_u64());
    EXPECT_EQ(firsts.size(), 18u);
}

TEST(RandomStream, UniformInUnitInterval) {
    RandomStream r(5);
    double sum = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    // mean 1/2, sd 1/sqrt(12 n)
    EXPECT_NEAR(sum / n, 0.5, 5.0 / std::sqrt(12.0 * n));
}

TEST(RandomStream, BelowIsUnbiased) {
    for (std::uint32_t bound : {1u, 2u, 3u, 7u, 10u}) {
        RandomStream r(11, 0, bound);
        std::vector<int> counts(bound, 0);
        const int n = 70000;
        for (int i = 0; i < n; ++i) {
            const auto v = r.below(bound);
            ASSERT_LT(v, bound);
            ++counts[v];
        }
        double chi2 = 0;
        const double expected = static_cast<double>(n) / bound;
        for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
        // generous: mean bound - 1, sd sqrt(2 (bound - 1))
        EXPECT_LT(chi2, (bound - 1) + 8.0 * std::sqrt(2.0 * bound) + 1) << "bound " << bound;
    }
    RandomStream r(1);
    EXPECT_EQ(r.below(0), 0u);
}

TEST(RandomStream, BitsBalanced) {
    RandomStream r(99);
    std::array<int, 64> ones{};
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const auto v = r.next_u64();
        for (int b = 0; b < 64; ++b) ones[b] += (v >> b) & 1;
    }
    for (int b = 0; b < 64; ++b) EXPECT_NEAR(ones[b], n / 2, 5 * std::sqrt(n / 4.0)) << "bit " << b;
}

}  // namespace
}  // namespace hse
