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

#include <array>
#include <cstdint>
#include <limits>

namespace hse {

/// Counter-based deterministic generator (Philox4x32-10).
///
/// A stream is identified by (seed, tag, stream). The seed is the Philox key;
/// the tag and stream index occupy the upper three counter words and the lower
/// word counts blocks. Two streams with different identities never share a
/// counter value, so substreams are independent of the order in which they
/// are created or consumed. Single owner; not thread-safe.
class RandomStream {
public:
    using result_type = std::uint64_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    explicit RandomStream(std::uint64_t seed, std::uint32_t tag = 0, std::uint64_t stream = 0) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return next_u64(); }

    std::uint64_t next_u64() noexcept;
    std::uint32_t next_u32() noexcept;

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept;

    /// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
    /// bound == 0 returns 0.
    std::uint32_t below(std::uint32_t bound) noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint32_t tag() const noexcept { return tag_; }
    std::uint64_t stream() const noexcept { return stream_; }

    /// Raw Philox4x32-10 bijection. Exposed for known-answer tests.
    static Block philox(Block counter, Key key) noexcept;

private:
    void refill() noexcept;

    std::uint64_t seed_;
    std::uint32_t tag_;
    std::uint64_t stream_;
    std::uint32_t block_ = 0;
    Block buffer_{};
    unsigned used_ = 4;
};

}  // namespace hse
