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

#include <optional>
#include <utility>

#include "hse/bases.hpp"

namespace hse {

/// Everything that defines one protocol instance: the encoding bases (which
/// fix c and d) and the eavesdropper, if any. An eavesdropper is an
/// intercept-and-resend attacker measuring in one fixed basis; each state is
/// intercepted independently with probability intercept_fraction.
struct ProtocolConfig {
    BasisSetd set;
    std::optional<Basisd> eve;
    double intercept_fraction = 1.0;

    explicit ProtocolConfig(BasisSetd bases, std::optional<Basisd> eve_basis = std::nullopt, double fraction = 1.0)
        : set(std::move(bases)), eve(std::move(eve_basis)), intercept_fraction(fraction) {
        if (eve) detail::require_same_dim(eve->dim(), set.d());
        if (!(fraction >= 0.0 && fraction <= 1.0))
            throw InvalidParameter("intercept fraction must lie in [0, 1]");
    }

    int c() const noexcept { return set.c(); }
    int d() const noexcept { return static_cast<int>(set.d()); }
    const Basisd* eve_basis() const noexcept { return eve ? &*eve : nullptr; }

    /// Eve measuring in the set's own basis B0, the default attack.
    static ProtocolConfig with_default_eve(BasisSetd bases) {
        Basisd b0 = bases[0];
        return ProtocolConfig(std::move(bases), std::move(b0));
    }
};

}  // namespace hse
