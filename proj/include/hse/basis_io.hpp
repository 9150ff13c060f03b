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

// Basis-set documents:
//
//   {"d": 2, "c": 3, "id": "optional-name",
//    "bases": [{"label": "B0", "vectors": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}, ...]}
//
// Each entry of "vectors" is one basis vector given as d [re, im] pairs. The
// loader enforces every BasisSet invariant and throws on violation.

#include <filesystem>
#include <string>
#include <string_view>

#include "hse/bases.hpp"

namespace hse {

BasisSetd parse_basis_set(std::string_view text);
BasisSetd load_basis_set(const std::filesystem::path& path);

std::string format_basis_set(const BasisSetd& set);
void save_basis_set(const BasisSetd& set, const std::filesystem::path& path);

/// Stable 64-bit FNV-1a digest of the amplitudes, used as a set id when the
/// document does not name itself.
std::uint64_t basis_set_digest(const BasisSetd& set);

}  // namespace hse
