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

#include "hse/basis_io.hpp"

#include <json.hpp>

#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hse {
namespace {

using nlohmann::json;

[[noreturn]] void malformed(const std::string& why) {
    throw InvalidParameter("malformed basis-set document: " + why);
}

long require_int(const json& doc, const char* key) {
    if (!doc.contains(key) || !doc[key].is_number_integer()) malformed(std::string("missing integer field '") + key + "'");
    return doc[key].get<long>();
}

std::complex<double> parse_amplitude(const json& pair) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
        malformed("amplitudes must be [re, im] number pairs");
    return {pair[0].get<double>(), pair[1].get<double>()};
}

}  // namespace

BasisSetd parse_basis_set(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        malformed(e.what());
    }
    if (!doc.is_object()) malformed("top level must be an object");
    const long d = require_int(doc, "d");
    const long c = require_int(doc, "c");
    if (d < 2) malformed("d must be >= 2");
    if (!doc.contains("bases") || !doc["bases"].is_array()) malformed("missing 'bases' array");
    const json& entries = doc["bases"];
    if (static_cast<long>(entries.size()) != c)
        malformed("c = " + std::to_string(c) + " but " + std::to_string(entries.size()) + " bases listed");

    std::vector<Basisd> bases;
    for (std::size_t x = 0; x < entries.size(); ++x) {
        const json& entry = entries[x];
        if (!entry.is_object() || !entry.contains("vectors") || !entry["vectors"].is_array())
            malformed("basis " + std::to_string(x) + " has no 'vectors' array");
        const json& vectors = entry["vectors"];
        if (static_cast<long>(vectors.size()) != d) malformed("basis " + std::to_string(x) + " needs d vectors");
        ComplexMatrix<double> m(d, d);
        for (long i = 0; i < d; ++i) {
            const json& v = vectors[static_cast<std::size_t>(i)];
            if (!v.is_array() || static_cast<long>(v.size()) != d)
                malformed("basis " + std::to_string(x) + " vector " + std::to_string(i) + " needs d amplitudes");
            for (long k = 0; k < d; ++k) m(k, i) = parse_amplitude(v[static_cast<std::size_t>(k)]);
        }
        std::string label = entry.value("label", "B" + std::to_string(x));
        bases.emplace_back(std::move(label), std::move(m));
    }

    std::string id = doc.value("id", std::string());
    BasisSetd set(id, std::move(bases));
    if (!id.empty()) return set;
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(basis_set_digest(set)));
    return BasisSetd(std::string("file:") + hex, {set.bases().begin(), set.bases().end()});
}

BasisSetd load_basis_set(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("cannot open basis-set file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_basis_set(buffer.str());
}

std::string format_basis_set(const BasisSetd& set) {
    json doc;
    doc["id"] = set.id();
    doc["d"] = set.d();
    doc["c"] = set.c();
    json bases = json::array();
    for (const auto& b : set.bases()) {
        json vectors = json::array();
        for (Eigen::Index i = 0; i < b.dim(); ++i) {
            json v = json::array();
            for (Eigen::Index k = 0; k < b.dim(); ++k) v.push_back({b.matrix()(k, i).real(), b.matrix()(k, i).imag()});
            vectors.push_back(std::move(v));
        }
        bases.push_back({{"label", b.label()}, {"vectors", std::move(vectors)}});
    }
    doc["bases"] = std::move(bases);
    return doc.dump(2) + "\n";
}

void save_basis_set(const BasisSetd& set, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InvalidParameter("cannot write basis-set file " + path.string());
    out << format_basis_set(set);
}

std::uint64_t basis_set_digest(const BasisSetd& set) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](std::uint64_t word) {
        for (int byte = 0; byte < 8; ++byte) {
            h ^= (word >> (8 * byte)) & 0xffu;
            h *= 0x100000001b3ull;
        }
    };
    mix(static_cast<std::uint64_t>(set.d()));
    mix(static_cast<std::uint64_t>(set.c()));
    for (const auto& b : set.bases())
        for (Eigen::Index i = 0; i < b.matrix().size(); ++i) {
            mix(std::bit_cast<std::uint64_t>(b.matrix().data()[i].real()));
            mix(std::bit_cast<std::uint64_t>(b.matrix().data()[i].imag()));
        }
    return h;
}

}  // namespace hse
