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

#include "hse/codec.hpp"

#include <json.hpp>

#include <cmath>
#include <initializer_list>
#include <limits>

#include "hse/error.hpp"
#include "hse/hilbert.hpp"

namespace hse {
namespace {

using nlohmann::json;

class Reader {
public:
    Reader(const json& obj, std::size_t line_no) : obj_(obj), line_no_(line_no) {}

    [[noreturn]] void fail(const std::string& why) const { throw CodecError(line_no_, why); }

    void expect_keys(std::initializer_list<const char*> keys) const {
        if (obj_.size() != keys.size() + 1) fail("unexpected or missing fields");
        for (const char* k : keys)
            if (!obj_.contains(k)) fail(std::string("missing field '") + k + "'");
    }

    std::uint64_t trial_id() const {
        const json& v = obj_.at("trial_id");
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
            fail("trial_id must be a nonnegative integer");
        return v.get<std::uint64_t>();
    }

    int small_int(const char* key, int lo, int hi) const { return bounded(obj_.at(key), key, lo, hi); }

    std::vector<int> int_list(const char* key, int hi) const {
        const json& v = obj_.at(key);
        if (!v.is_array()) fail(std::string("'") + key + "' must be an array");
        std::vector<int> out;
        out.reserve(v.size());
        for (const json& e : v) out.push_back(bounded(e, key, 0, hi));
        return out;
    }

    std::string text(const char* key) const {
        const json& v = obj_.at(key);
        if (!v.is_string()) fail(std::string("'") + key + "' must be a string");
        return v.get<std::string>();
    }

    bool flag(const char* key) const {
        const json& v = obj_.at(key);
        if (!v.is_boolean()) fail(std::string("'") + key + "' must be a boolean");
        return v.get<bool>();
    }

    std::vector<std::complex<double>> amplitudes() const {
        const json& v = obj_.at("amps");
        if (!v.is_array() || v.size() < 2) fail("'amps' must list at least two amplitudes");
        std::vector<std::complex<double>> out;
        out.reserve(v.size());
        double norm2 = 0;
        for (const json& pair : v) {
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
                fail("amplitudes must be [re, im] number pairs");
            const std::complex<double> z(pair[0].get<double>(), pair[1].get<double>());
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) fail("non-finite amplitude");
            norm2 += std::norm(z);
            out.push_back(z);
        }
        if (std::abs(norm2 - 1.0) > kNormTolerance) fail("amplitudes are not a unit vector");
        return out;
    }

private:
    int bounded(const json& v, const char* key, int lo, int hi) const {
        if (!v.is_number_integer()) fail(std::string("'") + key + "' must hold integers");
        const auto n = v.get<std::int64_t>();
        if (n < lo || n > hi) fail(std::string("'") + key + "' out of range");
        return static_cast<int>(n);
    }

    const json& obj_;
    std::size_t line_no_;
};

constexpr int kIntMax = std::numeric_limits<int>::max();

}  // namespace

std::string_view message_type(const Message& msg) {
    struct Visitor {
        std::string_view operator()(const Hello&) const { return "hello"; }
        std::string_view operator()(const QuantumState&) const { return "quantum_state"; }
        std::string_view operator()(const IndexAnnounce&) const { return "index_announce"; }
        std::string_view operator()(const SiftReport&) const { return "sift_report"; }
        std::string_view operator()(const KeyCompare&) const { return "key_compare"; }
        std::string_view operator()(const Bye&) const { return "bye"; }
    };
    return std::visit(Visitor{}, msg);
}

std::string encode(const Message& msg) {
    json j;
    j["type"] = std::string(message_type(msg));
    struct Visitor {
        json& j;
        void operator()(const Hello& m) const {
            j["protocol_version"] = m.protocol_version;
            j["c"] = m.c;
            j["d"] = m.d;
            j["basis_set_id"] = m.basis_set_id;
        }
        void operator()(const QuantumState& m) const {
            j["trial_id"] = m.trial_id;
            j["slot"] = m.slot;
            json amps = json::array();
            for (const auto& z : m.amps) amps.push_back({z.real(), z.imag()});
            j["amps"] = std::move(amps);
        }
        void operator()(const IndexAnnounce& m) const {
            j["trial_id"] = m.trial_id;
            j["a"] = m.a;
        }
        void operator()(const SiftReport& m) const {
            j["trial_id"] = m.trial_id;
            j["sifted"] = m.sifted;
        }
        void operator()(const KeyCompare& m) const {
            j["trial_id"] = m.trial_id;
            j["letters"] = m.letters;
        }
        void operator()(const Bye& m) const { j["reason"] = m.reason; }
    };
    std::visit(Visitor{j}, msg);
    return j.dump();
}

Message decode(std::string_view line, std::size_t line_no) {
    if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find('\n') != std::string_view::npos) throw CodecError(line_no, "embedded newline");

    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw CodecError(line_no, std::string("not a JSON document: ") + e.what());
    }
    if (!j.is_object()) throw CodecError(line_no, "message must be a JSON object");
    if (!j.contains("type") || !j["type"].is_string()) throw CodecError(line_no, "missing 'type' discriminator");

    const Reader r(j, line_no);
    const auto type = j["type"].get<std::string>();
    try {
        if (type == "hello") {
            r.expect_keys({"protocol_version", "c", "d", "basis_set_id"});
            return Hello{r.small_int("protocol_version", 0, kIntMax), r.small_int("c", 2, kIntMax),
                         r.small_int("d", 2, kIntMax), r.text("basis_set_id")};
        }
        if (type == "quantum_state") {
            r.expect_keys({"trial_id", "slot", "amps"});
            return QuantumState{r.trial_id(), r.small_int("slot", 0, kIntMax), r.amplitudes()};
        }
        if (type == "index_announce") {
            r.expect_keys({"trial_id", "a"});
            return IndexAnnounce{r.trial_id(), r.int_list("a", kIntMax)};
        }
        if (type == "sift_report") {
            r.expect_keys({"trial_id", "sifted"});
            return SiftReport{r.trial_id(), r.flag("sifted")};
        }
        if (type == "key_compare") {
            r.expect_keys({"trial_id", "letters"});
            return KeyCompare{r.trial_id(), r.int_list("letters", kIntMax)};
        }
        if (type == "bye") {
            r.expect_keys({"reason"});
            return Bye{r.text("reason")};
        }
    } catch (const json::exception& e) {
        throw CodecError(line_no, e.what());
    }
    throw CodecError(line_no, "unknown message type '" + type + "'");
}

}  // namespace hse
