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

#include "hse/report.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace hse {
namespace {

using nlohmann::json;

std::string fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, round_half_up(value, decimals));
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

std::string pad_left(std::string s, std::size_t width) {
    if (s.size() < width) s.insert(0, width - s.size(), ' ');
    return s;
}

std::string csv_value(const std::optional<RateValue>& v) { return v ? format_full(v->value) : ""; }
std::string csv_value(const std::optional<double>& v) { return v ? format_full(*v) : ""; }

json json_value(const std::optional<RateValue>& v) {
    if (!v) return nullptr;
    if (v->is_exact()) return {{"exact", v->value}};
    return {{"estimate", v->value}, {"stderr", *v->std_error}};
}

json json_value(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json rate_json(const RateReport& r) {
    json j{{"protocol", r.protocol},       {"d", r.d},
           {"c", r.c},                     {"method", to_string(r.method)},
           {"r_s", json_value(r.r_s)},     {"r_t", json_value(r.r_t)},
           {"r_it", json_value(r.r_it)},   {"r_qb", json_value(r.r_qb)},
           {"r_k", json_value(r.r_k)},     {"r_be", json_value(r.r_be)},
           {"n_s", json_value(r.n_s)},     {"notes", r.notes}};
    return j;
}

// JSON has no infinity; a degenerate z is written as the string "inf"/"-inf".
json z_json(const std::optional<double>& z) {
    if (!z) return nullptr;
    if (std::isfinite(*z)) return *z;
    return *z > 0 ? "inf" : "-inf";
}

json counts_json(const Tally& t) {
    return {{"trials", t.trials},
            {"sifted", t.sifted},
            {"same_basis_slots", t.same_basis_slots},
            {"index_errors", t.index_errors},
            {"key_errors", t.key_errors}};
}

const char* kRateCsvHeader = "protocol,d,c,method,r_s,r_t,r_it,r_qb,r_k,r_be,n_s";

std::string rate_csv_row(const RateReport& r) {
    std::ostringstream out;
    out << '"' << r.protocol << "\"," << r.d << ',' << r.c << ',' << to_string(r.method) << ',' << csv_value(r.r_s)
        << ',' << csv_value(r.r_t) << ',' << csv_value(r.r_it) << ',' << csv_value(r.r_qb) << ','
        << csv_value(r.r_k) << ',' << csv_value(r.r_be) << ',' << csv_value(r.n_s);
    return out.str();
}

std::string pct_or_na(const std::optional<RateValue>& v) { return v ? format_percent(v->value) : "n/a"; }

}  // namespace

OutputFormat parse_output_format(std::string_view name) {
    if (name == "table") return OutputFormat::table;
    if (name == "csv") return OutputFormat::csv;
    if (name == "json-lines" || name == "jsonl") return OutputFormat::json_lines;
    throw InvalidParameter("unknown output format '" + std::string(name) + "'");
}

double round_half_up(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::floor(value * scale + 0.5 + 1e-9) / scale;
}

std::string format_percent(double fraction) { return fixed(100.0 * fraction, 1) + "%"; }

std::string format_one_decimal(double value) { return fixed(value, 1); }

std::string format_full(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    return json(value).dump();
}

std::string render_table1(const std::vector<Table1Row>& rows, OutputFormat format) {
    std::ostringstream out;
    if (format == OutputFormat::csv) {
        out << kRateCsvHeader << ",footnote\n";
        for (const auto& row : rows) out << rate_csv_row(row.report) << ",\"" << row.footnote.value_or("") << "\"\n";
        return out.str();
    }
    if (format == OutputFormat::json_lines) {
        for (const auto& row : rows) {
            json j = rate_json(row.report);
            j["footnote"] = row.footnote ? json(*row.footnote) : json(nullptr);
            out << j.dump() << '\n';
        }
        return out.str();
    }

    out << pad("Protocol", 18) << pad("(d,c)", 8) << pad_left("R_QB", 8) << pad_left("R_IT", 8) << pad_left("R_t", 9)
        << pad_left("N_s", 7) << '\n';
    std::vector<std::string> notes;
    int group_d = rows.empty() ? 0 : rows.front().report.d;
    for (const auto& row : rows) {
        const auto& r = row.report;
        if (r.d != group_d) {
            out << '\n';
            group_d = r.d;
        }
        std::string name = r.protocol;
        if (row.footnote) {
            notes.push_back(*row.footnote);
            name += std::string(notes.size(), '*');
        }
        const std::string dc = "(" + std::to_string(r.d) + "," + std::to_string(r.c) + ")";
        out << pad(name, 18) << pad(dc, 8) << pad_left(pct_or_na(r.r_qb), 8) << pad_left(pct_or_na(r.r_it), 8)
            << pad_left(pct_or_na(r.r_t), 9) << pad_left(r.n_s ? format_one_decimal(r.n_s->value) : "n/a", 7) << '\n';
    }
    for (std::size_t i = 0; i < notes.size(); ++i) out << std::string(i + 1, '*') << ' ' << notes[i] << '\n';
    return out.str();
}

std::string render_rate_report(const RateReport& r, OutputFormat format) {
    std::ostringstream out;
    if (format == OutputFormat::csv) {
        out << kRateCsvHeader << '\n' << rate_csv_row(r) << '\n';
        return out.str();
    }
    if (format == OutputFormat::json_lines) return rate_json(r).dump() + "\n";

    out << r.protocol << " (d,c) = (" << r.d << "," << r.c << ")  [" << to_string(r.method) << "]\n";
    auto line = [&](const char* label, const std::optional<RateValue>& v, bool percent) {
        if (!v) return;
        out << "  " << pad(label, 6) << pad_left(percent ? format_percent(v->value) : format_one_decimal(v->value), 9)
            << "   " << format_full(v->value) << '\n';
    };
    line("R_s", r.r_s, true);
    line("R_t", r.r_t, true);
    line("R_IT", r.r_it, true);
    line("R_QB", r.r_qb, true);
    line("R_K", r.r_k, true);
    line("R_BE", r.r_be, true);
    line("N_s", r.n_s, false);
    for (const auto& note : r.notes) out << "  note: " << note << '\n';
    return out.str();
}

std::string render_sim_reports(const std::vector<SimReport>& reports, OutputFormat format) {
    std::ostringstream out;
    if (format == OutputFormat::csv) {
        out << "protocol,d,c,metric,analytic,empirical,stderr,z\n";
        for (const auto& r : reports)
            for (const auto& m : r.metrics)
                out << '"' << r.protocol << "\"," << r.d << ',' << r.c << ',' << m.name << ','
                    << csv_value(m.analytic) << ',' << csv_value(m.empirical) << ',' << format_full(m.std_error) << ','
                    << csv_value(m.z) << '\n';
        return out.str();
    }
    if (format == OutputFormat::json_lines) {
        for (const auto& r : reports) {
            json metrics = json::array();
            for (const auto& m : r.metrics)
                metrics.push_back({{"metric", m.name},
                                   {"hits", m.hits},
                                   {"total", m.total},
                                   {"analytic", json_value(m.analytic)},
                                   {"empirical", json_value(m.empirical)},
                                   {"stderr", m.std_error},
                                   {"z", z_json(m.z)}});
            json j{{"protocol", r.protocol}, {"d", r.d},           {"c", r.c},
                   {"set_id", r.set_id},     {"eve", r.eve},       {"n_trials", r.n_trials},
                   {"seed", r.seed},         {"counts", counts_json(r.counts)}, {"metrics", metrics}, {"worst_abs_z", r.worst_abs_z()},
                   {"passed", r.passed()},   {"elapsed_seconds", r.elapsed_seconds}};
            out << j.dump() << '\n';
        }
        return out.str();
    }
    for (const auto& r : reports) {
        out << r.protocol << " (d,c) = (" << r.d << "," << r.c << ")  set " << r.set_id << "  eve " << r.eve << "  trials "
            << r.n_trials << "  seed " << r.seed << '\n';
        out << "  " << pad("metric", 7) << pad_left("analytic", 11) << pad_left("empirical", 11) << pad_left("stderr", 10)
            << pad_left("z", 8) << pad_left("count", 18) << '\n';
        for (const auto& m : r.metrics) {
            char buf[160];
            const std::string analytic = m.analytic ? fixed(*m.analytic, 5) : "-";
            const std::string empirical = m.empirical ? fixed(*m.empirical, 5) : "absent";
            const std::string z = m.z ? (std::isfinite(*m.z) ? fixed(*m.z, 2) : (*m.z > 0 ? "+inf" : "-inf")) : "-";
            std::snprintf(buf, sizeof buf, "%llu/%llu", static_cast<unsigned long long>(m.hits),
                          static_cast<unsigned long long>(m.total));
            out << "  " << pad(m.name, 7) << pad_left(analytic, 11) << pad_left(empirical, 11)
                << pad_left(fixed(m.std_error, 5), 10) << pad_left(z, 8) << pad_left(buf, 18)
                << (m.flagged() ? "  FAIL" : "") << '\n';
        }
        out << "  worst |z| = " << fixed(r.worst_abs_z(), 2) << (r.passed() ? "  ok" : "  FAILED") << "  ("
            << fixed(r.elapsed_seconds, 2) << " s)\n";
    }
    return out.str();
}

}  // namespace hse
