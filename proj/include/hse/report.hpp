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

// Text renderings of rate tables and simulation reports. Machine formats
// (csv, json-lines) carry full precision; the table view rounds half-up to
// one decimal (percent for rates, plain for N_s).

#include <string>
#include <string_view>
#include <vector>

#include "hse/montecarlo.hpp"
#include "hse/rates.hpp"

namespace hse {

enum class OutputFormat { table, csv, json_lines };

/// Accepts "table", "csv", "json-lines" (or "jsonl").
OutputFormat parse_output_format(std::string_view name);

/// Half-up rounding to `decimals` places; values within 1e-9 of a tie round up.
double round_half_up(double value, int decimals);

/// "57.1%"
std::string format_percent(double fraction);
/// "15.1"
std::string format_one_decimal(double value);
/// Shortest decimal that round-trips the double.
std::string format_full(double value);

std::string render_table1(const std::vector<Table1Row>& rows, OutputFormat format);
std::string render_rate_report(const RateReport& report, OutputFormat format);

/// csv columns: protocol,d,c,metric,analytic,empirical,stderr,z
std::string render_sim_reports(const std::vector<SimReport>& reports, OutputFormat format);

}  // namespace hse
