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

#include <json.hpp>

#include <sstream>

#include "hse/error.hpp"
#include "hse/report.hpp"

namespace hse {
namespace {

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

TEST(Rounding, HalfUpWithTolerance) {
    EXPECT_EQ(format_one_decimal(20.249999999999993), "20.3");
    EXPECT_EQ(format_one_decimal(15.14), "15.1");
    EXPECT_EQ(format_one_decimal(0.25), "0.3");
    EXPECT_EQ(format_one_decimal(2.0), "2.0");
    EXPECT_EQ(format_percent(4.0 / 7), "57.1%");
    EXPECT_EQ(format_percent(0.25), "25.0%");
    EXPECT_EQ(format_percent(9.0 / 13), "69.2%");
    EXPECT_DOUBLE_EQ(round_half_up(0.125, 2), 0.13);
}

TEST(Formats, Parse) {
    EXPECT_EQ(parse_output_format("table"), OutputFormat::table);
    EXPECT_EQ(parse_output_format("csv"), OutputFormat::csv);
    EXPECT_EQ(parse_output_format("json-lines"), OutputFormat::json_lines);
    EXPECT_THROW(parse_output_format("xml"), InvalidParameter);
    EXPECT_EQ(format_full(0.1), "0.1");
    EXPECT_EQ(std::stod(format_full(4.0 / 7)), 4.0 / 7);
}

TEST(Table1Render, TableView) {
    const auto text = render_table1(table1(), OutputFormat::table);
    const auto l = lines(text);
    // header, 12 rows, 2 blank separators, 2 footnotes
    ASSERT_EQ(l.size(), 17u);
    EXPECT_NE(text.find("HSE**             (2,3)      57.1%   33.3%    13.2%   15.1"), std::string::npos) << text;
    EXPECT_NE(text.find("KMB09*            (2,2)      33.3%   25.0%    25.0%    4.0"), std::string::npos);
    EXPECT_NE(text.find("HSE               (3,4)      69.2%   50.0%    14.8%   20.3"), std::string::npos);
    EXPECT_NE(text.find("BKB01             (7,2)      42.9%     n/a   140.4%    0.7"), std::string::npos);
    EXPECT_NE(text.find("HSE               (7,8)      86.0%   75.0%    12.7%   54.9"), std::string::npos);
    EXPECT_TRUE(l[5].empty());
    EXPECT_TRUE(l[10].empty());
}

TEST(Table1Render, MachineFormatsAreFullPrecision) {
    const auto csv = lines(render_table1(table1(), OutputFormat::csv));
    ASSERT_EQ(csv.size(), 13u);
    EXPECT_EQ(csv[0], "protocol,d,c,method,r_s,r_t,r_it,r_qb,r_k,r_be,n_s,footnote");
    const auto jl = lines(render_table1(table1(), OutputFormat::json_lines));
    ASSERT_EQ(jl.size(), 12u);
    const auto row = nlohmann::json::parse(jl[3]);
    EXPECT_EQ(row.at("protocol"), "HSE");
    EXPECT_EQ(row.at("r_qb").at("exact").get<double>(), table1()[3].report.r_qb->value);
    EXPECT_TRUE(row.at("footnote").is_string());
    EXPECT_TRUE(nlohmann::json::parse(jl[0]).at("r_it").is_null());
}

TEST(SimRender, CsvColumns) {
    const auto r = estimate_rates(ProtocolConfig::with_default_eve(qubit_six_state_set()), 2000, 1);
    const auto csv = lines(render_sim_reports({r}, OutputFormat::csv));
    ASSERT_EQ(csv.size(), 4u);
    EXPECT_EQ(csv[0], "protocol,d,c,metric,analytic,empirical,stderr,z");
    EXPECT_EQ(csv[3].rfind("\"HSE\",2,3,r_qb,", 0), 0u);
    const auto j = nlohmann::json::parse(lines(render_sim_reports({r}, OutputFormat::json_lines)).at(0));
    EXPECT_EQ(j.at("n_trials"), 2000);
    EXPECT_EQ(j.at("metrics").size(), 3u);
    EXPECT_EQ(j.at("counts").at("trials"), 2000);
    EXPECT_EQ(render_sim_reports({r}, OutputFormat::csv), render_sim_reports({r}, OutputFormat::csv));
}

}  // namespace
}  // namespace hse
