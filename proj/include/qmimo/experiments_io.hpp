// SPDX-License-Identifier: Apache-2.0
//
// qmimo: quantized massive-MIMO uplink rate analysis and simulation
// Copyright (C) 2026 The qmimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef QMIMO_EXPERIMENTS_IO_HPP
#define QMIMO_EXPERIMENTS_IO_HPP

#include "qmimo/experiments.hpp"

#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qmimo
{

namespace detail
{

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true)
    {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

inline std::string format_real(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string format_optional(const std::optional<double> &v) { return v ? format_real(*v) : std::string(); }

inline double parse_real(const std::string &s, std::string_view what)
{
    std::size_t used = 0;
    double v = 0.0;
    try
    {
        v = std::stod(s, &used);
    }
    catch (const std::exception &)
    {
        used = 0;
    }
    if (used == 0 || used != s.size())
        throw std::invalid_argument(std::string(what) + ": '" + s + "' is not a number");
    return v;
}

inline std::uint64_t parse_unsigned(const std::string &s, std::string_view what)
{
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument(std::string(what) + ": '" + s + "' is not a non-negative integer");
    try
    {
        return std::stoull(s);
    }
    catch (const std::out_of_range &)
    {
        throw std::invalid_argument(std::string(what) + ": '" + s + "' is out of range");
    }
}

inline std::optional<double> parse_optional_real(const std::string &s, std::string_view what)
{
    if (s.empty())
        return std::nullopt;
    return parse_real(s, what);
}

} // namespace detail

inline constexpr std::string_view result_csv_header =
    "M,N,bits,p_u_linear,sum_rate_mc,sum_rate_mc_stderr,sum_rate_approx,energy_efficiency,drop_seed,fading_seed,"
    "trials,reference_sum_rate";

/// Writes the table as CSV: header row, 10 significant digits, empty fields
/// for values that do not apply (no Monte Carlo run, infinite-resolution
/// energy efficiency). Multi-drop tables carry a trailing drop_index column.
inline void write_result_csv(std::ostream &os, const ResultTable &table)
{
    os << result_csv_header << (table.multi_drop ? ",drop_index" : "") << '\n';
    for (const ResultRow &r : table.rows)
    {
        os << r.M << ',' << r.N << ',' << r.bits.to_string() << ',' << detail::format_real(r.p_u_linear) << ','
           << detail::format_optional(r.sum_rate_mc) << ',' << detail::format_optional(r.sum_rate_mc_stderr) << ','
           << detail::format_real(r.sum_rate_approx) << ',' << detail::format_optional(r.energy_efficiency) << ','
           << r.drop_seed << ',' << r.fading_seed << ',' << r.trials << ','
           << detail::format_optional(r.reference_sum_rate);
        if (table.multi_drop)
        {
            os << ',';
            if (r.drop_index)
                os << (*r.drop_index == mean_drop_index ? std::string("mean") : std::to_string(*r.drop_index));
        }
        os << '\n';
    }
}

inline std::string to_csv(const ResultTable &table)
{
    std::ostringstream os;
    write_result_csv(os, table);
    return os.str();
}

inline ResultTable read_result_csv(std::istream &is)
{
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error("result CSV is empty");
    ResultTable table;
    if (line == result_csv_header)
        table.multi_drop = false;
    else if (line == std::string(result_csv_header) + ",drop_index")
        table.multi_drop = true;
    else
        throw std::runtime_error("unexpected result CSV header: " + line);

    const std::size_t columns = table.multi_drop ? 13 : 12;
    while (std::getline(is, line))
    {
        if (line.empty())
            continue;
        const auto f = detail::split(line, ',');
        if (f.size() != columns)
            throw std::runtime_error("result CSV row has " + std::to_string(f.size()) + " fields: " + line);
        ResultRow r;
        r.M = static_cast<unsigned>(detail::parse_unsigned(f[0], "M"));
        r.N = static_cast<unsigned>(detail::parse_unsigned(f[1], "N"));
        r.bits = Bits::parse(f[2]);
        r.p_u_linear = detail::parse_real(f[3], "p_u_linear");
        r.sum_rate_mc = detail::parse_optional_real(f[4], "sum_rate_mc");
        r.sum_rate_mc_stderr = detail::parse_optional_real(f[5], "sum_rate_mc_stderr");
        r.sum_rate_approx = detail::parse_real(f[6], "sum_rate_approx");
        r.energy_efficiency = detail::parse_optional_real(f[7], "energy_efficiency");
        r.drop_seed = detail::parse_unsigned(f[8], "drop_seed");
        r.fading_seed = detail::parse_unsigned(f[9], "fading_seed");
        r.trials = detail::parse_unsigned(f[10], "trials");
        r.reference_sum_rate = detail::parse_optional_real(f[11], "reference_sum_rate");
        if (table.multi_drop && !f[12].empty())
            r.drop_index = f[12] == "mean" ? mean_drop_index : detail::parse_unsigned(f[12], "drop_index");
        table.rows.push_back(r);
    }
    return table;
}

/// Parses a scenario file of `key = value` lines ('#' starts a comment).
///
/// Keys: M_values, N, power_mode (FIXED(<p_u dB>) or SCALED(<E_u dB>)),
/// bits_values, cell.cell_radius, cell.exclusion_radius,
/// cell.pathloss_exponent, cell.shadow_std_db, trials, drop_seed, fading_seed,
/// bandwidth, power_constants (c0, c1), num_drops, rho_source
/// (table | lloyd-max), monte_carlo (true | false), betas.
/// Lists are comma separated. Unknown or repeated keys are errors.
inline ScenarioConfig parse_scenario_config(std::istream &is)
{
    ScenarioConfig cfg;
    cfg.M_values.clear();
    cfg.bits_values.clear();
    std::set<std::string> seen;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line))
    {
        ++line_no;
        const auto hash = line.find('#');
        const std::string body = detail::trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        const std::string where = "line " + std::to_string(line_no);
        if (eq == std::string::npos)
            throw std::invalid_argument(where + ": expected 'key = value'");
        const std::string key = detail::trim(body.substr(0, eq));
        const std::string value = detail::trim(body.substr(eq + 1));
        if (!seen.insert(key).second)
            throw std::invalid_argument(where + ": duplicate key '" + key + "'");
        const std::string what = where + " (" + key + ")";

        if (key == "M_values")
        {
            for (const auto &tok : detail::split(value, ','))
                cfg.M_values.push_back(static_cast<unsigned>(detail::parse_unsigned(tok, what)));
        }
        else if (key == "N")
            cfg.N = static_cast<unsigned>(detail::parse_unsigned(value, what));
        else if (key == "power_mode")
        {
            const auto open = value.find('(');
            if (open == std::string::npos || value.back() != ')')
                throw std::invalid_argument(what + ": expected FIXED(<dB>) or SCALED(<dB>)");
            const std::string kind = detail::trim(value.substr(0, open));
            const double db = detail::parse_real(detail::trim(value.substr(open + 1, value.size() - open - 2)), what);
            if (kind == "FIXED")
                cfg.power_mode = PowerMode::fixed(db);
            else if (kind == "SCALED")
                cfg.power_mode = PowerMode::scaled(db);
            else
                throw std::invalid_argument(what + ": unknown power mode '" + kind + "'");
        }
        else if (key == "bits_values")
        {
            for (const auto &tok : detail::split(value, ','))
            {
                try
                {
                    cfg.bits_values.push_back(Bits::parse(tok));
                }
                catch (const std::invalid_argument &e)
                {
                    throw std::invalid_argument(what + ": " + e.what());
                }
            }
        }
        else if (key == "cell.cell_radius")
            cfg.cell.cell_radius = detail::parse_real(value, what);
        else if (key == "cell.exclusion_radius")
            cfg.cell.exclusion_radius = detail::parse_real(value, what);
        else if (key == "cell.pathloss_exponent")
            cfg.cell.pathloss_exponent = detail::parse_real(value, what);
        else if (key == "cell.shadow_std_db")
            cfg.cell.shadow_std_db = detail::parse_real(value, what);
        else if (key == "trials")
            cfg.trials = detail::parse_unsigned(value, what);
        else if (key == "drop_seed")
            cfg.drop_seed = detail::parse_unsigned(value, what);
        else if (key == "fading_seed")
            cfg.fading_seed = detail::parse_unsigned(value, what);
        else if (key == "bandwidth")
            cfg.bandwidth = detail::parse_real(value, what);
        else if (key == "power_constants")
        {
            const auto parts = detail::split(value, ',');
            if (parts.size() != 2)
                throw std::invalid_argument(what + ": expected 'c0, c1'");
            cfg.c0 = detail::parse_real(parts[0], what);
            cfg.c1 = detail::parse_real(parts[1], what);
        }
        else if (key == "num_drops")
            cfg.num_drops = detail::parse_unsigned(value, what);
        else if (key == "rho_source")
        {
            if (value == "table")
                cfg.rho_source = RhoSource::table_then_formula;
            else if (value == "lloyd-max")
                cfg.rho_source = RhoSource::lloyd_max;
            else
                throw std::invalid_argument(what + ": expected table or lloyd-max");
        }
        else if (key == "monte_carlo")
        {
            if (value != "true" && value != "false")
                throw std::invalid_argument(what + ": expected true or false");
            cfg.monte_carlo = value == "true";
        }
        else if (key == "betas")
        {
            std::vector<double> betas;
            for (const auto &tok : detail::split(value, ','))
                betas.push_back(detail::parse_real(tok, what));
            cfg.betas = std::move(betas);
        }
        else
            throw std::invalid_argument(where + ": unknown key '" + key + "'");
    }

    for (const char *required : {"M_values", "N", "power_mode", "bits_values"})
        if (!seen.contains(required))
            throw std::invalid_argument(std::string("missing required key '") + required + "'");
    cfg.validate();
    return cfg;
}

} // namespace qmimo

#endif
