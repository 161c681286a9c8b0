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

// Command-line front end: quantizer design, single-point rates, figure
// presets, config-driven sweeps and the statistical self-check.

#include "qmimo/qmimo.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace
{

using namespace qmimo;

constexpr int exit_ok = 0;
constexpr int exit_runtime = 1;
constexpr int exit_usage = 2;

// Validation failure attributable to one flag.
struct UsageError : std::invalid_argument
{
    UsageError(const std::string &flag, const std::string &msg) : std::invalid_argument(flag + ": " + msg) {}
};

Bits parse_bits_flag(const std::string &value)
{
    try
    {
        return Bits::parse(value);
    }
    catch (const std::invalid_argument &e)
    {
        throw UsageError("--bits", e.what());
    }
}

RhoSource parse_mode_flag(const std::string &value)
{
    if (value == "table")
        return RhoSource::table_then_formula;
    if (value == "lloyd-max")
        return RhoSource::lloyd_max;
    throw UsageError("--mode", "expected 'table' or 'lloyd-max', got '" + value + "'");
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string &flag, const std::string &value, Parse parse)
{
    std::vector<T> out;
    std::stringstream ss(value);
    std::string tok;
    while (std::getline(ss, tok, ','))
    {
        try
        {
            out.push_back(parse(tok));
        }
        catch (const std::exception &)
        {
            throw UsageError(flag, "invalid list entry '" + tok + "'");
        }
    }
    if (out.empty())
        throw UsageError(flag, "empty list");
    return out;
}

std::vector<double> parse_betas(const std::string &value)
{
    auto betas = parse_list<double>("--betas", value, [](const std::string &t) {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size())
            throw std::invalid_argument(t);
        return v;
    });
    for (double b : betas)
        if (!(b > 0.0))
            throw UsageError("--betas", "entries must be positive");
    return betas;
}

std::string fmt(double v, int digits = 10)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// ---------------------------------------------------------------- rho

struct RhoArgs
{
    std::string bits;
    std::string mode = "table";
    bool csv = false;
};

int cmd_rho(const RhoArgs &a)
{
    const Bits bits = parse_bits_flag(a.bits);
    const RhoSource source = parse_mode_flag(a.mode);

    QuantizerSpec spec;
    if (bits.is_infinite())
        spec = infinite_resolution_quantizer();
    else if (source == RhoSource::lloyd_max)
    {
        if (bits.value() > max_design_bits)
            throw UsageError("--bits", "Lloyd-Max design supports at most 16 bits");
        spec = design_lloyd_max(bits.value());
    }
    else
    {
        spec.bits = bits;
        spec.rho = rho_of_bits(bits, source);
        spec.alpha = 1.0 - spec.rho;
    }

    if (a.csv)
    {
        std::cout << "bits,rho,alpha\n" << bits.to_string() << ',' << fmt(spec.rho, 17) << ',' << fmt(spec.alpha, 17) << '\n';
        return exit_ok;
    }
    std::cout << "bits   " << bits.to_string() << '\n'
              << "rho    " << fmt(spec.rho) << '\n'
              << "alpha  " << fmt(spec.alpha) << '\n';
    if (!spec.levels.empty() && spec.levels.size() <= 64)
    {
        std::cout << "levels    ";
        for (double l : spec.levels)
            std::cout << ' ' << fmt(l, 8);
        std::cout << "\nthresholds";
        for (double t : spec.thresholds)
            std::cout << ' ' << fmt(t, 8);
        std::cout << '\n';
    }
    return exit_ok;
}

// ---------------------------------------------------------------- rate

struct RateArgs
{
    unsigned m = 0;
    unsigned n = 0;
    std::optional<double> pu_db;
    std::optional<double> pu_linear;
    std::string bits;
    std::string betas;
    std::uint64_t seed = 1;
    std::uint64_t drop_seed = 1;
    std::size_t trials = 10000;
    std::string mode = "table";
    bool csv = false;
    unsigned jobs = 0;
};

int cmd_rate(const RateArgs &a)
{
    if (a.m < 1)
        throw UsageError("--m", "must be at least 1");
    if (a.n < 1)
        throw UsageError("--n", "must be at least 1");
    if (a.trials < min_mc_trials)
        throw UsageError("--trials", "must be at least 100");
    const Bits bits = parse_bits_flag(a.bits);
    const RhoSource source = parse_mode_flag(a.mode);
    if (a.pu_db && a.pu_linear)
        throw UsageError("--pu-linear", "give either --pu-db or --pu-linear");
    const double p_u = a.pu_linear ? *a.pu_linear : db_to_linear(a.pu_db.value_or(10.0));
    if (!(p_u > 0.0))
        throw UsageError("--pu-linear", "must be positive");

    std::vector<double> betas;
    if (!a.betas.empty())
    {
        betas = parse_betas(a.betas);
        if (betas.size() != a.n)
            throw UsageError("--betas", "has " + std::to_string(betas.size()) + " entries but --n is " + std::to_string(a.n));
    }
    else
        betas = betas_of(drop_users(CellModel{}, a.n, a.drop_seed));

    const double alpha = alpha_of_bits(bits, source);
    RatePoint pt = ergodic_rate_mc(betas, a.m, p_u, alpha, a.trials, a.seed, a.jobs);
    for (std::size_t n = 0; n < betas.size(); ++n)
        pt.per_user_approx.push_back(approx_rate(betas, n, a.m, p_u, alpha));
    pt.sum_rate_approx = sum_approx_rate(betas, a.m, p_u, alpha);
    const ScenarioConfig defaults;
    if (!bits.is_infinite())
        pt.energy_efficiency = energy_efficiency(pt.sum_rate_approx, defaults.bandwidth, a.m, bits, defaults.c0, defaults.c1);

    if (a.csv)
    {
        std::cout << "user,beta,rate_mc,rate_mc_stderr,rate_approx\n";
        for (std::size_t n = 0; n < betas.size(); ++n)
            std::cout << n << ',' << fmt(betas[n], 17) << ',' << fmt(pt.per_user_mc[n].mean, 17) << ','
                      << fmt(pt.per_user_mc[n].std_error, 17) << ',' << fmt(pt.per_user_approx[n], 17) << '\n';
        std::cout << "sum,," << fmt(pt.sum_rate_mc.mean, 17) << ',' << fmt(pt.sum_rate_mc.std_error, 17) << ','
                  << fmt(pt.sum_rate_approx, 17) << '\n';
        return exit_ok;
    }

    std::cout << "M=" << a.m << " N=" << a.n << " p_u=" << fmt(p_u) << " bits=" << bits.to_string()
              << " alpha=" << fmt(alpha) << " trials=" << a.trials << " seed=" << a.seed << '\n';
    std::cout << "user  beta            rate_mc         stderr          rate_approx\n";
    for (std::size_t n = 0; n < betas.size(); ++n)
    {
        std::printf("%-5zu %-15s %-15s %-15s %s\n", n, fmt(betas[n]).c_str(), fmt(pt.per_user_mc[n].mean).c_str(),
                    fmt(pt.per_user_mc[n].std_error).c_str(), fmt(pt.per_user_approx[n]).c_str());
    }
    std::fflush(stdout);
    std::cout << "sum_rate_mc      " << fmt(pt.sum_rate_mc.mean) << " +/- " << fmt(pt.sum_rate_mc.std_error) << '\n'
              << "sum_rate_approx  " << fmt(pt.sum_rate_approx) << '\n';
    if (pt.energy_efficiency)
        std::cout << "energy_efficiency " << fmt(*pt.energy_efficiency) << " bit/J\n";
    return exit_ok;
}

// ---------------------------------------------------------------- figure / sweep

struct RunArgs
{
    int id = 0;
    std::string config;
    std::string out;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> drop_seed;
    std::optional<unsigned> n;
    std::optional<double> pu_db;
    std::optional<double> eu_db;
    std::string m;
    std::string bits;
    std::string betas;
    std::string mode;
    unsigned jobs = 0;
    bool quiet = false;
};

int write_table(const ResultTable &table, const RunArgs &a, const std::string &label)
{
    if (a.out.empty())
    {
        write_result_csv(std::cout, table);
        return exit_ok;
    }
    // Write to a temporary first so a failed run never leaves a partial file.
    const std::string tmp = a.out + ".tmp";
    {
        std::ofstream os(tmp);
        if (!os)
            throw std::runtime_error("cannot open " + tmp + " for writing");
        write_result_csv(os, table);
        if (!os)
            throw std::runtime_error("failed writing " + tmp);
    }
    if (std::rename(tmp.c_str(), a.out.c_str()) != 0)
        throw std::runtime_error("cannot move " + tmp + " to " + a.out);
    std::cout << label << ": wrote " << table.rows.size() << " rows to " << a.out << '\n';
    return exit_ok;
}

RunOptions run_options(const RunArgs &a)
{
    RunOptions opts;
    opts.jobs = a.jobs;
    if (!a.quiet)
        opts.progress = [](std::string_view line) { std::cerr << line << '\n'; };
    return opts;
}

int cmd_figure(const RunArgs &a)
{
    if (a.id < 1 || a.id > 3)
        throw UsageError("--id", "unknown figure id " + std::to_string(a.id) + " (expected 1, 2 or 3)");
    ScenarioConfig cfg = figure_config(a.id);
    if (a.trials)
        cfg.trials = *a.trials;
    if (a.seed)
        cfg.fading_seed = *a.seed;
    if (a.drop_seed)
        cfg.drop_seed = *a.drop_seed;
    if (a.n)
        cfg.N = *a.n;
    if (a.pu_db)
    {
        if (cfg.power_mode.kind != PowerMode::Kind::fixed)
            throw UsageError("--pu-db", "figure 2 uses scaled power; use --eu-db");
        cfg.power_mode = PowerMode::fixed(*a.pu_db);
    }
    if (a.eu_db)
    {
        if (cfg.power_mode.kind != PowerMode::Kind::scaled)
            throw UsageError("--eu-db", "only figure 2 uses scaled power; use --pu-db");
        cfg.power_mode = PowerMode::scaled(*a.eu_db);
    }
    if (!a.m.empty())
        cfg.M_values = parse_list<unsigned>("--m", a.m, [](const std::string &t) {
            const unsigned long v = std::stoul(t);
            if (v == 0 || t.find_first_not_of("0123456789") != std::string::npos)
                throw std::invalid_argument(t);
            return static_cast<unsigned>(v);
        });
    if (!a.bits.empty())
        cfg.bits_values = parse_list<Bits>("--bits", a.bits, [](const std::string &t) { return Bits::parse(t); });
    if (!a.mode.empty())
        cfg.rho_source = parse_mode_flag(a.mode);
    if (!a.betas.empty())
    {
        cfg.betas = parse_betas(a.betas);
        if (cfg.betas->size() != cfg.N)
            throw UsageError("--betas", "has " + std::to_string(cfg.betas->size()) + " entries but N is " +
                                            std::to_string(cfg.N));
    }
    return write_table(run_figure(a.id, cfg, run_options(a)), a, "figure " + std::to_string(a.id));
}

int cmd_sweep(const RunArgs &a)
{
    std::ifstream is(a.config);
    if (!is)
        throw UsageError("--config", "cannot open '" + a.config + "'");
    ScenarioConfig cfg;
    try
    {
        cfg = parse_scenario_config(is);
    }
    catch (const std::invalid_argument &e)
    {
        throw UsageError("--config", a.config + ": " + e.what());
    }
    return write_table(sweep(cfg, run_options(a)), a, "sweep");
}

// ---------------------------------------------------------------- validate

struct ValidateArgs
{
    std::size_t trials = 10000;
    std::size_t samples = 1000000;
    std::uint64_t seed = 1;
    unsigned jobs = 0;
};

int cmd_validate(const ValidateArgs &a)
{
    if (a.trials < 2)
        throw UsageError("--trials", "must be at least 2");
    if (a.samples < min_aqnm_samples)
        throw UsageError("--samples", "must be at least 10000");
    if (a.trials < 1000)
        std::cerr << "warning: --trials " << a.trials << " gives low statistical power; use >= 10000\n";

    std::vector<StatisticalCheck> checks;
    const std::vector<double> betas = random_betas(4, a.seed);
    for (Eigen::Index M : {8, 64})
        for (auto &c : channel_moment_checks(betas, M, 10.0, a.trials, a.seed, a.jobs))
            checks.push_back(std::move(c));
    for (unsigned b : {1u, 2u, 3u})
        for (auto &c : aqnm_checks(design_lloyd_max(b), a.samples, a.seed + b))
            checks.push_back(std::move(c));

    int failed = 0;
    for (const auto &c : checks)
    {
        const bool ok = c.passed();
        failed += !ok;
        std::printf("%s z=%-7.3f %s  estimate=%s expected=%s\n", ok ? "PASS" : "FAIL", c.z_score(), c.name.c_str(),
                    fmt(c.estimate, 8).c_str(), fmt(c.expected, 8).c_str());
    }
    std::printf("%zu checks, %d failed\n", checks.size(), failed);
    return failed == 0 ? exit_ok : exit_runtime;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Quantized massive-MIMO uplink: rates, quantizers and experiment presets"};
    app.require_subcommand(1);

    RhoArgs rho;
    auto *rho_cmd = app.add_subcommand("rho", "Distortion factor rho and AQNM gain alpha of the MMSE quantizer");
    rho_cmd->add_option("--bits", rho.bits, "Bit count or 'inf'")->required();
    rho_cmd->add_option("--mode", rho.mode, "table | lloyd-max")->capture_default_str();
    rho_cmd->add_flag("--csv", rho.csv, "Machine-readable output");

    RateArgs rate;
    auto *rate_cmd = app.add_subcommand("rate", "Monte Carlo and closed-form rates for one configuration");
    rate_cmd->add_option("--m", rate.m, "Base-station antennas")->required();
    rate_cmd->add_option("--n", rate.n, "Users")->required();
    rate_cmd->add_option("--pu-db", rate.pu_db, "Per-user transmit power in dB (default 10)");
    rate_cmd->add_option("--pu-linear", rate.pu_linear, "Per-user transmit power, linear");
    rate_cmd->add_option("--bits", rate.bits, "Bit count or 'inf'")->required();
    rate_cmd->add_option("--betas", rate.betas, "Comma-separated large-scale gains (default: random drop)");
    rate_cmd->add_option("--seed", rate.seed, "Fast-fading seed")->capture_default_str();
    rate_cmd->add_option("--drop-seed", rate.drop_seed, "User-drop seed when --betas is absent")->capture_default_str();
    rate_cmd->add_option("--trials", rate.trials, "Monte Carlo trials")->capture_default_str();
    rate_cmd->add_option("--mode", rate.mode, "rho source: table | lloyd-max")->capture_default_str();
    rate_cmd->add_flag("--csv", rate.csv, "Machine-readable output");
    rate_cmd->add_option("--jobs", rate.jobs, "Worker threads (0 = all cores)");

    RunArgs fig;
    auto *fig_cmd = app.add_subcommand("figure", "Run a figure preset and write its CSV table");
    fig_cmd->add_option("--id", fig.id, "Figure id: 1, 2 or 3")->required();
    fig_cmd->add_option("--out", fig.out, "Output CSV (default: stdout)");
    fig_cmd->add_option("--trials", fig.trials, "Monte Carlo trials per grid point");
    fig_cmd->add_option("--seed", fig.seed, "Fast-fading seed");
    fig_cmd->add_option("--drop-seed", fig.drop_seed, "User-drop seed");
    fig_cmd->add_option("--n", fig.n, "Users");
    fig_cmd->add_option("--pu-db", fig.pu_db, "Per-user transmit power in dB (figures 1 and 3)");
    fig_cmd->add_option("--eu-db", fig.eu_db, "E_u in dB for p_u = E_u / M (figure 2)");
    fig_cmd->add_option("--m", fig.m, "Comma-separated antenna grid");
    fig_cmd->add_option("--bits", fig.bits, "Comma-separated bit counts ('inf' allowed)");
    fig_cmd->add_option("--betas", fig.betas, "Controlled drop: comma-separated large-scale gains");
    fig_cmd->add_option("--mode", fig.mode, "rho source: table | lloyd-max");
    fig_cmd->add_option("--jobs", fig.jobs, "Worker threads (0 = all cores)");
    fig_cmd->add_flag("--quiet", fig.quiet, "No progress lines on stderr");

    RunArgs sw;
    auto *sweep_cmd = app.add_subcommand("sweep", "Run a grid described by a scenario config file");
    sweep_cmd->add_option("--config", sw.config, "Scenario config file")->required();
    sweep_cmd->add_option("--out", sw.out, "Output CSV (default: stdout)");
    sweep_cmd->add_option("--jobs", sw.jobs, "Worker threads (0 = all cores)");
    sweep_cmd->add_flag("--quiet", sw.quiet, "No progress lines on stderr");

    ValidateArgs val;
    auto *val_cmd = app.add_subcommand("validate", "Check channel moments and AQNM statistics against closed forms");
    val_cmd->add_option("--trials", val.trials, "Channel realizations per moment check")->capture_default_str();
    val_cmd->add_option("--samples", val.samples, "Samples per AQNM check")->capture_default_str();
    val_cmd->add_option("--seed", val.seed, "Seed")->capture_default_str();
    val_cmd->add_option("--jobs", val.jobs, "Worker threads (0 = all cores)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }

    try
    {
        if (*rho_cmd)
            return cmd_rho(rho);
        if (*rate_cmd)
            return cmd_rate(rate);
        if (*fig_cmd)
            return cmd_figure(fig);
        if (*sweep_cmd)
            return cmd_sweep(sw);
        if (*val_cmd)
            return cmd_validate(val);
    }
    catch (const std::invalid_argument &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    catch (const std::out_of_range &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_runtime;
    }
    return exit_usage;
}
