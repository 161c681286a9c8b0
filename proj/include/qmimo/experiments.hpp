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

#ifndef QMIMO_EXPERIMENTS_HPP
#define QMIMO_EXPERIMENTS_HPP

#include "qmimo/channel.hpp"
#include "qmimo/quantizer.hpp"
#include "qmimo/rate_analysis.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qmimo
{

/// Per-user transmit power: fixed p_u, or p_u = E_u / M. Both given in dB.
struct PowerMode
{
    enum class Kind
    {
        fixed,
        scaled,
    };

    Kind kind = Kind::fixed;
    double db = 10.0;

    static PowerMode fixed(double p_u_db) { return {Kind::fixed, p_u_db}; }
    static PowerMode scaled(double E_u_db) { return {Kind::scaled, E_u_db}; }

    double linear() const { return db_to_linear(db); }

    double p_u(double M) const { return kind == Kind::fixed ? linear() : linear() / M; }
};

struct ScenarioConfig
{
    std::vector<unsigned> M_values;
    unsigned N = 10;
    PowerMode power_mode;
    std::vector<Bits> bits_values;
    CellModel cell;
    std::size_t trials = 10000;
    std::uint64_t drop_seed = 1;
    std::uint64_t fading_seed = 1;
    double bandwidth = 1e6;   // Hz
    double c0 = 1e-4;         // W per antenna per quantization level
    double c1 = 0.02;         // W

    // Extensions beyond the basic grid.
    std::size_t num_drops = 1;                  // > 1 enables multi-drop averaging
    RhoSource rho_source = RhoSource::table_then_formula;
    bool monte_carlo = true;                    // false: closed form only
    std::optional<std::vector<double>> betas;   // controlled drop instead of a random one

    void validate() const
    {
        if (M_values.empty())
            throw std::invalid_argument("M_values must not be empty");
        if (bits_values.empty())
            throw std::invalid_argument("bits_values must not be empty");
        if (std::any_of(M_values.begin(), M_values.end(), [](unsigned m) { return m == 0; }))
            throw std::invalid_argument("M_values must be positive");
        if (N == 0)
            throw std::invalid_argument("N must be positive");
        if (monte_carlo && trials < min_mc_trials)
            throw std::invalid_argument("trials must be at least 100");
        if (!(bandwidth > 0.0))
            throw std::invalid_argument("bandwidth must be positive");
        if (!(c0 >= 0.0) || !(c1 >= 0.0))
            throw std::invalid_argument("power_constants must be non-negative");
        if (num_drops == 0)
            throw std::invalid_argument("num_drops must be positive");
        if (betas)
        {
            if (betas->size() != N)
                throw std::invalid_argument("betas has " + std::to_string(betas->size()) + " entries, expected N = " +
                                            std::to_string(N));
            if (std::any_of(betas->begin(), betas->end(), [](double b) { return !(b > 0.0); }))
                throw std::invalid_argument("betas must be positive");
            if (num_drops != 1)
                throw std::invalid_argument("a controlled drop (betas) cannot be combined with num_drops > 1");
        }
        else
        {
            cell.validate();
        }
    }
};

/// Drop index of the cross-drop average row.
inline constexpr std::size_t mean_drop_index = static_cast<std::size_t>(-1);

struct ResultRow
{
    unsigned M = 0;
    unsigned N = 0;
    Bits bits = Bits::infinite();
    double p_u_linear = 0.0;
    std::optional<double> sum_rate_mc;
    std::optional<double> sum_rate_mc_stderr;
    double sum_rate_approx = 0.0;
    std::optional<double> energy_efficiency;
    std::uint64_t drop_seed = 0;
    std::uint64_t fading_seed = 0;
    std::size_t trials = 0;
    // Fixed power: b -> infinity sum rate. Scaled power: M -> infinity sum rate.
    std::optional<double> reference_sum_rate;
    std::optional<std::size_t> drop_index; // multi-drop runs only; mean_drop_index for averages
};

struct ResultTable
{
    std::vector<ResultRow> rows;
    bool multi_drop = false;

    /// Canonical order: M, then bits with infinite last, then drop index.
    void sort()
    {
        std::stable_sort(rows.begin(), rows.end(), [](const ResultRow &a, const ResultRow &b) {
            if (a.M != b.M)
                return a.M < b.M;
            if (a.bits != b.bits)
                return a.bits < b.bits;
            return a.drop_index.value_or(0) < b.drop_index.value_or(0);
        });
    }
};

struct RunOptions
{
    unsigned jobs = 0;                  // 0: hardware concurrency
    std::size_t max_grid_points = 100000;
    std::function<void(std::string_view)> progress;
};

/// Seeds used for drop d of a multi-drop run (drop 0 uses the configured seeds).
inline std::uint64_t drop_seed_for(const ScenarioConfig &cfg, std::size_t d) { return cfg.drop_seed + d; }
inline std::uint64_t fading_seed_for(const ScenarioConfig &cfg, std::size_t d) { return cfg.fading_seed + d; }

/// Large-scale gains of drop d: the controlled betas or a random drop.
inline std::vector<double> scenario_betas(const ScenarioConfig &cfg, std::size_t d = 0)
{
    if (cfg.betas)
        return *cfg.betas;
    return betas_of(drop_users(cfg.cell, cfg.N, drop_seed_for(cfg, d)));
}

inline double reference_sum_rate(const ScenarioConfig &cfg, std::span<const double> betas, double M, double alpha)
{
    double sum = 0.0;
    for (std::size_t n = 0; n < betas.size(); ++n)
    {
        if (cfg.power_mode.kind == PowerMode::Kind::scaled)
            sum += power_scaled_limit(betas[n], cfg.power_mode.linear(), alpha);
        else
            sum += asymptotic_rate_infinite_bits(betas, n, M, cfg.power_mode.p_u(M));
    }
    return sum;
}

/// Evaluates the full (M_values x bits_values) grid for every drop.
inline ResultTable sweep(const ScenarioConfig &cfg, const RunOptions &opts = {})
{
    cfg.validate();
    const std::size_t grid = cfg.M_values.size() * cfg.bits_values.size() * cfg.num_drops;
    if (grid > opts.max_grid_points)
        throw std::invalid_argument("grid of " + std::to_string(grid) + " points exceeds the cap of " +
                                    std::to_string(opts.max_grid_points));

    std::vector<double> alphas;
    for (const Bits &b : cfg.bits_values)
        alphas.push_back(alpha_of_bits(b, cfg.rho_source));

    ResultTable table;
    table.multi_drop = cfg.num_drops > 1;
    std::size_t done = 0;
    for (std::size_t d = 0; d < cfg.num_drops; ++d)
    {
        const std::vector<double> betas = scenario_betas(cfg, d);
        for (unsigned M : cfg.M_values)
        {
            const double Md = static_cast<double>(M);
            const double p_u = cfg.power_mode.p_u(Md);
            std::vector<RatePoint> mc;
            if (cfg.monte_carlo)
                mc = ergodic_rates_mc(betas, M, p_u, alphas, cfg.trials, fading_seed_for(cfg, d), opts.jobs);

            for (std::size_t k = 0; k < cfg.bits_values.size(); ++k)
            {
                ResultRow row;
                row.M = M;
                row.N = cfg.N;
                row.bits = cfg.bits_values[k];
                row.p_u_linear = p_u;
                row.sum_rate_approx = sum_approx_rate(betas, Md, p_u, alphas[k]);
                if (cfg.monte_carlo)
                {
                    row.sum_rate_mc = mc[k].sum_rate_mc.mean;
                    row.sum_rate_mc_stderr = mc[k].sum_rate_mc.std_error;
                    row.trials = cfg.trials;
                }
                if (!row.bits.is_infinite())
                    row.energy_efficiency =
                        energy_efficiency(row.sum_rate_approx, cfg.bandwidth, Md, row.bits, cfg.c0, cfg.c1);
                row.drop_seed = drop_seed_for(cfg, d);
                row.fading_seed = fading_seed_for(cfg, d);
                row.reference_sum_rate = reference_sum_rate(cfg, betas, Md, alphas[k]);
                if (table.multi_drop)
                    row.drop_index = d;
                table.rows.push_back(row);
                ++done;
            }
            if (opts.progress)
                opts.progress("[" + std::to_string(done) + "/" + std::to_string(grid) + "] drop " + std::to_string(d) +
                              " M=" + std::to_string(M));
        }
    }

    if (table.multi_drop)
    {
        // One averaged row per (M, bits).
        const std::size_t per_drop = cfg.M_values.size() * cfg.bits_values.size();
        const double D = static_cast<double>(cfg.num_drops);
        for (std::size_t g = 0; g < per_drop; ++g)
        {
            ResultRow mean = table.rows[g];
            mean.drop_index = mean_drop_index;
            mean.drop_seed = cfg.drop_seed;
            mean.fading_seed = cfg.fading_seed;
            double approx = 0.0, mc = 0.0, var = 0.0, eta = 0.0, ref = 0.0;
            for (std::size_t d = 0; d < cfg.num_drops; ++d)
            {
                const ResultRow &r = table.rows[d * per_drop + g];
                approx += r.sum_rate_approx;
                mc += r.sum_rate_mc.value_or(0.0);
                var += r.sum_rate_mc_stderr.value_or(0.0) * r.sum_rate_mc_stderr.value_or(0.0);
                eta += r.energy_efficiency.value_or(0.0);
                ref += r.reference_sum_rate.value_or(0.0);
            }
            mean.sum_rate_approx = approx / D;
            if (cfg.monte_carlo)
            {
                mean.sum_rate_mc = mc / D;
                mean.sum_rate_mc_stderr = std::sqrt(var) / D;
                mean.trials = cfg.trials * cfg.num_drops;
            }
            if (mean.energy_efficiency)
                mean.energy_efficiency = eta / D;
            mean.reference_sum_rate = ref / D;
            table.rows.push_back(mean);
        }
    }

    table.sort();
    return table;
}

/// Sum rate versus M at fixed p_u = 10 dB, N = 10, b in {1, 2, inf}.
inline ScenarioConfig figure1_config()
{
    ScenarioConfig cfg;
    cfg.M_values = {32, 64, 128, 256, 512};
    cfg.N = 10;
    cfg.power_mode = PowerMode::fixed(10.0);
    cfg.bits_values = {Bits::finite(1), Bits::finite(2), Bits::infinite()};
    return cfg;
}

/// Sum rate versus M with p_u = E_u / M, E_u = 20 dB.
inline ScenarioConfig figure2_config()
{
    ScenarioConfig cfg = figure1_config();
    cfg.M_values = {32, 64, 128, 256, 512, 1024, 2048, 4096};
    cfg.power_mode = PowerMode::scaled(20.0);
    return cfg;
}

/// Closed-form sum rate and energy efficiency versus b = 1..12 at M = 100.
inline ScenarioConfig figure3_config()
{
    ScenarioConfig cfg = figure1_config();
    cfg.M_values = {100};
    cfg.bits_values.clear();
    for (unsigned b = 1; b <= 12; ++b)
        cfg.bits_values.push_back(Bits::finite(b));
    cfg.monte_carlo = false;
    return cfg;
}

inline ResultTable run_figure1(const ScenarioConfig &cfg = figure1_config(), const RunOptions &opts = {})
{
    return sweep(cfg, opts);
}

inline ResultTable run_figure2(const ScenarioConfig &cfg = figure2_config(), const RunOptions &opts = {})
{
    if (cfg.power_mode.kind != PowerMode::Kind::scaled)
        throw std::invalid_argument("figure 2 requires scaled transmit power");
    return sweep(cfg, opts);
}

inline ResultTable run_figure3(const ScenarioConfig &cfg = figure3_config(), const RunOptions &opts = {})
{
    if (std::any_of(cfg.bits_values.begin(), cfg.bits_values.end(), [](const Bits &b) { return b.is_infinite(); }))
        throw std::invalid_argument("figure 3 evaluates energy efficiency, which needs finite bit counts");
    return sweep(cfg, opts);
}

inline ScenarioConfig figure_config(int id)
{
    switch (id)
    {
    case 1:
        return figure1_config();
    case 2:
        return figure2_config();
    case 3:
        return figure3_config();
    default:
        throw std::invalid_argument("unknown figure id " + std::to_string(id) + " (expected 1, 2 or 3)");
    }
}

inline ResultTable run_figure(int id, const ScenarioConfig &cfg, const RunOptions &opts = {})
{
    switch (id)
    {
    case 1:
        return run_figure1(cfg, opts);
    case 2:
        return run_figure2(cfg, opts);
    case 3:
        return run_figure3(cfg, opts);
    default:
        throw std::invalid_argument("unknown figure id " + std::to_string(id) + " (expected 1, 2 or 3)");
    }
}

} // namespace qmimo

#endif
