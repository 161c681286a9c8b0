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

#ifndef QMIMO_VALIDATION_HPP
#define QMIMO_VALIDATION_HPP

#include "qmimo/channel.hpp"
#include "qmimo/parallel.hpp"
#include "qmimo/quantizer.hpp"
#include "qmimo/rate_analysis.hpp"
#include "qmimo/rng.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace qmimo
{

/// A Monte Carlo estimate compared against its closed-form value.
struct StatisticalCheck
{
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;
    double expected = 0.0;

    double z_score() const
    {
        const double diff = std::abs(estimate - expected);
        if (std_error > 0.0)
            return diff / std_error;
        return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }

    bool passed(double limit = 3.0) const { return z_score() < limit; }
};

/// Log-uniform large-scale gains in [lo, hi].
inline std::vector<double> random_betas(std::size_t N, std::uint64_t seed, double lo = 1e-2, double hi = 1.0)
{
    Engine engine = make_engine(seed, Stream::random_betas);
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    std::vector<double> betas(N);
    for (auto &b : betas)
        b = std::exp(u(engine));
    return betas;
}

/// Second-order channel moments that enter the closed-form rate, checked for
/// user 0 (and user 1 as the interferer) against their Monte Carlo estimates:
///   E||g_n||^2 = beta_n M,  Var||g_n||^2 = beta_n^2 M,
///   E||g_n||^4 = beta_n^2 (M^2 + M),  E|g_n^H g_i|^2 = beta_n beta_i M,
///   E g_n^H diag(p_u G G^H + I) g_n = M (beta_n + p_u beta_n sum_i beta_i + p_u beta_n^2).
inline std::vector<StatisticalCheck> channel_moment_checks(std::span<const double> betas, Eigen::Index M, double p_u,
                                                           std::size_t trials, std::uint64_t seed, unsigned jobs = 0)
{
    if (betas.size() < 2)
        throw std::invalid_argument("channel_moment_checks: need at least two users");
    if (trials < 2)
        throw std::invalid_argument("channel_moment_checks: need at least two trials");

    std::vector<double> norm2(trials), cross(trials), distortion(trials);
    parallel_chunks(trials, jobs, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t)
        {
            Engine engine = make_engine(seed, Stream::moment_oracle, t);
            const ComplexMatrix G =
                scale_columns(sample_fast_fading(M, static_cast<Eigen::Index>(betas.size()), engine), betas);
            norm2[t] = G.col(0).squaredNorm();
            cross[t] = std::norm(G.col(0).dot(G.col(1)));
            double d = 0.0;
            for (Eigen::Index m = 0; m < M; ++m)
                d += std::norm(G(m, 0)) * (1.0 + p_u * G.row(m).squaredNorm());
            distortion[t] = d;
        }
    });

    const double Md = static_cast<double>(M);
    const double b0 = betas[0], b1 = betas[1];
    double total = 0.0;
    for (double b : betas)
        total += b;
    const std::string tag = " (M=" + std::to_string(M) + ")";

    std::vector<double> norm4(trials);
    for (std::size_t t = 0; t < trials; ++t)
        norm4[t] = norm2[t] * norm2[t];

    const MonteCarloEstimate e2 = summarize(norm2);
    const MonteCarloEstimate e4 = summarize(norm4);
    const MonteCarloEstimate ec = summarize(cross);
    const MonteCarloEstimate ed = summarize(distortion);

    // Sample variance and its delta-method standard error.
    const double T = static_cast<double>(trials);
    double m2 = 0.0, m4 = 0.0;
    for (double v : norm2)
    {
        const double d = v - e2.mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    const double variance = m2 / (T - 1.0);
    m4 /= T;
    const double variance_se = std::sqrt(std::max(m4 - variance * variance, 0.0) / T);

    return {
        {"E||g_n||^2 = beta_n M" + tag, e2.mean, e2.std_error, b0 * Md},
        {"Var||g_n||^2 = beta_n^2 M" + tag, variance, variance_se, b0 * b0 * Md},
        {"E||g_n||^4 = beta_n^2 (M^2 + M)" + tag, e4.mean, e4.std_error, b0 * b0 * (Md * Md + Md)},
        {"E|g_n^H g_i|^2 = beta_n beta_i M" + tag, ec.mean, ec.std_error, b0 * b1 * Md},
        {"E g_n^H diag(p_u G G^H + I) g_n" + tag, ed.mean, ed.std_error,
         Md * (b0 + p_u * b0 * total + p_u * b0 * b0)},
    };
}

/// Distortion and noise/signal decorrelation of the true quantizer on CN(0,1)
/// input. The correlation check uses 3 / sqrt(num_samples) as its bound,
/// expressed as a z-score against a standard error of 1 / sqrt(num_samples).
inline std::vector<StatisticalCheck> aqnm_checks(const QuantizerSpec &spec, std::size_t num_samples, std::uint64_t seed)
{
    const AqnmStatistics s = measure_aqnm_statistics(spec, num_samples, seed);
    const std::string tag = " (b=" + spec.bits.to_string() + ")";
    return {
        {"AQNM distortion E|y-Q(y)|^2/E|y|^2 = rho" + tag, s.empirical_rho, s.rho_std_error, spec.rho},
        {"AQNM |corr(n_q, y)| = 0" + tag, s.correlation_nq_y, 1.0 / std::sqrt(static_cast<double>(num_samples)), 0.0},
    };
}

} // namespace qmimo

#endif
