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

#ifndef QMIMO_RATE_ANALYSIS_HPP
#define QMIMO_RATE_ANALYSIS_HPP

#include "qmimo/channel.hpp"
#include "qmimo/parallel.hpp"
#include "qmimo/quantizer.hpp"
#include "qmimo/rng.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmimo
{

struct MonteCarloEstimate
{
    double mean = 0.0;
    double std_error = 0.0; // sample standard deviation / sqrt(trials)
    std::size_t trials = 0;
};

/// Mean and standard error of per-trial values, summed in index order.
inline MonteCarloEstimate summarize(std::span<const double> samples)
{
    MonteCarloEstimate est;
    est.trials = samples.size();
    if (samples.empty())
        return est;
    const double n = static_cast<double>(samples.size());
    double sum = 0.0;
    for (double v : samples)
        sum += v;
    est.mean = sum / n;
    if (samples.size() > 1)
    {
        double ss = 0.0;
        for (double v : samples)
            ss += (v - est.mean) * (v - est.mean);
        est.std_error = std::sqrt(ss / (n - 1.0) / n);
    }
    return est;
}

struct RatePoint
{
    std::vector<MonteCarloEstimate> per_user_mc;
    std::vector<double> per_user_approx;
    MonteCarloEstimate sum_rate_mc;
    double sum_rate_approx = 0.0;
    std::optional<double> energy_efficiency; // bit/J
};

namespace detail
{

inline void check_user(const ComplexMatrix &G, Eigen::Index n)
{
    if (n < 0 || n >= G.cols())
        throw std::out_of_range("user index " + std::to_string(n) + " outside [0, " + std::to_string(G.cols()) + ")");
}

inline void check_alpha(double alpha)
{
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("alpha must lie in (0, 1]");
}

} // namespace detail

/// Alpha-independent per-user quantities of one channel realization:
///   signal      = ||g_n||^2
///   interference = sum_{i != n} |g_n^H g_i|^2
///   distortion  = g_n^H diag(p_u G G^H + I) g_n
///               = sum_m |g_mn|^2 (1 + p_u sum_i |g_mi|^2)
struct LinkStatistics
{
    RealVector signal;
    RealVector interference;
    RealVector distortion;
};

inline LinkStatistics link_statistics(const ComplexMatrix &G, double p_u)
{
    const ComplexMatrix gram = G.adjoint() * G;
    const RealVector row_load = (G.cwiseAbs2().rowwise().sum() * p_u).array() + 1.0;

    LinkStatistics s;
    s.signal = gram.diagonal().real();
    s.interference = RealVector::Zero(G.cols());
    for (Eigen::Index n = 0; n < G.cols(); ++n)
        for (Eigen::Index i = 0; i < G.cols(); ++i)
            if (i != n)
                s.interference(n) += std::norm(gram(i, n));
    s.distortion = G.cwiseAbs2().transpose() * row_load;
    return s;
}

// Interference-plus-noise variance and rate from precomputed statistics.
inline double interference_variance(const LinkStatistics &s, Eigen::Index n, double p_u, double alpha)
{
    const double a2 = alpha * alpha;
    return p_u * a2 * s.interference(n) + a2 * s.signal(n) + alpha * (1.0 - alpha) * s.distortion(n);
}

inline double instantaneous_rate(const LinkStatistics &s, Eigen::Index n, double p_u, double alpha)
{
    const double signal = s.signal(n);
    if (signal <= 0.0)
        return 0.0;
    const double numerator = p_u * alpha * alpha * signal * signal;
    return std::log2(1.0 + numerator / interference_variance(s, n, p_u, alpha));
}

/// Variance of the noise-plus-interference term of MRC output n for a fixed G.
inline double interference_variance(const ComplexMatrix &G, Eigen::Index n, double p_u, double alpha)
{
    detail::check_user(G, n);
    if (!(p_u > 0.0))
        throw std::invalid_argument("interference_variance: p_u must be positive");
    detail::check_alpha(alpha);
    return interference_variance(link_statistics(G, p_u), n, p_u, alpha);
}

/// log2(1 + p_u alpha^2 ||g_n||^4 / I_G); zero for an all-zero column.
inline double instantaneous_rate(const ComplexMatrix &G, Eigen::Index n, double p_u, double alpha)
{
    detail::check_user(G, n);
    if (!(p_u > 0.0))
        throw std::invalid_argument("instantaneous_rate: p_u must be positive");
    detail::check_alpha(alpha);
    return instantaneous_rate(link_statistics(G, p_u), n, p_u, alpha);
}

inline constexpr std::size_t min_mc_trials = 100;

/// Ergodic rates for several alphas over the same fast-fading realizations.
/// Trial t draws H from derive_seed(seed, fast_fading, t), so the estimate is
/// independent of how trials are split across `jobs` workers. Only the Monte
/// Carlo fields of each RatePoint are filled.
inline std::vector<RatePoint> ergodic_rates_mc(std::span<const double> betas, Eigen::Index M, double p_u,
                                               std::span<const double> alphas, std::size_t trials,
                                               std::uint64_t seed, unsigned jobs = 0)
{
    if (betas.empty())
        throw std::invalid_argument("ergodic_rate_mc: at least one user is required");
    if (M < 1)
        throw std::invalid_argument("ergodic_rate_mc: M must be positive");
    if (!(p_u > 0.0))
        throw std::invalid_argument("ergodic_rate_mc: p_u must be positive");
    if (trials < min_mc_trials)
        throw std::invalid_argument("ergodic_rate_mc: trials must be at least 100");
    for (double a : alphas)
        detail::check_alpha(a);

    const std::size_t N = betas.size();
    const std::size_t A = alphas.size();
    // rates[(a * trials + t) * N + n]
    std::vector<double> rates(A * trials * N);

    parallel_chunks(trials, jobs, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t)
        {
            Engine engine = make_engine(seed, Stream::fast_fading, t);
            const ComplexMatrix G = scale_columns(sample_fast_fading(M, static_cast<Eigen::Index>(N), engine), betas);
            const LinkStatistics stats = link_statistics(G, p_u);
            for (std::size_t a = 0; a < A; ++a)
                for (std::size_t n = 0; n < N; ++n)
                    rates[(a * trials + t) * N + n] =
                        instantaneous_rate(stats, static_cast<Eigen::Index>(n), p_u, alphas[a]);
        }
    });

    std::vector<RatePoint> points(A);
    std::vector<double> column(trials);
    for (std::size_t a = 0; a < A; ++a)
    {
        RatePoint &pt = points[a];
        for (std::size_t n = 0; n < N; ++n)
        {
            for (std::size_t t = 0; t < trials; ++t)
                column[t] = rates[(a * trials + t) * N + n];
            pt.per_user_mc.push_back(summarize(column));
        }
        for (std::size_t t = 0; t < trials; ++t)
        {
            double sum = 0.0;
            for (std::size_t n = 0; n < N; ++n)
                sum += rates[(a * trials + t) * N + n];
            column[t] = sum;
        }
        pt.sum_rate_mc = summarize(column);
    }
    return points;
}

inline RatePoint ergodic_rate_mc(std::span<const double> betas, Eigen::Index M, double p_u, double alpha,
                                 std::size_t trials, std::uint64_t seed, unsigned jobs = 0)
{
    const double alphas[] = {alpha};
    return ergodic_rates_mc(betas, M, p_u, alphas, trials, seed, jobs).front();
}

namespace detail
{

inline void check_closed_form(std::span<const double> betas, std::size_t n, double M)
{
    if (betas.empty() || n >= betas.size())
        throw std::out_of_range("user index outside the beta vector");
    if (!(M >= 1.0))
        throw std::invalid_argument("M must be at least 1");
}

inline double sum_except(std::span<const double> betas, std::size_t n)
{
    double s = 0.0;
    for (std::size_t i = 0; i < betas.size(); ++i)
        if (i != n)
            s += betas[i];
    return s;
}

} // namespace detail

/// Closed-form approximation of the ergodic rate of user n:
///   log2(1 + p_u alpha beta_n (M + 1) / I),
///   I = p_u alpha sum_{i != n} beta_i + p_u (1 - alpha) (sum_i beta_i + beta_n) + 1.
/// M is real so that asymptotic checks can go beyond integer range.
inline double approx_rate(std::span<const double> betas, std::size_t n, double M, double p_u, double alpha)
{
    detail::check_closed_form(betas, n, M);
    if (!(p_u > 0.0))
        throw std::invalid_argument("approx_rate: p_u must be positive");
    detail::check_alpha(alpha);
    const double others = detail::sum_except(betas, n);
    const double total = others + betas[n];
    const double denom = p_u * alpha * others + p_u * (1.0 - alpha) * (total + betas[n]) + 1.0;
    return std::log2(1.0 + p_u * alpha * betas[n] * (M + 1.0) / denom);
}

inline double sum_approx_rate(std::span<const double> betas, double M, double p_u, double alpha)
{
    double sum = 0.0;
    for (std::size_t n = 0; n < betas.size(); ++n)
        sum += approx_rate(betas, n, M, p_u, alpha);
    return sum;
}

/// Infinite-resolution limit: log2(1 + p_u beta_n (M + 1) / (p_u sum_{i != n} beta_i + 1)).
inline double asymptotic_rate_infinite_bits(std::span<const double> betas, std::size_t n, double M, double p_u)
{
    detail::check_closed_form(betas, n, M);
    if (!(p_u > 0.0))
        throw std::invalid_argument("asymptotic_rate_infinite_bits: p_u must be positive");
    return std::log2(1.0 + p_u * betas[n] * (M + 1.0) / (p_u * detail::sum_except(betas, n) + 1.0));
}

/// Limit of a rate expression that may be unbounded.
struct RateLimit
{
    double value = 0.0;
    bool unbounded = false;

    static RateLimit infinite() { return {std::numeric_limits<double>::infinity(), true}; }
};

/// p_u -> infinity limit:
///   log2(1 + alpha beta_n (M + 1) / (sum_{i != n} beta_i + 2 (1 - alpha) beta_n)).
/// With a single user and alpha = 1 the denominator vanishes and the limit is
/// reported as unbounded.
inline RateLimit asymptotic_rate_infinite_power(std::span<const double> betas, std::size_t n, double M, double alpha)
{
    detail::check_closed_form(betas, n, M);
    detail::check_alpha(alpha);
    const double denom = detail::sum_except(betas, n) + 2.0 * (1.0 - alpha) * betas[n];
    if (denom <= 0.0)
        return RateLimit::infinite();
    return {std::log2(1.0 + alpha * betas[n] * (M + 1.0) / denom), false};
}

/// M -> infinity limit with p_u = E_u / M: log2(1 + alpha beta_n E_u).
inline double power_scaled_limit(double beta_n, double E_u, double alpha)
{
    detail::check_alpha(alpha);
    if (!(beta_n > 0.0) || !(E_u > 0.0))
        throw std::invalid_argument("power_scaled_limit: beta_n and E_u must be positive");
    return std::log2(1.0 + alpha * beta_n * E_u);
}

/// Receiver power P = c0 M 2^b + c1 in Watt.
inline double receiver_power(double M, Bits bits, double c0, double c1)
{
    if (bits.is_infinite())
        throw std::invalid_argument("receiver power is unbounded for infinite-resolution ADCs");
    return c0 * M * std::ldexp(1.0, static_cast<int>(bits.value())) + c1;
}

/// Energy efficiency B R / P in bit/J.
inline double energy_efficiency(double sum_rate, double bandwidth, double M, Bits bits, double c0, double c1)
{
    if (bits.is_infinite())
        throw std::invalid_argument("energy_efficiency: undefined for infinite-resolution ADCs (P diverges)");
    if (!(bandwidth > 0.0))
        throw std::invalid_argument("energy_efficiency: bandwidth must be positive");
    return bandwidth * sum_rate / receiver_power(M, bits, c0, c1);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

} // namespace qmimo

#endif
