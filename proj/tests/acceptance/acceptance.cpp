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

// Acceptance suite: one PASS/FAIL line per primary criterion, non-zero exit
// status if any criterion fails.

#include "qmimo/qmimo.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

using namespace qmimo;

namespace
{

struct Outcome
{
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(const char *name, const std::function<Outcome()> &body)
{
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try
    {
        o = body();
    }
    catch (const std::exception &e)
    {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass)
        ++failures;
    std::printf("[%s] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), seconds);
    std::fflush(stdout);
}

std::string fmt(const char *f, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double elapsed_since(std::chrono::steady_clock::time_point t)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

// Independent evaluation of I_G with explicit loops over antennas and users.
double brute_force_interference(const ComplexMatrix &G, Eigen::Index n, double p, double alpha)
{
    const Eigen::Index M = G.rows(), N = G.cols();
    ComplexMatrix C = ComplexMatrix::Identity(M, M);
    for (Eigen::Index a = 0; a < M; ++a)
        for (Eigen::Index b = 0; b < M; ++b)
            for (Eigen::Index i = 0; i < N; ++i)
                C(a, b) += p * G(a, i) * std::conj(G(b, i));
    double inter = 0.0, gain = 0.0, distortion = 0.0;
    for (Eigen::Index i = 0; i < N; ++i)
    {
        if (i == n)
            continue;
        std::complex<double> ip = 0.0;
        for (Eigen::Index m = 0; m < M; ++m)
            ip += std::conj(G(m, n)) * G(m, i);
        inter += std::norm(ip);
    }
    for (Eigen::Index m = 0; m < M; ++m)
    {
        gain += std::norm(G(m, n));
        distortion += std::norm(G(m, n)) * C(m, m).real();
    }
    return p * alpha * alpha * inter + alpha * alpha * gain + alpha * (1.0 - alpha) * distortion;
}

} // namespace

int main()
{
    criterion("Distortion factors of the MMSE quantizer (b = 1..5, +/-1e-3, < 5 s)", [] {
        const double table[] = {0.3634, 0.1175, 0.03454, 0.009497, 0.002499};
        const auto start = std::chrono::steady_clock::now();
        double worst = 0.0;
        for (unsigned b = 1; b <= 5; ++b)
            worst = std::max(worst, std::abs(design_lloyd_max(b).rho - table[b - 1]));
        const double t = elapsed_since(start);
        return Outcome{worst <= 1e-3 && t < 5.0, fmt("max |rho - table| = %.3g, runtime %.3f s", worst, t)};
    });

    criterion("Closed-form rate tightness (figure 1 preset, fixed drop, M = 32..256, b in {1,2,inf}, 1e4 trials, < 3%, < 5 min)", [] {
        ScenarioConfig cfg = figure1_config();
        cfg.M_values = {32, 64, 128, 256};
        cfg.trials = 10000;
        const auto start = std::chrono::steady_clock::now();
        const ResultTable t = sweep(cfg);
        const double seconds = elapsed_since(start);
        double worst = 0.0;
        unsigned worst_M = 0;
        std::string worst_bits;
        for (const auto &r : t.rows)
        {
            const double rel = std::abs(*r.sum_rate_mc - r.sum_rate_approx) / *r.sum_rate_mc;
            if (rel > worst)
            {
                worst = rel;
                worst_M = r.M;
                worst_bits = r.bits.to_string();
            }
        }
        return Outcome{worst < 0.03 && seconds < 300.0,
                       fmt("worst relative gap %.4f at M=%.0f, ", worst, worst_M) + "b=" + worst_bits +
                           fmt(", runtime %.1f s", seconds)};
    });

    criterion("Unquantized reduction (alpha = 1 equals the unquantized limit, 1000 configurations)", [] {
        Engine engine = make_engine(101, Stream::random_betas, 1);
        std::uniform_int_distribution<int> users(1, 16);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double worst_ulps = 0.0;
        for (int k = 0; k < 1000; ++k)
        {
            const auto betas = random_betas(users(engine), 5000 + k, 1e-4, 1.0);
            const double M = std::floor(1.0 + 4096.0 * unit(engine));
            const double p = std::pow(10.0, 8.0 * unit(engine) - 3.0);
            for (std::size_t n = 0; n < betas.size(); ++n)
            {
                const double a = approx_rate(betas, n, M, p, 1.0);
                const double b = asymptotic_rate_infinite_bits(betas, n, M, p);
                worst_ulps = std::max(worst_ulps, std::abs(a - b) / (std::numeric_limits<double>::epsilon() * b));
            }
        }
        return Outcome{worst_ulps <= 2.0, fmt("max difference %.1f ulp", worst_ulps)};
    });

    criterion("High-power saturation (p_u = 1e9, alpha < 1, within 1e-3 bits)", [] {
        Engine engine = make_engine(202, Stream::random_betas, 2);
        std::uniform_int_distribution<int> users(1, 16);
        std::uniform_int_distribution<unsigned> bits(1, 5);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double worst = 0.0;
        for (int k = 0; k < 1000; ++k)
        {
            const auto betas = random_betas(users(engine), 9000 + k);
            const double M = std::floor(1.0 + 4096.0 * unit(engine));
            const double alpha = alpha_of_bits(Bits::finite(bits(engine)));
            for (std::size_t n = 0; n < betas.size(); ++n)
            {
                const RateLimit limit = asymptotic_rate_infinite_power(betas, n, M, alpha);
                if (limit.unbounded)
                    return Outcome{false, "unexpected unbounded limit with alpha < 1"};
                worst = std::max(worst, std::abs(approx_rate(betas, n, M, 1e9, alpha) - limit.value));
            }
        }
        return Outcome{worst < 1e-3, fmt("max |rate - limit| = %.3g bits over 1000 configurations", worst)};
    });

    criterion("Power scaling (E_u = 20 dB, M = 2^20 within 0.01 bits; figure 2 grid saturates, gaps narrow)",
              [] {
                  const double E_u = db_to_linear(20.0);
                  const double M = std::ldexp(1.0, 20);
                  const std::vector<double> ones(10, 1.0);
                  double worst = 0.0;
                  for (const char *b : {"1", "2", "3", "4", "5", "inf"})
                  {
                      const double alpha = alpha_of_bits(Bits::parse(b));
                      worst = std::max(worst, std::abs(approx_rate(ones, 0, M, E_u / M, alpha) -
                                                       power_scaled_limit(1.0, E_u, alpha)));
                  }

                  ScenarioConfig cfg = figure2_config();
                  cfg.monte_carlo = false;
                  const ResultTable t = run_figure2(cfg);
                  const auto betas = scenario_betas(cfg);
                  bool monotone = true;
                  for (const Bits &bits : cfg.bits_values)
                  {
                      const double alpha = alpha_of_bits(bits);
                      for (std::size_t n = 0; n < betas.size(); ++n)
                      {
                          double previous = std::numeric_limits<double>::infinity();
                          for (unsigned m : cfg.M_values)
                          {
                              const double gap = std::abs(approx_rate(betas, n, m, E_u / m, alpha) -
                                                          power_scaled_limit(betas[n], E_u, alpha));
                              monotone = monotone && gap < previous;
                              previous = gap;
                          }
                      }
                  }
                  bool narrowing = true;
                  for (std::size_t i = 0; i + 2 < t.rows.size(); i += 3)
                  {
                      const double g21 = t.rows[i + 1].sum_rate_approx - t.rows[i].sum_rate_approx;
                      const double gi2 = t.rows[i + 2].sum_rate_approx - t.rows[i + 1].sum_rate_approx;
                      narrowing = narrowing && gi2 < g21;
                  }
                  return Outcome{worst < 0.01 && monotone && narrowing,
                                 fmt("max gap at 2^20 = %.3g bits", worst) + ", monotone convergence " +
                                     (monotone ? "yes" : "no") + ", narrowing gaps " + (narrowing ? "yes" : "no")};
              });

    criterion("Moment oracles (5 moments, M in {8, 64}, 1e4 realizations, within 3 standard errors, < 1 min)", [] {
        const auto start = std::chrono::steady_clock::now();
        const auto betas = random_betas(6, 303);
        double worst = 0.0;
        std::size_t count = 0;
        for (Eigen::Index M : {8, 64})
            for (const auto &c : channel_moment_checks(betas, M, 10.0, 10000, 404 + static_cast<std::uint64_t>(M)))
            {
                worst = std::max(worst, c.z_score());
                ++count;
            }
        const double t = elapsed_since(start);
        return Outcome{worst < 3.0 && t < 60.0, fmt("%.0f checks, max z = %.3f, runtime %.2f s", count, worst, t)};
    });

    criterion("AQNM validity (b = 1..3, 1e6 samples: distortion within 1%, |corr| < 3/sqrt(1e6))", [] {
        double worst_rel = 0.0, worst_corr = 0.0;
        for (unsigned b = 1; b <= 3; ++b)
        {
            const QuantizerSpec q = design_lloyd_max(b);
            const AqnmStatistics s = measure_aqnm_statistics(q, 1000000, 505 + b);
            worst_rel = std::max(worst_rel, std::abs(s.empirical_rho - q.rho) / q.rho);
            worst_corr = std::max(worst_corr, s.correlation_nq_y);
        }
        const double bound = 3.0 / std::sqrt(1e6);
        return Outcome{worst_rel < 0.01 && worst_corr < bound,
                       fmt("max relative distortion error %.4f, max |corr| %.5f (bound %.4f)", worst_rel, worst_corr,
                           bound)};
    });

    criterion("Energy-efficiency properties (figure 3 preset)", [] {
        const ResultTable t = run_figure3();
        bool nondecreasing = true, converging = true;
        for (std::size_t i = 1; i < t.rows.size(); ++i)
        {
            nondecreasing = nondecreasing && t.rows[i].sum_rate_approx >= t.rows[i - 1].sum_rate_approx;
            converging = converging && *t.rows[i].reference_sum_rate - t.rows[i].sum_rate_approx <
                                           *t.rows[i - 1].reference_sum_rate - t.rows[i - 1].sum_rate_approx;
        }
        const double final_gap = *t.rows.back().reference_sum_rate - t.rows.back().sum_rate_approx;
        const double eta1 = *t.rows[0].energy_efficiency, eta10 = *t.rows[9].energy_efficiency;
        const double P = receiver_power(100.0, Bits::finite(1), 1e-4, 0.02);
        const bool pass = nondecreasing && converging && final_gap < 1e-3 && eta1 > eta10 && P == 0.04;
        return Outcome{pass, fmt("gap to limit at b=12 %.2g bits, eta(1)/eta(10) = %.1f, P(100,1) = %.17g W", final_gap,
                                 eta1 / eta10, P) +
                                 (nondecreasing ? "" : ", sum rate decreases") + (converging ? "" : ", not converging")};
    });

    criterion("Oracle equivalence (interference variance vs brute force, 500 instances, 1e-12 relative)", [] {
        Engine engine = make_engine(606, Stream::random_betas, 3);
        std::uniform_int_distribution<int> dim(1, 8);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double worst = 0.0;
        for (int k = 0; k < 500; ++k)
        {
            const int M = dim(engine), N = dim(engine);
            const double p = std::pow(10.0, 6.0 * unit(engine) - 3.0);
            const double alpha = 0.05 + 0.95 * unit(engine);
            const auto betas = random_betas(N, 7000 + k, 1e-3, 1.0);
            const ComplexMatrix G = scale_columns(sample_fast_fading(M, N, engine), betas);
            for (Eigen::Index n = 0; n < N; ++n)
            {
                const double oracle = brute_force_interference(G, n, p, alpha);
                worst = std::max(worst, std::abs(interference_variance(G, n, p, alpha) - oracle) / oracle);
            }
        }
        return Outcome{worst < 1e-12, fmt("max relative error %.3g", worst)};
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
