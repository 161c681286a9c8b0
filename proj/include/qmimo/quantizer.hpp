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

#ifndef QMIMO_QUANTIZER_HPP
#define QMIMO_QUANTIZER_HPP

#include "qmimo/rng.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qmimo
{

/// ADC resolution: a finite bit count or infinite precision.
class Bits
{
  public:
    static constexpr unsigned max_finite = 64;

    static constexpr Bits infinite() { return Bits(0, true); }

    static Bits finite(unsigned bits)
    {
        if (bits == 0 || bits > max_finite)
            throw std::invalid_argument("bit count must be in [1, " + std::to_string(max_finite) + "], got " +
                                        std::to_string(bits));
        return Bits(bits, false);
    }

    /// Accepts a positive integer or "inf".
    static Bits parse(std::string_view token)
    {
        if (token == "inf" || token == "INF" || token == "infinite")
            return infinite();
        if (token.empty() || token.find_first_not_of("0123456789") != std::string_view::npos || token.size() > 3)
            throw std::invalid_argument("invalid bit count '" + std::string(token) + "' (expected positive integer or inf)");
        return finite(static_cast<unsigned>(std::stoul(std::string(token))));
    }

    constexpr bool is_infinite() const { return infinite_; }

    unsigned value() const
    {
        if (infinite_)
            throw std::logic_error("infinite resolution has no finite bit count");
        return bits_;
    }

    std::string to_string() const { return infinite_ ? "inf" : std::to_string(bits_); }

    friend constexpr bool operator==(const Bits &, const Bits &) = default;

    // Finite resolutions in increasing order, infinite last.
    friend constexpr bool operator<(const Bits &a, const Bits &b)
    {
        if (a.infinite_ || b.infinite_)
            return !a.infinite_ && b.infinite_;
        return a.bits_ < b.bits_;
    }

  private:
    constexpr Bits(unsigned bits, bool infinite) : bits_(bits), infinite_(infinite) {}

    unsigned bits_;
    bool infinite_;
};

/// MMSE scalar quantizer for a unit-variance Gaussian input.
///
/// `rho` is the normalized mean-square distortion E[(X - Q(X))^2] and
/// `alpha = 1 - rho` the gain of the additive quantization noise model.
/// For infinite resolution the threshold and level tables are empty.
struct QuantizerSpec
{
    Bits bits = Bits::infinite();
    std::vector<double> thresholds;
    std::vector<double> levels;
    double rho = 0.0;
    double alpha = 1.0;

    /// Maps a unit-variance value to its reconstruction level. A value equal to a
    /// threshold goes to the upper cell.
    double quantize_unit(double x) const
    {
        if (bits.is_infinite())
            return x;
        const auto cell = std::upper_bound(thresholds.begin(), thresholds.end(), x) - thresholds.begin();
        return levels[static_cast<std::size_t>(cell)];
    }
};

inline QuantizerSpec infinite_resolution_quantizer() { return QuantizerSpec{}; }

/// Thrown when Lloyd-Max does not meet its tolerance; carries the last iterate.
class ConvergenceError : public std::runtime_error
{
  public:
    ConvergenceError(QuantizerSpec last_iterate, unsigned iterations, double last_relative_change)
        : std::runtime_error("Lloyd-Max design for " + last_iterate.bits.to_string() + " bits did not converge in " +
                             std::to_string(iterations) + " iterations (last relative change " +
                             std::to_string(last_relative_change) + ")"),
          last_iterate_(std::move(last_iterate)), iterations_(iterations), last_relative_change_(last_relative_change)
    {
    }

    const QuantizerSpec &last_iterate() const { return last_iterate_; }
    unsigned iterations() const { return iterations_; }
    double last_relative_change() const { return last_relative_change_; }

  private:
    QuantizerSpec last_iterate_;
    unsigned iterations_;
    double last_relative_change_;
};

namespace detail
{

inline double gaussian_pdf(double x)
{
    if (std::isinf(x))
        return 0.0;
    return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

// Upper tail probability 1 - Phi(x).
inline double gaussian_tail(double x)
{
    if (x == std::numeric_limits<double>::infinity())
        return 0.0;
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

// Inverse of the upper tail for q in (0, 1/2].
inline double gaussian_upper_quantile(double q) { return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q); }

/// Mass, conditional mean and conditional variance of a standard Gaussian
/// restricted to [lo, hi), 0 <= lo < hi <= +inf.
struct CellMoments
{
    double mass;
    double mean;
    double variance;
};

inline CellMoments cell_moments(double lo, double hi)
{
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);

    // Narrow cells: integrate the Taylor expansion of the density about the
    // midpoint, phi(mid + u) = phi(mid) * sum_k (-1)^k He_k(mid) u^k / k!,
    // so that the conditional variance does not suffer cancellation.
    if (std::isfinite(hi) && half * (std::abs(mid) + 1.0) <= 0.5)
    {
        double he_prev = 1.0; // He_{k-1}(mid)
        double he = mid;      // He_k(mid)
        double power = half;  // half^k / k!
        double i0 = 2.0 * half;                      // int phi / phi(mid)
        double i1 = -mid * half * 2.0 * half * half / 3.0; // int u phi / phi(mid)
        double i2 = 2.0 * half * half * half / 3.0;  // int u^2 phi / phi(mid)
        for (int k = 2; k <= 60; ++k)
        {
            const double he_next = mid * he - (k - 1) * he_prev;
            he_prev = he;
            he = he_next;
            power *= half / k;
            const double coef = (k % 2 ? -he : he) * power;
            if (k % 2 == 0)
            {
                const double t0 = coef * 2.0 * half / (k + 1);
                const double t2 = coef * 2.0 * half * half * half / (k + 3);
                i0 += t0;
                i2 += t2;
                if (std::abs(t0) <= 1e-17 * i0 && std::abs(t2) <= 1e-17 * i2)
                    break;
            }
            else
            {
                i1 += coef * 2.0 * half * half / (k + 2);
            }
        }
        const double shift = i1 / i0;
        return {gaussian_pdf(mid) * i0, mid + shift, i2 / i0 - shift * shift};
    }

    const double mass = gaussian_tail(lo) - gaussian_tail(hi);
    const double pdf_lo = gaussian_pdf(lo);
    const double pdf_hi = gaussian_pdf(hi);
    const double first = pdf_lo - pdf_hi;
    const double second = mass + lo * pdf_lo - (std::isfinite(hi) ? hi * pdf_hi : 0.0);
    const double mean = first / mass;
    return {mass, mean, std::max(second / mass - mean * mean, 0.0)};
}

// Positive half of a symmetric quantizer: boundaries[0] = 0 < boundaries[1] < ...,
// cell j is [boundaries[j], boundaries[j+1]) with the last cell unbounded.
struct HalfQuantizer
{
    std::vector<double> boundaries;
    std::vector<double> levels;
};

// Distortion contributed by both halves for the given boundaries and levels.
inline double symmetric_distortion(const HalfQuantizer &half)
{
    const std::size_t cells = half.levels.size();
    double total = 0.0;
    for (std::size_t j = 0; j < cells; ++j)
    {
        const double hi = j + 1 < cells ? half.boundaries[j + 1] : std::numeric_limits<double>::infinity();
        const CellMoments c = cell_moments(half.boundaries[j], hi);
        const double bias = c.mean - half.levels[j];
        total += c.mass * (c.variance + bias * bias);
    }
    return 2.0 * total;
}

// One Lloyd step: nearest-neighbour boundaries from the levels, then centroids.
// Returns the distortion of the new (boundaries, levels) pair.
inline double lloyd_step(HalfQuantizer &half)
{
    const std::size_t cells = half.levels.size();
    half.boundaries.assign(cells, 0.0);
    for (std::size_t j = 1; j < cells; ++j)
        half.boundaries[j] = 0.5 * (half.levels[j - 1] + half.levels[j]);

    double total = 0.0;
    for (std::size_t j = 0; j < cells; ++j)
    {
        const double hi = j + 1 < cells ? half.boundaries[j + 1] : std::numeric_limits<double>::infinity();
        const CellMoments c = cell_moments(half.boundaries[j], hi);
        half.levels[j] = c.mean;
        total += c.mass * c.variance;
    }
    return 2.0 * total;
}

// Newton correction for the Lloyd fixed point centroid(midpoints(levels)) = levels.
// The Jacobian is tridiagonal because cell j only sees levels j-1, j and j+1.
// Returns false when the corrected levels are not strictly increasing and positive.
inline bool newton_update(std::vector<double> &levels)
{
    const std::size_t cells = levels.size();
    std::vector<double> lower(cells, 0.0), diag(cells, 0.0), upper(cells, 0.0), rhs(cells, 0.0);
    for (std::size_t j = 0; j < cells; ++j)
    {
        const double lo = j == 0 ? 0.0 : 0.5 * (levels[j - 1] + levels[j]);
        const double hi = j + 1 < cells ? 0.5 * (levels[j] + levels[j + 1]) : std::numeric_limits<double>::infinity();
        const CellMoments c = cell_moments(lo, hi);
        const double d_lo = gaussian_pdf(lo) * (c.mean - lo) / c.mass;
        const double d_hi = std::isfinite(hi) ? gaussian_pdf(hi) * (hi - c.mean) / c.mass : 0.0;
        diag[j] = -1.0;
        if (j > 0)
        {
            lower[j] = 0.5 * d_lo;
            diag[j] += 0.5 * d_lo;
        }
        if (j + 1 < cells)
        {
            upper[j] = 0.5 * d_hi;
            diag[j] += 0.5 * d_hi;
        }
        rhs[j] = levels[j] - c.mean;
    }

    // Thomas algorithm.
    for (std::size_t j = 1; j < cells; ++j)
    {
        const double w = lower[j] / diag[j - 1];
        diag[j] -= w * upper[j - 1];
        rhs[j] -= w * rhs[j - 1];
    }
    std::vector<double> step(cells);
    for (std::size_t j = cells; j-- > 0;)
        step[j] = (rhs[j] - (j + 1 < cells ? upper[j] * step[j + 1] : 0.0)) / diag[j];

    std::vector<double> next(cells);
    for (std::size_t j = 0; j < cells; ++j)
    {
        next[j] = levels[j] + step[j];
        if (!std::isfinite(next[j]) || next[j] <= (j == 0 ? 0.0 : next[j - 1]))
            return false;
    }
    levels = std::move(next);
    return true;
}

inline QuantizerSpec expand(const HalfQuantizer &half, unsigned bits, double rho)
{
    QuantizerSpec spec;
    spec.bits = Bits::finite(bits);
    const std::size_t cells = half.levels.size();
    spec.levels.reserve(2 * cells);
    spec.thresholds.reserve(2 * cells - 1);
    for (std::size_t j = cells; j-- > 0;)
        spec.levels.push_back(-half.levels[j]);
    for (std::size_t j = 0; j < cells; ++j)
        spec.levels.push_back(half.levels[j]);
    for (std::size_t j = cells; j-- > 1;)
        spec.thresholds.push_back(-half.boundaries[j]);
    spec.thresholds.push_back(0.0);
    for (std::size_t j = 1; j < cells; ++j)
        spec.thresholds.push_back(half.boundaries[j]);
    spec.rho = rho;
    spec.alpha = 1.0 - rho;
    return spec;
}

inline HalfQuantizer positive_half(const QuantizerSpec &spec)
{
    const std::size_t cells = spec.levels.size() / 2;
    HalfQuantizer half;
    half.levels.assign(spec.levels.begin() + static_cast<std::ptrdiff_t>(cells), spec.levels.end());
    half.boundaries.assign(spec.thresholds.begin() + static_cast<std::ptrdiff_t>(cells - 1), spec.thresholds.end());
    return half;
}

} // namespace detail

inline constexpr double default_lloyd_tolerance = 1e-12;
inline constexpr unsigned default_lloyd_iterations = 10000;
inline constexpr unsigned max_design_bits = 16;

/// Lloyd-Max design for a unit-variance Gaussian source.
///
/// Starts from levels at the Gaussian quantiles of equal-probability cell
/// midpoints and alternates nearest-neighbour and centroid updates until the
/// relative change of the distortion drops below `tolerance`. Each update is
/// Newton-accelerated when that helps. Cell masses, centroids and distortions
/// are evaluated in closed form.
inline QuantizerSpec design_lloyd_max(unsigned bits, double tolerance = default_lloyd_tolerance,
                                      unsigned max_iterations = default_lloyd_iterations)
{
    if (bits < 1 || bits > max_design_bits)
        throw std::invalid_argument("design_lloyd_max: bits must be in [1, 16], got " + std::to_string(bits));
    if (!(tolerance > 0.0))
        throw std::invalid_argument("design_lloyd_max: tolerance must be positive");
    if (max_iterations == 0)
        throw std::invalid_argument("design_lloyd_max: max_iterations must be positive");

    const std::size_t levels = std::size_t{1} << bits;
    const std::size_t cells = levels / 2;

    detail::HalfQuantizer half;
    half.levels.resize(cells);
    for (std::size_t j = 0; j < cells; ++j)
        half.levels[j] = detail::gaussian_upper_quantile(0.5 - (static_cast<double>(j) + 0.5) / static_cast<double>(levels));

    double distortion = std::numeric_limits<double>::infinity();
    double change = std::numeric_limits<double>::infinity();
    for (unsigned it = 1; it <= max_iterations; ++it)
    {
        // Plain Lloyd converges linearly and stalls for fine quantizers; a
        // Newton-corrected candidate is kept whenever it lowers the distortion.
        detail::HalfQuantizer plain = half;
        double next = detail::lloyd_step(plain);
        detail::HalfQuantizer accelerated = half;
        if (detail::newton_update(accelerated.levels))
        {
            const double candidate = detail::lloyd_step(accelerated);
            if (candidate < next)
            {
                next = candidate;
                plain = std::move(accelerated);
            }
        }
        half = std::move(plain);
        change = std::abs(distortion - next) / next;
        distortion = next;
        if (change < tolerance)
            return detail::expand(half, bits, distortion);
    }
    throw ConvergenceError(detail::expand(half, bits, distortion), max_iterations, change);
}

/// Applies one more Lloyd step to a designed spec.
inline QuantizerSpec lloyd_iteration(const QuantizerSpec &spec)
{
    if (spec.bits.is_infinite())
        return spec;
    detail::HalfQuantizer half = detail::positive_half(spec);
    const double distortion = detail::lloyd_step(half);
    return detail::expand(half, spec.bits.value(), distortion);
}

/// E[(X - Q(X))^2] for X ~ N(0,1) and an arbitrary odd-symmetric spec.
inline double gaussian_distortion(const QuantizerSpec &spec)
{
    if (spec.bits.is_infinite())
        return 0.0;
    return detail::symmetric_distortion(detail::positive_half(spec));
}

enum class RhoSource
{
    table_then_formula,
    lloyd_max,
};

// Distortion factors of the MMSE Gaussian quantizer for 1 to 5 bits.
inline constexpr std::array<double, 5> rho_table = {0.3634, 0.1175, 0.03454, 0.009497, 0.002499};

/// High-resolution approximation (pi * sqrt(3) / 2) * 2^(-2b).
inline double rho_high_resolution(unsigned bits)
{
    return std::numbers::pi * std::sqrt(3.0) / 2.0 * std::ldexp(1.0, -2 * static_cast<int>(bits));
}

inline double rho_of_bits(Bits bits, RhoSource source = RhoSource::table_then_formula)
{
    if (bits.is_infinite())
        return 0.0;
    const unsigned b = bits.value();
    if (source == RhoSource::lloyd_max)
        return design_lloyd_max(b).rho;
    if (b <= rho_table.size())
        return rho_table[b - 1];
    return rho_high_resolution(b);
}

inline double alpha_of_bits(Bits bits, RhoSource source = RhoSource::table_then_formula)
{
    return 1.0 - rho_of_bits(bits, source);
}

/// Quantizes real and imaginary parts independently after scaling each to
/// unit variance (input_variance is split evenly between the components).
inline std::vector<std::complex<double>> quantize_stream(std::span<const std::complex<double>> samples,
                                                         const QuantizerSpec &spec, double input_variance)
{
    if (!(input_variance > 0.0) || !std::isfinite(input_variance))
        throw std::invalid_argument("quantize_stream: input_variance must be positive and finite");
    for (const auto &s : samples)
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
            throw std::invalid_argument("quantize_stream: non-finite sample");

    std::vector<std::complex<double>> out(samples.begin(), samples.end());
    if (spec.bits.is_infinite())
        return out;

    const double scale = std::sqrt(input_variance / 2.0);
    for (auto &s : out)
        s = {scale * spec.quantize_unit(s.real() / scale), scale * spec.quantize_unit(s.imag() / scale)};
    return out;
}

struct AqnmStatistics
{
    double empirical_rho = 0.0;
    double rho_std_error = 0.0;
    double correlation_nq_y = 0.0;
};

inline constexpr std::size_t min_aqnm_samples = 10000;

/// Empirical check of the additive quantization noise model on CN(0,1) input:
/// distortion E|y - Q(y)|^2 / E|y|^2 and the normalized correlation between
/// n_q = Q(y) - alpha * y and y.
inline AqnmStatistics measure_aqnm_statistics(const QuantizerSpec &spec, std::size_t num_samples, std::uint64_t seed)
{
    if (num_samples < min_aqnm_samples)
        throw std::invalid_argument("measure_aqnm_statistics: num_samples must be at least 10^4");

    Engine engine = make_engine(seed, Stream::aqnm_samples);
    ComplexNormal draw(1.0);

    std::vector<std::complex<double>> y(num_samples);
    for (auto &v : y)
        v = draw(engine);
    const auto yq = quantize_stream(y, spec, 1.0);

    double err = 0.0, err2 = 0.0, pow = 0.0, pow2 = 0.0, err_pow = 0.0, nq_pow = 0.0;
    std::complex<double> cross = 0.0;
    for (std::size_t i = 0; i < num_samples; ++i)
    {
        const double e = std::norm(y[i] - yq[i]);
        const double p = std::norm(y[i]);
        const std::complex<double> nq = yq[i] - spec.alpha * y[i];
        err += e;
        err2 += e * e;
        pow += p;
        pow2 += p * p;
        err_pow += e * p;
        nq_pow += std::norm(nq);
        cross += nq * std::conj(y[i]);
    }

    const double n = static_cast<double>(num_samples);
    AqnmStatistics stats;
    stats.empirical_rho = err / pow;
    // Delta-method standard error of the ratio estimator.
    const double r = stats.empirical_rho;
    const double resid2 = err2 - 2.0 * r * err_pow + r * r * pow2;
    stats.rho_std_error = std::sqrt(std::max(resid2, 0.0) / (n * (n - 1.0))) / (pow / n);
    stats.correlation_nq_y = nq_pow > 0.0 ? std::abs(cross) / std::sqrt(nq_pow * pow) : 0.0;
    return stats;
}

} // namespace qmimo

#endif
