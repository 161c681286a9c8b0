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

#ifndef QMIMO_RNG_HPP
#define QMIMO_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace qmimo
{

// Stream identifiers keep draws for different purposes independent even when
// the user passes the same seed everywhere.
enum class Stream : std::uint64_t
{
    user_drop = 1,
    fast_fading = 2,
    aqnm_samples = 3,
    moment_oracle = 4,
    random_betas = 5,
    link_sample = 6,
};

using Engine = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Sub-seed for trial `index` of `stream`. Depends only on its arguments, so a
/// trial produces the same draws no matter which worker executes it.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index)
{
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
    return splitmix64(h ^ index);
}

inline Engine make_engine(std::uint64_t seed, Stream stream, std::uint64_t index = 0)
{
    return Engine(derive_seed(seed, stream, index));
}

/// Circularly-symmetric CN(0, variance) draw.
class ComplexNormal
{
  public:
    explicit ComplexNormal(double variance = 1.0) : component_(0.0, std::sqrt(variance / 2.0)) {}

    template <class URBG>
    std::complex<double> operator()(URBG &g)
    {
        const double re = component_(g);
        const double im = component_(g);
        return {re, im};
    }

  private:
    std::normal_distribution<double> component_;
};

} // namespace qmimo

#endif
