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

#include <catch_amalgamated.hpp>

#include "qmimo/channel.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

using namespace qmimo;
using Catch::Approx;

namespace
{

// Oracle: convex-polygon membership against the six vertices of a flat-top hexagon.
bool inside_hexagon(double x, double y, double R)
{
    std::array<std::pair<double, double>, 6> v;
    for (int k = 0; k < 6; ++k)
        v[k] = {R * std::cos(k * std::numbers::pi / 3.0), R * std::sin(k * std::numbers::pi / 3.0)};
    for (int k = 0; k < 6; ++k)
    {
        const auto [ax, ay] = v[k];
        const auto [bx, by] = v[(k + 1) % 6];
        if ((bx - ax) * (y - ay) - (by - ay) * (x - ax) < -1e-9)
            return false;
    }
    return true;
}

struct Moments
{
    double mean = 0.0, se = 0.0;
};

Moments moments(const std::vector<double> &v)
{
    double s = 0.0, s2 = 0.0;
    for (double x : v)
    {
        s += x;
        s2 += x * x;
    }
    const double n = static_cast<double>(v.size());
    const double mean = s / n;
    return {mean, std::sqrt((s2 / n - mean * mean) / n)};
}

} // namespace

TEST_CASE("large_scale_attenuation - examples")
{
    const CellModel cell;
    CHECK(large_scale_attenuation(cell, 100.0, 1.0) == 1.0);
    CHECK(large_scale_attenuation(cell, 200.0, 1.0) == Approx(std::exp(-3.8 * std::log(2.0))).epsilon(1e-14));
    CHECK(large_scale_attenuation(cell, 200.0, 1.0) == Approx(0.07179).margin(1e-5));
    CHECK(large_scale_attenuation(cell, 200.0, 10.0) == Approx(0.7179).margin(1e-4));
}

TEST_CASE("CellModel - validation and membership")
{
    CellModel cell;
    CHECK_NOTHROW(cell.validate());
    cell.exclusion_radius = 1000.0;
    CHECK_THROWS_AS(cell.validate(), std::invalid_argument);
    cell = CellModel{};
    cell.pathloss_exponent = 2.0;
    CHECK_THROWS_AS(cell.validate(), std::invalid_argument);

    const CellModel unit;
    Engine engine(3);
    std::uniform_real_distribution<double> u(-1100.0, 1100.0);
    for (int i = 0; i < 20000; ++i)
    {
        const double x = u(engine), y = u(engine);
        REQUIRE(unit.contains(x, y) == inside_hexagon(x, y, 1000.0));
    }
}

TEST_CASE("drop_users - invariants")
{
    const CellModel cell;
    const auto users = drop_users(cell, 5000, 17);
    REQUIRE(users.size() == 5000);
    for (const auto &u : users)
    {
        REQUIRE(inside_hexagon(u.x, u.y, cell.cell_radius));
        REQUIRE(u.distance >= cell.exclusion_radius);
        REQUIRE(u.distance <= cell.cell_radius);
        REQUIRE(u.distance == std::hypot(u.x, u.y));
        REQUIRE(u.shadow > 0.0);
        REQUIRE(u.beta == large_scale_attenuation(cell, u.distance, u.shadow));
        REQUIRE(u.beta > 0.0);
    }
    CHECK_THROWS_AS(drop_users(cell, 0, 1), std::invalid_argument);
}

TEST_CASE("drop_users - deterministic for a seed")
{
    const CellModel cell;
    const auto a = drop_users(cell, 10, 1);
    const auto b = drop_users(cell, 10, 1);
    const auto c = drop_users(cell, 10, 2);
    CHECK(betas_of(a) == betas_of(b));
    CHECK(betas_of(a) != betas_of(c));
}

TEST_CASE("drop_users - positions uniform over the annular hexagon, shadowing log-normal")
{
    const CellModel cell;
    const auto users = drop_users(cell, 200000, 99);

    // Area oracle: fraction of users closer than 500 m.
    const double hex_area = 1.5 * std::sqrt(3.0) * 1e6 - std::numbers::pi * 1e4;
    const double p = std::numbers::pi * (500.0 * 500.0 - 100.0 * 100.0) / hex_area;
    std::vector<double> inner, shadow_db;
    for (const auto &u : users)
    {
        inner.push_back(u.distance < 500.0 ? 1.0 : 0.0);
        shadow_db.push_back(10.0 * std::log10(u.shadow));
    }
    const Moments f = moments(inner);
    CHECK(std::abs(f.mean - p) < 3.0 * std::sqrt(p * (1.0 - p) / users.size()));

    const Moments s = moments(shadow_db);
    CHECK(std::abs(s.mean) < 3.0 * s.se);
    const double sd = s.se * std::sqrt(static_cast<double>(users.size()));
    CHECK(sd == Approx(8.0).epsilon(0.01));
}

TEST_CASE("drops CSV round trip")
{
    const auto users = drop_users(CellModel{}, 7, 5);
    std::stringstream ss;
    write_drops_csv(ss, users);
    CHECK(ss.str().rfind("user_index,r_n_m,z_n,beta_n\n", 0) == 0);
    const auto back = read_drops_csv(ss);
    REQUIRE(back.size() == users.size());
    for (std::size_t n = 0; n < users.size(); ++n)
    {
        CHECK(back[n].distance == users[n].distance);
        CHECK(back[n].shadow == users[n].shadow);
        CHECK(back[n].beta == users[n].beta);
    }
    std::stringstream bad("r,z\n1,2\n");
    CHECK_THROWS(read_drops_csv(bad));
}

TEST_CASE("sample_fast_fading - circularly-symmetric unit-variance entries")
{
    const ComplexMatrix H = sample_fast_fading(1000, 1000, 2024);
    std::vector<double> p2, p4, re, im;
    for (Eigen::Index j = 0; j < H.cols(); ++j)
        for (Eigen::Index i = 0; i < H.rows(); ++i)
        {
            const double a = std::norm(H(i, j));
            p2.push_back(a);
            p4.push_back(a * a);
            re.push_back(H(i, j).real());
            im.push_back(H(i, j).imag());
        }
    CHECK(std::abs(moments(p2).mean - 1.0) <= 0.005);
    CHECK(std::abs(moments(p4).mean - 2.0) <= 0.02);
    CHECK(std::abs(moments(re).mean) <= 0.005);
    CHECK(std::abs(moments(im).mean) <= 0.005);
    CHECK(moments(re).se * 1000.0 == Approx(std::sqrt(0.5)).epsilon(0.01));
}

TEST_CASE("sample_fast_fading - deterministic and validated")
{
    CHECK(sample_fast_fading(4, 3, 11) == sample_fast_fading(4, 3, 11));
    CHECK(sample_fast_fading(4, 3, 11) != sample_fast_fading(4, 3, 12));
    CHECK_THROWS_AS(sample_fast_fading(0, 3, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_fast_fading(3, 0, 1), std::invalid_argument);
}

TEST_CASE("compose_channel")
{
    const ComplexMatrix H = sample_fast_fading(6, 3, 4);
    SECTION("unit betas leave H unchanged")
    {
        const std::vector<double> ones(3, 1.0);
        CHECK(compose_channel(H, ones).G == H);
    }
    SECTION("columns scaled by sqrt(beta)")
    {
        const std::vector<double> betas = {0.25, 4.0, 1e-3};
        const ChannelRealization ch = compose_channel(H, betas);
        CHECK(ch.antennas() == 6);
        CHECK(ch.users() == 3);
        for (Eigen::Index n = 0; n < 3; ++n)
            for (Eigen::Index m = 0; m < 6; ++m)
                CHECK(std::abs(ch.G(m, n) - std::sqrt(betas[n]) * H(m, n)) < 1e-15);
    }
    SECTION("errors")
    {
        const std::vector<double> two = {1.0, 1.0};
        CHECK_THROWS_AS(compose_channel(H, two), std::invalid_argument);
        const std::vector<double> bad = {1.0, 0.0, 1.0};
        CHECK_THROWS_AS(compose_channel(H, bad), std::invalid_argument);
    }
}

TEST_CASE("channel gain moments")
{
    const std::size_t trials = 10000;
    SECTION("E||g||^2 = M beta")
    {
        const std::vector<double> beta = {0.5};
        std::vector<double> v;
        for (std::size_t t = 0; t < trials; ++t)
            v.push_back(compose_channel(sample_fast_fading(64, 1, 1000 + t), beta).G.col(0).squaredNorm());
        const Moments m = moments(v);
        CHECK(std::abs(m.mean - 32.0) < 3.0 * m.se);
    }
    SECTION("E||g||^4 = M(M+1) beta^2")
    {
        const std::vector<double> beta = {1.0};
        std::vector<double> v;
        for (std::size_t t = 0; t < trials; ++t)
        {
            const double g2 = compose_channel(sample_fast_fading(8, 1, 5000 + t), beta).G.col(0).squaredNorm();
            v.push_back(g2 * g2);
        }
        const Moments m = moments(v);
        CHECK(std::abs(m.mean - 72.0) < 3.0 * m.se);
    }
}

TEST_CASE("simulate_link - signal model invariants")
{
    const std::vector<double> betas = {1.0, 0.3, 0.05};
    const ComplexMatrix G = compose_channel(sample_fast_fading(16, 3, 8), betas).G;
    const double p = 10.0;

    SECTION("finite resolution")
    {
        const QuantizerSpec q = design_lloyd_max(2);
        Engine engine(1);
        const LinkSample s = simulate_link(G, p, q, engine);
        CHECK((s.y - (std::sqrt(p) * G * s.x + s.noise)).norm() < 1e-12);
        CHECK((s.n_q - (s.y_q - q.alpha * s.y)).norm() < 1e-12);
        CHECK((s.r - G.adjoint() * s.y_q).norm() < 1e-12);
        for (Eigen::Index m = 0; m < G.rows(); ++m)
        {
            const double scale = std::sqrt((p * G.row(m).squaredNorm() + 1.0) / 2.0);
            const double level = std::abs(s.y_q(m).real()) / scale;
            CHECK((std::abs(level - q.levels[2]) < 1e-12 || std::abs(level - q.levels[3]) < 1e-12));
        }
    }
    SECTION("infinite resolution is transparent")
    {
        Engine engine(1);
        const LinkSample s = simulate_link(G, p, infinite_resolution_quantizer(), engine);
        CHECK(s.y_q == s.y);
        CHECK(s.n_q.norm() == 0.0);
    }
    SECTION("errors")
    {
        Engine engine(1);
        CHECK_THROWS_AS(simulate_link(G, 0.0, design_lloyd_max(1), engine), std::invalid_argument);
    }
}
