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

#ifndef QMIMO_CHANNEL_HPP
#define QMIMO_CHANNEL_HPP

#include "qmimo/quantizer.hpp"
#include "qmimo/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmimo
{

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Single hexagonal cell (flat-top, centred on the base station) with a
/// central exclusion disk, distance pathloss and log-normal shadowing.
struct CellModel
{
    double cell_radius = 1000.0;      // m, centre to vertex
    double exclusion_radius = 100.0;  // m
    double pathloss_exponent = 3.8;
    double shadow_std_db = 8.0;

    void validate() const
    {
        if (!(exclusion_radius > 0.0) || !(exclusion_radius < cell_radius))
            throw std::invalid_argument("CellModel: require 0 < exclusion_radius < cell_radius");
        if (!(pathloss_exponent > 2.0))
            throw std::invalid_argument("CellModel: pathloss_exponent must exceed 2");
        if (!(shadow_std_db >= 0.0))
            throw std::invalid_argument("CellModel: shadow_std_db must be non-negative");
    }

    /// Flat-top hexagon: |y| <= sqrt(3)/2 R and sqrt(3)|x| + |y| <= sqrt(3) R.
    bool contains(double x, double y) const
    {
        const double s3 = std::sqrt(3.0);
        return std::abs(y) <= 0.5 * s3 * cell_radius && s3 * std::abs(x) + std::abs(y) <= s3 * cell_radius;
    }
};

/// Large-scale state of one user, frozen for the lifetime of a drop.
struct UserDrop
{
    double distance = 0.0; // r_n, m
    double shadow = 1.0;   // z_n, linear
    double beta = 1.0;     // z_n / (r_n / r_h)^v
    double x = 0.0;
    double y = 0.0;
};

inline double large_scale_attenuation(const CellModel &cell, double distance, double shadow)
{
    return shadow / std::pow(distance / cell.exclusion_radius, cell.pathloss_exponent);
}

/// Drops users uniformly over the hexagon minus the exclusion disk.
inline std::vector<UserDrop> drop_users(const CellModel &cell, std::size_t num_users, std::uint64_t seed)
{
    cell.validate();
    if (num_users < 1)
        throw std::invalid_argument("drop_users: num_users must be at least 1");

    Engine engine = make_engine(seed, Stream::user_drop);
    const double half_height = 0.5 * std::sqrt(3.0) * cell.cell_radius;
    std::uniform_real_distribution<double> ux(-cell.cell_radius, cell.cell_radius);
    std::uniform_real_distribution<double> uy(-half_height, half_height);
    std::normal_distribution<double> xi(0.0, 1.0);

    std::vector<UserDrop> users;
    users.reserve(num_users);
    while (users.size() < num_users)
    {
        const double x = ux(engine);
        const double y = uy(engine);
        if (!cell.contains(x, y))
            continue;
        const double r = std::hypot(x, y);
        if (r < cell.exclusion_radius)
            continue;
        UserDrop u;
        u.distance = r;
        u.shadow = std::pow(10.0, cell.shadow_std_db * xi(engine) / 10.0);
        u.beta = large_scale_attenuation(cell, r, u.shadow);
        u.x = x;
        u.y = y;
        users.push_back(u);
    }
    return users;
}

inline std::vector<double> betas_of(std::span<const UserDrop> users)
{
    std::vector<double> betas;
    betas.reserve(users.size());
    for (const auto &u : users)
        betas.push_back(u.beta);
    return betas;
}

/// CSV with columns user_index, r_n_m, z_n, beta_n (full double precision).
inline void write_drops_csv(std::ostream &os, std::span<const UserDrop> users)
{
    os << "user_index,r_n_m,z_n,beta_n\n";
    std::ostringstream line;
    line << std::setprecision(17);
    for (std::size_t n = 0; n < users.size(); ++n)
    {
        line.str("");
        line << n << ',' << users[n].distance << ',' << users[n].shadow << ',' << users[n].beta << '\n';
        os << line.str();
    }
}

inline std::vector<UserDrop> read_drops_csv(std::istream &is)
{
    std::string line;
    if (!std::getline(is, line) || line != "user_index,r_n_m,z_n,beta_n")
        throw std::runtime_error("read_drops_csv: missing or unexpected header");
    std::vector<UserDrop> users;
    while (std::getline(is, line))
    {
        if (line.empty())
            continue;
        std::istringstream row(line);
        std::string field[4];
        for (auto &f : field)
            if (!std::getline(row, f, ','))
                throw std::runtime_error("read_drops_csv: short row '" + line + "'");
        if (std::stoul(field[0]) != users.size())
            throw std::runtime_error("read_drops_csv: user_index out of sequence");
        UserDrop u;
        u.distance = std::stod(field[1]);
        u.shadow = std::stod(field[2]);
        u.beta = std::stod(field[3]);
        users.push_back(u);
    }
    return users;
}

/// Fills an M x N matrix with i.i.d. CN(0,1) entries, column-major order.
inline ComplexMatrix sample_fast_fading(Eigen::Index M, Eigen::Index N, Engine &engine)
{
    if (M < 1 || N < 1)
        throw std::invalid_argument("sample_fast_fading: M and N must be positive");
    ComplexNormal draw(1.0);
    ComplexMatrix H(M, N);
    for (Eigen::Index n = 0; n < N; ++n)
        for (Eigen::Index m = 0; m < M; ++m)
            H(m, n) = draw(engine);
    return H;
}

inline ComplexMatrix sample_fast_fading(Eigen::Index M, Eigen::Index N, std::uint64_t seed)
{
    Engine engine = make_engine(seed, Stream::fast_fading);
    return sample_fast_fading(M, N, engine);
}

/// Fast fading H, large-scale gains and G = H * diag(betas)^(1/2).
struct ChannelRealization
{
    ComplexMatrix H;
    RealVector betas;
    ComplexMatrix G;

    Eigen::Index antennas() const { return G.rows(); }
    Eigen::Index users() const { return G.cols(); }
};

inline ComplexMatrix scale_columns(const ComplexMatrix &H, std::span<const double> betas)
{
    if (static_cast<std::size_t>(H.cols()) != betas.size())
        throw std::invalid_argument("compose_channel: H has " + std::to_string(H.cols()) + " columns but " +
                                    std::to_string(betas.size()) + " betas were given");
    ComplexMatrix G(H.rows(), H.cols());
    for (Eigen::Index n = 0; n < H.cols(); ++n)
    {
        const double b = betas[static_cast<std::size_t>(n)];
        if (!(b > 0.0) || !std::isfinite(b))
            throw std::invalid_argument("compose_channel: betas must be positive and finite");
        G.col(n) = std::sqrt(b) * H.col(n);
    }
    return G;
}

inline ChannelRealization compose_channel(ComplexMatrix H, std::span<const double> betas)
{
    ChannelRealization ch;
    ch.G = scale_columns(H, betas);
    ch.H = std::move(H);
    ch.betas = Eigen::Map<const RealVector>(betas.data(), static_cast<Eigen::Index>(betas.size()));
    return ch;
}

/// One channel use: y = sqrt(p_u) G x + n, y_q = Q(y) = alpha y + n_q, r = G^H y_q.
struct LinkSample
{
    ComplexVector x;
    ComplexVector noise;
    ComplexVector y;
    ComplexVector y_q;
    ComplexVector n_q;
    ComplexVector r;
};

/// Simulates one channel use with the true quantizer on every antenna. The
/// gain control normalizes antenna m by its own input variance
/// p_u * sum_i |g_mi|^2 + 1.
inline LinkSample simulate_link(const ComplexMatrix &G, double p_u, const QuantizerSpec &spec, Engine &engine)
{
    if (!(p_u > 0.0))
        throw std::invalid_argument("simulate_link: p_u must be positive");
    ComplexNormal draw(1.0);
    LinkSample s;
    s.x.resize(G.cols());
    for (auto &v : s.x)
        v = draw(engine);
    s.noise.resize(G.rows());
    for (auto &v : s.noise)
        v = draw(engine);
    s.y = std::sqrt(p_u) * (G * s.x) + s.noise;

    s.y_q.resize(G.rows());
    for (Eigen::Index m = 0; m < G.rows(); ++m)
    {
        const double variance = p_u * G.row(m).squaredNorm() + 1.0;
        const std::complex<double> in = s.y(m);
        s.y_q(m) = quantize_stream(std::span(&in, 1), spec, variance)[0];
    }
    s.n_q = s.y_q - spec.alpha * s.y;
    s.r = G.adjoint() * s.y_q;
    return s;
}

} // namespace qmimo

#endif
