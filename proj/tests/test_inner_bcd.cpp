// SPDX-License-Identifier: Apache-2.0
//
// mestars — movable-element STARS near-field wideband downlink simulator
// Copyright (C) 2025-2026 mestars contributors
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

#include <doctest.h>

#include <random>

#include "mestars/experiments.hpp"
#include "mestars/inner_bcd.hpp"

using namespace mestars;

namespace {

Scenario tiny_scenario(std::uint64_t seed, int m_elems = 4, int l_subs = 3, int k_users = 2)
{
    Scenario s = make_desk_scenario(seed);
    s.system.n_elements = m_elems;
    s.system.n_subcarriers = l_subs;
    s.system.n_users = k_users;
    redraw_users(s, seed);
    s.layout = default_layout(MoveMode::RB, s.system);
    s.validate();
    return s;
}

PrecoderSet random_precoders(int l_count, int k_count, int n, double scale,
                             std::mt19937_64& rng)
{
    std::normal_distribution<double> gauss;
    PrecoderSet w(l_count, std::vector<Eigen::VectorXcd>(k_count));
    for (int l = 0; l < l_count; ++l)
        for (int k = 0; k < k_count; ++k) {
            Eigen::VectorXcd v(n);
            for (int i = 0; i < n; ++i) v[i] = {gauss(rng), gauss(rng)};
            w[l][k] = scale * v;
        }
    return w;
}

} // namespace

TEST_CASE("sinr closed form")
{
    const Scenario s = tiny_scenario(31);
    const ChannelSet ch = assemble_channels(s);
    std::mt19937_64 rng(5);
    StarsCoefficients c = init_beamforming(s.system.n_elements, rng);
    const Eigen::VectorXcd u_t = c.tuning_vector_t();
    const Eigen::VectorXcd u_r = c.tuning_vector_r();
    PrecoderSet w = random_precoders(3, 2, 4, 1e-3, rng);

    SUBCASE("zero desired precoder gives zero")
    {
        PrecoderSet w0 = w;
        w0[1][0].setZero();
        CHECK(sinr(ch, w0, u_t, u_r, 1, 0, 1e-14) == 0.0);
    }

    SUBCASE("matches a scalar recomputation from raw channel products")
    {
        const int l = 2, k = 1;
        const Eigen::VectorXcd& u =
            ch.user_regions[k] == Region::Transmission ? u_t : u_r;
        const double sig = std::norm(std::complex<double>(u.adjoint() * ch.cascaded[l][k] * w[l][k]));
        const double interf =
            std::norm(std::complex<double>(u.adjoint() * ch.cascaded[l][k] * w[l][0]));
        const double noise = 3.7e-15;
        CHECK(sinr(ch, w, u_t, u_r, l, k, noise) ==
              doctest::Approx(sig / (interf + noise)).epsilon(1e-12));
    }

    SUBCASE("single user reduces to signal over noise")
    {
        Scenario s1 = tiny_scenario(37, 4, 3, 1);
        const ChannelSet ch1 = assemble_channels(s1);
        PrecoderSet w1 = random_precoders(3, 1, 4, 1e-3, rng);
        const Eigen::VectorXcd& u =
            ch1.user_regions[0] == Region::Transmission ? u_t : u_r;
        const double sig =
            std::norm(std::complex<double>(u.adjoint() * ch1.cascaded[0][0] * w1[0][0]));
        CHECK(sinr(ch1, w1, u_t, u_r, 0, 0, 1e-13) ==
              doctest::Approx(sig / 1e-13).epsilon(1e-12));
    }
}

TEST_CASE("sum rate")
{
    const Scenario s = tiny_scenario(41);
    const ChannelSet ch = assemble_channels(s);
    std::mt19937_64 rng(6);
    StarsCoefficients c = init_beamforming(s.system.n_elements, rng);
    const Eigen::VectorXcd u_t = c.tuning_vector_t();
    const Eigen::VectorXcd u_r = c.tuning_vector_r();

    SUBCASE("all-zero precoding yields zero rate")
    {
        PrecoderSet w(3, std::vector<Eigen::VectorXcd>(2, Eigen::VectorXcd::Zero(4)));
        CHECK(sum_rate(ch, w, u_t, u_r, 1e-14) == 0.0);
    }

    SUBCASE("doubling the noise never increases the rate")
    {
        const PrecoderSet w = random_precoders(3, 2, 4, 1e-3, rng);
        CHECK(sum_rate(ch, w, u_t, u_r, 2e-14) <= sum_rate(ch, w, u_t, u_r, 1e-14));
    }

    SUBCASE("equals the term-by-term sum")
    {
        const PrecoderSet w = random_precoders(3, 2, 4, 1e-3, rng);
        double expect = 0.0;
        for (int l = 0; l < 3; ++l)
            for (int k = 0; k < 2; ++k)
                expect += std::log2(1.0 + sinr(ch, w, u_t, u_r, l, k, 1e-14));
        CHECK(sum_rate(ch, w, u_t, u_r, 1e-14) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("taylor bound")
{
    SUBCASE("exact at the expansion point")
    {
        for (auto [c0, d0] : {std::pair{0.3, 2.0}, {5.0, 0.7}, {1.0, 1.0}})
            CHECK(taylor_bound(c0, d0, c0, d0) ==
                  doctest::Approx(std::log2(1.0 + 1.0 / (c0 * d0))).epsilon(1e-14));
    }

    SUBCASE("lower-bounds the true function on a grid around the point")
    {
        const double c0 = 0.8, d0 = 1.7;
        for (double fc = 0.5; fc <= 2.0; fc += 0.125)
            for (double fd = 0.5; fd <= 2.0; fd += 0.125) {
                const double c = fc * c0, d = fd * d0;
                CHECK(taylor_bound(c, d, c0, d0) <=
                      std::log2(1.0 + 1.0 / (c * d)) + 1e-12);
            }
    }

    SUBCASE("gradient matches central finite differences")
    {
        const double c0 = 1.3, d0 = 0.6, h = 1e-6;
        const double gc = (taylor_bound(c0 + h, d0, c0, d0) -
                           taylor_bound(c0 - h, d0, c0, d0)) /
                          (2 * h);
        const double gd = (taylor_bound(c0, d0 + h, c0, d0) -
                           taylor_bound(c0, d0 - h, c0, d0)) /
                          (2 * h);
        const double fc_h = (std::log2(1 + 1 / ((c0 + h) * d0)) -
                             std::log2(1 + 1 / ((c0 - h) * d0))) /
                            (2 * h);
        const double fd_h = (std::log2(1 + 1 / (c0 * (d0 + h))) -
                             std::log2(1 + 1 / (c0 * (d0 - h)))) /
                            (2 * h);
        CHECK(gc == doctest::Approx(fc_h).epsilon(1e-6));
        CHECK(gd == doctest::Approx(fd_h).epsilon(1e-6));
    }
}

TEST_CASE("single-user single-carrier precoding is the matched filter")
{
    const Scenario s = tiny_scenario(43, 4, 1, 1);
    const ChannelSet ch = assemble_channels(s);
    std::mt19937_64 rng(7);
    const StarsCoefficients c = init_beamforming(4, rng);
    const Eigen::VectorXcd u_t = c.tuning_vector_t();
    const Eigen::VectorXcd u_r = c.tuning_vector_r();

    PrecoderSet w0(1, std::vector<Eigen::VectorXcd>(1));
    const Eigen::VectorXcd& u = ch.user_regions[0] == Region::Transmission ? u_t : u_r;
    Eigen::VectorXcd dir = ch.cascaded[0][0].adjoint() * u;
    dir /= dir.norm();
    w0[0][0] = std::sqrt(s.system.max_power_w) * dir;

    const AuxiliaryState local = tighten_aux(ch, w0, u_t, u_r, s.system.noise_power_w);
    const PrecodingSolution sol =
        solve_bs_precoding(ch, u_t, u_r, local, s.system.max_power_w, s.system.noise_power_w);

    // eigen-oracle: top eigenvector of H^H u u^H H scaled to the full budget
    const Eigen::MatrixXcd q = (ch.cascaded[0][0].adjoint() * u) *
                               (ch.cascaded[0][0].adjoint() * u).adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(q);
    const Eigen::VectorXcd expect =
        std::sqrt(s.system.max_power_w) * eig.eigenvectors().col(3);

    CHECK(sol.w[0][0].norm() == doctest::Approx(std::sqrt(s.system.max_power_w)).epsilon(1e-6));
    const std::complex<double> overlap =
        sol.w[0][0].normalized().dot(expect.normalized());
    CHECK(std::abs(overlap) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sol.eigen_ratio[0][0] <= 1e-6);
}

TEST_CASE("single-element surface update matches a grid search")
{
    // with M = 1 the lifted blocks are the scalars beta_t, beta_r and the
    // surrogate optimum can be enumerated over beta_t in [0, 1]
    const Scenario s = tiny_scenario(47, 1, 2, 2);
    const ChannelSet ch = assemble_channels(s);
    std::mt19937_64 rng(8);
    PrecoderSet w = random_precoders(2, 2, 4, std::sqrt(s.system.max_power_w / 8.0), rng);
    StarsCoefficients c0 = init_beamforming(1, rng);
    const AuxiliaryState local =
        tighten_aux(ch, w, c0.tuning_vector_t(), c0.tuning_vector_r(), s.system.noise_power_w);

    const BeamformingSolution sol =
        solve_stars_beamforming(ch, w, local, s.system.noise_power_w);
    CHECK(std::abs(sol.lifted_t(0, 0).real() + sol.lifted_r(0, 0).real() - 1.0) < 1e-7);

    // oracle: for fixed beta the optimal aux are tight, the surrogate is
    // linear in them; scan beta on a fine grid
    const double inv_noise = 1.0 / s.system.noise_power_w;
    auto surrogate_at = [&](double beta_t) {
        double total = 0.0;
        for (int l = 0; l < 2; ++l)
            for (int k = 0; k < 2; ++k) {
                const double beta =
                    ch.user_regions[k] == Region::Transmission ? beta_t : 1.0 - beta_t;
                const Eigen::RowVectorXcd hrow = ch.cascaded[l][k].row(0);
                const double sig =
                    beta * std::norm(std::complex<double>(hrow * w[l][k])) * inv_noise + 1e-10;
                double interf = 0.0;
                for (int i = 0; i < 2; ++i)
                    if (i != k)
                        interf +=
                            beta * std::norm(std::complex<double>(hrow * w[l][i])) * inv_noise;
                total += taylor_bound(1.0 / sig, interf + 1.0, local.C[l][k], local.D[l][k]);
            }
        return total;
    };
    double best = -1e300;
    for (int i = 0; i <= 10000; ++i) best = std::max(best, surrogate_at(i / 10000.0));
    CHECK(sol.surrogate_value == doctest::Approx(best).epsilon(1e-4));
}

TEST_CASE("gaussian randomization")
{
    std::mt19937_64 rng(9);

    SUBCASE("exact rank-one input recovers the phases up to a global shift")
    {
        const int m = 5;
        Eigen::VectorXcd u(m);
        std::uniform_real_distribution<double> uni(0.0, kTwoPi);
        for (int i = 0; i < m; ++i) u[i] = std::polar(std::sqrt(0.5), uni(rng));
        const Eigen::MatrixXcd lifted = u * u.adjoint(); // diagonals all 1/2
        const auto evaluator = [&](const StarsCoefficients& c) {
            // alignment with u, a global-phase-invariant score
            return std::abs(u.dot(c.tuning_vector_t()));
        };
        const RandomizationResult rec =
            gaussian_randomization(lifted, lifted, 8, evaluator, rng);
        CHECK(rec.value == doctest::Approx(0.5 * m).epsilon(1e-9));
        rec.coefficients.validate();
    }

    SUBCASE("more draws never lose to fewer draws on a fixed seed")
    {
        const int m = 4;
        Eigen::MatrixXcd a(m, m);
        std::normal_distribution<double> gauss;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) a(i, j) = {gauss(rng), gauss(rng)};
        Eigen::MatrixXcd lift_t = a * a.adjoint();
        // rescale so the diagonal carries beta_t in (0, 1)
        const Eigen::VectorXd d = lift_t.diagonal().real();
        const Eigen::VectorXd scale = (0.6 * d.cwiseInverse()).cwiseSqrt();
        lift_t = scale.asDiagonal() * lift_t * scale.asDiagonal();
        const Eigen::MatrixXcd lift_r =
            (Eigen::VectorXcd::Ones(m) - lift_t.diagonal()).asDiagonal();
        const auto evaluator = [](const StarsCoefficients& c) {
            return c.tuning_vector_t().sum().real() + c.tuning_vector_r().sum().real();
        };
        std::mt19937_64 rng1(99), rng200(99);
        const double v1 = gaussian_randomization(lift_t, lift_r, 1, evaluator, rng1).value;
        const double v200 = gaussian_randomization(lift_t, lift_r, 200, evaluator, rng200).value;
        CHECK(v200 >= v1);
    }

    SUBCASE("identical seeds reproduce the recovery")
    {
        const int m = 3;
        Eigen::MatrixXcd a(m, m);
        std::normal_distribution<double> gauss;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) a(i, j) = {gauss(rng), gauss(rng)};
        Eigen::MatrixXcd lift = a * a.adjoint();
        Eigen::VectorXd d = lift.diagonal().real();
        lift = (0.5 * d.cwiseInverse().cwiseSqrt()).asDiagonal() * lift *
               (0.5 * d.cwiseInverse().cwiseSqrt()).asDiagonal();
        const auto evaluator = [](const StarsCoefficients& c) {
            return c.tuning_vector_r().sum().imag();
        };
        std::mt19937_64 ra(123), rb(123);
        const auto one = gaussian_randomization(lift, lift, 32, evaluator, ra);
        const auto two = gaussian_randomization(lift, lift, 32, evaluator, rb);
        CHECK(one.value == two.value);
        CHECK(one.coefficients.phase_t == two.coefficients.phase_t);
        CHECK(one.coefficients.phase_r == two.coefficients.phase_r);
    }
}

TEST_CASE("beamforming initialization")
{
    std::mt19937_64 a(77), b(77), c(78);
    const StarsCoefficients s1 = init_beamforming(6, a);
    const StarsCoefficients s2 = init_beamforming(6, b);
    const StarsCoefficients s3 = init_beamforming(6, c);
    s1.validate();
    CHECK(s1.phase_t == s2.phase_t);
    CHECK(s1.phase_r == s2.phase_r);
    CHECK(s1.phase_t != s3.phase_t);
    for (int m = 0; m < 6; ++m) {
        CHECK(s1.amp_t[m] == doctest::Approx(std::sqrt(0.5)));
        CHECK(s1.phase_t[m] >= 0.0);
        CHECK(s1.phase_t[m] < kTwoPi);
    }
}

TEST_CASE("inner loop converges monotonically on a tiny instance")
{
    const Scenario s = tiny_scenario(53);
    BcdConfig cfg = s.bcd;
    cfg.n_randomizations = 50;
    const BcdResult res = bcd_loop(s, s.layout.offsets, cfg, 901);

    REQUIRE(res.failure.empty());
    CHECK(res.converged);
    CHECK(res.iterations <= cfg.max_outer_bcd_iters);
    REQUIRE(res.surrogate_trace.size() >= 2);

    for (std::size_t j = 1; j < res.surrogate_trace.size(); ++j)
        CHECK(res.surrogate_trace[j] >= res.surrogate_trace[j - 1] - 1e-6);
    for (std::size_t j = 1; j < res.sum_rate_trace.size(); ++j)
        CHECK(res.sum_rate_trace[j] >= res.sum_rate_trace[j - 1] - 1e-6);

    // constraint feasibility of the returned solution
    res.coefficients.validate();
    const double budget = s.system.max_power_w / s.system.n_subcarriers + 1e-8;
    for (int l = 0; l < s.system.n_subcarriers; ++l) {
        double p = 0.0;
        for (const auto& w : res.w[l]) p += w.squaredNorm();
        CHECK(p <= budget);
    }
    for (const auto& per_l : res.eigen_ratios)
        for (double ratio : per_l) CHECK(ratio <= 1e-6);
    CHECK(res.final_sum_rate > 0.0);
}
