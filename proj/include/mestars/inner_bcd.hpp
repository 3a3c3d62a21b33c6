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

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mestars/channel.hpp"
#include "mestars/sdp.hpp"
#include "mestars/stars.hpp"

namespace mestars {

using PrecoderSet = std::vector<std::vector<Eigen::VectorXcd>>; // [l][k] N-vectors

struct PrecodingSolution {
    PrecoderSet w;
    std::vector<std::vector<double>> eigen_ratio; // lambda_2 / lambda_1 of each lifted W
    double surrogate_value = 0.0;                 // optimal surrogate objective, bits/s/Hz
};

struct BeamformingSolution {
    Eigen::MatrixXcd lifted_t, lifted_r; // relaxed U_s
    double surrogate_value = 0.0;        // relaxed optimum, bits/s/Hz
};

/// Local points (C, D) of the rate surrogate, one pair per (l, k).
struct AuxiliaryState {
    std::vector<std::vector<double>> C, D;
};

struct BcdResult {
    PrecoderSet w;
    StarsCoefficients coefficients;
    std::vector<double> surrogate_trace; // precoding-step surrogate optimum per iteration
    std::vector<double> sum_rate_trace;  // true rate after each full iteration
    std::vector<std::vector<double>> eigen_ratios; // final lifted-precoder spectra
    bool converged = false;
    int iterations = 0;
    double final_sum_rate = 0.0;
    std::string failure; // nonempty when a subproblem solve aborted the loop
};

/// |u^H H w_k|^2 / (sum_{i != k} |u^H H w_i|^2 + noise), u chosen by the
/// user's region.
double sinr(const ChannelSet& channels, const PrecoderSet& w, const Eigen::VectorXcd& u_t,
            const Eigen::VectorXcd& u_r, int l, int k, double noise_w);

/// sum_k sum_l log2(1 + SINR_{l,k})
double sum_rate(const ChannelSet& channels, const PrecoderSet& w, const Eigen::VectorXcd& u_t,
                const Eigen::VectorXcd& u_r, double noise_w);

/// First-order lower bound of log2(1 + 1/(C D)) at the local point (C0, D0).
double taylor_bound(double C, double D, double C0, double D0);

/// Local points made tight at the iterate: C = 1 / signal, D = interference
/// + noise, in noise-normalized units.
AuxiliaryState tighten_aux(const ChannelSet& channels, const PrecoderSet& w,
                           const Eigen::VectorXcd& u_t, const Eigen::VectorXcd& u_r,
                           double noise_w);

/// Surrogate value sum_{l,k} taylor_bound(C, D, C0, D0) at given aux points.
double surrogate_objective(const AuxiliaryState& aux, const AuxiliaryState& local);

/// Precoding block update: solves the relaxed per-subcarrier programs with
/// the surface coefficients fixed, extracts the rank-one precoders.
PrecodingSolution solve_bs_precoding(const ChannelSet& channels, const Eigen::VectorXcd& u_t,
                                     const Eigen::VectorXcd& u_r, const AuxiliaryState& local,
                                     double max_power_w, double noise_w,
                                     const sdp::SolverOptions& opts = {1e-9, 200});

/// Surface block update: solves the relaxed program over (U_t, U_r) with
/// the precoders fixed. Recovery to unit-rank vectors is a separate step.
BeamformingSolution solve_stars_beamforming(const ChannelSet& channels, const PrecoderSet& w,
                                            const AuxiliaryState& local, double noise_w,
                                            const sdp::SolverOptions& opts = {1e-9, 200});

struct RandomizationResult {
    StarsCoefficients coefficients;
    double value = 0.0; // evaluator value of the winner
};

/// Rank-one recovery by Gaussian randomization: G correlated draws plus the
/// phase-of-principal-eigenvector baseline; phases from the draws,
/// amplitudes from the lifted diagonals (renormalized to the exact energy
/// split); the evaluator picks the winner.
RandomizationResult gaussian_randomization(const Eigen::MatrixXcd& lifted_t,
                                           const Eigen::MatrixXcd& lifted_r, int n_draws,
                                           const std::function<double(const StarsCoefficients&)>& evaluator,
                                           std::mt19937_64& rng);

/// Energy-split start: beta_t = beta_r = 1/2, phases uniform in [0, 2pi).
StarsCoefficients init_beamforming(int n_elements, std::mt19937_64& rng);

/// Alternating precoding / surface optimization until the surrogate gain
/// drops below convergence_eps. The incumbent surface vector always stays
/// in the recovery candidate set, which keeps both traces non-decreasing.
BcdResult bcd_loop(const Scenario& scenario, std::span<const Eigen::Vector2d> offsets,
                   const BcdConfig& cfg, std::uint64_t seed);

} // namespace mestars
