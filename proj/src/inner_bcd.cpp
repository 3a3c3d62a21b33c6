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
//
// Inner-layer alternating optimization. Both block updates are small
// semidefinite programs built from noise-normalized cascaded channels:
// the rate term log2(1 + 1/(C D)) is linearized at the current iterate
// and each update maximizes the resulting surrogate.
//
// The hyperbolic constraint 1/C <= T enters as a 2x2 block
// [[C, 1], [1, T]] >= 0 with T tied to the signal trace term by an
// equality row. Signal matrices carry a 1e-10 diagonal ridge so the
// programs stay strictly feasible when a surface side shuts off.

#include "mestars/inner_bcd.hpp"

#include <algorithm>
#include <cmath>

namespace mestars {

namespace {

constexpr double kLog2E = 1.4426950408889634074;
constexpr double kSignalRidge = 1e-10;
constexpr double kSignalFloor = 1e-30;
// surrogate terms worth less than this many bits at their expansion point
// are left out of the block updates; a starved beam otherwise drives its
// local point C0 toward 1/kSignalFloor and poisons the program's scaling
constexpr double kTermFloor = 1e-9;

const Eigen::VectorXcd& region_vector(Region r, const Eigen::VectorXcd& u_t,
                                      const Eigen::VectorXcd& u_r)
{
    return r == Region::Transmission ? u_t : u_r;
}

// |u^H H w|^2 for one (l, k, i)
double beam_power(const ChannelSet& ch, const Eigen::VectorXcd& u, int l, int k,
                  const Eigen::VectorXcd& w)
{
    const std::complex<double> amp = u.adjoint() * ch.cascaded[l][k] * w;
    return std::norm(amp);
}

struct SurrogateCoeffs {
    double a = 0.0, b = 0.0, constant = 0.0;
    double point_value = 0.0; // log2(1 + 1/(C0 D0))
    double a_scaled = 0.0;    // coefficient of C/C0, always in (0, log2 e]
    bool keep = false;
};

// surrogate(C, D) = constant - a C - b D. The block update works on the
// rescaled variable C/C0 (and the signal trace times C0) so the program
// data stays O(1) regardless of how small a beam's signal power is.
SurrogateCoeffs surrogate_coeffs(double c0, double d0)
{
    SurrogateCoeffs s;
    const double denom = 1.0 + c0 * d0;
    s.a = kLog2E / (c0 * denom);
    s.b = kLog2E / (d0 * denom);
    s.point_value = std::log2(1.0 + 1.0 / (c0 * d0));
    s.constant = s.point_value + s.a * c0 + s.b * d0;
    s.a_scaled = kLog2E / denom;
    s.keep = s.point_value > kTermFloor;
    return s;
}

bool solver_output_usable(const sdp::ConeSolution& sol)
{
    if (sol.status == sdp::SolveStatus::Optimal) return true;
    const auto& r = sol.residuals;
    return std::max({r.primal, r.dual, r.gap}) <= 1e-6;
}

} // namespace

double sinr(const ChannelSet& channels, const PrecoderSet& w, const Eigen::VectorXcd& u_t,
            const Eigen::VectorXcd& u_r, int l, int k, double noise_w)
{
    const Eigen::VectorXcd& u = region_vector(channels.user_regions[k], u_t, u_r);
    const double signal = beam_power(channels, u, l, k, w[l][k]);
    double interference = 0.0;
    for (int i = 0; i < channels.n_users(); ++i)
        if (i != k) interference += beam_power(channels, u, l, k, w[l][i]);
    return signal / (interference + noise_w);
}

double sum_rate(const ChannelSet& channels, const PrecoderSet& w, const Eigen::VectorXcd& u_t,
                const Eigen::VectorXcd& u_r, double noise_w)
{
    double rate = 0.0;
    for (int l = 0; l < channels.n_subcarriers(); ++l)
        for (int k = 0; k < channels.n_users(); ++k)
            rate += std::log2(1.0 + sinr(channels, w, u_t, u_r, l, k, noise_w));
    return rate;
}

double taylor_bound(double C, double D, double C0, double D0)
{
    const SurrogateCoeffs s = surrogate_coeffs(C0, D0);
    return s.constant - s.a * C - s.b * D;
}

AuxiliaryState tighten_aux(const ChannelSet& channels, const PrecoderSet& w,
                           const Eigen::VectorXcd& u_t, const Eigen::VectorXcd& u_r,
                           double noise_w)
{
    const int l_count = channels.n_subcarriers();
    const int k_count = channels.n_users();
    AuxiliaryState aux;
    aux.C.assign(l_count, std::vector<double>(k_count));
    aux.D.assign(l_count, std::vector<double>(k_count));
    const double inv_noise = 1.0 / noise_w;
    for (int l = 0; l < l_count; ++l) {
        for (int k = 0; k < k_count; ++k) {
            const Eigen::VectorXcd& u = region_vector(channels.user_regions[k], u_t, u_r);
            const double signal = beam_power(channels, u, l, k, w[l][k]) * inv_noise;
            double interference = 0.0;
            for (int i = 0; i < k_count; ++i)
                if (i != k) interference += beam_power(channels, u, l, k, w[l][i]);
            aux.C[l][k] = 1.0 / std::max(signal, kSignalFloor);
            aux.D[l][k] = interference * inv_noise + 1.0;
        }
    }
    return aux;
}

double surrogate_objective(const AuxiliaryState& aux, const AuxiliaryState& local)
{
    double v = 0.0;
    for (std::size_t l = 0; l < aux.C.size(); ++l)
        for (std::size_t k = 0; k < aux.C[l].size(); ++k)
            v += taylor_bound(aux.C[l][k], aux.D[l][k], local.C[l][k], local.D[l][k]);
    return v;
}

PrecodingSolution solve_bs_precoding(const ChannelSet& channels, const Eigen::VectorXcd& u_t,
                                     const Eigen::VectorXcd& u_r, const AuxiliaryState& local,
                                     double max_power_w, double noise_w,
                                     const sdp::SolverOptions& opts)
{
    const int l_count = channels.n_subcarriers();
    const int k_count = channels.n_users();
    const int n = static_cast<int>(channels.cascaded[0][0].cols());
    const double per_carrier_power = max_power_w / l_count;
    const double inv_noise = 1.0 / noise_w;

    PrecodingSolution out;
    out.w.assign(l_count, std::vector<Eigen::VectorXcd>(k_count));
    out.eigen_ratio.assign(l_count, std::vector<double>(k_count, 0.0));
    out.surrogate_value = 0.0;

    // the program separates across subcarriers: power, signal and
    // interference rows never mix different l
    for (int l = 0; l < l_count; ++l) {
        std::vector<Eigen::MatrixXcd> q_signal(k_count), q_plain(k_count);
        std::vector<SurrogateCoeffs> sc(k_count);
        for (int k = 0; k < k_count; ++k) {
            const Eigen::VectorXcd& u = region_vector(channels.user_regions[k], u_t, u_r);
            const Eigen::VectorXcd g = channels.cascaded[l][k].adjoint() * u; // N-vector
            q_plain[k] = (g * g.adjoint()) * inv_noise;
            q_signal[k] = q_plain[k] + kSignalRidge * Eigen::MatrixXcd::Identity(n, n);
            sc[k] = surrogate_coeffs(local.C[l][k], local.D[l][k]);
        }

        // starved beams (surrogate term below kTermFloor) are excluded
        // from the program entirely and keep a zero precoder; a block with
        // no objective pressure would otherwise converge to a full-rank
        // analytic centre that wastes power and injects interference
        std::vector<int> kept;
        for (int k = 0; k < k_count; ++k)
            if (sc[k].keep) kept.push_back(k);

        double dropped_value = 0.0, kept_constant = 0.0;
        for (int k = 0; k < k_count; ++k) {
            if (sc[k].keep)
                kept_constant += sc[k].constant;
            else
                dropped_value += sc[k].point_value;
        }

        for (int k = 0; k < k_count; ++k) {
            out.w[l][k] = Eigen::VectorXcd::Zero(n);
            out.eigen_ratio[l][k] = 0.0;
        }
        if (kept.empty()) {
            out.surrogate_value += dropped_value;
            continue;
        }

        // blocks: one lifted precoder per kept user, then a rescaled
        // hyperbolic pair [[C/C0, 1], [1, C0 tr(W Q)]] and a D scalar each
        sdp::ConeProblem p;
        p.sense = sdp::Sense::Maximize;
        std::vector<int> wblk(k_count, -1), zblk(k_count, -1), dblk(k_count, -1);
        for (int k : kept) {
            wblk[k] = static_cast<int>(p.block_dims.size());
            p.block_dims.push_back(n);
        }
        for (int k : kept) {
            zblk[k] = static_cast<int>(p.block_dims.size());
            p.block_dims.push_back(2);
            dblk[k] = static_cast<int>(p.block_dims.size());
            p.block_dims.push_back(1);
        }

        for (int k : kept) {
            Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(2, 2);
            e(0, 0) = -sc[k].a_scaled;
            p.objective.terms.push_back({zblk[k], e});
            p.objective.terms.push_back({dblk[k], -sc[k].b * Eigen::MatrixXcd::Ones(1, 1)});
        }

        sdp::Constraint power;
        for (int k : kept)
            power.lhs.terms.push_back({wblk[k], Eigen::MatrixXcd::Identity(n, n)});
        power.rel = sdp::Relation::LessEqual;
        power.rhs = per_carrier_power;
        p.constraints.push_back(std::move(power));

        for (int k : kept) {
            sdp::Constraint unit; // Z12 = 1
            Eigen::MatrixXcd e12 = Eigen::MatrixXcd::Zero(2, 2);
            e12(0, 1) = e12(1, 0) = 0.5;
            unit.lhs.terms.push_back({zblk[k], e12});
            unit.rhs = 1.0;
            p.constraints.push_back(std::move(unit));

            sdp::Constraint tie; // Z22 = C0 tr(W_k Q_k)
            Eigen::MatrixXcd e22 = Eigen::MatrixXcd::Zero(2, 2);
            e22(1, 1) = 1.0;
            tie.lhs.terms.push_back({zblk[k], e22});
            tie.lhs.terms.push_back({wblk[k], -local.C[l][k] * q_signal[k]});
            tie.rhs = 0.0;
            p.constraints.push_back(std::move(tie));

            sdp::Constraint interf; // D_k >= sum_{i != k} tr(W_i Q_k) + 1
            interf.lhs.terms.push_back({dblk[k], Eigen::MatrixXcd::Ones(1, 1)});
            for (int i : kept)
                if (i != k) interf.lhs.terms.push_back({wblk[i], -q_plain[k]});
            interf.rel = sdp::Relation::GreaterEqual;
            interf.rhs = 1.0;
            p.constraints.push_back(std::move(interf));
        }

        const sdp::ConeSolution sol = sdp::solve(p, opts);
        if (!solver_output_usable(sol))
            throw std::runtime_error(std::string("precoding subproblem (subcarrier ") +
                                     std::to_string(l) + "): solver returned " +
                                     sdp::status_name(sol.status));

        // surrogate value realized by a concrete precoder set, with the
        // auxiliaries at their feasibility-optimal (tight) values
        const auto realized = [&](const std::vector<Eigen::VectorXcd>& ws) {
            double v = 0.0;
            for (int k : kept) {
                const double t_scaled =
                    local.C[l][k] *
                    (ws[k].adjoint() * q_signal[k] * ws[k]).value().real();
                double interf = 1.0;
                for (int i : kept)
                    if (i != k)
                        interf += (ws[i].adjoint() * q_plain[k] * ws[i]).value().real();
                v += sc[k].constant - sc[k].a_scaled / std::max(t_scaled, kSignalFloor) -
                     sc[k].b * interf;
            }
            return v;
        };

        // rank reduction toward an extreme point: the relaxed optimum can
        // be a higher-rank centre of a degenerate optimal face (the
        // per-subcarrier data matrices are collinear), but its principal
        // components realize the same objective; keep them when verified
        std::vector<Eigen::VectorXcd> pure(k_count, Eigen::VectorXcd::Zero(n));
        std::vector<double> raw_ratio(k_count, 0.0);
        for (int k : kept) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(sol.blocks[wblk[k]]);
            const auto& vals = eig.eigenvalues();
            const double l1 = vals[n - 1];
            const double l2 = n > 1 ? std::max(vals[n - 2], 0.0) : 0.0;
            if (l1 > 0.0) {
                pure[k] = std::sqrt(l1) * eig.eigenvectors().col(n - 1);
                raw_ratio[k] = l2 / l1;
            }
        }
        // realized() already carries the kept constants
        const double obj_pure = realized(pure);
        const double obj_solver = sol.objective_value + kept_constant;
        const double accept_tol = 1e-7 * (1.0 + std::abs(obj_solver));
        const bool accepted = obj_pure >= obj_solver - accept_tol;
        for (int k : kept) {
            out.w[l][k] = pure[k];
            out.eigen_ratio[l][k] = accepted ? 0.0 : raw_ratio[k];
        }
        out.surrogate_value += (accepted ? obj_pure : obj_solver) + dropped_value;
    }
    return out;
}

BeamformingSolution solve_stars_beamforming(const ChannelSet& channels, const PrecoderSet& w,
                                            const AuxiliaryState& local, double noise_w,
                                            const sdp::SolverOptions& opts)
{
    const int l_count = channels.n_subcarriers();
    const int k_count = channels.n_users();
    const int m_count = static_cast<int>(channels.cascaded[0][0].rows());
    const double inv_noise = 1.0 / noise_w;

    // blocks: 0 = U_t, 1 = U_r, then a rescaled hyperbolic pair and a D
    // scalar per kept (l, k) term
    sdp::ConeProblem p;
    p.sense = sdp::Sense::Maximize;
    p.block_dims = {m_count, m_count};
    std::vector<std::vector<int>> zblk(l_count, std::vector<int>(k_count, -1));
    std::vector<std::vector<int>> dblk(l_count, std::vector<int>(k_count, -1));

    double constant = 0.0;
    for (int m = 0; m < m_count; ++m) {
        sdp::Constraint diag;
        Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(m_count, m_count);
        e(m, m) = 1.0;
        diag.lhs.terms.push_back({0, e});
        diag.lhs.terms.push_back({1, e});
        diag.rhs = 1.0;
        p.constraints.push_back(std::move(diag));
    }

    for (int l = 0; l < l_count; ++l) {
        for (int k = 0; k < k_count; ++k) {
            const int ub = channels.user_regions[k] == Region::Transmission ? 0 : 1;
            const SurrogateCoeffs sc = surrogate_coeffs(local.C[l][k], local.D[l][k]);
            if (!sc.keep) {
                constant += sc.point_value;
                continue;
            }
            constant += sc.constant;
            zblk[l][k] = static_cast<int>(p.block_dims.size());
            p.block_dims.push_back(2);
            dblk[l][k] = static_cast<int>(p.block_dims.size());
            p.block_dims.push_back(1);

            Eigen::MatrixXcd ez = Eigen::MatrixXcd::Zero(2, 2);
            ez(0, 0) = -sc.a_scaled;
            p.objective.terms.push_back({zblk[l][k], ez});
            p.objective.terms.push_back({dblk[l][k], -sc.b * Eigen::MatrixXcd::Ones(1, 1)});

            // signal direction g = H w_k; G = g g^H / noise
            const Eigen::VectorXcd g = channels.cascaded[l][k] * w[l][k];
            const Eigen::MatrixXcd g_signal =
                (g * g.adjoint()) * inv_noise +
                kSignalRidge * Eigen::MatrixXcd::Identity(m_count, m_count);

            sdp::Constraint unit;
            Eigen::MatrixXcd e12 = Eigen::MatrixXcd::Zero(2, 2);
            e12(0, 1) = e12(1, 0) = 0.5;
            unit.lhs.terms.push_back({zblk[l][k], e12});
            unit.rhs = 1.0;
            p.constraints.push_back(std::move(unit));

            sdp::Constraint tie; // Z22 = C0 tr(U G)
            Eigen::MatrixXcd e22 = Eigen::MatrixXcd::Zero(2, 2);
            e22(1, 1) = 1.0;
            tie.lhs.terms.push_back({zblk[l][k], e22});
            tie.lhs.terms.push_back({ub, -local.C[l][k] * g_signal});
            tie.rhs = 0.0;
            p.constraints.push_back(std::move(tie));

            sdp::Constraint interf;
            interf.lhs.terms.push_back({dblk[l][k], Eigen::MatrixXcd::Ones(1, 1)});
            Eigen::MatrixXcd g_int = Eigen::MatrixXcd::Zero(m_count, m_count);
            for (int i = 0; i < k_count; ++i) {
                if (i == k) continue;
                const Eigen::VectorXcd gi = channels.cascaded[l][k] * w[l][i];
                g_int += (gi * gi.adjoint()) * inv_noise;
            }
            if (g_int.cwiseAbs().maxCoeff() != 0.0) interf.lhs.terms.push_back({ub, -g_int});
            interf.rel = sdp::Relation::GreaterEqual;
            interf.rhs = 1.0;
            p.constraints.push_back(std::move(interf));
        }
    }

    const sdp::ConeSolution sol = sdp::solve(p, opts);
    if (!solver_output_usable(sol))
        throw std::runtime_error(std::string("surface subproblem: solver returned ") +
                                 sdp::status_name(sol.status));

    BeamformingSolution out;
    out.lifted_t = sol.blocks[0];
    out.lifted_r = sol.blocks[1];
    out.surrogate_value = sol.objective_value + constant;
    return out;
}

RandomizationResult gaussian_randomization(
    const Eigen::MatrixXcd& lifted_t, const Eigen::MatrixXcd& lifted_r, int n_draws,
    const std::function<double(const StarsCoefficients&)>& evaluator, std::mt19937_64& rng)
{
    const int m_count = static_cast<int>(lifted_t.rows());

    // amplitudes come from the lifted diagonals; the pairwise
    // renormalization restores the exact energy split
    Eigen::VectorXd amp_t(m_count), amp_r(m_count);
    for (int m = 0; m < m_count; ++m) {
        double at = std::sqrt(std::max(lifted_t(m, m).real(), 0.0));
        double ar = std::sqrt(std::max(lifted_r(m, m).real(), 0.0));
        const double norm = std::hypot(at, ar);
        if (norm < 1e-12) {
            at = ar = std::sqrt(0.5);
        } else {
            at /= norm;
            ar /= norm;
        }
        amp_t[m] = at;
        amp_r[m] = ar;
    }

    const auto wrap = [](double p) {
        p = std::fmod(p, kTwoPi);
        return p < 0.0 ? p + kTwoPi : p;
    };
    const auto phases_of = [&](const Eigen::VectorXcd& v) {
        Eigen::VectorXd phases(m_count);
        for (int m = 0; m < m_count; ++m)
            phases[m] = std::abs(v[m]) > 0.0 ? wrap(std::arg(v[m])) : 0.0;
        return phases;
    };

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig_t(lifted_t), eig_r(lifted_r);
    const auto factor = [&](const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>& eig) {
        Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        return Eigen::MatrixXcd(eig.eigenvectors() * vals.asDiagonal());
    };
    const Eigen::MatrixXcd fac_t = factor(eig_t), fac_r = factor(eig_r);

    StarsCoefficients best;
    best.amp_t = amp_t;
    best.amp_r = amp_r;
    best.phase_t = phases_of(eig_t.eigenvectors().col(m_count - 1));
    best.phase_r = phases_of(eig_r.eigenvectors().col(m_count - 1));
    double best_value = evaluator(best);

    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    Eigen::VectorXcd r_t(m_count), r_r(m_count);
    for (int g = 0; g < n_draws; ++g) {
        for (int m = 0; m < m_count; ++m) r_t[m] = {gauss(rng), gauss(rng)};
        for (int m = 0; m < m_count; ++m) r_r[m] = {gauss(rng), gauss(rng)};
        StarsCoefficients cand;
        cand.amp_t = amp_t;
        cand.amp_r = amp_r;
        cand.phase_t = phases_of(fac_t * r_t);
        cand.phase_r = phases_of(fac_r * r_r);
        const double value = evaluator(cand);
        if (value > best_value) {
            best_value = value;
            best = std::move(cand);
        }
    }
    return {std::move(best), best_value};
}

StarsCoefficients init_beamforming(int n_elements, std::mt19937_64& rng)
{
    StarsCoefficients c;
    c.amp_t = Eigen::VectorXd::Constant(n_elements, std::sqrt(0.5));
    c.amp_r = Eigen::VectorXd::Constant(n_elements, std::sqrt(0.5));
    c.phase_t.resize(n_elements);
    c.phase_r.resize(n_elements);
    std::uniform_real_distribution<double> uni(0.0, kTwoPi);
    for (int m = 0; m < n_elements; ++m) c.phase_t[m] = uni(rng);
    for (int m = 0; m < n_elements; ++m) c.phase_r[m] = uni(rng);
    return c;
}

BcdResult bcd_loop(const Scenario& scenario, std::span<const Eigen::Vector2d> offsets,
                   const BcdConfig& cfg, std::uint64_t seed)
{
    const ChannelSet channels = assemble_channels(scenario, offsets);
    const int l_count = channels.n_subcarriers();
    const int k_count = channels.n_users();
    const int m_count = scenario.system.n_elements;
    const double noise = scenario.system.noise_power_w;
    const double power = scenario.system.max_power_w;

    std::mt19937_64 rng(seed);
    BcdResult res;
    res.coefficients = init_beamforming(m_count, rng);
    Eigen::VectorXcd u_t = res.coefficients.tuning_vector_t();
    Eigen::VectorXcd u_r = res.coefficients.tuning_vector_r();

    // matched filters on the centre subcarrier, equal power split
    const int lc = (l_count - 1) / 2;
    res.w.assign(l_count, std::vector<Eigen::VectorXcd>(k_count));
    const double per_beam = power / (l_count * k_count);
    for (int l = 0; l < l_count; ++l) {
        for (int k = 0; k < k_count; ++k) {
            const Eigen::VectorXcd& u = channels.user_regions[k] == Region::Transmission
                                            ? u_t
                                            : u_r;
            Eigen::VectorXcd dir = channels.cascaded[lc][k].adjoint() * u;
            const double norm = dir.norm();
            if (norm < 1e-30) {
                dir = Eigen::VectorXcd::Zero(dir.size());
                dir[0] = 1.0;
            } else {
                dir /= norm;
            }
            res.w[l][k] = std::sqrt(per_beam) * dir;
        }
    }

    const auto evaluator = [&](const StarsCoefficients& c) {
        return sum_rate(channels, res.w, c.tuning_vector_t(), c.tuning_vector_r(), noise);
    };

    double previous_surrogate = 0.0;
    for (int iter = 1; iter <= cfg.max_outer_bcd_iters; ++iter) {
        try {
            AuxiliaryState local = tighten_aux(channels, res.w, u_t, u_r, noise);
            PrecodingSolution prec =
                solve_bs_precoding(channels, u_t, u_r, local, power, noise);
            res.w = prec.w;
            res.eigen_ratios = prec.eigen_ratio;
            res.surrogate_trace.push_back(prec.surrogate_value);

            local = tighten_aux(channels, res.w, u_t, u_r, noise);
            BeamformingSolution beam = solve_stars_beamforming(channels, res.w, local, noise);
            RandomizationResult rec = gaussian_randomization(
                beam.lifted_t, beam.lifted_r, cfg.n_randomizations, evaluator, rng);
            // the incumbent never leaves the candidate set
            if (evaluator(res.coefficients) < rec.value) res.coefficients = rec.coefficients;
            u_t = res.coefficients.tuning_vector_t();
            u_r = res.coefficients.tuning_vector_r();
        } catch (const std::exception& e) {
            res.failure = e.what();
            break;
        }

        res.sum_rate_trace.push_back(sum_rate(channels, res.w, u_t, u_r, noise));
        res.iterations = iter;
        const double current = res.surrogate_trace.back();
        if (iter > 1 && std::abs(current - previous_surrogate) < cfg.convergence_eps) {
            res.converged = true;
            break;
        }
        previous_surrogate = current;
    }
    res.final_sum_rate = res.sum_rate_trace.empty() ? 0.0 : res.sum_rate_trace.back();
    return res;
}

} // namespace mestars
