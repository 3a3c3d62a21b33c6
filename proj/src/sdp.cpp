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
// Primal-dual path-following interior point method for
//
//     min sum_b <C_b, X_b>   s.t.  sum_b <A_ib, X_b> = b_i,   X_b >= 0
//
// over dense symmetric blocks, with Nesterov-Todd scaling and a Mehrotra
// predictor-corrector step. Inequalities become 1x1 slack blocks; complex
// Hermitian blocks are mapped to the symmetric real embedding
// [[Re, -Im], [Im, Re]] (coefficients halved so functional values match)
// and projected back after the solve.

#include "mestars/sdp.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace mestars::sdp {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kHermitianTol = 1e-10;

// ---------------------------------------------------------------- embedding

MatrixXd embed_half(const MatrixXcd& a)
{
    const Eigen::Index n = a.rows();
    MatrixXd e(2 * n, 2 * n);
    e.topLeftCorner(n, n) = a.real();
    e.bottomRightCorner(n, n) = a.real();
    e.topRightCorner(n, n) = -a.imag();
    e.bottomLeftCorner(n, n) = a.imag();
    return 0.5 * e;
}

// structured projection + un-embedding; preserves PSD and functionals
MatrixXcd unembed(const MatrixXd& y)
{
    const Eigen::Index n = y.rows() / 2;
    const MatrixXd re = 0.5 * (y.topLeftCorner(n, n) + y.bottomRightCorner(n, n));
    const MatrixXd im = 0.5 * (y.bottomLeftCorner(n, n) - y.topRightCorner(n, n));
    MatrixXcd x(n, n);
    x.real() = 0.5 * (re + re.transpose());
    x.imag() = 0.5 * (im - im.transpose());
    return x;
}

// ------------------------------------------------------------ standard form

struct StdConstraint {
    std::vector<std::pair<int, MatrixXd>> terms; // sorted by block
    double rhs = 0.0;
    double row_scale = 1.0; // user row = row_scale * internal row
};

struct StdForm {
    std::vector<int> dims;             // internal block dims, user blocks then slacks
    std::vector<MatrixXd> C;           // objective per internal block
    std::vector<StdConstraint> constraints;
    std::vector<bool> block_complex;   // per user block
    int n_user_blocks = 0;
    double sense_sign = 1.0;           // applied to the user objective
};

void accumulate_terms(std::vector<MatrixXd>& dest, const LinearFunctional& f,
                      const std::vector<bool>& block_complex, double scale)
{
    for (const auto& term : f.terms) {
        const MatrixXcd herm = 0.5 * (term.coeff + term.coeff.adjoint());
        if (block_complex[term.block])
            dest[term.block] += scale * embed_half(herm);
        else
            dest[term.block] += scale * herm.real();
    }
}

StdForm standardize(const ConeProblem& p)
{
    StdForm f;
    f.n_user_blocks = static_cast<int>(p.block_dims.size());
    f.sense_sign = p.sense == Sense::Minimize ? 1.0 : -1.0;

    f.block_complex.assign(f.n_user_blocks, false);
    auto scan = [&](const LinearFunctional& fn) {
        for (const auto& t : fn.terms)
            if (t.coeff.imag().cwiseAbs().maxCoeff() != 0.0) f.block_complex[t.block] = true;
    };
    scan(p.objective);
    for (const auto& c : p.constraints) scan(c.lhs);

    f.dims.resize(f.n_user_blocks);
    for (int b = 0; b < f.n_user_blocks; ++b)
        f.dims[b] = f.block_complex[b] ? 2 * p.block_dims[b] : p.block_dims[b];

    std::vector<MatrixXd> zero;
    zero.reserve(f.dims.size());
    for (int d : f.dims) zero.push_back(MatrixXd::Zero(d, d));

    f.C = zero;
    accumulate_terms(f.C, p.objective, f.block_complex, f.sense_sign);

    for (const auto& c : p.constraints) {
        std::vector<MatrixXd> acc = zero;
        accumulate_terms(acc, c.lhs, f.block_complex, 1.0);
        StdConstraint sc;
        sc.rhs = c.rhs;
        double norm2 = 0.0;
        for (int b = 0; b < f.n_user_blocks; ++b) norm2 += acc[b].squaredNorm();
        sc.row_scale = std::max(1.0, std::sqrt(norm2));
        const double inv = 1.0 / sc.row_scale;
        sc.rhs *= inv;
        for (int b = 0; b < f.n_user_blocks; ++b)
            if (acc[b].cwiseAbs().maxCoeff() != 0.0) {
                acc[b] *= inv;
                sc.terms.emplace_back(b, std::move(acc[b]));
            }
        if (c.rel != Relation::Equal) {
            const int slack = static_cast<int>(f.dims.size());
            f.dims.push_back(1);
            f.C.push_back(MatrixXd::Zero(1, 1));
            MatrixXd one(1, 1);
            one(0, 0) = c.rel == Relation::LessEqual ? 1.0 : -1.0;
            sc.terms.emplace_back(slack, std::move(one));
        }
        f.constraints.push_back(std::move(sc));
    }
    return f;
}

// --------------------------------------------------------------- IPM engine

struct Iterate {
    std::vector<MatrixXd> X, Z;
    VectorXd y;
};

struct IpmOutcome {
    SolveStatus status = SolveStatus::MaxIterations;
    Iterate point;
    Residuals residuals;
    int iterations = 0;
    double pobj = 0.0, dobj = 0.0;
};

double frob_total(const std::vector<MatrixXd>& ms)
{
    double s = 0.0;
    for (const auto& m : ms) s += m.squaredNorm();
    return std::sqrt(s);
}

// largest step alpha with Lambda + alpha * D >= 0, via the scaled
// eigenvalue bound on D(i,j) / sqrt(lambda_i lambda_j)
double max_step(const MatrixXd& delta_scaled, const VectorXd& lambda)
{
    const Eigen::Index n = lambda.size();
    MatrixXd s(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            s(i, j) = delta_scaled(i, j) / std::sqrt(lambda[i] * lambda[j]);
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(s, Eigen::EigenvaluesOnly);
    const double lmin = eig.eigenvalues().minCoeff();
    if (lmin >= -1e-18) return std::numeric_limits<double>::infinity();
    return -1.0 / lmin;
}

Eigen::LLT<MatrixXd> chol_with_bump(const MatrixXd& m)
{
    Eigen::LLT<MatrixXd> llt(m);
    if (llt.info() == Eigen::Success) return llt;
    MatrixXd bumped = m;
    double bump = std::max(1e-14, 1e-12 * m.diagonal().maxCoeff());
    for (int tries = 0; tries < 8; ++tries) {
        bumped.diagonal().array() += bump;
        llt.compute(bumped);
        if (llt.info() == Eigen::Success) return llt;
        bump *= 100.0;
    }
    throw std::runtime_error("sdp: block lost positive definiteness beyond repair");
}

IpmOutcome ipm_solve(const StdForm& f, const SolverOptions& opt)
{
    const int n_blocks = static_cast<int>(f.dims.size());
    const int m = static_cast<int>(f.constraints.size());
    double n_tot = 0.0;
    for (int d : f.dims) n_tot += d;

    VectorXd b(m);
    for (int i = 0; i < m; ++i) b[i] = f.constraints[i].rhs;
    const double bnorm = b.norm();
    const double cnorm = frob_total(f.C);

    IpmOutcome out;
    Iterate it;
    const double init_scale = std::max(10.0, std::sqrt(n_tot));
    it.X.reserve(n_blocks);
    it.Z.reserve(n_blocks);
    for (int d : f.dims) {
        it.X.push_back(init_scale * MatrixXd::Identity(d, d));
        it.Z.push_back(init_scale * MatrixXd::Identity(d, d));
    }
    it.y = VectorXd::Zero(m);

    double best_score = std::numeric_limits<double>::infinity();
    auto record_best = [&](const Iterate& cur, const Residuals& res, double pobj, double dobj,
                           int iter) {
        const double score = std::max({res.primal, res.dual, res.gap});
        if (score < best_score) {
            best_score = score;
            out.point = cur;
            out.residuals = res;
            out.pobj = pobj;
            out.dobj = dobj;
            out.iterations = iter;
        }
    };

    std::vector<MatrixXd> r_d(n_blocks);
    std::vector<MatrixXd> R(n_blocks), Rrd(n_blocks), gamma(n_blocks);
    std::vector<VectorXd> lambda(n_blocks);
    std::vector<std::vector<MatrixXd>> T(m);

    for (int iter = 0; iter <= opt.max_iter; ++iter) {
        // residuals
        VectorXd r_p = b;
        for (int i = 0; i < m; ++i)
            for (const auto& [blk, coeff] : f.constraints[i].terms)
                r_p[i] -= coeff.cwiseProduct(it.X[blk]).sum();
        for (int bi = 0; bi < n_blocks; ++bi) r_d[bi] = f.C[bi] - it.Z[bi];
        for (int i = 0; i < m; ++i)
            for (const auto& [blk, coeff] : f.constraints[i].terms)
                r_d[blk] -= it.y[i] * coeff;

        double pobj = 0.0;
        for (int bi = 0; bi < n_blocks; ++bi) pobj += f.C[bi].cwiseProduct(it.X[bi]).sum();
        const double dobj = b.dot(it.y);
        double mu = 0.0;
        for (int bi = 0; bi < n_blocks; ++bi) mu += it.X[bi].cwiseProduct(it.Z[bi]).sum();
        mu /= n_tot;

        Residuals res;
        res.primal = r_p.norm() / (1.0 + bnorm);
        res.dual = frob_total(r_d) / (1.0 + cnorm);
        res.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        record_best(it, res, pobj, dobj, iter);

        if (res.primal <= opt.tol && res.dual <= opt.tol && res.gap <= opt.tol) {
            out.status = SolveStatus::Optimal;
            out.point = it;
            out.residuals = res;
            out.pobj = pobj;
            out.dobj = dobj;
            out.iterations = iter;
            return out;
        }

        // Farkas-type certificate: the ray S = -A^T(y)/|y| proves primal
        // infeasibility when S >= 0 and b^T y > 0. Only a diverging dual
        // carries a genuine ray; at moderate |y| the converged dual of a
        // feasible problem satisfies the same inequalities through
        // Z - C >= 0 and must not be mistaken for one.
        const double ynorm = it.y.norm();
        if (iter > 5 && ynorm > 1e3 && cnorm <= 1e-4 * ynorm && b.dot(it.y) > 0.0) {
            const double bty = b.dot(it.y) / ynorm;
            double psd_viol = 0.0, ray_norm2 = 0.0;
            std::vector<MatrixXd> ray(n_blocks);
            for (int bi = 0; bi < n_blocks; ++bi) ray[bi] = MatrixXd::Zero(f.dims[bi], f.dims[bi]);
            for (int i = 0; i < m; ++i)
                for (const auto& [blk, coeff] : f.constraints[i].terms)
                    ray[blk] -= (it.y[i] / ynorm) * coeff;
            for (int bi = 0; bi < n_blocks; ++bi) {
                ray_norm2 += ray[bi].squaredNorm();
                Eigen::SelfAdjointEigenSolver<MatrixXd> eig(ray[bi], Eigen::EigenvaluesOnly);
                psd_viol = std::max(psd_viol, std::max(0.0, -eig.eigenvalues().minCoeff()));
            }
            const double ray_scale = 1.0 + std::sqrt(ray_norm2);
            if (std::getenv("MESTARS_SDP_DEBUG"))
                std::fprintf(stderr,
                             "[cert] iter=%d ynorm=%g bty=%g psd_viol=%g scale=%g pinf=%g "
                             "dinf=%g gap=%g mu=%g cnorm=%g\n",
                             iter, ynorm, bty, psd_viol, ray_scale, res.primal, res.dual,
                             res.gap, mu, cnorm);
            if (bty > 1e-6 * ray_scale && psd_viol <= 1e-9 * ray_scale) {
                out.status = SolveStatus::Infeasible;
                out.point = it;
                out.residuals = res;
                out.pobj = pobj;
                out.dobj = dobj;
                out.iterations = iter;
                return out;
            }
        }

        if (iter == opt.max_iter) break;

        // Nesterov-Todd scaling per block:
        //   Lx = chol(X), Lz = chol(Z), Lz^T Lx = U S V^T,
        //   R = Lx V S^{-1/2}, lambda = diag(S); R^T Z R = R^-1 X R^-T = S
        for (int bi = 0; bi < n_blocks; ++bi) {
            const MatrixXd lx = chol_with_bump(it.X[bi]).matrixL();
            const MatrixXd lz = chol_with_bump(it.Z[bi]).matrixL();
            Eigen::JacobiSVD<MatrixXd> svd(lz.transpose() * lx,
                                           Eigen::ComputeThinU | Eigen::ComputeThinV);
            lambda[bi] = svd.singularValues();
            const VectorXd inv_sqrt = lambda[bi].cwiseSqrt().cwiseInverse();
            R[bi] = lx * svd.matrixV() * inv_sqrt.asDiagonal();
            Rrd[bi] = R[bi].transpose() * r_d[bi] * R[bi];
            const Eigen::Index d = f.dims[bi];
            gamma[bi].resize(d, d);
            for (Eigen::Index i = 0; i < d; ++i)
                for (Eigen::Index j = 0; j < d; ++j)
                    gamma[bi](i, j) = 2.0 / (lambda[bi][i] + lambda[bi][j]);
        }
        for (int i = 0; i < m; ++i) {
            T[i].clear();
            for (const auto& [blk, coeff] : f.constraints[i].terms)
                T[i].push_back(R[blk].transpose() * coeff * R[blk]);
        }

        // Schur complement M_ij = sum_b <T_i, T_j>
        MatrixXd schur = MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            for (int j = i; j < m; ++j) {
                double s = 0.0;
                std::size_t a = 0, c = 0;
                const auto& ti = f.constraints[i].terms;
                const auto& tj = f.constraints[j].terms;
                while (a < ti.size() && c < tj.size()) {
                    if (ti[a].first == tj[c].first) {
                        s += T[i][a].cwiseProduct(T[j][c]).sum();
                        ++a;
                        ++c;
                    } else if (ti[a].first < tj[c].first) {
                        ++a;
                    } else {
                        ++c;
                    }
                }
                schur(i, j) = schur(j, i) = s;
            }
        }
        Eigen::LDLT<MatrixXd> schur_fact;
        if (m > 0) {
            schur_fact.compute(schur);
            if (schur_fact.info() != Eigen::Success) {
                schur.diagonal().array() += 1e-12 * (1.0 + schur.diagonal().maxCoeff());
                schur_fact.compute(schur);
            }
        }

        auto solve_direction = [&](const std::vector<MatrixXd>& target,
                                   std::vector<MatrixXd>& dXs, std::vector<MatrixXd>& dZs,
                                   VectorXd& dy) {
            VectorXd rhs = r_p;
            for (int i = 0; i < m; ++i) {
                double s = 0.0;
                const auto& terms = f.constraints[i].terms;
                for (std::size_t a = 0; a < terms.size(); ++a) {
                    const int blk = terms[a].first;
                    s += T[i][a]
                             .cwiseProduct(Rrd[blk] - gamma[blk].cwiseProduct(target[blk]))
                             .sum();
                }
                rhs[i] += s;
            }
            if (m > 0) {
                dy = schur_fact.solve(rhs);
                VectorXd resid = rhs - schur * dy; // one refinement step
                dy += schur_fact.solve(resid);
            } else {
                dy.resize(0);
            }
            for (int bi = 0; bi < n_blocks; ++bi) dZs[bi] = Rrd[bi];
            for (int i = 0; i < m; ++i) {
                const auto& terms = f.constraints[i].terms;
                for (std::size_t a = 0; a < terms.size(); ++a)
                    dZs[terms[a].first] -= dy[i] * T[i][a];
            }
            for (int bi = 0; bi < n_blocks; ++bi)
                dXs[bi] = gamma[bi].cwiseProduct(target[bi]) - dZs[bi];
        };

        std::vector<MatrixXd> target(n_blocks), dXs(n_blocks), dZs(n_blocks);
        VectorXd dy;

        // predictor
        for (int bi = 0; bi < n_blocks; ++bi) {
            target[bi] = MatrixXd::Zero(f.dims[bi], f.dims[bi]);
            target[bi].diagonal() = -lambda[bi].cwiseProduct(lambda[bi]);
        }
        solve_direction(target, dXs, dZs, dy);

        double ap = 1.0, ad = 1.0;
        for (int bi = 0; bi < n_blocks; ++bi) {
            ap = std::min(ap, max_step(dXs[bi], lambda[bi]));
            ad = std::min(ad, max_step(dZs[bi], lambda[bi]));
        }
        double mu_aff = 0.0;
        for (int bi = 0; bi < n_blocks; ++bi) {
            MatrixXd xa = dXs[bi] * ap;
            MatrixXd za = dZs[bi] * ad;
            xa.diagonal() += lambda[bi];
            za.diagonal() += lambda[bi];
            mu_aff += xa.cwiseProduct(za.transpose()).sum();
        }
        mu_aff /= n_tot;
        const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 1e-10, 1.0);

        // corrector: sigma mu I - Lambda^2 - sym(dX_aff dZ_aff)
        for (int bi = 0; bi < n_blocks; ++bi) {
            const MatrixXd cross = dXs[bi] * dZs[bi];
            target[bi] = -0.5 * (cross + cross.transpose());
            target[bi].diagonal() -= lambda[bi].cwiseProduct(lambda[bi]);
            target[bi].diagonal().array() += sigma * mu;
        }
        solve_direction(target, dXs, dZs, dy);

        ap = std::numeric_limits<double>::infinity();
        ad = std::numeric_limits<double>::infinity();
        for (int bi = 0; bi < n_blocks; ++bi) {
            ap = std::min(ap, max_step(dXs[bi], lambda[bi]));
            ad = std::min(ad, max_step(dZs[bi], lambda[bi]));
        }
        const double tau = 0.99;
        ap = std::min(1.0, tau * ap);
        ad = std::min(1.0, tau * ad);

        for (int bi = 0; bi < n_blocks; ++bi) {
            MatrixXd dx = R[bi] * dXs[bi] * R[bi].transpose();
            it.X[bi] += ap * 0.5 * (dx + dx.transpose());
        }
        it.y += ad * dy;
        // dZ in the original space: r_d - A^T(dy)
        for (int bi = 0; bi < n_blocks; ++bi) it.Z[bi] += ad * r_d[bi];
        for (int i = 0; i < m; ++i)
            for (const auto& [blk, coeff] : f.constraints[i].terms)
                it.Z[blk] -= ad * dy[i] * coeff;
        for (int bi = 0; bi < n_blocks; ++bi)
            it.Z[bi] = 0.5 * (it.Z[bi] + it.Z[bi].transpose()).eval();
    }

    out.status = SolveStatus::MaxIterations;
    return out;
}

} // namespace

// ------------------------------------------------------------- public layer

const char* status_name(SolveStatus s)
{
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::MaxIterations: return "max_iter";
    }
    return "?";
}

double LinearFunctional::eval(std::span<const MatrixXcd> blocks) const
{
    double v = 0.0;
    for (const auto& t : terms)
        v += t.coeff.conjugate().cwiseProduct(blocks[t.block]).sum().real();
    return v;
}

void ConeProblem::validate() const
{
    const int n_blocks = static_cast<int>(block_dims.size());
    std::vector<bool> touched(n_blocks, false);
    auto check = [&](const LinearFunctional& f, const char* what) {
        for (const auto& t : f.terms) {
            if (t.block < 0 || t.block >= n_blocks)
                throw std::invalid_argument(std::string("sdp: ") + what +
                                            " references an unknown block");
            if (t.coeff.rows() != block_dims[t.block] || t.coeff.cols() != block_dims[t.block])
                throw std::invalid_argument(std::string("sdp: ") + what +
                                            " coefficient dimension mismatch");
            const double scale = 1.0 + t.coeff.norm();
            if ((t.coeff - t.coeff.adjoint()).norm() > kHermitianTol * scale)
                throw std::invalid_argument(std::string("sdp: ") + what +
                                            " coefficient is not Hermitian");
            touched[t.block] = true;
        }
    };
    check(objective, "objective");
    for (const auto& c : constraints) check(c.lhs, "constraint");
    for (int b = 0; b < n_blocks; ++b) {
        if (block_dims[b] < 1) throw std::invalid_argument("sdp: block dimension must be >= 1");
        if (!touched[b])
            throw std::invalid_argument("sdp: block " + std::to_string(b) +
                                        " is referenced by no functional");
    }
}

ConeSolution solve(const ConeProblem& problem, const SolverOptions& options)
{
    problem.validate();
    const StdForm f = standardize(problem);
    const IpmOutcome ipm = ipm_solve(f, options);

    ConeSolution sol;
    sol.status = ipm.status;
    sol.iterations = ipm.iterations;
    sol.residuals = ipm.residuals;
    sol.dual_multipliers.resize(ipm.point.y.size());
    for (Eigen::Index i = 0; i < ipm.point.y.size(); ++i)
        sol.dual_multipliers[i] = ipm.point.y[i] / f.constraints[i].row_scale;
    sol.blocks.resize(f.n_user_blocks);
    sol.dual_blocks.resize(f.n_user_blocks);
    for (int b = 0; b < f.n_user_blocks; ++b) {
        if (f.block_complex[b]) {
            sol.blocks[b] = unembed(ipm.point.X[b]);
            sol.dual_blocks[b] = unembed(2.0 * ipm.point.Z[b]);
        } else {
            sol.blocks[b] = ipm.point.X[b].cast<std::complex<double>>();
            sol.dual_blocks[b] = ipm.point.Z[b].cast<std::complex<double>>();
        }
    }
    sol.objective_value = f.sense_sign * ipm.pobj;
    return sol;
}

Residuals check_certificate(const ConeProblem& problem, const ConeSolution& solution)
{
    const double sign = problem.sense == Sense::Minimize ? 1.0 : -1.0;
    const int m = static_cast<int>(problem.constraints.size());

    // primal: relation-aware constraint violations plus cone violations
    double bnorm = 0.0;
    double viol2 = 0.0;
    for (int i = 0; i < m; ++i) {
        const auto& c = problem.constraints[i];
        const double v = c.lhs.eval(solution.blocks);
        double violation = 0.0;
        switch (c.rel) {
            case Relation::Equal: violation = std::abs(v - c.rhs); break;
            case Relation::LessEqual: violation = std::max(0.0, v - c.rhs); break;
            case Relation::GreaterEqual: violation = std::max(0.0, c.rhs - v); break;
        }
        viol2 += violation * violation;
        bnorm += c.rhs * c.rhs;
    }
    double cone_viol = 0.0;
    for (const auto& x : solution.blocks) {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(x, Eigen::EigenvaluesOnly);
        cone_viol = std::max(cone_viol,
                             std::max(0.0, -eig.eigenvalues().minCoeff()) / (1.0 + x.norm()));
    }

    Residuals r;
    r.primal = std::max(std::sqrt(viol2) / (1.0 + std::sqrt(bnorm)), cone_viol);

    // dual: stationarity sign*C - A^T(y) - Z = 0 with slack-sign conditions
    std::vector<MatrixXcd> stat;
    stat.reserve(problem.block_dims.size());
    for (int d : problem.block_dims) stat.push_back(MatrixXcd::Zero(d, d));
    double cnorm2 = 0.0;
    for (const auto& t : problem.objective.terms) {
        stat[t.block] += sign * 0.5 * (t.coeff + t.coeff.adjoint());
        cnorm2 += t.coeff.squaredNorm();
    }
    double sign_viol = 0.0;
    for (int i = 0; i < m; ++i) {
        const double y = i < static_cast<int>(solution.dual_multipliers.size())
                             ? solution.dual_multipliers[i]
                             : 0.0;
        for (const auto& t : problem.constraints[i].lhs.terms)
            stat[t.block] -= y * 0.5 * (t.coeff + t.coeff.adjoint());
        if (problem.constraints[i].rel == Relation::LessEqual)
            sign_viol = std::max(sign_viol, std::max(0.0, y));
        if (problem.constraints[i].rel == Relation::GreaterEqual)
            sign_viol = std::max(sign_viol, std::max(0.0, -y));
    }
    double stat2 = 0.0;
    double z_psd_viol = 0.0;
    for (std::size_t b = 0; b < stat.size(); ++b) {
        stat[b] -= solution.dual_blocks[b];
        stat2 += stat[b].squaredNorm();
        Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(solution.dual_blocks[b],
                                                     Eigen::EigenvaluesOnly);
        z_psd_viol = std::max(z_psd_viol, std::max(0.0, -eig.eigenvalues().minCoeff()) /
                                              (1.0 + solution.dual_blocks[b].norm()));
    }
    r.dual = std::max({std::sqrt(stat2) / (1.0 + std::sqrt(cnorm2)), sign_viol, z_psd_viol});

    // gap between the primal objective and b^T y (minimization orientation)
    const double pobj = sign * problem.objective.eval(solution.blocks);
    double dobj = 0.0;
    for (int i = 0; i < m; ++i)
        dobj += problem.constraints[i].rhs *
                (i < static_cast<int>(solution.dual_multipliers.size())
                     ? solution.dual_multipliers[i]
                     : 0.0);
    r.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    return r;
}

std::string problem_to_json_string(const ConeProblem& problem)
{
    nlohmann::json j;
    j["sense"] = problem.sense == Sense::Minimize ? "minimize" : "maximize";
    j["block_dims"] = problem.block_dims;
    const auto functional_to_json = [](const LinearFunctional& f) {
        nlohmann::json terms = nlohmann::json::array();
        for (const auto& t : f.terms) {
            nlohmann::json entry;
            entry["block"] = t.block;
            nlohmann::json coeff = nlohmann::json::array(); // row-major re, im
            for (Eigen::Index r = 0; r < t.coeff.rows(); ++r)
                for (Eigen::Index cidx = 0; cidx < t.coeff.cols(); ++cidx) {
                    coeff.push_back(t.coeff(r, cidx).real());
                    coeff.push_back(t.coeff(r, cidx).imag());
                }
            entry["coeff"] = std::move(coeff);
            terms.push_back(std::move(entry));
        }
        return terms;
    };
    j["objective"] = functional_to_json(problem.objective);
    nlohmann::json cons = nlohmann::json::array();
    for (const auto& c : problem.constraints) {
        nlohmann::json jc;
        jc["terms"] = functional_to_json(c.lhs);
        jc["relation"] = c.rel == Relation::Equal ? "eq"
                         : c.rel == Relation::LessEqual ? "le"
                                                        : "ge";
        jc["rhs"] = c.rhs;
        cons.push_back(std::move(jc));
    }
    j["constraints"] = std::move(cons);
    return j.dump(2) + "\n";
}

} // namespace mestars::sdp
