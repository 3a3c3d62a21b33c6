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

#include "mestars/sdp.hpp"

using namespace mestars::sdp;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;

namespace {

MatrixXcd random_hermitian(int n, std::mt19937_64& rng)
{
    std::normal_distribution<double> gauss;
    MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = {gauss(rng), gauss(rng)};
    return 0.5 * (a + a.adjoint());
}

ConeProblem lambda_max_problem(const MatrixXcd& c)
{
    const int n = static_cast<int>(c.rows());
    ConeProblem p;
    p.sense = Sense::Maximize;
    p.block_dims = {n};
    p.objective.terms.push_back({0, c});
    Constraint trace;
    trace.lhs.terms.push_back({0, MatrixXcd::Identity(n, n)});
    trace.rhs = 1.0;
    p.constraints.push_back(std::move(trace));
    return p;
}

} // namespace

TEST_CASE("cone boundary: minimize a nonnegative scalar")
{
    ConeProblem p;
    p.block_dims = {1};
    p.objective.terms.push_back({0, MatrixXcd::Ones(1, 1)});
    const ConeSolution sol = solve(p, {1e-9, 100});
    CHECK(sol.status == SolveStatus::Optimal);
    CHECK(std::abs(sol.objective_value) < 1e-7);
    CHECK(sol.blocks[0](0, 0).real() >= -1e-9);
}

TEST_CASE("eigenvalue form recovers lambda_max and the top eigenvector")
{
    std::mt19937_64 rng(41);
    const MatrixXcd c = random_hermitian(7, rng);
    const ConeSolution sol = solve(lambda_max_problem(c), {1e-9, 200});
    REQUIRE(sol.status == SolveStatus::Optimal);

    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(c);
    const double lmax = eig.eigenvalues().maxCoeff();
    CHECK(sol.objective_value == doctest::Approx(lmax).epsilon(1e-8));

    // X should be (numerically) the top eigenvector outer product
    Eigen::SelfAdjointEigenSolver<MatrixXcd> xeig(sol.blocks[0]);
    const Eigen::VectorXcd top = xeig.eigenvectors().col(6);
    const Eigen::VectorXcd expect = eig.eigenvectors().col(6);
    CHECK(std::abs(std::abs(top.dot(expect)) - 1.0) < 1e-5);
}

TEST_CASE("trace identity: diagonal-sum coupling caps the objective at M")
{
    const int n = 5;
    ConeProblem p;
    p.sense = Sense::Maximize;
    p.block_dims = {n, n};
    p.objective.terms.push_back({0, MatrixXcd::Identity(n, n)});
    for (int i = 0; i < n; ++i) {
        Constraint c;
        MatrixXcd e = MatrixXcd::Zero(n, n);
        e(i, i) = 1.0;
        c.lhs.terms.push_back({0, e});
        c.lhs.terms.push_back({1, e});
        c.rhs = 1.0;
        p.constraints.push_back(std::move(c));
    }
    const ConeSolution sol = solve(p, {1e-9, 200});
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective_value == doctest::Approx(5.0).epsilon(1e-8));
}

TEST_CASE("certificate check")
{
    std::mt19937_64 rng(43);
    const MatrixXcd c = random_hermitian(6, rng);
    const ConeProblem p = lambda_max_problem(c);
    ConeSolution sol = solve(p, {1e-9, 200});
    REQUIRE(sol.status == SolveStatus::Optimal);

    SUBCASE("optimal solutions pass")
    {
        const Residuals r = check_certificate(p, sol);
        CHECK(r.primal <= 1e-7);
        CHECK(r.dual <= 1e-7);
        CHECK(r.gap <= 1e-7);
    }

    SUBCASE("perturbation grows the primal residual proportionally")
    {
        const Residuals base = check_certificate(p, sol);
        ConeSolution bumped = sol;
        bumped.blocks[0](0, 0) += 1e-3;
        const Residuals r1 = check_certificate(p, bumped);
        CHECK(r1.primal >= base.primal + 1e-4); // trace constraint moved by 1e-3

        bumped.blocks[0](0, 0) += 9e-3;
        const Residuals r2 = check_certificate(p, bumped);
        CHECK(r2.primal > 5.0 * r1.primal);
    }

    SUBCASE("the zero matrix violates the equality constraint")
    {
        ConeSolution zero = sol;
        zero.blocks[0].setZero();
        const Residuals r = check_certificate(p, zero);
        CHECK(r.primal >= 0.4); // |tr - 1| / (1 + |b|)
    }
}

TEST_CASE("objective is invariant under unitary re-parameterization")
{
    std::mt19937_64 rng(47);
    const MatrixXcd c = random_hermitian(6, rng);
    const double v0 = solve(lambda_max_problem(c), {1e-9, 200}).objective_value;

    // conjugate the data by a random unitary (QR of a Gaussian matrix)
    std::normal_distribution<double> gauss;
    MatrixXcd g(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) g(i, j) = {gauss(rng), gauss(rng)};
    const MatrixXcd q = Eigen::HouseholderQR<MatrixXcd>(g).householderQ();
    const double v1 = solve(lambda_max_problem(q * c * q.adjoint()), {1e-9, 200}).objective_value;
    CHECK(v1 == doctest::Approx(v0).epsilon(1e-7));
}

TEST_CASE("inequalities and infeasibility")
{
    SUBCASE("upper bounded maximization hits the bound")
    {
        ConeProblem p;
        p.sense = Sense::Maximize;
        p.block_dims = {1};
        p.objective.terms.push_back({0, MatrixXcd::Ones(1, 1)});
        Constraint c;
        c.lhs.terms.push_back({0, MatrixXcd::Ones(1, 1)});
        c.rel = Relation::LessEqual;
        c.rhs = 5.0;
        p.constraints.push_back(std::move(c));
        const ConeSolution sol = solve(p, {1e-9, 100});
        CHECK(sol.status == SolveStatus::Optimal);
        CHECK(sol.objective_value == doctest::Approx(5.0).epsilon(1e-8));
    }

    SUBCASE("a negative equality on the cone is reported infeasible")
    {
        ConeProblem p;
        p.block_dims = {1};
        p.objective.terms.push_back({0, MatrixXcd::Ones(1, 1)});
        Constraint c;
        c.lhs.terms.push_back({0, MatrixXcd::Ones(1, 1)});
        c.rhs = -1.0;
        p.constraints.push_back(std::move(c));
        const ConeSolution sol = solve(p, {1e-9, 300});
        CHECK(sol.status == SolveStatus::Infeasible);
    }
}

TEST_CASE("hyperbolic 2x2 block models 1/C <= T")
{
    // minimize C subject to [[C, 1], [1, T]] >= 0 with T pinned to 4
    ConeProblem p;
    p.block_dims = {2};
    MatrixXcd c = MatrixXcd::Zero(2, 2);
    c(0, 0) = 1.0;
    p.objective.terms.push_back({0, c});
    Constraint offdiag;
    MatrixXcd e12 = MatrixXcd::Zero(2, 2);
    e12(0, 1) = e12(1, 0) = 0.5;
    offdiag.lhs.terms.push_back({0, e12});
    offdiag.rhs = 1.0;
    p.constraints.push_back(std::move(offdiag));
    Constraint pin;
    MatrixXcd e22 = MatrixXcd::Zero(2, 2);
    e22(1, 1) = 1.0;
    pin.lhs.terms.push_back({0, e22});
    pin.rhs = 4.0;
    p.constraints.push_back(std::move(pin));

    const ConeSolution sol = solve(p, {1e-9, 100});
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective_value == doctest::Approx(0.25).epsilon(1e-7));
}

TEST_CASE("problem dump is parseable and complete")
{
    std::mt19937_64 rng(53);
    const MatrixXcd c = random_hermitian(3, rng);
    const ConeProblem p = lambda_max_problem(c);
    const std::string text = problem_to_json_string(p);
    CHECK(text.find("\"block_dims\"") != std::string::npos);
    CHECK(text.find("\"maximize\"") != std::string::npos);
    CHECK(text.find("\"eq\"") != std::string::npos);
    // 3x3 complex coefficient -> 18 numbers in the flattened array
    CHECK(text.find("\"coeff\"") != std::string::npos);
}

TEST_CASE("input validation rejects malformed problems")
{
    ConeProblem p;
    p.block_dims = {3};
    MatrixXcd bad(3, 3);
    bad.setZero();
    bad(0, 1) = {1.0, 2.0}; // not Hermitian
    p.objective.terms.push_back({0, bad});
    CHECK_THROWS_AS(solve(p), std::invalid_argument);

    ConeProblem untouched;
    untouched.block_dims = {2, 2};
    untouched.objective.terms.push_back({0, MatrixXcd::Identity(2, 2)});
    CHECK_THROWS_AS(solve(untouched), std::invalid_argument);
}
