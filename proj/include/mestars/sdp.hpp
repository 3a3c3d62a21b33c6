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
#include <span>
#include <string>
#include <vector>

namespace mestars::sdp {

enum class Relation { LessEqual, Equal, GreaterEqual };
enum class Sense { Minimize, Maximize };
enum class SolveStatus { Optimal, Infeasible, MaxIterations };

const char* status_name(SolveStatus s);

/// One Hermitian coefficient matrix applied to one PSD variable block.
struct BlockTerm {
    int block = 0;
    Eigen::MatrixXcd coeff;
};

/// Real-valued linear functional sum_b Re tr(coeff_b^H X_b).
struct LinearFunctional {
    std::vector<BlockTerm> terms;
    double eval(std::span<const Eigen::MatrixXcd> blocks) const;
};

struct Constraint {
    LinearFunctional lhs;
    Relation rel = Relation::Equal;
    double rhs = 0.0;
};

/// Linear objective over Hermitian PSD blocks with affine scalar
/// constraints. Purely real blocks are solved natively; complex blocks go
/// through the symmetric real embedding.
struct ConeProblem {
    Sense sense = Sense::Minimize;
    std::vector<int> block_dims;
    LinearFunctional objective;
    std::vector<Constraint> constraints;

    void validate() const; // Hermitian coefficients, consistent dimensions
};

struct Residuals {
    double primal = 0.0; // scaled constraint violation
    double dual = 0.0;   // scaled stationarity violation
    double gap = 0.0;    // relative primal-dual objective gap
};

struct ConeSolution {
    SolveStatus status = SolveStatus::MaxIterations;
    double objective_value = 0.0;
    std::vector<Eigen::MatrixXcd> blocks;       // X_b, Hermitian PSD
    std::vector<double> dual_multipliers;       // y (minimization orientation)
    std::vector<Eigen::MatrixXcd> dual_blocks;  // Z_b, Hermitian PSD
    Residuals residuals;
    int iterations = 0;
};

struct SolverOptions {
    double tol = 1e-7;
    int max_iter = 500;
};

/// Primal-dual path-following interior point method (Nesterov-Todd
/// scaling, Mehrotra predictor-corrector). Designed for the small dense
/// problems this project emits: block dimensions up to ~64.
ConeSolution solve(const ConeProblem& problem, const SolverOptions& options = {});

/// Recomputes primal/dual/gap residuals of a solution from scratch.
Residuals check_certificate(const ConeProblem& problem, const ConeSolution& solution);

/// JSON dump of a problem (block dims, flattened interleaved re/im
/// coefficient arrays, relations, bounds) for offline cross-checking
/// against an external solver.
std::string problem_to_json_string(const ConeProblem& problem);

} // namespace mestars::sdp
