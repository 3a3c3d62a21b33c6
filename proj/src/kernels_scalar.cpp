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

// Reference kernels. These are the semantics; the SIMD variants must agree
// with them within the tolerances pinned in the equivalence tests.

#include "mestars/kernels.hpp"

#include <cmath>

namespace mestars::kernels::detail {

namespace {

std::complex<double> phasor_sum_ref(const double* phase_rad, std::size_t n)
{
    double re = 0.0, im = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        re += std::cos(phase_rad[m]);
        im += std::sin(phase_rad[m]);
    }
    return {re, im};
}

std::complex<double> phasor_sum_scaled_ref(const double* r, std::size_t n, double omega)
{
    double re = 0.0, im = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        const double p = omega * r[m];
        re += std::cos(p);
        im += std::sin(p);
    }
    return {re, im};
}

void unit_phasors_ref(const double* r, std::size_t n, double omega, std::complex<double>* out)
{
    for (std::size_t m = 0; m < n; ++m) {
        const double p = omega * r[m];
        out[m] = {std::cos(p), std::sin(p)};
    }
}

void point_distances_ref(const double* x, const double* z, std::size_t n,
                         double px, double dy, double pz, double* out)
{
    const double dy2 = dy * dy;
    for (std::size_t m = 0; m < n; ++m) {
        const double dx = px - x[m];
        const double dz = pz - z[m];
        out[m] = std::sqrt(dx * dx + dy2 + dz * dz);
    }
}

} // namespace

const Ops scalar_ops = {
    &phasor_sum_ref,
    &phasor_sum_scaled_ref,
    &unit_phasors_ref,
    &point_distances_ref,
};

} // namespace mestars::kernels::detail
