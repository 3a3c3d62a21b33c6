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

#include <complex>
#include <cstddef>

namespace mestars::kernels {

enum class Backend { Scalar, Avx2 };

// Backend chosen at startup from CPU features; STARS_SIMD=scalar|avx2
// overrides. force_backend() switches at runtime (tests rely on this).
Backend active_backend();
void force_backend(Backend b);
const char* backend_name(Backend b);
bool cpu_supports_avx2();

// sum_m exp(j * phase[m])
std::complex<double> phasor_sum(const double* phase_rad, std::size_t n);

// sum_m exp(j * omega * r[m]); fused scale + sincos + accumulate
std::complex<double> phasor_sum_scaled(const double* r, std::size_t n, double omega);

// out[m] = exp(j * omega * r[m])
void unit_phasors(const double* r, std::size_t n, double omega, std::complex<double>* out);

// out[m] = sqrt((px - x[m])^2 + dy^2 + (pz - z[m])^2), dy the fixed
// offset normal to the element plane
void point_distances(const double* x, const double* z, std::size_t n,
                     double px, double dy, double pz, double* out);

namespace detail {

struct Ops {
    std::complex<double> (*phasor_sum)(const double*, std::size_t);
    std::complex<double> (*phasor_sum_scaled)(const double*, std::size_t, double);
    void (*unit_phasors)(const double*, std::size_t, double, std::complex<double>*);
    void (*point_distances)(const double*, const double*, std::size_t,
                            double, double, double, double*);
};

extern const Ops scalar_ops;
#if defined(MESTARS_HAVE_AVX2)
extern const Ops avx2_ops;
#endif

} // namespace detail

} // namespace mestars::kernels
