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

#include "mestars/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace mestars::kernels {

namespace {

std::atomic<const detail::Ops*> g_ops{nullptr};
std::atomic<Backend> g_backend{Backend::Scalar};

const detail::Ops* ops_for(Backend b)
{
#if defined(MESTARS_HAVE_AVX2)
    if (b == Backend::Avx2) return &detail::avx2_ops;
#endif
    return &detail::scalar_ops;
}

Backend detect_backend()
{
    if (const char* env = std::getenv("STARS_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
        if (std::strcmp(env, "avx2") == 0 && cpu_supports_avx2()) return Backend::Avx2;
    }
    return cpu_supports_avx2() ? Backend::Avx2 : Backend::Scalar;
}

const detail::Ops* current()
{
    const detail::Ops* o = g_ops.load(std::memory_order_acquire);
    if (!o) {
        const Backend b = detect_backend();
        g_backend.store(b, std::memory_order_relaxed);
        o = ops_for(b);
        g_ops.store(o, std::memory_order_release);
    }
    return o;
}

} // namespace

bool cpu_supports_avx2()
{
#if defined(MESTARS_HAVE_AVX2)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend active_backend()
{
    current();
    return g_backend.load(std::memory_order_relaxed);
}

void force_backend(Backend b)
{
    if (b == Backend::Avx2 && !cpu_supports_avx2()) b = Backend::Scalar;
    g_backend.store(b, std::memory_order_relaxed);
    g_ops.store(ops_for(b), std::memory_order_release);
}

const char* backend_name(Backend b)
{
    switch (b) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
    }
    return "unknown";
}

std::complex<double> phasor_sum(const double* phase_rad, std::size_t n)
{
    return current()->phasor_sum(phase_rad, n);
}

std::complex<double> phasor_sum_scaled(const double* r, std::size_t n, double omega)
{
    return current()->phasor_sum_scaled(r, n, omega);
}

void unit_phasors(const double* r, std::size_t n, double omega, std::complex<double>* out)
{
    current()->unit_phasors(r, n, omega, out);
}

void point_distances(const double* x, const double* z, std::size_t n,
                     double px, double dy, double pz, double* out)
{
    current()->point_distances(x, z, n, px, dy, pz, out);
}

} // namespace mestars::kernels
