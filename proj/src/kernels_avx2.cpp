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

#if defined(MESTARS_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

namespace mestars::kernels::detail {

namespace {

// Extended-precision split of pi/4 (Cody-Waite). Reduction is exact while
// the quadrant count stays below ~2^30, i.e. |x| <~ 1e9 rad.
constexpr double kDp1 = 7.85398125648498535156e-1;
constexpr double kDp2 = 3.77489470793079817668e-8;
constexpr double kDp3 = 2.69515142907905952645e-15;
constexpr double kFourOverPi = 1.27323954473516268615;

// Minimax polynomials on [-pi/4, pi/4]
constexpr double kSinCof[6] = {
    1.58962301576546568060e-10, -2.50507477628578072866e-8,
    2.75573136213857245213e-6,  -1.98412698295895385996e-4,
    8.33333333332211858878e-3,  -1.66666666666666307295e-1,
};
constexpr double kCosCof[6] = {
    -1.13585365213876817300e-11, 2.08757008419747316778e-9,
    -2.75573141792967388112e-7,  2.48015872888517179954e-5,
    -1.38888888888730564116e-3,  4.16666666666665929218e-2,
};

inline __m256d polevl6(__m256d zz, const double c[6])
{
    __m256d p = _mm256_set1_pd(c[0]);
    p = _mm256_fmadd_pd(p, zz, _mm256_set1_pd(c[1]));
    p = _mm256_fmadd_pd(p, zz, _mm256_set1_pd(c[2]));
    p = _mm256_fmadd_pd(p, zz, _mm256_set1_pd(c[3]));
    p = _mm256_fmadd_pd(p, zz, _mm256_set1_pd(c[4]));
    p = _mm256_fmadd_pd(p, zz, _mm256_set1_pd(c[5]));
    return p;
}

// 4-lane sin and cos via octant reduction:
//   x = y*(pi/4) + z with y even, q = (y/2) mod 4
//   sin(x) = [sin z, cos z, -sin z, -cos z][q],  cos shifted by one quadrant
inline void sincos4(__m256d x, __m256d* s_out, __m256d* c_out)
{
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    const __m256d x_sign = _mm256_and_pd(x, sign_mask);
    const __m256d ax = _mm256_andnot_pd(sign_mask, x);

    __m256d y = _mm256_floor_pd(_mm256_mul_pd(ax, _mm256_set1_pd(kFourOverPi)));
    // force y even: y += (y/2 - floor(y/2)) * 2
    const __m256d half = _mm256_mul_pd(y, _mm256_set1_pd(0.5));
    const __m256d frac = _mm256_sub_pd(half, _mm256_floor_pd(half));
    y = _mm256_add_pd(y, _mm256_add_pd(frac, frac));

    __m256d z = _mm256_fnmadd_pd(y, _mm256_set1_pd(kDp1), ax);
    z = _mm256_fnmadd_pd(y, _mm256_set1_pd(kDp2), z);
    z = _mm256_fnmadd_pd(y, _mm256_set1_pd(kDp3), z);

    // q = (y/2) mod 4, exact small integers
    const __m256d h = _mm256_mul_pd(y, _mm256_set1_pd(0.5));
    const __m256d q = _mm256_sub_pd(
        h, _mm256_mul_pd(_mm256_floor_pd(_mm256_mul_pd(h, _mm256_set1_pd(0.25))),
                         _mm256_set1_pd(4.0)));

    const __m256d zz = _mm256_mul_pd(z, z);
    const __m256d ps =
        _mm256_fmadd_pd(_mm256_mul_pd(z, zz), polevl6(zz, kSinCof), z);
    __m256d pc = _mm256_fnmadd_pd(zz, _mm256_set1_pd(0.5), _mm256_set1_pd(1.0));
    pc = _mm256_fmadd_pd(_mm256_mul_pd(zz, zz), polevl6(zz, kCosCof), pc);

    const __m256d q1 = _mm256_cmp_pd(q, _mm256_set1_pd(1.0), _CMP_EQ_OQ);
    const __m256d q2 = _mm256_cmp_pd(q, _mm256_set1_pd(2.0), _CMP_EQ_OQ);
    const __m256d q3 = _mm256_cmp_pd(q, _mm256_set1_pd(3.0), _CMP_EQ_OQ);
    const __m256d swap = _mm256_or_pd(q1, q3);

    __m256d s = _mm256_blendv_pd(ps, pc, swap);
    __m256d c = _mm256_blendv_pd(pc, ps, swap);

    const __m256d s_neg = _mm256_and_pd(_mm256_or_pd(q2, q3), sign_mask);
    const __m256d c_neg = _mm256_and_pd(_mm256_or_pd(q1, q2), sign_mask);
    s = _mm256_xor_pd(s, s_neg);
    c = _mm256_xor_pd(c, c_neg);

    // sin is odd, cos is even
    *s_out = _mm256_xor_pd(s, x_sign);
    *c_out = c;
}

inline double hsum(__m256d v)
{
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

std::complex<double> phasor_sum_avx2(const double* phase_rad, std::size_t n)
{
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    std::size_t m = 0;
    for (; m + 4 <= n; m += 4) {
        __m256d s, c;
        sincos4(_mm256_loadu_pd(phase_rad + m), &s, &c);
        acc_re = _mm256_add_pd(acc_re, c);
        acc_im = _mm256_add_pd(acc_im, s);
    }
    double re = hsum(acc_re), im = hsum(acc_im);
    for (; m < n; ++m) {
        re += std::cos(phase_rad[m]);
        im += std::sin(phase_rad[m]);
    }
    return {re, im};
}

std::complex<double> phasor_sum_scaled_avx2(const double* r, std::size_t n, double omega)
{
    const __m256d w = _mm256_set1_pd(omega);
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    std::size_t m = 0;
    for (; m + 4 <= n; m += 4) {
        __m256d s, c;
        sincos4(_mm256_mul_pd(w, _mm256_loadu_pd(r + m)), &s, &c);
        acc_re = _mm256_add_pd(acc_re, c);
        acc_im = _mm256_add_pd(acc_im, s);
    }
    double re = hsum(acc_re), im = hsum(acc_im);
    for (; m < n; ++m) {
        const double p = omega * r[m];
        re += std::cos(p);
        im += std::sin(p);
    }
    return {re, im};
}

void unit_phasors_avx2(const double* r, std::size_t n, double omega, std::complex<double>* out)
{
    const __m256d w = _mm256_set1_pd(omega);
    double* o = reinterpret_cast<double*>(out);
    std::size_t m = 0;
    for (; m + 4 <= n; m += 4) {
        __m256d s, c;
        sincos4(_mm256_mul_pd(w, _mm256_loadu_pd(r + m)), &s, &c);
        const __m256d lo = _mm256_unpacklo_pd(c, s); // c0 s0 c2 s2
        const __m256d hi = _mm256_unpackhi_pd(c, s); // c1 s1 c3 s3
        _mm256_storeu_pd(o + 2 * m, _mm256_permute2f128_pd(lo, hi, 0x20));
        _mm256_storeu_pd(o + 2 * m + 4, _mm256_permute2f128_pd(lo, hi, 0x31));
    }
    for (; m < n; ++m) {
        const double p = omega * r[m];
        out[m] = {std::cos(p), std::sin(p)};
    }
}

void point_distances_avx2(const double* x, const double* z, std::size_t n,
                          double px, double dy, double pz, double* out)
{
    const __m256d vpx = _mm256_set1_pd(px);
    const __m256d vpz = _mm256_set1_pd(pz);
    const __m256d vdy2 = _mm256_set1_pd(dy * dy);
    std::size_t m = 0;
    for (; m + 4 <= n; m += 4) {
        const __m256d dx = _mm256_sub_pd(vpx, _mm256_loadu_pd(x + m));
        const __m256d dz = _mm256_sub_pd(vpz, _mm256_loadu_pd(z + m));
        __m256d acc = _mm256_fmadd_pd(dx, dx, vdy2);
        acc = _mm256_fmadd_pd(dz, dz, acc);
        _mm256_storeu_pd(out + m, _mm256_sqrt_pd(acc));
    }
    const double dy2 = dy * dy;
    for (; m < n; ++m) {
        const double dx = px - x[m];
        const double dz = pz - z[m];
        out[m] = std::sqrt(dx * dx + dy2 + dz * dz);
    }
}

} // namespace

const Ops avx2_ops = {
    &phasor_sum_avx2,
    &phasor_sum_scaled_avx2,
    &unit_phasors_avx2,
    &point_distances_avx2,
};

} // namespace mestars::kernels::detail

#endif // MESTARS_HAVE_AVX2
