// SPDX-License-Identifier: Apache-2.0
//
// AVX2 + FMA kernels. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after a CPUID check (see dispatch.cpp).

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "oam/kernels.hpp"

namespace oam::kernels {

namespace {

inline double hsum(__m256d v)
{
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Two interleaved complex numbers per register: (re0, im0, re1, im1).
inline __m256d cmul(__m256d a, __m256d b)
{
    const __m256d b_re = _mm256_movedup_pd(b);
    const __m256d b_im = _mm256_permute_pd(b, 0xF);
    const __m256d a_swap = _mm256_permute_pd(a, 0x5);
    return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_swap, b_im));
}

// |c|^2 of four complex numbers held in two registers, in order.
inline __m256d norm4(__m256d c01, __m256d c23)
{
    const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(c01, c01), _mm256_mul_pd(c23, c23));
    return _mm256_permute4x64_pd(h, _MM_SHUFFLE(3, 1, 2, 0));
}

void complex_multiply_avx2(cdouble* inout, const cdouble* factor, std::size_t len)
{
    auto* p = reinterpret_cast<double*>(inout);
    const auto* q = reinterpret_cast<const double*>(factor);
    std::size_t i = 0;
    for (; i + 2 <= len; i += 2) {
        const __m256d a = _mm256_loadu_pd(p + 2 * i);
        const __m256d b = _mm256_loadu_pd(q + 2 * i);
        _mm256_storeu_pd(p + 2 * i, cmul(a, b));
    }
    if (i < len) scalar_kernels().complex_multiply(inout + i, factor + i, len - i);
}

void squared_modulus_avx2(const cdouble* in, double* out, std::size_t len)
{
    const auto* p = reinterpret_cast<const double*>(in);
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        const __m256d c01 = _mm256_loadu_pd(p + 2 * i);
        const __m256d c23 = _mm256_loadu_pd(p + 2 * i + 4);
        _mm256_storeu_pd(out + i, norm4(c01, c23));
    }
    if (i < len) scalar_kernels().squared_modulus(in + i, out + i, len - i);
}

void superpose_intensity_avx2(const cdouble* a, const cdouble* b, cdouble ca, cdouble cb, double* out,
                              std::size_t len)
{
    const auto* pa = reinterpret_cast<const double*>(a);
    const auto* pb = reinterpret_cast<const double*>(b);
    const __m256d va = _mm256_setr_pd(ca.real(), ca.imag(), ca.real(), ca.imag());
    const __m256d vb = _mm256_setr_pd(cb.real(), cb.imag(), cb.real(), cb.imag());
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        const __m256d f01 = _mm256_add_pd(cmul(_mm256_loadu_pd(pa + 2 * i), va),
                                          cmul(_mm256_loadu_pd(pb + 2 * i), vb));
        const __m256d f23 = _mm256_add_pd(cmul(_mm256_loadu_pd(pa + 2 * i + 4), va),
                                          cmul(_mm256_loadu_pd(pb + 2 * i + 4), vb));
        _mm256_storeu_pd(out + i, norm4(f01, f23));
    }
    if (i < len) scalar_kernels().superpose_intensity(a + i, b + i, ca, cb, out + i, len - i);
}

Moments moments_avx2(const double* img, std::size_t n)
{
    Moments m;
    const __m256d step = _mm256_set1_pd(4.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double* row = img + j * n;
        __m256d vs = _mm256_setzero_pd();
        __m256d vx = _mm256_setzero_pd();
        __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
        std::size_t i = 0;
        for (; i + 4 <= n; i += 4) {
            const __m256d v = _mm256_loadu_pd(row + i);
            vs = _mm256_add_pd(vs, v);
            vx = _mm256_fmadd_pd(idx, v, vx);
            idx = _mm256_add_pd(idx, step);
        }
        double rs = hsum(vs), rx = hsum(vx);
        for (; i < n; ++i) {
            rs += row[i];
            rx += static_cast<double>(i) * row[i];
        }
        m.sum += rs;
        m.sum_x += rx;
        m.sum_y += static_cast<double>(j) * rs;
    }
    return m;
}

SplitMoments split_moments_avx2(const double* img, std::size_t n, const SplitLine& line)
{
    const __m256d nx = _mm256_set1_pd(line.nx);
    const __m256d cx = _mm256_set1_pd(line.cx);
    const __m256d ex_pos = _mm256_set1_pd(line.exclusion);
    const __m256d ex_neg = _mm256_set1_pd(-line.exclusion);
    const __m256d step = _mm256_set1_pd(4.0);

    SplitMoments out;
    for (std::size_t j = 0; j < n; ++j) {
        const double* row = img + j * n;
        const double yj = static_cast<double>(j);
        const double yterm = line.ny * (yj - line.cy);
        const __m256d vy = _mm256_set1_pd(yterm);
        __m256d ps = _mm256_setzero_pd(), px = _mm256_setzero_pd();
        __m256d ns = _mm256_setzero_pd(), nxs = _mm256_setzero_pd();
        __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
        std::size_t i = 0;
        for (; i + 4 <= n; i += 4) {
            const __m256d v = _mm256_loadu_pd(row + i);
            const __m256d s = _mm256_add_pd(_mm256_mul_pd(nx, _mm256_sub_pd(idx, cx)), vy);
            const __m256d vp = _mm256_and_pd(_mm256_cmp_pd(s, ex_pos, _CMP_GT_OQ), v);
            const __m256d vn = _mm256_and_pd(_mm256_cmp_pd(s, ex_neg, _CMP_LT_OQ), v);
            ps = _mm256_add_pd(ps, vp);
            px = _mm256_fmadd_pd(idx, vp, px);
            ns = _mm256_add_pd(ns, vn);
            nxs = _mm256_fmadd_pd(idx, vn, nxs);
            idx = _mm256_add_pd(idx, step);
        }
        double rps = hsum(ps), rpx = hsum(px), rns = hsum(ns), rnx = hsum(nxs);
        for (; i < n; ++i) {
            const double xi = static_cast<double>(i);
            const double s = line.nx * (xi - line.cx) + yterm;
            if (s > line.exclusion) {
                rps += row[i];
                rpx += xi * row[i];
            } else if (s < -line.exclusion) {
                rns += row[i];
                rnx += xi * row[i];
            }
        }
        out.positive.sum += rps;
        out.positive.sum_x += rpx;
        out.positive.sum_y += yj * rps;
        out.negative.sum += rns;
        out.negative.sum_x += rnx;
        out.negative.sum_y += yj * rns;
    }
    return out;
}

double chord_sum_avx2(const double* img, std::size_t n, const Chord& c)
{
    const double last = static_cast<double>(n - 1);
    const __m256d x0 = _mm256_set1_pd(c.x0), y0 = _mm256_set1_pd(c.y0);
    const __m256d dx = _mm256_set1_pd(c.dx), dy = _mm256_set1_pd(c.dy);
    const __m256d edge = _mm256_set1_pd(last - 1.0);
    const __m256d step = _mm256_set1_pd(4.0);
    const __m128i stride = _mm_set1_epi32(static_cast<int>(n));
    const double* img_right = img + 1;
    const double* img_down = img + n;
    const double* img_diag = img + n + 1;

    __m256d acc = _mm256_setzero_pd();
    __m256d k = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
    std::size_t s = 0;
    for (; s + 4 <= c.count; s += 4) {
        const __m256d x = _mm256_add_pd(x0, _mm256_mul_pd(k, dx));
        const __m256d y = _mm256_add_pd(y0, _mm256_mul_pd(k, dy));
        const __m256d fx = _mm256_floor_pd(_mm256_min_pd(x, edge));
        const __m256d fy = _mm256_floor_pd(_mm256_min_pd(y, edge));
        const __m256d ax = _mm256_sub_pd(x, fx);
        const __m256d ay = _mm256_sub_pd(y, fy);
        const __m128i ix = _mm256_cvtpd_epi32(fx);
        const __m128i iy = _mm256_cvtpd_epi32(fy);
        const __m128i idx = _mm_add_epi32(_mm_mullo_epi32(iy, stride), ix);
        const __m256d v00 = _mm256_i32gather_pd(img, idx, 8);
        const __m256d v01 = _mm256_i32gather_pd(img_right, idx, 8);
        const __m256d v10 = _mm256_i32gather_pd(img_down, idx, 8);
        const __m256d v11 = _mm256_i32gather_pd(img_diag, idx, 8);
        const __m256d top = _mm256_fmadd_pd(ax, _mm256_sub_pd(v01, v00), v00);
        const __m256d bottom = _mm256_fmadd_pd(ax, _mm256_sub_pd(v11, v10), v10);
        acc = _mm256_add_pd(acc, _mm256_fmadd_pd(ay, _mm256_sub_pd(bottom, top), top));
        k = _mm256_add_pd(k, step);
    }
    double total = hsum(acc);
    if (s < c.count) {
        Chord tail = c;
        tail.x0 = c.x0 + static_cast<double>(s) * c.dx;
        tail.y0 = c.y0 + static_cast<double>(s) * c.dy;
        tail.count = c.count - s;
        total += scalar_kernels().chord_sum(img, n, tail);
    }
    return total;
}

}  // namespace

const KernelTable& avx2_table()
{
    static const KernelTable table{
        "avx2",
        complex_multiply_avx2,
        squared_modulus_avx2,
        superpose_intensity_avx2,
        moments_avx2,
        split_moments_avx2,
        chord_sum_avx2,
    };
    return table;
}

}  // namespace oam::kernels
