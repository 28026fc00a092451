// SPDX-License-Identifier: Apache-2.0
//
// Reference kernels. Plain loops, no intrinsics; these define the results the
// vectorized variants are tested against.

#include <algorithm>
#include <cmath>

#include "oam/kernels.hpp"

namespace oam::kernels {

namespace {

void complex_multiply_scalar(cdouble* inout, const cdouble* factor, std::size_t len)
{
    for (std::size_t i = 0; i < len; ++i) {
        const double ar = inout[i].real(), ai = inout[i].imag();
        const double br = factor[i].real(), bi = factor[i].imag();
        inout[i] = {ar * br - ai * bi, ar * bi + ai * br};
    }
}

void squared_modulus_scalar(const cdouble* in, double* out, std::size_t len)
{
    for (std::size_t i = 0; i < len; ++i) out[i] = in[i].real() * in[i].real() + in[i].imag() * in[i].imag();
}

void superpose_intensity_scalar(const cdouble* a, const cdouble* b, cdouble ca, cdouble cb, double* out,
                                std::size_t len)
{
    for (std::size_t i = 0; i < len; ++i) {
        const double re = ca.real() * a[i].real() - ca.imag() * a[i].imag() + cb.real() * b[i].real() -
                          cb.imag() * b[i].imag();
        const double im = ca.real() * a[i].imag() + ca.imag() * a[i].real() + cb.real() * b[i].imag() +
                          cb.imag() * b[i].real();
        out[i] = re * re + im * im;
    }
}

Moments moments_scalar(const double* img, std::size_t n)
{
    Moments m;
    for (std::size_t j = 0; j < n; ++j) {
        const double* row = img + j * n;
        double rs = 0.0, rx = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            rs += row[i];
            rx += static_cast<double>(i) * row[i];
        }
        m.sum += rs;
        m.sum_x += rx;
        m.sum_y += static_cast<double>(j) * rs;
    }
    return m;
}

SplitMoments split_moments_scalar(const double* img, std::size_t n, const SplitLine& line)
{
    SplitMoments out;
    for (std::size_t j = 0; j < n; ++j) {
        const double* row = img + j * n;
        const double yterm = line.ny * (static_cast<double>(j) - line.cy);
        for (std::size_t i = 0; i < n; ++i) {
            const double s = line.nx * (static_cast<double>(i) - line.cx) + yterm;
            Moments* side = nullptr;
            if (s > line.exclusion)
                side = &out.positive;
            else if (s < -line.exclusion)
                side = &out.negative;
            if (side == nullptr) continue;
            side->sum += row[i];
            side->sum_x += static_cast<double>(i) * row[i];
            side->sum_y += static_cast<double>(j) * row[i];
        }
    }
    return out;
}

double chord_sum_scalar(const double* img, std::size_t n, const Chord& c)
{
    const double last = static_cast<double>(n - 1);
    double acc = 0.0;
    for (std::size_t k = 0; k < c.count; ++k) {
        const double x = c.x0 + static_cast<double>(k) * c.dx;
        const double y = c.y0 + static_cast<double>(k) * c.dy;
        // the far edge keeps a valid (i0, i0+1) pair with weight 1 on i0+1
        const double fx = std::floor(std::min(x, last - 1.0));
        const double fy = std::floor(std::min(y, last - 1.0));
        const double ax = x - fx, ay = y - fy;
        const std::size_t i0 = static_cast<std::size_t>(fx);
        const std::size_t j0 = static_cast<std::size_t>(fy);
        const double* r0 = img + j0 * n + i0;
        const double* r1 = r0 + n;
        const double top = r0[0] + ax * (r0[1] - r0[0]);
        const double bottom = r1[0] + ax * (r1[1] - r1[0]);
        acc += top + ay * (bottom - top);
    }
    return acc;
}

}  // namespace

const KernelTable& scalar_kernels()
{
    static const KernelTable table{
        "scalar",
        complex_multiply_scalar,
        squared_modulus_scalar,
        superpose_intensity_scalar,
        moments_scalar,
        split_moments_scalar,
        chord_sum_scalar,
    };
    return table;
}

}  // namespace oam::kernels
