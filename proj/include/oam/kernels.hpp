// SPDX-License-Identifier: Apache-2.0
//
// Data-parallel inner loops of the simulator and the image analysis.
//
// Every kernel has a scalar reference implementation. An AVX2+FMA variant is
// compiled when the toolchain targets x86-64 and is picked at runtime when the
// CPU supports it. Setting OAM_KERNELS=scalar in the environment forces the
// reference path. Variants agree to rounding (different summation order).

#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

namespace oam::kernels {

using cdouble = std::complex<double>;

/// Zeroth and first intensity moments of an image.
struct Moments {
    double sum = 0.0;
    double sum_x = 0.0;  ///< sum of column index * I
    double sum_y = 0.0;  ///< sum of row index * I
};

/// Moments of the two half-planes on either side of a line.
struct SplitMoments {
    Moments positive;
    Moments negative;
};

/// Geometry of a half-plane split: signed distance s = nx (x - cx) + ny (y - cy);
/// pixels with s > exclusion go to `positive`, s < -exclusion to `negative`.
struct SplitLine {
    double cx = 0.0;
    double cy = 0.0;
    double nx = 0.0;
    double ny = 1.0;
    double exclusion = 0.5;
};

/// Straight chord of `count` bilinear samples starting at (x0, y0) with step (dx, dy).
/// Every sample must satisfy 0 <= x <= n-1 and 0 <= y <= n-1.
struct Chord {
    double x0 = 0.0;
    double y0 = 0.0;
    double dx = 0.0;
    double dy = 0.0;
    std::size_t count = 0;
};

struct KernelTable {
    std::string_view name;

    /// inout[i] *= factor[i]
    void (*complex_multiply)(cdouble* inout, const cdouble* factor, std::size_t len);

    /// out[i] = |in[i]|^2
    void (*squared_modulus)(const cdouble* in, double* out, std::size_t len);

    /// out[i] = |ca * a[i] + cb * b[i]|^2
    void (*superpose_intensity)(const cdouble* a, const cdouble* b, cdouble ca, cdouble cb,
                                double* out, std::size_t len);

    /// Moments of an n x n row-major image.
    Moments (*moments)(const double* img, std::size_t n);

    /// Half-plane moments of an n x n row-major image.
    SplitMoments (*split_moments)(const double* img, std::size_t n, const SplitLine& line);

    /// Sum of bilinearly interpolated samples along a chord of an n x n image.
    double (*chord_sum)(const double* img, std::size_t n, const Chord& chord);
};

const KernelTable& scalar_kernels();

/// AVX2+FMA table, or nullptr when not compiled in or unsupported by this CPU.
const KernelTable* avx2_kernels();

/// Table selected for this process (first call decides).
const KernelTable& active();

}  // namespace oam::kernels
