// SPDX-License-Identifier: Apache-2.0
//
// Lobe orientation and visibility of a first-order mode image.
//
// Pixel coordinates: column index is x, row index is y, both starting at 0.
// Angles run from +x towards +y, matching the field grid.

#pragma once

#include <limits>
#include <vector>

#include "oam/field.hpp"

namespace oam {

class EmptyImage : public Error {
public:
    using Error::Error;
};

struct PixelPoint {
    double x = 0.0;
    double y = 0.0;
};

struct LineScanCurve {
    std::vector<double> etas;  ///< k pi / n_samples, k = 0 .. n_samples-1
    std::vector<double> sums;
};

struct ImageReading {
    double alpha = 0.0;       ///< lobe axis in [0, pi)
    double visibility = 0.0;  ///< in [0, 1]
    double eta_min = 0.0;     ///< nodal line in [0, pi)
    PixelPoint com;
    bool low_visibility = false;
};

struct AnalysisOptions {
    int n_samples = 360;                   ///< line-scan angles over [0, pi), at least 90
    double low_visibility_threshold = 0.34;
    double floor_percentile = 1.0;         ///< subtracted background level; 0 keeps the image as is
    double ridge_exclusion = 0.5;          ///< pixels this close to the nodal line belong to neither side
    /// Analysis disk about the center of mass, in units of the brightest-ring radius.
    /// Weights taper to zero over one more ring radius beyond it. 0 uses the whole image.
    double aperture_rings = 1.5;
};

/// Throws EmptyImage when the image has no positive intensity.
PixelPoint center_of_mass(const IntensityImage& img);

/// Subtracts the given percentile of the pixel values and clips at zero.
IntensityImage subtract_floor(const IntensityImage& img, double percentile);

/// Sums of bilinear samples at half-pixel steps along chords through `com`.
/// All chords have the same length: twice the distance from `com` to the
/// nearest image border (or twice `max_radius` if smaller), so a flat
/// background adds the same amount at every angle.
LineScanCurve line_scan(const IntensityImage& img, const PixelPoint& com, int n_samples = 360,
                        double max_radius = std::numeric_limits<double>::infinity());

/// Angle of the smallest sum, refined by a parabola through the neighbouring samples.
double nodal_orientation(const LineScanCurve& curve);

/// (max - min) / (max + min) over the curve; 0 for an all-zero curve.
double visibility(const LineScanCurve& curve);

/// Background floor, aperture, center of mass, line scan, visibility only.
double image_visibility(const IntensityImage& img, const AnalysisOptions& opts = {});

/// Full analysis: nodal line, visibility and the lobe axis from the centers of
/// mass on either side of the nodal line.
ImageReading mode_orientation(const IntensityImage& img, const AnalysisOptions& opts = {});

}  // namespace oam
