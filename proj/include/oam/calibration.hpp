// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "oam/analysis.hpp"

namespace oam {

class CalibrationFailed : public Error {
public:
    using Error::Error;
};

struct CalibrationOptions {
    double span = 0.02;          ///< plane offsets scanned over [-span, +span] [m]
    double step = 1e-3;          ///< [m]
    double min_visibility = 0.9;
    AnalysisOptions analysis;
};

struct CalibrationRecord {
    double plane_offset = 0.0;  ///< camera plane = focal + plane_offset
    double visibility = 0.0;    ///< LG+ conversion visibility at that plane
    double alpha = 0.0;         ///< lobe axis of the converted LG+ (45 deg for MC(0))
    std::vector<double> offsets;
    std::vector<double> visibilities;
};

/// Sends LG+ through the simulated converter at beta = 0 and finds the camera
/// plane of best HG conversion. The visibility curve is flat near its top, so
/// the chosen offset is the vertex of a least-squares parabola through the
/// upper half of the scan (or the raw maximum when that fit is not concave).
/// Throws CalibrationFailed when the best visibility stays below min_visibility.
CalibrationRecord calibrate_tilt(const TiltedLensSimulator& sim, const CalibrationOptions& opts = {});

}  // namespace oam
