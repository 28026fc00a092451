// SPDX-License-Identifier: Apache-2.0

#include "oam/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace oam {

namespace {

double det3(const std::array<std::array<double, 3>, 3>& m)
{
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// Least-squares y = a x^2 + b x + c; returns (a, b).
std::pair<double, double> fit_parabola(const std::vector<double>& x, const std::vector<double>& y)
{
    std::array<double, 5> sx{};
    std::array<double, 3> sy{};
    for (std::size_t i = 0; i < x.size(); ++i) {
        double p = 1.0;
        for (int k = 0; k < 5; ++k) {
            if (k < 3) sy[static_cast<std::size_t>(k)] += p * y[i];
            sx[static_cast<std::size_t>(k)] += p;
            p *= x[i];
        }
    }
    const std::array<std::array<double, 3>, 3> m{{{sx[4], sx[3], sx[2]}, {sx[3], sx[2], sx[1]}, {sx[2], sx[1], sx[0]}}};
    const std::array<double, 3> r{sy[2], sy[1], sy[0]};
    const double d = det3(m);
    if (std::abs(d) < 1e-300) return {0.0, 0.0};
    auto replaced = [&](std::size_t col) {
        auto c = m;
        for (std::size_t row = 0; row < 3; ++row) c[row][col] = r[row];
        return det3(c) / d;
    };
    return {replaced(0), replaced(1)};
}

}  // namespace

CalibrationRecord calibrate_tilt(const TiltedLensSimulator& sim, const CalibrationOptions& opts)
{
    if (!(opts.step > 0.0) || !(opts.span >= 0.0)) throw Error("calibration scan needs a positive step");
    const StateVector2 lg_plus{};
    const auto half = static_cast<long>(std::floor(opts.span / opts.step + 1e-9));

    CalibrationRecord rec;
    for (long k = -half; k <= half; ++k) {
        const double z = static_cast<double>(k) * opts.step;
        rec.offsets.push_back(z);
        rec.visibilities.push_back(image_visibility(sim.measure(lg_plus, 0.0, z), opts.analysis));
    }

    const auto best = static_cast<std::size_t>(
        std::max_element(rec.visibilities.begin(), rec.visibilities.end()) - rec.visibilities.begin());
    double offset = rec.offsets[best];

    if (rec.offsets.size() >= 5) {
        std::vector<double> sorted = rec.visibilities;
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
        const double median = sorted[sorted.size() / 2];
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < rec.offsets.size(); ++i) {
            if (rec.visibilities[i] >= median) {
                xs.push_back(rec.offsets[i]);
                ys.push_back(rec.visibilities[i]);
            }
        }
        if (xs.size() >= 3) {
            const auto [a, b] = fit_parabola(xs, ys);
            const double vertex = a < 0.0 ? -b / (2.0 * a) : offset;
            if (vertex >= rec.offsets.front() && vertex <= rec.offsets.back()) offset = vertex;
        }
    }

    const ImageReading r = mode_orientation(sim.measure(lg_plus, 0.0, offset), opts.analysis);
    rec.plane_offset = offset;
    rec.visibility = r.visibility;
    rec.alpha = r.alpha;
    if (rec.visibility < opts.min_visibility)
        throw CalibrationFailed("best LG+ conversion visibility " + std::to_string(rec.visibility) + " is below " +
                                std::to_string(opts.min_visibility));
    return rec;
}

}  // namespace oam
