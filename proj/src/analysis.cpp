// SPDX-License-Identifier: Apache-2.0

#include "oam/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "oam/kernels.hpp"

namespace oam {

namespace {

PixelPoint moments_center(const kernels::Moments& m)
{
    return {m.sum_x / m.sum, m.sum_y / m.sum};
}

double border_distance(const IntensityImage& img, const PixelPoint& c)
{
    const double last = img.n() - 1;
    return std::min({c.x, c.y, last - c.x, last - c.y});
}

// Radius (px) of the brightest ring of the azimuthally averaged profile about c.
double ring_radius(const IntensityImage& img, const PixelPoint& c)
{
    const int n = img.n();
    const auto bins = static_cast<std::size_t>(std::max(1.0, border_distance(img, c)));
    std::vector<double> sum(bins, 0.0);
    std::vector<int> count(bins, 0);
    const double* px = img.pixels().data();
    const double r2max = static_cast<double>(bins) * static_cast<double>(bins);
    for (int j = 0; j < n; ++j) {
        const double dy2 = (j - c.y) * (j - c.y);
        for (int i = 0; i < n; ++i) {
            const double r2 = (i - c.x) * (i - c.x) + dy2;
            if (r2 >= r2max) continue;
            const auto b = std::min(bins - 1, static_cast<std::size_t>(std::sqrt(r2)));
            sum[b] += px[static_cast<std::size_t>(j) * n + i];
            ++count[b];
        }
    }
    std::size_t best = 0;
    double best_mean = -1.0;
    for (std::size_t b = 0; b < bins; ++b)
        if (count[b] > 0 && sum[b] / count[b] > best_mean) {
            best_mean = sum[b] / count[b];
            best = b;
        }
    return static_cast<double>(best) + 0.5;
}

// Weight 1 inside `inner`, cosine taper to 0 over the next `taper` pixels.
IntensityImage apodize(const IntensityImage& img, const PixelPoint& c, double inner, double taper)
{
    const int n = img.n();
    std::vector<double> px = img.pixels();
    const double in2 = inner * inner, out2 = (inner + taper) * (inner + taper);
    for (int j = 0; j < n; ++j) {
        const double dy2 = (j - c.y) * (j - c.y);
        double* row = px.data() + static_cast<std::size_t>(j) * n;
        for (int i = 0; i < n; ++i) {
            const double r2 = (i - c.x) * (i - c.x) + dy2;
            if (r2 <= in2) continue;
            row[i] = r2 >= out2 ? 0.0 : row[i] * 0.5 * (1.0 + std::cos(kPi * (std::sqrt(r2) - inner) / taper));
        }
    }
    return IntensityImage(img.grid(), std::move(px));
}

struct Prepared {
    IntensityImage image;  ///< floor removed, zero outside the aperture
    PixelPoint com;
    double radius = 0.0;   ///< line-scan radius
};

Prepared prepare(const IntensityImage& img, const AnalysisOptions& opts)
{
    Prepared p{subtract_floor(img, opts.floor_percentile), {}, 0.0};
    p.com = center_of_mass(p.image);
    p.radius = std::numeric_limits<double>::infinity();
    if (opts.aperture_rings > 0.0) {
        const double ring = ring_radius(p.image, p.com);
        if (ring >= 2.0) {
            const IntensityImage base = p.image;
            const double inner = opts.aperture_rings * ring;
            p.radius = inner + ring;
            for (int it = 0; it < 3; ++it) {
                p.image = apodize(base, p.com, inner, ring);
                const PixelPoint prev = p.com;
                p.com = center_of_mass(p.image);
                if (std::hypot(p.com.x - prev.x, p.com.y - prev.y) < 1e-3) break;
            }
        }
    }
    return p;
}

}  // namespace

PixelPoint center_of_mass(const IntensityImage& img)
{
    const auto m = kernels::active().moments(img.pixels().data(), static_cast<std::size_t>(img.n()));
    if (!(m.sum > 0.0)) throw EmptyImage("image has no positive intensity");
    return moments_center(m);
}

IntensityImage subtract_floor(const IntensityImage& img, double percentile)
{
    if (!(percentile > 0.0)) return img;
    const std::vector<double>& src = img.pixels();
    if (src.empty()) return img;
    const auto rank = static_cast<std::size_t>(std::min(percentile, 100.0) / 100.0 * static_cast<double>(src.size() - 1));
    // the rank+1 smallest values, largest on top; most pixels are rejected by one comparison
    std::priority_queue<double> lowest;
    for (double p : src) {
        if (lowest.size() <= rank)
            lowest.push(p);
        else if (p < lowest.top()) {
            lowest.pop();
            lowest.push(p);
        }
    }
    const double floor = lowest.top();
    if (floor <= 0.0) return img;
    std::vector<double> px = src;
    for (double& p : px) p = std::max(0.0, p - floor);
    return IntensityImage(img.grid(), std::move(px));
}

LineScanCurve line_scan(const IntensityImage& img, const PixelPoint& com, int n_samples, double max_radius)
{
    const int n = img.n();
    if (n_samples < 1) throw Error("line scan needs at least one angle");
    const double last = n - 1;
    if (!(com.x >= 0.0 && com.y >= 0.0 && com.x <= last && com.y <= last))
        throw Error("line scan center lies outside the image");

    const double radius = std::min(border_distance(img, com), max_radius) * (1.0 - 1e-12);
    const auto half_steps = static_cast<std::size_t>(std::floor(2.0 * radius));

    LineScanCurve curve;
    curve.etas.resize(static_cast<std::size_t>(n_samples));
    curve.sums.resize(static_cast<std::size_t>(n_samples));
    const auto& k = kernels::active();
    for (int s = 0; s < n_samples; ++s) {
        const double eta = s * kPi / n_samples;
        const double dx = 0.5 * std::cos(eta), dy = 0.5 * std::sin(eta);
        kernels::Chord chord;
        chord.x0 = com.x - static_cast<double>(half_steps) * dx;
        chord.y0 = com.y - static_cast<double>(half_steps) * dy;
        chord.dx = dx;
        chord.dy = dy;
        chord.count = 2 * half_steps + 1;
        curve.etas[static_cast<std::size_t>(s)] = eta;
        curve.sums[static_cast<std::size_t>(s)] =
            std::max(0.0, k.chord_sum(img.pixels().data(), static_cast<std::size_t>(n), chord));
    }
    return curve;
}

double nodal_orientation(const LineScanCurve& curve)
{
    const auto& y = curve.sums;
    const std::size_t m = y.size();
    if (m == 0) throw Error("empty line-scan curve");
    const std::size_t k = static_cast<std::size_t>(std::min_element(y.begin(), y.end()) - y.begin());
    const double step = kPi / static_cast<double>(m);
    double offset = 0.0;
    if (m >= 3) {
        // the curve has period pi, so the neighbours of the ends wrap around
        const double y0 = y[(k + m - 1) % m], y1 = y[k], y2 = y[(k + 1) % m];
        const double den = y0 - 2.0 * y1 + y2;
        if (den > 0.0) offset = std::clamp(0.5 * (y0 - y2) / den, -0.5, 0.5);
    }
    return std::fmod(wrap_pi(curve.etas[k] + offset * step) + kPi, kPi);
}

double visibility(const LineScanCurve& curve)
{
    if (curve.sums.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(curve.sums.begin(), curve.sums.end());
    const double den = *hi + *lo;
    return den > 0.0 ? std::clamp((*hi - *lo) / den, 0.0, 1.0) : 0.0;
}

double image_visibility(const IntensityImage& img, const AnalysisOptions& opts)
{
    const Prepared p = prepare(img, opts);
    return visibility(line_scan(p.image, p.com, opts.n_samples, p.radius));
}

ImageReading mode_orientation(const IntensityImage& img, const AnalysisOptions& opts)
{
    const Prepared p = prepare(img, opts);
    const IntensityImage& clean = p.image;
    ImageReading r;
    r.com = p.com;
    const LineScanCurve curve = line_scan(clean, r.com, opts.n_samples, p.radius);
    r.visibility = visibility(curve);
    r.eta_min = nodal_orientation(curve);
    r.low_visibility = r.visibility < opts.low_visibility_threshold;

    kernels::SplitLine line;
    line.cx = r.com.x;
    line.cy = r.com.y;
    line.nx = -std::sin(r.eta_min);
    line.ny = std::cos(r.eta_min);
    line.exclusion = opts.ridge_exclusion;
    const auto split =
        kernels::active().split_moments(clean.pixels().data(), static_cast<std::size_t>(clean.n()), line);

    double axis = r.eta_min + 0.5 * kPi;
    if (split.positive.sum > 0.0 && split.negative.sum > 0.0) {
        const PixelPoint a = moments_center(split.positive);
        const PixelPoint b = moments_center(split.negative);
        if (a.x != b.x || a.y != b.y) axis = std::atan2(a.y - b.y, a.x - b.x);
    }
    r.alpha = std::fmod(std::fmod(axis, kPi) + kPi, kPi);
    return r;
}

}  // namespace oam
