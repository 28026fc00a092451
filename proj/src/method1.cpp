// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "oam/tomography.hpp"

namespace oam {

std::vector<double> beta_grid(double step)
{
    if (!(step > 0.0) || step > kPi) throw Error("converter angle step must lie in (0, 180] degrees");
    const auto count = static_cast<std::size_t>(std::llround(kTwoPi / step));
    if (std::abs(static_cast<double>(count) * step - kTwoPi) > 1e-9)
        throw Error("converter angle step must divide 360 degrees");
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = static_cast<double>(k) * step;
    return out;
}

namespace {

double uniform_step(const std::vector<double>& betas)
{
    if (betas.size() < 3) throw Error("converter scan needs at least three angles");
    const double step = betas[1] - betas[0];
    for (std::size_t k = 1; k < betas.size(); ++k)
        if (std::abs(betas[k] - betas[k - 1] - step) > 1e-9) throw Error("converter scan must be uniformly spaced");
    if (step > deg2rad(2.0) + 1e-12) throw Error("converter scan step must not exceed 2 degrees");
    if (std::abs(betas.back() + step - betas.front() - kTwoPi) > 1e-9)
        throw Error("converter scan must cover one full turn");
    return step;
}

}  // namespace

Method1Result method1_scan(const MeasurementSource& source, const std::vector<double>& betas,
                           const Method1Options& opts)
{
    const double step = uniform_step(betas);
    Method1Result out;
    out.betas = betas;
    out.visibilities.reserve(betas.size());
    AnalysisOptions scan = opts.analysis;
    scan.n_samples = opts.scan_samples;
    for (double b : betas)
        out.visibilities.push_back(image_visibility(source.image(MeasurementKind::converter(b)), scan));

    const auto& v = out.visibilities;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    out.peak_visibility = *hi;

    if (*hi - *lo < opts.flat_spread) {
        const double direct_v = image_visibility(source.image(MeasurementKind::direct()), opts.analysis);
        if (direct_v < opts.pole_gate) {
            // MC(0) sends LG+ to the HG at 45 deg and LG- to the HG at 135 deg
            const ImageReading w = mode_orientation(source.image(MeasurementKind::converter(0.0)), opts.analysis);
            const bool north = std::abs(orientation_difference(w.alpha, deg2rad(45.0))) <=
                               std::abs(orientation_difference(w.alpha, deg2rad(135.0)));
            out.pole = true;
            out.witness_alpha = w.alpha;
            out.reading = {0.0, w.alpha};
            out.state = PoincareState::from_radians(north ? 0.0 : kPi, 0.0);
            return out;
        }
    }

    const std::size_t m = v.size();
    const std::size_t k = static_cast<std::size_t>(hi - v.begin());
    double beta_mc = betas[k];
    if (source.continuous()) {
        const double y0 = v[(k + m - 1) % m], y1 = v[k], y2 = v[(k + 1) % m];
        const double den = y0 - 2.0 * y1 + y2;
        if (den < 0.0) beta_mc += std::clamp(0.5 * (y0 - y2) / den, -0.5, 0.5) * step;
    }
    beta_mc = wrap_2pi(beta_mc);

    const ImageReading r = mode_orientation(source.image(MeasurementKind::converter(beta_mc)), opts.analysis);
    out.reading = {beta_mc, r.alpha};
    out.state = method1_invert(out.reading);
    return out;
}

std::optional<Method1ErrorBars> method1_error_bars(const PoincareState& target, const std::vector<Method1Result>& runs)
{
    if (target.degenerate_phi()) return std::nullopt;
    const double theta = target.theta(), phi = target.phi();
    double sb = 0.0, sa = 0.0, st = 0.0, sp = 0.0;
    int n = 0;
    for (const Method1Result& r : runs) {
        if (r.pole) continue;
        // alpha at beta = phi is (phi - theta)/2 + 45 deg; at beta = phi + pi it is (phi + theta)/2 - 45 deg
        const bool flipped = std::abs(angle_difference(r.reading.beta_mc, phi)) > 0.5 * kPi;
        const double beta0 = flipped ? phi + kPi : phi;
        const double alpha0 = flipped ? 0.5 * (phi + theta) - 0.25 * kPi : 0.5 * (phi - theta) + 0.25 * kPi;
        sb += std::pow(angle_difference(r.reading.beta_mc, beta0), 2);
        sa += std::pow(orientation_difference(r.reading.alpha_hg, alpha0), 2);
        st += std::pow(r.state.theta() - theta, 2);
        sp += std::pow(angle_difference(r.state.phi(), phi), 2);
        ++n;
    }
    if (n == 0) return std::nullopt;
    Method1ErrorBars e;
    e.runs = n;
    e.d_beta = std::sqrt(sb / n);
    e.d_alpha = std::sqrt(sa / n);
    e.d_theta = std::hypot(e.d_beta, 2.0 * e.d_alpha);
    e.d_phi = e.d_beta;
    e.rms_theta = std::sqrt(st / n);
    e.rms_phi = std::sqrt(sp / n);
    return e;
}

}  // namespace oam
