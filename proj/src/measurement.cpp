// SPDX-License-Identifier: Apache-2.0

#include "oam/measurement.hpp"

#include <cmath>
#include <cstdio>

#include "oam/astig.hpp"

namespace oam {

std::string MeasurementKind::label() const
{
    if (is_direct()) return "direct";
    char buf[16];
    std::snprintf(buf, sizeof buf, "mc%02ld", std::lround(rad2deg(wrap_2pi(beta)) / 2.0) % 180);
    return buf;
}

std::array<MeasurementKind, 3> standard_kinds()
{
    return {MeasurementKind::direct(), MeasurementKind::converter(0.0), MeasurementKind::converter(0.5 * kPi)};
}

std::uint64_t measurement_seed(std::uint64_t seed, const MeasurementKind& kind)
{
    if (kind.is_direct()) return mix_seed(seed, 1);
    const auto nano = static_cast<std::uint64_t>(std::llround(wrap_2pi(kind.beta) * 1e9));
    return mix_seed(seed, 2, nano);
}

AbstractSource::AbstractSource(const GridSpec& grid, const StateVector2& amps, NoiseModel noise, std::uint64_t seed)
    : AbstractSource(std::make_shared<const ModeBasis>(grid), amps, noise, seed)
{
}

AbstractSource::AbstractSource(const GridSpec& grid, const PoincareState& s, NoiseModel noise, std::uint64_t seed)
    : AbstractSource(grid, amplitudes(s), noise, seed)
{
}

AbstractSource::AbstractSource(std::shared_ptr<const ModeBasis> basis, const StateVector2& amps, NoiseModel noise,
                               std::uint64_t seed)
    : basis_(std::move(basis)), amps_(amps), noise_(noise), seed_(seed)
{
}

IntensityImage AbstractSource::image(const MeasurementKind& kind) const
{
    const StateVector2 out = kind.is_direct() ? amps_ : apply(mc_unitary(kind.beta), amps_);
    return add_noise(basis_->render(out), measurement_seed(seed_, kind), noise_);
}

PhysicalSource::PhysicalSource(std::shared_ptr<const TiltedLensSimulator> sim, const PoincareState& s,
                               double plane_offset, NoiseModel noise, std::uint64_t seed)
    : sim_(std::move(sim)), nominal_(sim_->nominal_grid()), amps_(amplitudes(s)), plane_offset_(plane_offset),
      noise_(noise), seed_(seed)
{
}

IntensityImage PhysicalSource::image(const MeasurementKind& kind) const
{
    const IntensityImage clean =
        kind.is_direct() ? nominal_.render(amps_) : sim_->measure(amps_, kind.beta, plane_offset_);
    return add_noise(clean, measurement_seed(seed_, kind), noise_);
}

namespace {

bool same_kind(const MeasurementKind& a, const MeasurementKind& b)
{
    if (a.tag != b.tag) return false;
    return a.is_direct() || std::abs(angle_difference(a.beta, b.beta)) < 1e-6;
}

}  // namespace

void ImageSetSource::add(const MeasurementKind& kind, IntensityImage img)
{
    for (auto& entry : images_) {
        if (same_kind(entry.first, kind)) {
            entry.second = std::move(img);
            return;
        }
    }
    images_.emplace_back(kind, std::move(img));
}

IntensityImage ImageSetSource::image(const MeasurementKind& kind) const
{
    for (const auto& entry : images_)
        if (same_kind(entry.first, kind)) return entry.second;
    throw Error("no recorded image for measurement " + kind.label());
}

std::vector<double> ImageSetSource::converter_angles() const
{
    std::vector<double> out;
    for (const auto& entry : images_)
        if (!entry.first.is_direct()) out.push_back(entry.first.beta);
    return out;
}

}  // namespace oam
