// SPDX-License-Identifier: Apache-2.0
//
// Where the tomography gets its images from: rendered abstract states, the
// simulated tilted-lens bench, or files on disk.

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "oam/field.hpp"

namespace oam {

struct MeasurementKind {
    enum class Tag { direct, converter };
    Tag tag = Tag::direct;
    double beta = 0.0;  ///< converter angle [rad]; unused for direct

    static MeasurementKind direct() { return {Tag::direct, 0.0}; }
    static MeasurementKind converter(double beta) { return {Tag::converter, beta}; }

    bool is_direct() const { return tag == Tag::direct; }
    /// "direct" or "mcNN" with NN the physical converter axis beta/2 in whole degrees.
    std::string label() const;
};

/// direct, converter(0), converter(pi/2): the three images of the triangle method.
std::array<MeasurementKind, 3> standard_kinds();

class MeasurementSource {
public:
    virtual ~MeasurementSource() = default;
    virtual IntensityImage image(const MeasurementKind& kind) const = 0;
    /// False when only a fixed set of converter angles is available.
    virtual bool continuous() const { return true; }
};

/// Noise seed for one image: a function of the run seed and the measurement only.
std::uint64_t measurement_seed(std::uint64_t seed, const MeasurementKind& kind);

/// Renders |MC(beta) psi|^2 directly from the 2x2 converter matrix.
class AbstractSource : public MeasurementSource {
public:
    AbstractSource(const GridSpec& grid, const StateVector2& amps, NoiseModel noise = {}, std::uint64_t seed = 0);
    AbstractSource(const GridSpec& grid, const PoincareState& s, NoiseModel noise = {}, std::uint64_t seed = 0);
    /// Shares a precomputed mode basis (cheap to construct per state).
    AbstractSource(std::shared_ptr<const ModeBasis> basis, const StateVector2& amps, NoiseModel noise = {},
                   std::uint64_t seed = 0);

    IntensityImage image(const MeasurementKind& kind) const override;

private:
    std::shared_ptr<const ModeBasis> basis_;
    StateVector2 amps_;
    NoiseModel noise_;
    std::uint64_t seed_;
};

/// Converter images come from the tilted-lens simulation at a fixed plane; the
/// direct image is the prepared field rendered on the nominal grid.
class PhysicalSource : public MeasurementSource {
public:
    PhysicalSource(std::shared_ptr<const TiltedLensSimulator> sim, const PoincareState& s, double plane_offset,
                   NoiseModel noise = {}, std::uint64_t seed = 0);

    IntensityImage image(const MeasurementKind& kind) const override;

private:
    std::shared_ptr<const TiltedLensSimulator> sim_;
    ModeBasis nominal_;
    StateVector2 amps_;
    double plane_offset_;
    NoiseModel noise_;
    std::uint64_t seed_;
};

/// Pre-recorded images looked up by kind (converter angles must match within 1e-6 rad).
class ImageSetSource : public MeasurementSource {
public:
    void add(const MeasurementKind& kind, IntensityImage img);
    IntensityImage image(const MeasurementKind& kind) const override;
    bool continuous() const override { return false; }

    /// Converter angles present, in insertion order.
    std::vector<double> converter_angles() const;

private:
    std::vector<std::pair<MeasurementKind, IntensityImage>> images_;
};

}  // namespace oam
