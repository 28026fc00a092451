// SPDX-License-Identifier: Apache-2.0
//
// State reconstruction from intensity images.
//
// Method I scans the converter angle for the most HG-like image and inverts the
// closed forms of astig.hpp. Method II combines one direct and two converted
// images: each lobe orientation alpha restricts the state to half a great
// circle, and the three pairwise intersections form a small spherical triangle.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "oam/analysis.hpp"
#include "oam/astig.hpp"
#include "oam/measurement.hpp"

namespace oam {

class DegenerateOverlap : public Error {
public:
    using Error::Error;
};

class NoIntersection : public Error {
public:
    using Error::Error;
};

class TooManyBlind : public Error {
public:
    using Error::Error;
};

/// States whose measured longitude about the measurement's rotated frame is 2 alpha.
class HalfGreatCircle {
public:
    HalfGreatCircle(const MeasurementKind& kind, double longitude);

    const MeasurementKind& kind() const { return kind_; }
    double longitude() const { return longitude_; }

    /// Unit normal of the great-circle plane.
    const UnitVector3& normal() const { return normal_; }
    /// Midpoint of the half circle; the half is {n in plane : n . selector >= 0}.
    const UnitVector3& selector() const { return selector_; }
    /// End points of the arc, rotation^-1(+z) and rotation^-1(-z).
    std::array<UnitVector3, 2> poles() const;

    /// Maps n into the frame where this measurement reads longitudes (identity for direct).
    UnitVector3 to_measurement_frame(const UnitVector3& n) const;

    /// n lies on the arc: its measured longitude matches within `tol` and it is
    /// not within 1e-9 of an arc end point.
    bool contains(const UnitVector3& n, double tol) const;

private:
    MeasurementKind kind_;
    double longitude_;
    UnitVector3 normal_;
    UnitVector3 selector_;
};

/// Locus of a reading with lobe axis `alpha` (longitude 2 alpha).
HalfGreatCircle measurement_locus(const MeasurementKind& kind, double alpha);

/// Point on both arcs. Throws DegenerateOverlap when the arcs share more than a
/// point (same plane within `coplanar_tol`, or both antipodal candidates pass)
/// and NoIntersection when neither candidate lies on both arcs.
UnitVector3 intersect_loci(const HalfGreatCircle& a, const HalfGreatCircle& b, double tol = 1e-6,
                           double coplanar_tol = 1e-9);

/// Midpoint of the shortest geodesic between two arcs that do not meet.
UnitVector3 closest_approach(const HalfGreatCircle& a, const HalfGreatCircle& b);

/// Midpoint of the common stretch of two arcs on the same great circle.
UnitVector3 overlap_midpoint(const HalfGreatCircle& a, const HalfGreatCircle& b);

enum class Branch { blind_spot, narrow_triangle, centroid };
std::string to_string(Branch b);

struct TriangleEstimate {
    std::array<UnitVector3, 3> vertices;
    Branch branch = Branch::centroid;
    UnitVector3 bloch;
    PoincareState state;
    double err_theta = 0.0;
    std::optional<double> err_phi;  ///< empty when the error region reaches a pole
    std::optional<double> fidelity_vs_target;
    std::optional<double> d_fidelity;
    int blind_reading = -1;             ///< index of the gated reading on the blind_spot branch
    bool used_closest_approach = false; ///< some pair of arcs did not meet
    bool used_overlap = false;          ///< some pair of arcs was coplanar
};

struct EstimatorConfig {
    double blind_threshold = 0.34;       ///< readings with v <= this carry no orientation
    double narrow_ratio = 0.5;           ///< shortest side < ratio * next shortest -> narrow triangle
    double resolution = deg2rad(0.25);   ///< sides and plane angles below this are treated as zero
    double membership_tol = 1e-6;
    double alpha_uncertainty = deg2rad(0.5);  ///< used for the blind_spot error bars
};

struct MeasuredReading {
    MeasurementKind kind;
    ImageReading reading;
};

/// Triangle logic on one direct and two converter readings.
/// Throws TooManyBlind when two or more readings fall below the blind threshold.
TriangleEstimate estimate_state(const std::array<MeasuredReading, 3>& readings,
                                const std::optional<PoincareState>& target = std::nullopt,
                                const EstimatorConfig& cfg = {});

/// Runs the image analysis on the standard three images of `source`.
std::array<MeasuredReading, 3> acquire_readings(const MeasurementSource& source, const AnalysisOptions& opts = {});

/// Adds independent N(0, sigma) noise to each alpha (deterministic for a seed).
std::array<MeasuredReading, 3> perturb_readings(std::array<MeasuredReading, 3> readings, double sigma,
                                                std::uint64_t seed);

struct CapGeometry {
    double theta_cap;    ///< polar angle at which sin(theta) = threshold
    double solid_angle;  ///< 2 pi (1 - cos theta_cap)
};

CapGeometry visibility_threshold_cap(double threshold = 0.34);

// ---------------------------------------------------------------- Method I

struct Method1Options {
    AnalysisOptions analysis;
    int scan_samples = 180;     ///< line-scan angles for the per-angle visibility (alpha uses analysis.n_samples)
    double flat_spread = 0.02;  ///< max - min visibility below this -> no preferred converter angle
    double pole_gate = 0.34;    ///< direct-image visibility below this confirms a pole
};

struct Method1Result {
    Method1Reading reading;
    PoincareState state;
    bool pole = false;          ///< the scan was flat; state is a pole picked by the witness image
    double witness_alpha = 0.0; ///< alpha of the converter(0) image, pole case only
    double peak_visibility = 0.0;
    std::vector<double> betas;
    std::vector<double> visibilities;
};

/// beta = k * step for k = 0 .. (2 pi / step) - 1.
std::vector<double> beta_grid(double step);

/// Scans `betas` (covering [0, 2 pi), step <= 2 deg), refines the visibility
/// maximum with a parabola and reads alpha at the refined angle. Sources that
/// only hold recorded images are read at the nearest scanned angle instead.
Method1Result method1_scan(const MeasurementSource& source, const std::vector<double>& betas,
                           const Method1Options& opts = {});

/// Scatter of repeated scans of one known state. d_beta and d_alpha are RMS
/// deviations of the readings from their noiseless values on the branch each
/// scan chose; they propagate through theta = beta - 2 alpha + 90 deg and
/// phi = beta as independent errors. rms_* are the direct errors of the estimates.
struct Method1ErrorBars {
    double d_beta = 0.0;
    double d_alpha = 0.0;
    double d_theta = 0.0;  ///< sqrt(d_beta^2 + 4 d_alpha^2)
    double d_phi = 0.0;    ///< d_beta
    double rms_theta = 0.0;
    double rms_phi = 0.0;
    int runs = 0;          ///< non-pole scans that entered the statistics
};

/// Empty for pole targets and when every scan was flagged as a pole.
std::optional<Method1ErrorBars> method1_error_bars(const PoincareState& target, const std::vector<Method1Result>& runs);

}  // namespace oam
