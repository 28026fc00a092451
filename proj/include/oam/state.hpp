// SPDX-License-Identifier: Apache-2.0
//
// Two-dimensional OAM superpositions of LG(+1) and LG(-1): Poincare-sphere
// coordinates, Bloch vectors, amplitude pairs, fidelity and sphere distances.
//
// Angles are radians everywhere in the library; files and CLI use degrees.

#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace oam {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * (kPi / 180.0); }
constexpr double rad2deg(double rad) { return rad * (180.0 / kPi); }

/// Reduces an angle to [0, 2pi).
double wrap_2pi(double angle);
/// Reduces an angle to [0, pi).
double wrap_pi(double angle);
/// Signed difference a - b reduced to (-pi, pi].
double angle_difference(double a, double b);
/// Signed difference of two line orientations (period pi), reduced to (-pi/2, pi/2].
double orientation_difference(double a, double b);

/// Base class for every domain error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidState : public Error {
public:
    using Error::Error;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
    friend Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
};

double dot(const Vec3& a, const Vec3& b);
Vec3 cross(const Vec3& a, const Vec3& b);
double norm(const Vec3& a);

/// Point on the unit sphere. Construction always normalizes.
class UnitVector3 {
public:
    UnitVector3() = default;
    /// Throws InvalidState for zero or non-finite input.
    static UnitVector3 normalized(const Vec3& v);
    static UnitVector3 normalized(double x, double y, double z) { return normalized(Vec3{x, y, z}); }

    double x() const { return v_.x; }
    double y() const { return v_.y; }
    double z() const { return v_.z; }
    const Vec3& vec() const { return v_; }

    UnitVector3 operator-() const { return UnitVector3(-v_); }

private:
    explicit UnitVector3(const Vec3& v) : v_(v) {}
    Vec3 v_{0.0, 0.0, 1.0};
};

inline double dot(const UnitVector3& a, const UnitVector3& b) { return dot(a.vec(), b.vec()); }

/// (theta, phi) of the superposition cos(theta/2) LG+ + e^{i phi} sin(theta/2) LG-.
///
/// theta is in [0, pi] and phi in [0, 2pi). At the poles phi carries no
/// information; `degenerate_phi()` reports that and callers must not use phi.
class PoincareState {
public:
    PoincareState() = default;

    /// Validates theta (tolerating 1e-12 rad outside [0, pi]) and wraps phi.
    /// Throws InvalidState for out-of-range or non-finite theta.
    static PoincareState from_radians(double theta, double phi);
    static PoincareState from_degrees(double theta_deg, double phi_deg)
    {
        return from_radians(deg2rad(theta_deg), deg2rad(phi_deg));
    }

    double theta() const { return theta_; }
    double phi() const { return phi_; }
    bool degenerate_phi() const { return degenerate_; }

private:
    PoincareState(double theta, double phi, bool degenerate)
        : theta_(theta), phi_(phi), degenerate_(degenerate) {}

    double theta_ = 0.0;
    double phi_ = 0.0;
    bool degenerate_ = true;

    friend PoincareState bloch_to_state(const UnitVector3& n);
};

/// Amplitudes on (LG+, LG-), unit norm, global phase fixed so that c_plus is
/// real and non-negative (c_minus when |c_plus| <= 1e-12).
struct StateVector2 {
    std::complex<double> c_plus{1.0, 0.0};
    std::complex<double> c_minus{0.0, 0.0};

    /// Normalizes and applies the global-phase convention. Throws InvalidState on a zero vector.
    static StateVector2 normalized(std::complex<double> plus, std::complex<double> minus);
};

UnitVector3 state_to_bloch(const PoincareState& s);

/// Inverse of state_to_bloch. For |z| > 1 - 1e-12 phi is set to 0 and flagged degenerate.
PoincareState bloch_to_state(const UnitVector3& n);

StateVector2 amplitudes(const PoincareState& s);

/// Poincare coordinates of an arbitrary (not necessarily normalized) amplitude pair.
PoincareState state_from_amplitudes(std::complex<double> plus, std::complex<double> minus);

/// |<a|b>|^2 = (1 + n_a . n_b) / 2.
double fidelity(const PoincareState& a, const PoincareState& b);
double fidelity(const UnitVector3& a, const UnitVector3& b);

/// Geodesic distance arccos(a . b), with the dot product clamped to [-1, 1].
double spherical_distance(const UnitVector3& a, const UnitVector3& b);

/// Normalized vector sum; the geodesic midpoint for two non-antipodal points.
UnitVector3 geodesic_midpoint(const UnitVector3& a, const UnitVector3& b);

}  // namespace oam
