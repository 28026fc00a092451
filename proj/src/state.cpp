// SPDX-License-Identifier: Apache-2.0

#include "oam/state.hpp"

#include <algorithm>
#include <cmath>

namespace oam {

namespace {

constexpr double kPoleZ = 1.0 - 1e-12;
constexpr double kThetaSlack = 1e-12;

}  // namespace

double wrap_2pi(double angle)
{
    double r = std::fmod(angle, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    // fmod can hand back 2pi after the correction for tiny negative inputs
    return r >= kTwoPi ? 0.0 : r;
}

double wrap_pi(double angle)
{
    double r = std::fmod(angle, kPi);
    if (r < 0.0) r += kPi;
    return r >= kPi ? 0.0 : r;
}

double angle_difference(double a, double b)
{
    double d = wrap_2pi(a - b);
    return d > kPi ? d - kTwoPi : d;
}

double orientation_difference(double a, double b)
{
    double d = wrap_pi(a - b);
    return d > 0.5 * kPi ? d - kPi : d;
}

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

UnitVector3 UnitVector3::normalized(const Vec3& v)
{
    const double n = norm(v);
    if (!std::isfinite(n) || n == 0.0) throw InvalidState("cannot normalize a zero or non-finite vector");
    return UnitVector3(Vec3{v.x / n, v.y / n, v.z / n});
}

PoincareState PoincareState::from_radians(double theta, double phi)
{
    if (!std::isfinite(theta) || !std::isfinite(phi))
        throw InvalidState("state angles must be finite");
    if (theta < -kThetaSlack || theta > kPi + kThetaSlack)
        throw InvalidState("theta must lie in [0, 180] degrees, got " + std::to_string(rad2deg(theta)));
    theta = std::clamp(theta, 0.0, kPi);
    const bool degenerate = std::abs(std::cos(theta)) > kPoleZ;
    return PoincareState(theta, wrap_2pi(phi), degenerate);
}

StateVector2 StateVector2::normalized(std::complex<double> plus, std::complex<double> minus)
{
    const double n = std::sqrt(std::norm(plus) + std::norm(minus));
    if (!std::isfinite(n) || n == 0.0) throw InvalidState("zero amplitude pair");
    plus /= n;
    minus /= n;
    const std::complex<double> ref = std::abs(plus) > 1e-12 ? plus : minus;
    const std::complex<double> phase = std::conj(ref) / std::abs(ref);
    StateVector2 out;
    out.c_plus = plus * phase;
    out.c_minus = minus * phase;
    // the reference amplitude is real by construction; drop the rounding residue
    if (std::abs(plus) > 1e-12)
        out.c_plus = {std::abs(plus), 0.0};
    else
        out.c_minus = {std::abs(minus), 0.0};
    return out;
}

UnitVector3 state_to_bloch(const PoincareState& s)
{
    const double st = std::sin(s.theta());
    return UnitVector3::normalized(st * std::cos(s.phi()), st * std::sin(s.phi()), std::cos(s.theta()));
}

PoincareState bloch_to_state(const UnitVector3& n)
{
    const double z = std::clamp(n.z(), -1.0, 1.0);
    const double theta = std::acos(z);
    if (std::abs(z) > kPoleZ) return PoincareState(theta, 0.0, true);
    return PoincareState(theta, wrap_2pi(std::atan2(n.y(), n.x())), false);
}

StateVector2 amplitudes(const PoincareState& s)
{
    StateVector2 v;
    v.c_plus = {std::cos(0.5 * s.theta()), 0.0};
    v.c_minus = std::polar(std::sin(0.5 * s.theta()), s.phi());
    return v;
}

PoincareState state_from_amplitudes(std::complex<double> plus, std::complex<double> minus)
{
    const StateVector2 v = StateVector2::normalized(plus, minus);
    // Bloch components from the density-matrix form: x + iy = 2 conj(c+) c-
    const std::complex<double> coherence = 2.0 * std::conj(v.c_plus) * v.c_minus;
    const double z = std::norm(v.c_plus) - std::norm(v.c_minus);
    return bloch_to_state(UnitVector3::normalized(coherence.real(), coherence.imag(), z));
}

double fidelity(const UnitVector3& a, const UnitVector3& b)
{
    return std::clamp(0.5 * (1.0 + dot(a, b)), 0.0, 1.0);
}

double fidelity(const PoincareState& a, const PoincareState& b)
{
    return fidelity(state_to_bloch(a), state_to_bloch(b));
}

double spherical_distance(const UnitVector3& a, const UnitVector3& b)
{
    return std::acos(std::clamp(dot(a, b), -1.0, 1.0));
}

UnitVector3 geodesic_midpoint(const UnitVector3& a, const UnitVector3& b)
{
    return UnitVector3::normalized(a.vec() + b.vec());
}

}  // namespace oam
