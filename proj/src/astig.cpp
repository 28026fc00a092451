// SPDX-License-Identifier: Apache-2.0

#include "oam/astig.hpp"

#include <cmath>

namespace oam {

using cd = std::complex<double>;

ComplexMatrix2 ComplexMatrix2::adjoint() const
{
    return {std::conj(m11), std::conj(m21), std::conj(m12), std::conj(m22)};
}

cd ComplexMatrix2::determinant() const { return m11 * m22 - m12 * m21; }

ComplexMatrix2 operator*(const ComplexMatrix2& a, const ComplexMatrix2& b)
{
    return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
            a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
}

StateVector2 apply(const ComplexMatrix2& m, const StateVector2& v)
{
    StateVector2 out;
    out.c_plus = m.m11 * v.c_plus + m.m12 * v.c_minus;
    out.c_minus = m.m21 * v.c_plus + m.m22 * v.c_minus;
    return out;
}

ComplexMatrix2 mc_unitary(double beta)
{
    const cd pre = std::polar(1.0 / std::sqrt(2.0), 0.25 * kPi);
    const cd i{0.0, 1.0};
    return {pre, pre * i * std::polar(1.0, -beta), pre * i * std::polar(1.0, beta), pre};
}

PoincareState apply_mc(const PoincareState& s, double beta)
{
    const StateVector2 out = apply(mc_unitary(beta), amplitudes(s));
    return state_from_amplitudes(out.c_plus, out.c_minus);
}

UnitVector3 bloch_rotate(const UnitVector3& n, double beta)
{
    const Vec3 u{std::cos(beta), std::sin(beta), 0.0};
    return UnitVector3::normalized(dot(u, n.vec()) * u - cross(u, n.vec()));
}

UnitVector3 bloch_rotate_inverse(const UnitVector3& n, double beta)
{
    const Vec3 u{std::cos(beta), std::sin(beta), 0.0};
    return UnitVector3::normalized(dot(u, n.vec()) * u + cross(u, n.vec()));
}

Method1Reading method1_predict(const PoincareState& s)
{
    if (s.theta() < 1e-9 || s.theta() > kPi - 1e-9)
        throw PoleDegenerate("pure LG input: every converter angle yields an HG image");
    Method1Reading r;
    r.beta_mc = wrap_2pi(s.phi());
    r.alpha_hg = wrap_pi(0.5 * (s.phi() - s.theta()) + 0.25 * kPi);
    return r;
}

PoincareState method1_invert(const Method1Reading& r)
{
    if (!std::isfinite(r.beta_mc) || !std::isfinite(r.alpha_hg))
        throw NoValidBranch("non-finite Method I reading");
    const double theta_raw = angle_difference(r.beta_mc - 2.0 * r.alpha_hg + 0.5 * kPi, 0.0);
    if (theta_raw >= 0.0) return PoincareState::from_radians(theta_raw, r.beta_mc);
    return PoincareState::from_radians(-theta_raw, r.beta_mc - kPi);
}

double equal_modulus_signed(const PoincareState& s, double beta)
{
    const StateVector2 out = apply(mc_unitary(beta), amplitudes(s));
    return std::norm(out.c_plus) - std::norm(out.c_minus);
}

double equal_modulus_residual(const PoincareState& s, double beta)
{
    return std::abs(equal_modulus_signed(s, beta));
}

}  // namespace oam
