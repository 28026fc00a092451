// SPDX-License-Identifier: Apache-2.0
//
// Astigmatic mode converter MC(beta): the 2x2 unitary, its action on states,
// the equivalent Bloch rotation, and the visibility-maximization closed forms
// (beta_MC = phi, alpha_HG = (phi - theta)/2 + 45 deg) with their inverse.
//
// beta is always the Poincare-frame angle. The physical converter axis sits
// at beta/2 with respect to the horizontal.

#pragma once

#include <complex>

#include "oam/state.hpp"

namespace oam {

class PoleDegenerate : public Error {
public:
    using Error::Error;
};

class NoValidBranch : public Error {
public:
    using Error::Error;
};

struct ComplexMatrix2 {
    std::complex<double> m11, m12, m21, m22;

    ComplexMatrix2 adjoint() const;
    std::complex<double> determinant() const;

    friend ComplexMatrix2 operator*(const ComplexMatrix2& a, const ComplexMatrix2& b);
};

/// Applies the matrix to the column (plus, minus). The result is not renormalized.
StateVector2 apply(const ComplexMatrix2& m, const StateVector2& v);

/// (e^{i pi/4} / sqrt 2) [[1, i e^{-i beta}], [i e^{i beta}, 1]]
ComplexMatrix2 mc_unitary(double beta);

/// Poincare coordinates of MC(beta)|s>, global phase stripped.
PoincareState apply_mc(const PoincareState& s, double beta);

/// Active rotation by -pi/2 about u = (cos beta, sin beta, 0):
///   R(n) = (u.n) u - u x n
/// so that the north pole maps to (0, 1, 0) at beta = 0, as MC(0) does.
UnitVector3 bloch_rotate(const UnitVector3& n, double beta);

/// Inverse rotation, (u.n) u + u x n.
UnitVector3 bloch_rotate_inverse(const UnitVector3& n, double beta);

struct Method1Reading {
    double beta_mc = 0.0;   ///< converter angle that yields an HG image, Poincare frame, [0, 2pi)
    double alpha_hg = 0.0;  ///< HG lobe-axis orientation w.r.t. horizontal, [0, pi)
};

/// beta_MC = phi, alpha_HG = (phi - theta)/2 + pi/4 (mod pi).
/// Throws PoleDegenerate within 1e-9 rad of a pole, where every beta gives an HG image.
Method1Reading method1_predict(const PoincareState& s);

/// Inverse of method1_predict. theta_raw = beta - 2 alpha + pi/2 reduced to
/// (-pi, pi]; a negative theta_raw means the reading sits on the second zero
/// of the equal-modulus condition (beta = phi + pi), in which case the state is
/// (-theta_raw, beta - pi). Throws NoValidBranch for non-finite readings.
PoincareState method1_invert(const Method1Reading& r);

/// Signed |row1|^2 - |row2|^2 of MC(beta)|s> (normalized), which is the
/// z-component of the rotated Bloch vector: sin(theta) sin(beta - phi).
double equal_modulus_signed(const PoincareState& s, double beta);

/// | |row1|^2 - |row2|^2 |, evaluated from the matrix product.
double equal_modulus_residual(const PoincareState& s, double beta);

}  // namespace oam
