#include <doctest.h>

#include <random>

#include "oam/astig.hpp"

using namespace oam;
using doctest::Approx;
using cd = std::complex<double>;

namespace {

double max_dev_from_identity(const ComplexMatrix2& m)
{
    return std::max({std::abs(m.m11 - 1.0), std::abs(m.m12), std::abs(m.m21), std::abs(m.m22 - 1.0)});
}

}  // namespace

TEST_CASE("converter matrix at beta = 0")
{
    const auto m = mc_unitary(0.0);
    const cd pre = std::exp(cd(0, kPi / 4)) / std::sqrt(2.0);
    CHECK(std::abs(m.m11 - pre) < 1e-15);
    CHECK(std::abs(m.m12 - pre * cd(0, 1)) < 1e-15);
    CHECK(std::abs(m.m21 - pre * cd(0, 1)) < 1e-15);
    CHECK(std::abs(m.m22 - pre) < 1e-15);
}

TEST_CASE("converter is unitary with eigenstates on the equator")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 100; ++i) {
        const double b = u(rng);
        const auto m = mc_unitary(b);
        CHECK(max_dev_from_identity(m.adjoint() * m) < 1e-12);
        CHECK(std::abs(std::abs(m.determinant()) - 1.0) < 1e-12);

        const auto e = amplitudes(PoincareState::from_radians(kPi / 2, wrap_2pi(b)));
        const auto out = apply(m, e);
        const cd ratio = out.c_plus / e.c_plus;
        CHECK(std::abs(std::abs(ratio) - 1.0) < 1e-12);
        CHECK(std::abs(out.c_minus - ratio * e.c_minus) < 1e-12);
    }
}

TEST_CASE("apply_mc on fixed states")
{
    auto s = apply_mc(PoincareState::from_degrees(0, 0), 0.0);
    CHECK(rad2deg(s.theta()) == Approx(90));
    CHECK(rad2deg(s.phi()) == Approx(90));
    s = apply_mc(PoincareState::from_degrees(90, 0), 0.0);
    CHECK(rad2deg(s.theta()) == Approx(90));
    CHECK(std::abs(angle_difference(s.phi(), 0.0)) < 1e-12);
    s = apply_mc(PoincareState::from_degrees(90, 180), 0.0);
    CHECK(rad2deg(s.theta()) == Approx(90));
    CHECK(rad2deg(s.phi()) == Approx(180));
}

TEST_CASE("Bloch rotation fixed points and period")
{
    auto r = bloch_rotate(UnitVector3::normalized(0, 0, 1), 0.0);
    CHECK(r.y() == Approx(1.0));
    r = bloch_rotate(UnitVector3::normalized(1, 0, 0), 0.0);
    CHECK(r.x() == Approx(1.0));

    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int i = 0; i < 50; ++i) {
        const auto n = UnitVector3::normalized(g(rng), g(rng), g(rng));
        const double b = g(rng);
        auto p = n;
        for (int k = 0; k < 4; ++k) p = bloch_rotate(p, b);
        CHECK(spherical_distance(p, n) < 1e-7);
        CHECK(norm(p.vec() - n.vec()) < 1e-12);
        CHECK(norm(bloch_rotate_inverse(bloch_rotate(n, b), b).vec() - n.vec()) < 1e-12);
    }
}

TEST_CASE("Method I closed forms")
{
    auto r = method1_predict(PoincareState::from_degrees(90, 0));
    CHECK(rad2deg(r.beta_mc) == Approx(0.0));
    CHECK(rad2deg(r.alpha_hg) == Approx(0.0));
    r = method1_predict(PoincareState::from_degrees(135, 90));
    CHECK(rad2deg(r.beta_mc) == Approx(90.0));
    CHECK(rad2deg(r.alpha_hg) == Approx(22.5));
    CHECK_THROWS_AS(method1_predict(PoincareState::from_degrees(0, 40)), PoleDegenerate);
    CHECK_THROWS_AS(method1_predict(PoincareState::from_degrees(180, 0)), PoleDegenerate);

    auto s = method1_invert({0.0, 0.0});
    CHECK(rad2deg(s.theta()) == Approx(90));
    CHECK(rad2deg(s.phi()) == Approx(0).epsilon(1e-12));
    s = method1_invert({deg2rad(90), deg2rad(22.5)});
    CHECK(rad2deg(s.theta()) == Approx(135));
    CHECK(rad2deg(s.phi()) == Approx(90));
    CHECK_THROWS_AS(method1_invert({std::nan(""), 0.0}), NoValidBranch);
}

TEST_CASE("the second equal-modulus zero inverts to the same state")
{
    for (double t = 15; t < 180; t += 15)
        for (double p = 0; p < 360; p += 15) {
            const auto s = PoincareState::from_degrees(t, p);
            const double beta = wrap_2pi(s.phi() + kPi);
            // alpha from the Bloch vector after the converter: HG orientation = longitude / 2
            const auto out = bloch_to_state(bloch_rotate(state_to_bloch(s), beta));
            const auto back = method1_invert({beta, wrap_pi(out.phi() / 2.0)});
            CHECK(norm(state_to_bloch(back).vec() - state_to_bloch(s).vec()) < 1e-9);
        }
}

TEST_CASE("equal-modulus residual")
{
    const auto s = PoincareState::from_degrees(70, 200);
    CHECK(equal_modulus_residual(s, s.phi()) < 1e-14);
    CHECK(equal_modulus_residual(s, s.phi() + kPi) < 1e-14);
    for (double b = 0; b < kTwoPi; b += 0.3) {
        CHECK(equal_modulus_residual(PoincareState::from_degrees(0, 0), b) < 1e-14);
        CHECK(equal_modulus_residual(s, b) == Approx(std::sin(s.theta()) * std::abs(std::sin(s.phi() - b))));
    }
    // brute force over beta: (90, 0) is most unbalanced at beta = 90 deg
    const auto c = PoincareState::from_degrees(90, 0);
    double best = -1, arg = 0;
    for (int k = 0; k < 3600; ++k) {
        const double b = k * kTwoPi / 3600;
        const StateVector2 o = apply(mc_unitary(b), amplitudes(c));
        const double v = std::abs(std::norm(o.c_plus) - std::norm(o.c_minus));
        if (v > best) best = v, arg = b;
    }
    CHECK(std::abs(orientation_difference(arg, deg2rad(90))) < 1e-9);
    CHECK(equal_modulus_residual(c, deg2rad(90)) == Approx(best));
}
