#include <doctest.h>

#include "oam/tomography.hpp"

using namespace oam;
using doctest::Approx;

namespace {

const GridSpec kGrid = GridSpec::defaults();

std::shared_ptr<const ModeBasis> basis()
{
    static const auto b = std::make_shared<const ModeBasis>(kGrid);
    return b;
}

Method1Result scan(const PoincareState& s, double step_deg = 2.0)
{
    return method1_scan(AbstractSource(basis(), amplitudes(s)), beta_grid(deg2rad(step_deg)));
}

double dist_deg(const PoincareState& a, const PoincareState& b)
{
    return rad2deg(spherical_distance(state_to_bloch(a), state_to_bloch(b)));
}

}  // namespace

TEST_CASE("beta grid")
{
    const auto g = beta_grid(deg2rad(2));
    CHECK(g.size() == 180);
    CHECK(g[1] == Approx(deg2rad(2)));
    CHECK_THROWS(beta_grid(deg2rad(7)));
    CHECK_THROWS(beta_grid(0.0));
}

TEST_CASE("equator state on a 1 degree grid")
{
    const auto s = PoincareState::from_degrees(90, 0);
    const auto r = scan(s, 1.0);
    CHECK_FALSE(r.pole);
    CHECK(std::abs(rad2deg(orientation_difference(r.reading.beta_mc, 0.0))) < 1.0);
    CHECK(dist_deg(r.state, s) < 1.0);
    if (std::abs(angle_difference(r.reading.beta_mc, 0.0)) < kPi / 2)
        CHECK(std::abs(rad2deg(orientation_difference(r.reading.alpha_hg, 0.0))) < 0.5);
}

TEST_CASE("generic state recovers either equal-modulus branch")
{
    const auto s = PoincareState::from_degrees(135, 90);
    const auto r = scan(s);
    CHECK(std::abs(rad2deg(orientation_difference(r.reading.beta_mc, deg2rad(90)))) < 1.0);
    const auto predicted = method1_predict(method1_invert(r.reading));
    CHECK(dist_deg(method1_invert(r.reading), s) < 1.5);
    CHECK(std::abs(rad2deg(orientation_difference(predicted.alpha_hg, deg2rad(22.5)))) < 0.5);
    CHECK(r.peak_visibility > 0.95);
    CHECK(equal_modulus_residual(s, r.reading.beta_mc) < 0.02);
}

TEST_CASE("poles are labelled by the witness image")
{
    auto r = scan(PoincareState::from_degrees(0, 0));
    CHECK(r.pole);
    CHECK(rad2deg(r.state.theta()) == Approx(0.0));
    CHECK(std::abs(rad2deg(orientation_difference(r.witness_alpha, deg2rad(45)))) < 1.0);
    r = scan(PoincareState::from_degrees(180, 0));
    CHECK(r.pole);
    CHECK(rad2deg(r.state.theta()) == Approx(180.0));
}

TEST_CASE("recorded scans are read at the nearest angle")
{
    const auto s = PoincareState::from_degrees(60, 200);
    const AbstractSource live(basis(), amplitudes(s));
    ImageSetSource files;
    files.add(MeasurementKind::direct(), live.image(MeasurementKind::direct()));
    const auto betas = beta_grid(deg2rad(2));
    for (double b : betas) files.add(MeasurementKind::converter(b), live.image(MeasurementKind::converter(b)));
    const auto r = method1_scan(files, betas);
    CHECK(dist_deg(r.state, s) < 1.5);
    CHECK_THROWS(files.image(MeasurementKind::converter(0.001)));
}

TEST_CASE("scans must cover the circle in small uniform steps")
{
    const AbstractSource src(basis(), amplitudes(PoincareState::from_degrees(60, 20)));
    CHECK_THROWS(method1_scan(src, beta_grid(deg2rad(5))));
    CHECK_THROWS(method1_scan(src, {0.0, 0.01, 0.02}));
}

TEST_CASE("alpha follows the closed form along both sample lines")
{
    for (double t = 15; t < 180; t += 15) {
        const auto s = PoincareState::from_degrees(t, 0);
        const auto r = scan(s);
        CAPTURE(t);
        CHECK(dist_deg(r.state, s) < 1.0);
    }
    for (double p = 0; p < 360; p += 45) {
        const auto s = PoincareState::from_degrees(135, p);
        const auto r = scan(s);
        CAPTURE(p);
        CHECK(dist_deg(r.state, s) < 1.0);
    }
}

TEST_CASE("Method I and Method II agree on generic states")
{
    for (auto [t, p] : {std::pair{50.0, 20.0}, {70.0, 160.0}, {120.0, 250.0}, {100.0, 330.0}}) {
        const auto s = PoincareState::from_degrees(t, p);
        const auto m1 = scan(s).state;
        const auto m2 = estimate_state(acquire_readings(AbstractSource(basis(), amplitudes(s)))).state;
        CAPTURE(t);
        CAPTURE(p);
        CHECK(std::abs(rad2deg(m1.theta() - m2.theta())) < 1.0);
        CHECK(std::abs(rad2deg(angle_difference(m1.phi(), m2.phi()))) < 1.0);
    }
}

TEST_CASE("error bars propagate beta and alpha scatter")
{
    const auto s = PoincareState::from_degrees(60, 40);
    std::vector<Method1Result> runs;
    for (double sign : {-1.0, 1.0})
        for (bool flipped : {false, true}) {
            Method1Result r;
            const double beta = deg2rad(flipped ? 220.0 : 40.0) + sign * deg2rad(3);
            const double alpha = deg2rad(flipped ? 5.0 : 35.0) - sign * deg2rad(1);
            r.reading = {wrap_2pi(beta), wrap_pi(alpha)};
            r.state = method1_invert(r.reading);
            runs.push_back(r);
        }
    Method1Result pole;
    pole.pole = true;
    runs.push_back(pole);

    const auto e = method1_error_bars(s, runs);
    REQUIRE(e.has_value());
    CHECK(e->runs == 4);
    CHECK(rad2deg(e->d_beta) == Approx(3));
    CHECK(rad2deg(e->d_alpha) == Approx(1));
    CHECK(rad2deg(e->d_theta) == Approx(std::sqrt(13.0)));
    CHECK(e->d_phi == Approx(e->d_beta));
    // theta = beta - 2 alpha + 90 moves by 3 + 2 = 5 deg on every run
    CHECK(rad2deg(e->rms_theta) == Approx(5));
    CHECK(rad2deg(e->rms_phi) == Approx(3));

    CHECK_FALSE(method1_error_bars(PoincareState::from_degrees(0, 0), runs).has_value());
    CHECK_FALSE(method1_error_bars(s, {pole}).has_value());
}
