#include <doctest.h>

#include <random>

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

std::array<MeasuredReading, 3> readings_of(const PoincareState& s)
{
    return acquire_readings(AbstractSource(basis(), amplitudes(s)));
}

// Exact readings straight from the Bloch rotation (no images involved).
std::array<MeasuredReading, 3> exact_readings(const PoincareState& s)
{
    std::array<MeasuredReading, 3> out;
    const auto kinds = standard_kinds();
    for (std::size_t i = 0; i < 3; ++i) {
        UnitVector3 n = state_to_bloch(s);
        if (!kinds[i].is_direct()) n = bloch_rotate(n, kinds[i].beta);
        const auto t = bloch_to_state(n);
        out[i].kind = kinds[i];
        out[i].reading.alpha = wrap_pi(t.phi() / 2.0);
        out[i].reading.visibility = std::sin(t.theta());
    }
    return out;
}

}  // namespace

TEST_CASE("direct locus is a meridian half circle")
{
    const auto l = measurement_locus(MeasurementKind::direct(), 0.0);
    CHECK(l.contains(UnitVector3::normalized(1, 0, 0), 1e-9));
    CHECK_FALSE(l.contains(UnitVector3::normalized(-1, 0, 0), 1e-9));
    CHECK(l.contains(UnitVector3::normalized(1, 0, 1), 1e-9));
    CHECK_FALSE(l.contains(UnitVector3::normalized(0, 0, 1), 1e-9));
}

TEST_CASE("converter loci share the preimages of the poles")
{
    for (double a = 0; a < 180; a += 17) {
        const auto l = measurement_locus(MeasurementKind::converter(0.0), deg2rad(a));
        const auto p = l.poles();
        CHECK(p[0].y() == Approx(-1.0));
        CHECK(p[1].y() == Approx(1.0));
        CHECK(std::abs(dot(l.normal(), UnitVector3::normalized(0, 1, 0))) < 1e-12);
    }
    // brute-force check of the rotation convention
    const auto l = measurement_locus(MeasurementKind::converter(0.0), deg2rad(30));
    const auto m = l.to_measurement_frame(l.selector());
    CHECK(rad2deg(bloch_to_state(m).phi()) == Approx(60));
    CHECK(std::abs(m.z()) < 1e-12);
}

TEST_CASE("true state lies on all three noiseless loci")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> t(25.0, 155.0), p(0.0, 360.0);
    for (int i = 0; i < 50; ++i) {
        const auto s = PoincareState::from_degrees(t(rng), p(rng));
        const auto r = exact_readings(s);
        for (const auto& m : r) CHECK(measurement_locus(m.kind, m.reading.alpha).contains(state_to_bloch(s), 1e-9));
        // pairwise intersections land on the state
        const auto a = measurement_locus(r[0].kind, r[0].reading.alpha);
        const auto b = measurement_locus(r[1].kind, r[1].reading.alpha);
        const auto c = measurement_locus(r[2].kind, r[2].reading.alpha);
        for (const auto& [x, y] : {std::pair{&a, &b}, std::pair{&a, &c}, std::pair{&b, &c}}) {
            try {
                CHECK(spherical_distance(intersect_loci(*x, *y), state_to_bloch(s)) < 1e-6);
            } catch (const DegenerateOverlap&) {
            }
        }
    }
}

TEST_CASE("constructed intersection")
{
    const auto d = measurement_locus(MeasurementKind::direct(), 0.0);
    const auto x = UnitVector3::normalized(1, 0, 0);
    const auto cv = bloch_to_state(bloch_rotate(x, 0.0));
    const auto c = measurement_locus(MeasurementKind::converter(0.0), wrap_pi(cv.phi() / 2));
    CHECK(spherical_distance(intersect_loci(d, c), x) < 1e-9);

    // membership brute force on a 0.1 degree mesh finds only points near (1, 0, 0)
    int hits = 0;
    for (int i = 0; i <= 1800; ++i)
        for (int j = 0; j < 3600; j += 10) {
            const auto n = state_to_bloch(PoincareState::from_degrees(i * 0.1, j * 0.1));
            if (d.contains(n, 1e-3) && c.contains(n, 1e-3)) {
                ++hits;
                CHECK(spherical_distance(n, x) < deg2rad(0.5));
            }
        }
    CHECK(hits > 0);

    CHECK_THROWS_AS(intersect_loci(measurement_locus(MeasurementKind::direct(), 0.2),
                                   measurement_locus(MeasurementKind::direct(), 0.2)),
                    DegenerateOverlap);
    CHECK_THROWS_AS(intersect_loci(measurement_locus(MeasurementKind::direct(), 0.2),
                                   measurement_locus(MeasurementKind::direct(), 0.9)),
                    NoIntersection);
}

TEST_CASE("closest approach of arcs that miss")
{
    const auto a = measurement_locus(MeasurementKind::direct(), 0.2);
    const auto b = measurement_locus(MeasurementKind::direct(), 0.9);
    const auto p = closest_approach(a, b);
    CHECK(std::abs(p.z()) > 0.99);
}

TEST_CASE("blind cap geometry")
{
    const auto cap = visibility_threshold_cap(0.34);
    CHECK(rad2deg(cap.theta_cap) == Approx(19.88).epsilon(0.01 / 19.88));
    CHECK(cap.solid_angle == Approx(0.375).epsilon(0.005 / 0.375));
    CHECK(std::sin(cap.theta_cap) == Approx(0.34));
}

TEST_CASE("estimator branches on rendered images")
{
    auto e = estimate_state(readings_of(PoincareState::from_degrees(135, 90)), PoincareState::from_degrees(135, 90));
    CHECK(e.branch != Branch::blind_spot);
    CHECK(*e.fidelity_vs_target > 0.9999);
    CHECK(spherical_distance(e.bloch, state_to_bloch(PoincareState::from_degrees(135, 90))) < deg2rad(1));

    e = estimate_state(readings_of(PoincareState::from_degrees(0, 0)));
    CHECK(e.branch == Branch::blind_spot);
    CHECK(rad2deg(e.state.theta()) < 1.0);
    CHECK_FALSE(e.err_phi.has_value());
    e = estimate_state(readings_of(PoincareState::from_degrees(180, 0)));
    CHECK(e.branch == Branch::blind_spot);

    for (double t : {45.0, 90.0, 135.0}) {
        e = estimate_state(readings_of(PoincareState::from_degrees(t, 0)));
        CHECK((e.branch == Branch::narrow_triangle || e.branch == Branch::blind_spot));
    }
    e = estimate_state(readings_of(PoincareState::from_degrees(140, 95)), PoincareState::from_degrees(140, 95));
    CHECK(e.branch == Branch::centroid);
    CHECK(*e.fidelity_vs_target > 0.9999);
}

TEST_CASE("estimator input checks")
{
    auto r = exact_readings(PoincareState::from_degrees(60, 30));
    r[1].kind = MeasurementKind::direct();
    CHECK_THROWS(estimate_state(r));
    r = exact_readings(PoincareState::from_degrees(60, 30));
    r[0].reading.visibility = 0.1;
    r[1].reading.visibility = 0.2;
    CHECK_THROWS_AS(estimate_state(r), TooManyBlind);
}

TEST_CASE("noiseless completeness on a 10 x 15 degree grid")
{
    double worst_f = 1, worst_d = 0;
    for (double t = 0; t <= 180; t += 10)
        for (double p = 0; p < 360; p += 15) {
            const auto s = PoincareState::from_degrees(t, p);
            const auto e = estimate_state(readings_of(s), s);
            worst_f = std::min(worst_f, *e.fidelity_vs_target);
            worst_d = std::max(worst_d, spherical_distance(e.bloch, state_to_bloch(s)));
            // branch consistency
            const double cap = visibility_threshold_cap().theta_cap;
            if (s.theta() < cap - deg2rad(0.5) || s.theta() > kPi - cap + deg2rad(0.5)) CHECK(e.branch == Branch::blind_spot);
            const auto n = state_to_bloch(s);
            const bool on_circle = std::abs(n.x()) < 0.017 || std::abs(n.y()) < 0.017 || std::abs(n.z()) < 0.017;
            if (on_circle) CHECK(e.branch != Branch::centroid);
            if (t == 0 || t == 180) break;
        }
    MESSAGE("worst fidelity " << worst_f << ", worst error " << rad2deg(worst_d) << " deg");
    CHECK(worst_f > 0.9999);
    CHECK(rad2deg(worst_d) < 1.0);
}

TEST_CASE("fidelity decreases with alpha noise")
{
    std::vector<std::array<MeasuredReading, 3>> base;
    const std::vector<std::pair<double, double>> pts{{0, 0},    {45, 0},   {90, 0},   {135, 0},  {180, 0},  {45, 45},
                                                     {90, 45},  {135, 45}, {45, 90},  {90, 90},  {135, 90}, {45, 135},
                                                     {90, 135}, {135, 135}};
    for (auto [t, p] : pts) base.push_back(readings_of(PoincareState::from_degrees(t, p)));
    double previous = 1.0 + 1e-12;
    for (double sigma : {0.0, 1.0, 2.0, 4.0}) {
        double sum = 0;
        int count = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto target = PoincareState::from_degrees(pts[i].first, pts[i].second);
            for (std::uint64_t seed = 0; seed < 100; ++seed) {
                const auto e = estimate_state(perturb_readings(base[i], deg2rad(sigma), mix_seed(seed, i)), target);
                sum += *e.fidelity_vs_target;
                ++count;
            }
        }
        const double mean = sum / count;
        MESSAGE("sigma " << sigma << " deg: mean fidelity " << mean);
        CHECK(mean <= previous);
        previous = mean;
    }
}

TEST_CASE("perturbation is reproducible and keeps alpha in range")
{
    const auto r = exact_readings(PoincareState::from_degrees(60, 30));
    const auto a = perturb_readings(r, deg2rad(5), 17), b = perturb_readings(r, deg2rad(5), 17);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a[i].reading.alpha == b[i].reading.alpha);
        CHECK(a[i].reading.alpha >= 0.0);
        CHECK(a[i].reading.alpha < kPi);
    }
    CHECK(perturb_readings(r, 0.0, 3)[0].reading.alpha == r[0].reading.alpha);
}
