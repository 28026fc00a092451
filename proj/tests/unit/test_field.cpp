#include <doctest.h>

#include <algorithm>

#include "oam/astig.hpp"
#include "oam/field.hpp"

using namespace oam;
using doctest::Approx;

namespace {

const GridSpec kGrid = GridSpec::defaults();

double bilinear(const IntensityImage& img, double x, double y)
{
    const int i = static_cast<int>(std::floor(x)), j = static_cast<int>(std::floor(y));
    const double fx = x - i, fy = y - j;
    return (1 - fx) * (1 - fy) * img.at(i, j) + fx * (1 - fy) * img.at(i + 1, j) + (1 - fx) * fy * img.at(i, j + 1) +
           fx * fy * img.at(i + 1, j + 1);
}

// Intensity around the circle of radius w0 / sqrt(2) (the doughnut ridge).
std::vector<double> ring(const IntensityImage& img, int samples = 720)
{
    const double r = img.grid().waist / std::sqrt(2.0) / img.grid().pitch;
    const double c = img.n() / 2;
    std::vector<double> out;
    for (int k = 0; k < samples; ++k) {
        const double a = kTwoPi * k / samples;
        out.push_back(bilinear(img, c + r * std::cos(a), c + r * std::sin(a)));
    }
    return out;
}

double ring_visibility(const IntensityImage& img)
{
    const auto v = ring(img);
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return (*hi - *lo) / (*hi + *lo);
}

}  // namespace

TEST_CASE("grid validation")
{
    CHECK_NOTHROW(kGrid.validate());
    CHECK(kGrid.window() == Approx(8 * kGrid.waist));
    CHECK(kGrid.wavelength == Approx(633e-9));
    GridSpec g = kGrid;
    g.n = 100;
    CHECK_THROWS_AS(g.validate(), InvalidGrid);
    g = kGrid;
    g.n = 32;
    CHECK_THROWS_AS(g.validate(), InvalidGrid);
    g = kGrid;
    g.pitch = 5 * kGrid.waist / kGrid.n;
    CHECK_THROWS_AS(g.validate(), InvalidGrid);
    g = kGrid;
    g.wavelength = -1;
    CHECK_THROWS_AS(g.validate(), InvalidGrid);
}

TEST_CASE("LG modes: null on axis, phase anchor, orthogonality, unit power")
{
    const auto p = lg_field(kGrid, +1), m = lg_field(kGrid, -1);
    const int c = kGrid.n / 2;
    CHECK(std::abs(p.at(c, c)) == 0.0);
    CHECK(std::abs(std::arg(p.at(c + 10, c))) < 1e-12);
    CHECK(std::arg(p.at(c, c + 10)) == Approx(kPi / 2));
    CHECK(std::arg(m.at(c, c + 10)) == Approx(-kPi / 2));
    CHECK(std::abs(inner_product(p, m)) < 1e-10);
    CHECK(p.power() == Approx(1.0).epsilon(1e-12));
    CHECK_THROWS(lg_field(kGrid, 2));
}

TEST_CASE("superposition intensity patterns")
{
    const auto lg = intensity(superpose(kGrid, PoincareState::from_degrees(0, 0)));
    const auto r = ring(lg);
    double mean = 0, var = 0;
    for (double x : r) mean += x / r.size();
    for (double x : r) var += (x - mean) * (x - mean) / r.size();
    CHECK(var / (mean * mean) < 1e-6);

    const auto hg = intensity(superpose(kGrid, PoincareState::from_degrees(90, 0)));
    const int c = kGrid.n / 2, d = static_cast<int>(kGrid.waist / std::sqrt(2.0) / kGrid.pitch);
    CHECK(hg.at(c + d, c) > 100 * hg.at(c, c + d));
    // azimuthal profile proportional to cos^2
    const auto hr = ring(hg, 8);
    CHECK(hr[2] < 1e-12 * hr[0]);
    CHECK(hr[1] == Approx(0.5 * hr[0]).epsilon(1e-3));

    for (double t : {30.0, 60.0, 90.0}) {
        CAPTURE(t);
        const auto img = intensity(superpose(kGrid, PoincareState::from_degrees(t, 40)));
        CHECK(ring_visibility(img) == Approx(std::sin(deg2rad(t))).epsilon(1e-3));
    }
}

TEST_CASE("every first-order state vanishes on axis")
{
    for (double t = 0; t <= 180; t += 30)
        for (double p = 0; p < 360; p += 60) {
            const auto img = intensity(superpose(kGrid, PoincareState::from_degrees(t, p)));
            CHECK(img.at(kGrid.n / 2, kGrid.n / 2) < 1e-6 * img.max());
        }
}

TEST_CASE("HG modes")
{
    const auto h0 = intensity(hg_field(kGrid, 0.0));
    const int c = kGrid.n / 2;
    CHECK(h0.at(c + 30, c) > 100 * h0.at(c, c + 30));

    const auto h45 = hg_field(kGrid, kPi / 4);
    const auto s = superpose(kGrid, PoincareState::from_degrees(90, 90));
    CHECK(std::abs(inner_product(h45, s)) == Approx(std::sqrt(h45.power() * s.power())).epsilon(1e-12));

    for (double a : {0.0, 0.3, 1.1}) CHECK(std::abs(inner_product(hg_field(kGrid, a), hg_field(kGrid, a + kPi / 2))) < 1e-10);
}

TEST_CASE("intensity and the doughnut radius")
{
    const auto f = lg_field(kGrid, 1);
    const auto img = intensity(f);
    CHECK(img.total() * kGrid.pitch * kGrid.pitch == Approx(f.power()).epsilon(1e-12));
    int best = 0;
    const int c = kGrid.n / 2;
    for (int i = c; i < kGrid.n; ++i)
        if (img.at(i, c) > img.at(best, c)) best = i;
    const double r = (best - c) * kGrid.pitch;
    CHECK(std::abs(r - kGrid.waist / std::sqrt(2.0)) <= kGrid.pitch);
    CHECK_THROWS_AS(IntensityImage(kGrid, std::vector<double>(10, 0.0)), InvalidGrid);
    std::vector<double> neg(kGrid.size(), 0.0);
    neg[3] = -1.0;
    CHECK_THROWS_AS(IntensityImage(kGrid, neg), InvalidGrid);
}

TEST_CASE("mode basis renders the same image as the field pipeline")
{
    const ModeBasis basis(kGrid);
    const auto s = PoincareState::from_degrees(72, 211);
    const auto a = basis.render(s), b = intensity(superpose(kGrid, s));
    double worst = 0;
    for (std::size_t i = 0; i < a.pixels().size(); ++i) worst = std::max(worst, std::abs(a.pixels()[i] - b.pixels()[i]));
    CHECK(worst < 1e-12 * a.max());
}

TEST_CASE("tilted lens mask")
{
    GridSpec g = kGrid;
    g.n = 64;
    g.pitch = 8 * g.waist / 64;
    const double k = kTwoPi / g.wavelength, f = 0.336;
    const auto flat = tilted_lens_mask(g, {f, 0.0, 0.7});
    const auto tilted = tilted_lens_mask(g, {f, deg2rad(27), kPi / 2});
    const double xi = deg2rad(27);
    for (int j = 0; j < 64; j += 7)
        for (int i = 0; i < 64; i += 5) {
            const double x = g.coordinate(i), y = g.coordinate(j);
            CHECK(std::abs(flat.at(i, j) - std::polar(1.0, -k / (2 * f) * (x * x + y * y))) < 1e-9);
            const double xb = (x + y) / std::sqrt(2.0), yb = (y - x) / std::sqrt(2.0);
            const double phi = -k / (2 * f) * (xb * xb / std::cos(xi) + std::cos(xi) * yb * yb);
            CHECK(std::abs(tilted.at(i, j) - std::polar(1.0, phi)) < 1e-9);
        }
    CHECK_THROWS(LensSpec{-1.0, 0.0, 0.0}.validate());
    CHECK_THROWS(LensSpec{0.3, kPi / 2, 0.0}.validate());
}

TEST_CASE("noise model")
{
    const auto img = intensity(hg_field(kGrid, 0.2));
    const auto same = add_noise(img, 1, {});
    CHECK(same.pixels() == img.pixels());
    const auto a = add_noise(img, 42, NoiseModel::gaussian(0.05));
    const auto b = add_noise(img, 42, NoiseModel::gaussian(0.05));
    const auto c = add_noise(img, 43, NoiseModel::gaussian(0.05));
    CHECK(a.pixels() == b.pixels());
    CHECK(a.pixels() != c.pixels());
    CHECK(*std::min_element(a.pixels().begin(), a.pixels().end()) >= 0.0);

    // residual scale matches sigma * peak away from the clipping floor
    double s2 = 0;
    int count = 0;
    for (std::size_t i = 0; i < img.pixels().size(); ++i)
        if (img.pixels()[i] > 0.3 * img.max()) {
            s2 += std::pow(a.pixels()[i] - img.pixels()[i], 2);
            ++count;
        }
    CHECK(std::sqrt(s2 / count) == Approx(0.05 * img.max()).epsilon(0.05));

    const auto p = add_noise(img, 5, NoiseModel::poisson(1000));
    CHECK(p.total() == Approx(img.total()).epsilon(0.02));
    CHECK(mix_seed(1, 2, 3) != mix_seed(1, 3, 2));
}

TEST_CASE("image rotation")
{
    const auto img = intensity(hg_field(kGrid, 0.0));
    const auto rot = rotate_image(img, kPi / 2);
    const auto ref = intensity(hg_field(kGrid, kPi / 2));
    double worst = 0;
    for (std::size_t i = 0; i < img.pixels().size(); ++i) worst = std::max(worst, std::abs(rot.pixels()[i] - ref.pixels()[i]));
    CHECK(worst < 1e-9 * img.max());
}
