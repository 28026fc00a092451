#include <doctest.h>

#include <random>
#include <vector>

#include "oam/kernels.hpp"

using namespace oam::kernels;
using doctest::Approx;

namespace {

std::vector<cdouble> random_complex(std::size_t n, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    std::vector<cdouble> v(n);
    for (auto& z : v) z = {g(rng), g(rng)};
    return v;
}

std::vector<double> random_image(std::size_t n, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(n * n);
    for (auto& x : v) x = u(rng);
    return v;
}

const KernelTable* vector_table()
{
    const KernelTable* t = avx2_kernels();
    if (!t) MESSAGE("no AVX2 kernels on this build or CPU; comparing the scalar table with itself");
    return t ? t : &scalar_kernels();
}

}  // namespace

TEST_CASE("active table is one of the known tables")
{
    const auto& a = active();
    CHECK((&a == &scalar_kernels() || &a == avx2_kernels()));
    MESSAGE("active kernels: " << a.name);
}

TEST_CASE("scalar reference values")
{
    const auto& s = scalar_kernels();
    std::vector<cdouble> x{{1, 2}, {3, -1}, {0, 1}};
    const std::vector<cdouble> f{{0, 1}, {2, 0}, {0, 1}};
    s.complex_multiply(x.data(), f.data(), x.size());
    CHECK(x[0] == cdouble(-2, 1));
    CHECK(x[1] == cdouble(6, -2));
    CHECK(x[2] == cdouble(-1, 0));

    std::vector<double> m(3);
    s.squared_modulus(x.data(), m.data(), 3);
    CHECK(m[0] == Approx(5));
    CHECK(m[1] == Approx(40));

    // 3x3 image with a single bright pixel at (2, 1)
    std::vector<double> img(9, 0.0);
    img[1 * 3 + 2] = 4.0;
    const Moments mo = s.moments(img.data(), 3);
    CHECK(mo.sum == Approx(4));
    CHECK(mo.sum_x / mo.sum == Approx(2));
    CHECK(mo.sum_y / mo.sum == Approx(1));

    // chord along row 1 of a ramp image: samples at x = 0, 0.5, ..., 2
    std::vector<double> ramp{0, 1, 2, 0, 1, 2, 0, 1, 2};
    CHECK(s.chord_sum(ramp.data(), 3, {0.0, 1.0, 0.5, 0.0, 5}) == Approx(0 + 0.5 + 1 + 1.5 + 2));
}

TEST_CASE("vector kernels match the scalar reference")
{
    const auto& s = scalar_kernels();
    const auto& v = *vector_table();
    std::mt19937_64 rng(2024);

    for (std::size_t len : {0u, 1u, 3u, 4u, 5u, 7u, 64u, 1023u}) {
        CAPTURE(len);
        const auto f = random_complex(len, rng);
        auto a = random_complex(len, rng);
        auto b = a;
        s.complex_multiply(a.data(), f.data(), len);
        v.complex_multiply(b.data(), f.data(), len);
        for (std::size_t i = 0; i < len; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-14 * (1 + std::abs(a[i])));

        std::vector<double> ms(len), mv(len);
        s.squared_modulus(a.data(), ms.data(), len);
        v.squared_modulus(a.data(), mv.data(), len);
        for (std::size_t i = 0; i < len; ++i) CHECK(ms[i] == Approx(mv[i]).epsilon(1e-14));

        const auto p = random_complex(len, rng), q = random_complex(len, rng);
        const cdouble ca{0.6, -0.2}, cb{0.1, 0.77};
        s.superpose_intensity(p.data(), q.data(), ca, cb, ms.data(), len);
        v.superpose_intensity(p.data(), q.data(), ca, cb, mv.data(), len);
        for (std::size_t i = 0; i < len; ++i) CHECK(std::abs(ms[i] - mv[i]) <= 1e-13 * (1 + ms[i]));
    }

    for (std::size_t n : {5u, 8u, 31u, 64u}) {
        CAPTURE(n);
        const auto img = random_image(n, rng);
        const Moments a = s.moments(img.data(), n), b = v.moments(img.data(), n);
        CHECK(a.sum == Approx(b.sum).epsilon(1e-12));
        CHECK(a.sum_x == Approx(b.sum_x).epsilon(1e-12));
        CHECK(a.sum_y == Approx(b.sum_y).epsilon(1e-12));

        const SplitLine line{n / 2.0 - 0.3, n / 2.0 + 0.2, std::cos(0.7), std::sin(0.7), 0.5};
        const SplitMoments sa = s.split_moments(img.data(), n, line), sb = v.split_moments(img.data(), n, line);
        CHECK(sa.positive.sum == Approx(sb.positive.sum).epsilon(1e-12));
        CHECK(sa.positive.sum_x == Approx(sb.positive.sum_x).epsilon(1e-12));
        CHECK(sa.negative.sum_y == Approx(sb.negative.sum_y).epsilon(1e-12));

        std::uniform_real_distribution<double> ang(0.0, 6.283);
        for (int k = 0; k < 20; ++k) {
            const double t = ang(rng), r = (n - 1) / 2.0 * 0.999;
            const double c = (n - 1) / 2.0;
            const std::size_t count = 2 * static_cast<std::size_t>(r / 0.5) + 1;
            const Chord ch{c - r * std::cos(t), c - r * std::sin(t), 0.5 * std::cos(t), 0.5 * std::sin(t), count};
            CHECK(s.chord_sum(img.data(), n, ch) == Approx(v.chord_sum(img.data(), n, ch)).epsilon(1e-12));
        }
    }
}

TEST_CASE("split moments exclude the ridge")
{
    const auto& s = scalar_kernels();
    // column 2 lies on the split line x = 2 and belongs to neither side
    std::vector<double> img(25, 1.0);
    const SplitMoments m = s.split_moments(img.data(), 5, {2.0, 2.0, 1.0, 0.0, 0.5});
    CHECK(m.positive.sum == Approx(10));
    CHECK(m.negative.sum == Approx(10));
    CHECK(m.positive.sum_x / m.positive.sum == Approx(3.5));
}
