#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "oam/io.hpp"

using namespace oam;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "oam_io_test";
    fs::create_directories(dir);
    return dir / name;
}

GridSpec small_grid()
{
    GridSpec g = GridSpec::defaults();
    g.n = 64;
    g.pitch = 8 * g.waist / 64;
    return g;
}

}  // namespace

TEST_CASE("grid json roundtrip")
{
    const GridSpec g = small_grid();
    CHECK(grid_from_json(grid_to_json(g)) == g);
    CHECK_THROWS(grid_from_json(nlohmann::json{{"n", 64}}));
}

TEST_CASE("16-bit images keep their grid and scale")
{
    const auto img = intensity(superpose(small_grid(), PoincareState::from_degrees(70, 30)));
    for (const char* name : {"a.pgm", "a.png"}) {
        CAPTURE(name);
        const auto path = scratch(name);
        write_image(path, img);
        const auto back = read_image(path);
        CHECK(back.grid() == img.grid());
        double worst = 0;
        for (std::size_t i = 0; i < img.pixels().size(); ++i)
            worst = std::max(worst, std::abs(back.pixels()[i] - img.pixels()[i]));
        CHECK(worst <= img.max() / 65535.0);
    }
}

TEST_CASE("foreign images use the fallback grid")
{
    const auto path = scratch("plain.pgm");
    {
        std::ofstream out(path);
        out << "P2\n# made by hand\n64 64\n255\n";
        for (int i = 0; i < 64 * 64; ++i) out << (i % 7) << (i % 16 == 15 ? "\n" : " ");
    }
    GridSpec fb = GridSpec::defaults();
    const auto img = read_image(path, fb);
    CHECK(img.n() == 64);
    CHECK(img.grid().pitch == fb.pitch);
    CHECK(img.at(3, 0) == Approx(3.0));
    const auto unit = read_image(path);
    CHECK(unit.grid().pitch == Approx(1.0));
}

TEST_CASE("bad image files")
{
    CHECK_THROWS_AS(read_image(scratch("missing.pgm")), IoError);
    const auto rect = scratch("rect.pgm");
    {
        std::ofstream out(rect);
        out << "P2\n4 2\n255\n0 1 2 3 4 5 6 7\n";
    }
    CHECK_THROWS_AS(read_image(rect), IoError);
    const auto junk = scratch("junk.png");
    {
        std::ofstream out(junk);
        out << "not a png";
    }
    CHECK_THROWS_AS(read_image(junk), IoError);
    CHECK_THROWS_AS(read_image(scratch("x.tif")), IoError);
}

TEST_CASE("raw field roundtrip")
{
    const auto f = superpose(small_grid(), PoincareState::from_degrees(20, 300));
    const auto path = scratch("field.bin");
    write_field(path, f);
    CHECK(fs::file_size(path) == f.values.size() * 16);
    const auto back = read_field(path);
    CHECK(back.grid == f.grid);
    CHECK(back.values == f.values);
}

TEST_CASE("state and reading json")
{
    const auto s = PoincareState::from_degrees(30, 250);
    const auto j = state_to_json(s);
    CHECK(j["theta_deg"].get<double>() == Approx(30));
    CHECK(j["degenerate_phi"].get<bool>() == false);
    const auto back = state_from_json(j);
    CHECK(fidelity(back, s) == Approx(1.0));
    CHECK(state_to_json(PoincareState::from_degrees(0, 0))["degenerate_phi"].get<bool>());

    ImageReading r;
    r.alpha = deg2rad(12);
    r.visibility = 0.5;
    const auto jr = reading_to_json(r);
    CHECK(jr["alpha_deg"].get<double>() == Approx(12));
    CHECK(jr.contains("com_px"));
    CHECK(jr.contains("eta_min_deg"));
}
