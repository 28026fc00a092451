// SPDX-License-Identifier: Apache-2.0

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "oam/io.hpp"

namespace oam {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "raw field files assume a little-endian host");

json grid_to_json(const GridSpec& g)
{
    return {{"n", g.n}, {"pitch_m", g.pitch}, {"wavelength_m", g.wavelength}, {"waist_m", g.waist}};
}

GridSpec grid_from_json(const json& j)
{
    GridSpec g;
    g.n = j.at("n").get<int>();
    g.pitch = j.at("pitch_m").get<double>();
    g.wavelength = j.at("wavelength_m").get<double>();
    g.waist = j.at("waist_m").get<double>();
    return g;
}

namespace {

constexpr const char* kGridTag = "oam-grid";

std::string header_json(const IntensityImage& img)
{
    json j = grid_to_json(img.grid());
    j["peak"] = img.max();
    return j.dump();
}

std::vector<std::uint16_t> quantize(const IntensityImage& img)
{
    const double peak = img.max();
    std::vector<std::uint16_t> q(img.pixels().size(), 0);
    if (peak > 0.0)
        for (std::size_t k = 0; k < q.size(); ++k)
            q[k] = static_cast<std::uint16_t>(std::lround(img.pixels()[k] / peak * 65535.0));
    return q;
}

struct RawImage {
    int width = 0;
    int height = 0;
    double maxval = 0.0;
    std::vector<double> values;
    std::string meta;  // embedded grid JSON, if any
};

IntensityImage finish(const RawImage& raw, const fs::path& path, const std::optional<GridSpec>& fallback)
{
    if (raw.width != raw.height)
        throw IoError(path.string() + ": image must be square, got " + std::to_string(raw.width) + "x" +
                      std::to_string(raw.height));
    GridSpec g;
    double peak = raw.maxval;
    if (!raw.meta.empty()) {
        const json j = json::parse(raw.meta);
        g = grid_from_json(j);
        peak = j.value("peak", raw.maxval);
    } else if (fallback) {
        g = *fallback;
    } else {
        g.pitch = 1.0;
        g.wavelength = 1.0;
        g.waist = 1.0;
    }
    g.n = raw.width;
    std::vector<double> px(raw.values.size());
    const double scale = raw.maxval > 0.0 ? peak / raw.maxval : 0.0;
    for (std::size_t k = 0; k < px.size(); ++k) px[k] = raw.values[k] * scale;
    return IntensityImage(g, std::move(px));
}

// ---------------------------------------------------------------- PGM

class PgmTokens {
public:
    explicit PgmTokens(std::istream& in) : in_(in) {}

    std::string next()
    {
        std::string tok;
        int c;
        while ((c = in_.get()) != EOF) {
            if (c == '#') {
                std::string line;
                std::getline(in_, line);
                const std::string prefix = std::string(" ") + kGridTag + " ";
                if (line.rfind(prefix, 0) == 0) meta = line.substr(prefix.size());
                if (!tok.empty()) return tok;
                continue;
            }
            if (std::isspace(c)) {
                if (!tok.empty()) return tok;
                continue;
            }
            tok.push_back(static_cast<char>(c));
        }
        return tok;
    }

    int next_int()
    {
        const std::string t = next();
        try {
            return std::stoi(t);
        } catch (const std::exception&) {
            throw IoError("malformed PGM header near '" + t + "'");
        }
    }

    std::string meta;

private:
    std::istream& in_;
};

RawImage read_pgm_raw(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    PgmTokens tok(in);
    const std::string magic = tok.next();
    if (magic != "P5" && magic != "P2") throw IoError(path.string() + ": not a PGM file");
    RawImage raw;
    raw.width = tok.next_int();
    raw.height = tok.next_int();
    const int maxval = tok.next_int();
    if (raw.width <= 0 || raw.height <= 0 || maxval <= 0 || maxval > 65535)
        throw IoError(path.string() + ": invalid PGM header");
    raw.maxval = maxval;
    raw.meta = tok.meta;
    const std::size_t count = static_cast<std::size_t>(raw.width) * static_cast<std::size_t>(raw.height);
    raw.values.resize(count);
    if (magic == "P2") {
        for (auto& v : raw.values) v = tok.next_int();
    } else {
        const int bytes = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> buf(count * static_cast<std::size_t>(bytes));
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() != static_cast<std::streamsize>(buf.size())) throw IoError(path.string() + ": truncated PGM");
        for (std::size_t k = 0; k < count; ++k)
            raw.values[k] = bytes == 2 ? (buf[2 * k] << 8) | buf[2 * k + 1] : buf[k];
    }
    if (!tok.meta.empty()) raw.meta = tok.meta;
    return raw;
}

// ---------------------------------------------------------------- PNG

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct PngReadJob {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::vector<unsigned char> data;
    std::vector<png_bytep> rows;
    RawImage raw;
    int channels = 0;
    int depth = 0;
};

bool png_read_into(std::FILE* f, PngReadJob& job)
{
    if (setjmp(png_jmpbuf(job.png))) return false;
    png_init_io(job.png, f);
    png_read_info(job.png, job.info);
    const png_byte color = png_get_color_type(job.png, job.info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(job.png);
    if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(job.png, job.info) < 8) png_set_expand_gray_1_2_4_to_8(job.png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(job.png);
    png_read_update_info(job.png, job.info);

    job.raw.width = static_cast<int>(png_get_image_width(job.png, job.info));
    job.raw.height = static_cast<int>(png_get_image_height(job.png, job.info));
    job.channels = png_get_channels(job.png, job.info);
    job.depth = png_get_bit_depth(job.png, job.info);
    png_textp text = nullptr;
    int n_text = 0;
    if (png_get_text(job.png, job.info, &text, &n_text) > 0)
        for (int i = 0; i < n_text; ++i)
            if (std::string(text[i].key) == kGridTag) job.raw.meta = text[i].text;

    const std::size_t stride = png_get_rowbytes(job.png, job.info);
    job.data.resize(stride * static_cast<std::size_t>(job.raw.height));
    job.rows.resize(static_cast<std::size_t>(job.raw.height));
    for (std::size_t r = 0; r < job.rows.size(); ++r) job.rows[r] = job.data.data() + r * stride;
    png_read_image(job.png, job.rows.data());
    png_read_end(job.png, nullptr);
    return true;
}

RawImage read_png_raw(const fs::path& path)
{
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw IoError("cannot open " + path.string());
    PngReadJob job;
    job.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (job.png != nullptr) job.info = png_create_info_struct(job.png);
    if (job.png == nullptr || job.info == nullptr) {
        png_destroy_read_struct(&job.png, &job.info, nullptr);
        throw IoError("libpng initialization failed");
    }
    const bool ok = png_read_into(f.get(), job);
    png_destroy_read_struct(&job.png, &job.info, nullptr);
    if (!ok) throw IoError(path.string() + ": not a readable PNG file");
    if (job.channels != 1 && job.channels != 3) throw IoError(path.string() + ": unsupported PNG channel layout");

    RawImage raw = std::move(job.raw);
    const int bytes = job.depth == 16 ? 2 : 1;
    raw.maxval = bytes == 2 ? 65535.0 : 255.0;
    const std::size_t count = static_cast<std::size_t>(raw.width) * static_cast<std::size_t>(raw.height);
    raw.values.resize(count);
    const auto sample = [&](std::size_t idx) {
        const unsigned char* p = job.data.data() + idx * static_cast<std::size_t>(bytes);
        return bytes == 2 ? static_cast<double>((p[0] << 8) | p[1]) : static_cast<double>(p[0]);
    };
    for (std::size_t k = 0; k < count; ++k) {
        if (job.channels == 1) {
            raw.values[k] = sample(k);
        } else {
            raw.values[k] = (sample(3 * k) + sample(3 * k + 1) + sample(3 * k + 2)) / 3.0;
        }
    }
    return raw;
}

struct PngWriteJob {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::vector<unsigned char> data;
    std::vector<png_bytep> rows;
    std::string meta;
    int n = 0;
};

bool png_write_from(std::FILE* f, PngWriteJob& job)
{
    if (setjmp(png_jmpbuf(job.png))) return false;
    png_init_io(job.png, f);
    png_set_IHDR(job.png, job.info, static_cast<png_uint_32>(job.n), static_cast<png_uint_32>(job.n), 16,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_text text{};
    text.compression = PNG_TEXT_COMPRESSION_NONE;
    text.key = const_cast<char*>(kGridTag);
    text.text = job.meta.data();
    text.text_length = job.meta.size();
    png_set_text(job.png, job.info, &text, 1);
    png_write_info(job.png, job.info);
    png_write_image(job.png, job.rows.data());
    png_write_end(job.png, nullptr);
    return true;
}

}  // namespace

void write_pgm(const fs::path& path, const IntensityImage& img)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P5\n# " << kGridTag << ' ' << header_json(img) << '\n' << img.n() << ' ' << img.n() << "\n65535\n";
    const auto q = quantize(img);
    std::vector<unsigned char> buf(2 * q.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
        buf[2 * k] = static_cast<unsigned char>(q[k] >> 8);
        buf[2 * k + 1] = static_cast<unsigned char>(q[k] & 0xff);
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("failed writing " + path.string());
}

void write_png(const fs::path& path, const IntensityImage& img)
{
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw IoError("cannot write " + path.string());
    PngWriteJob job;
    job.n = img.n();
    job.meta = header_json(img);
    const auto q = quantize(img);
    job.data.resize(2 * q.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
        job.data[2 * k] = static_cast<unsigned char>(q[k] >> 8);
        job.data[2 * k + 1] = static_cast<unsigned char>(q[k] & 0xff);
    }
    job.rows.resize(static_cast<std::size_t>(job.n));
    for (std::size_t r = 0; r < job.rows.size(); ++r) job.rows[r] = job.data.data() + 2 * r * static_cast<std::size_t>(job.n);

    job.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (job.png != nullptr) job.info = png_create_info_struct(job.png);
    if (job.png == nullptr || job.info == nullptr) {
        png_destroy_write_struct(&job.png, &job.info);
        throw IoError("libpng initialization failed");
    }
    const bool ok = png_write_from(f.get(), job);
    png_destroy_write_struct(&job.png, &job.info);
    if (!ok) throw IoError("failed writing " + path.string());
}

IntensityImage read_image(const fs::path& path, const std::optional<GridSpec>& fallback)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") return finish(read_png_raw(path), path, fallback);
    if (ext == ".pgm") return finish(read_pgm_raw(path), path, fallback);
    throw IoError(path.string() + ": unsupported image type (expected .pgm or .png)");
}

void write_image(const fs::path& path, const IntensityImage& img)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png")
        write_png(path, img);
    else if (ext == ".pgm")
        write_pgm(path, img);
    else
        throw IoError(path.string() + ": unsupported image type (expected .pgm or .png)");
}

void write_field(const fs::path& path, const ComplexField& field)
{
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write " + path.string());
        out.write(reinterpret_cast<const char*>(field.values.data()),
                  static_cast<std::streamsize>(field.values.size() * sizeof(std::complex<double>)));
        if (!out) throw IoError("failed writing " + path.string());
    }
    std::ofstream side(path.string() + ".json");
    if (!side) throw IoError("cannot write " + path.string() + ".json");
    json j = grid_to_json(field.grid);
    j["format"] = "complex128-le";
    j["layout"] = "row-major, (re, im) pairs";
    side << j.dump(2) << '\n';
}

ComplexField read_field(const fs::path& path)
{
    std::ifstream side(path.string() + ".json");
    if (!side) throw IoError("missing sidecar " + path.string() + ".json");
    const GridSpec g = grid_from_json(json::parse(side));
    std::vector<std::complex<double>> values(g.size());
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    const auto bytes = static_cast<std::streamsize>(values.size() * sizeof(std::complex<double>));
    in.read(reinterpret_cast<char*>(values.data()), bytes);
    if (in.gcount() != bytes) throw IoError(path.string() + ": truncated field file");
    return ComplexField(g, std::move(values));
}

json state_to_json(const PoincareState& s)
{
    return {{"theta_deg", rad2deg(s.theta())}, {"phi_deg", rad2deg(s.phi())}, {"degenerate_phi", s.degenerate_phi()}};
}

PoincareState state_from_json(const json& j)
{
    return PoincareState::from_degrees(j.at("theta_deg").get<double>(), j.value("phi_deg", 0.0));
}

json reading_to_json(const ImageReading& r)
{
    return {{"alpha_deg", rad2deg(r.alpha)},
            {"visibility", r.visibility},
            {"eta_min_deg", rad2deg(r.eta_min)},
            {"com_px", {r.com.x, r.com.y}}};
}

}  // namespace oam
