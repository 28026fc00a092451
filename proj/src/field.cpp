// SPDX-License-Identifier: Apache-2.0

#include "oam/field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include "oam/astig.hpp"
#include "oam/kernels.hpp"

namespace oam {

using cd = std::complex<double>;

void GridSpec::validate() const
{
    if (n < 64 || !std::has_single_bit(static_cast<unsigned>(n)))
        throw InvalidGrid("grid size must be a power of two >= 64, got " + std::to_string(n));
    if (!(pitch > 0.0) || !(wavelength > 0.0) || !(waist > 0.0))
        throw InvalidGrid("pitch, wavelength and waist must be positive");
    if (window() < 6.0 * waist * (1.0 - 1e-12))
        throw InvalidGrid("grid window must be at least 6 beam waists");
}

GridSpec GridSpec::defaults()
{
    GridSpec g;
    g.n = 256;
    g.wavelength = 633e-9;
    g.waist = 0.765e-3;
    g.pitch = 8.0 * g.waist / g.n;
    return g;
}

ComplexField::ComplexField(const GridSpec& g) : grid(g), values(g.size()) {}

ComplexField::ComplexField(const GridSpec& g, std::vector<cd> v) : grid(g), values(std::move(v))
{
    if (values.size() != grid.size()) throw InvalidGrid("field size does not match its grid");
}

double ComplexField::power() const
{
    double acc = 0.0;
    for (const cd& v : values) acc += std::norm(v);
    return acc * grid.pitch * grid.pitch;
}

cd inner_product(const ComplexField& a, const ComplexField& b)
{
    if (!(a.grid == b.grid)) throw InvalidGrid("inner product of fields on different grids");
    cd acc{0.0, 0.0};
    for (std::size_t k = 0; k < a.values.size(); ++k) acc += std::conj(a.values[k]) * b.values[k];
    return acc * (a.grid.pitch * a.grid.pitch);
}

IntensityImage::IntensityImage(const GridSpec& g, std::vector<double> pixels) : grid_(g), pixels_(std::move(pixels))
{
    if (pixels_.size() != grid_.size()) throw InvalidGrid("image size does not match its grid");
    for (double p : pixels_)
        if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidGrid("image pixels must be finite and non-negative");
}

double IntensityImage::total() const
{
    double acc = 0.0;
    for (double p : pixels_) acc += p;
    return acc;
}

double IntensityImage::max() const
{
    return pixels_.empty() ? 0.0 : *std::max_element(pixels_.begin(), pixels_.end());
}

void LensSpec::validate() const
{
    if (!(focal > 0.0)) throw InvalidGrid("lens focal length must be positive");
    if (!(tilt >= 0.0 && tilt < 0.5 * kPi)) throw InvalidGrid("lens tilt must lie in [0, 90) degrees");
    if (!std::isfinite(beta)) throw InvalidGrid("lens angle must be finite");
}

namespace {

void normalize_power(ComplexField& f)
{
    const double p = f.power();
    if (!(p > 0.0)) throw InvalidGrid("field has no power on this grid");
    const double s = 1.0 / std::sqrt(p);
    for (cd& v : f.values) v *= s;
}

template <typename Fn>
ComplexField sample(const GridSpec& grid, Fn&& fn)
{
    grid.validate();
    ComplexField f(grid);
    for (int j = 0; j < grid.n; ++j) {
        const double y = grid.coordinate(j);
        for (int i = 0; i < grid.n; ++i) f.at(i, j) = fn(grid.coordinate(i), y);
    }
    return f;
}

}  // namespace

ComplexField lg_field(const GridSpec& grid, int charge)
{
    if (charge != 1 && charge != -1) throw InvalidState("only topological charges +1 and -1 are supported");
    const double w = grid.waist;
    const double l = static_cast<double>(charge);
    ComplexField f = sample(grid, [&](double x, double y) {
        return cd{x / w, l * y / w} * std::exp(-(x * x + y * y) / (w * w));
    });
    normalize_power(f);
    return f;
}

ComplexField superpose(const GridSpec& grid, const PoincareState& s)
{
    ModeBasis basis(grid);
    ComplexField f = basis.field(amplitudes(s));
    normalize_power(f);
    return f;
}

ComplexField hg_field(const GridSpec& grid, double alpha)
{
    const double w = grid.waist;
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    ComplexField f = sample(grid, [&](double x, double y) {
        return cd{(x * ca + y * sa) / w, 0.0} * std::exp(-(x * x + y * y) / (w * w));
    });
    normalize_power(f);
    return f;
}

IntensityImage intensity(const ComplexField& field)
{
    std::vector<double> px(field.values.size());
    kernels::active().squared_modulus(field.values.data(), px.data(), px.size());
    return IntensityImage(field.grid, std::move(px));
}

ComplexField tilted_lens_mask(const GridSpec& grid, const LensSpec& lens)
{
    lens.validate();
    const double k = kTwoPi / grid.wavelength;
    const double c = std::cos(0.5 * lens.beta), s = std::sin(0.5 * lens.beta);
    const double sec_xi = 1.0 / std::cos(lens.tilt), cos_xi = std::cos(lens.tilt);
    const double scale = k / (2.0 * lens.focal);
    return sample(grid, [&](double x, double y) {
        const double xb = c * x + s * y;
        const double yb = -s * x + c * y;
        return std::polar(1.0, -scale * (sec_xi * xb * xb + cos_xi * yb * yb));
    });
}

ModeBasis::ModeBasis(const GridSpec& grid)
    : grid_(grid), plus_(lg_field(grid, +1)), minus_(lg_field(grid, -1))
{
}

ComplexField ModeBasis::field(const StateVector2& amps) const
{
    ComplexField f(grid_);
    for (std::size_t k = 0; k < f.values.size(); ++k)
        f.values[k] = amps.c_plus * plus_.values[k] + amps.c_minus * minus_.values[k];
    return f;
}

IntensityImage ModeBasis::render(const StateVector2& amps) const
{
    std::vector<double> px(grid_.size());
    kernels::active().superpose_intensity(plus_.values.data(), minus_.values.data(), amps.c_plus,
                                          amps.c_minus, px.data(), px.size());
    return IntensityImage(grid_, std::move(px));
}

IntensityImage ModeBasis::render(const PoincareState& s) const { return render(amplitudes(s)); }

namespace {

GridSpec oversampled(const GridSpec& nominal, int oversample)
{
    if (oversample < 1 || !std::has_single_bit(static_cast<unsigned>(oversample)))
        throw InvalidGrid("oversampling factor must be a power of two >= 1");
    nominal.validate();
    GridSpec g = nominal;
    g.n = nominal.n * oversample;
    g.pitch = nominal.pitch / oversample;
    return g;
}

}  // namespace

TiltedLensSimulator::TiltedLensSimulator(const GridSpec& nominal, double focal, double tilt, int oversample)
    : nominal_(nominal), focal_(focal), tilt_(tilt), oversample_(oversample),
      basis_(oversampled(nominal, oversample))
{
    LensSpec{focal, tilt, 0.0}.validate();
}

GridSpec TiltedLensSimulator::camera_grid() const
{
    GridSpec g = nominal_;
    g.pitch = nominal_.pitch / oversample_;
    // beam radius where the two astigmatic axes are each one Rayleigh range from focus
    g.waist = std::sqrt(2.0) * nominal_.wavelength * focal_ / (kPi * nominal_.waist);
    return g;
}

IntensityImage TiltedLensSimulator::measure(const PoincareState& s, double beta, double plane_offset) const
{
    return measure(amplitudes(s), beta, plane_offset);
}

IntensityImage TiltedLensSimulator::measure(const StateVector2& amps, double beta, double plane_offset) const
{
    const LensSpec programmed{focal_, tilt_, beta + kPi};
    ComplexField f = basis_.field(amps);
    const ComplexField mask = tilted_lens_mask(basis_.grid(), programmed);
    kernels::active().complex_multiply(f.values.data(), mask.values.data(), f.values.size());
    const ComplexField out = propagate(f, focal_ + plane_offset);

    const GridSpec cam = camera_grid();
    const int big = basis_.grid().n;
    const int start = big / 2 - cam.n / 2;
    std::vector<double> px(cam.size());
    for (int j = 0; j < cam.n; ++j) {
        const cd* row = out.values.data() + static_cast<std::size_t>(start + j) * big + start;
        kernels::active().squared_modulus(row, px.data() + static_cast<std::size_t>(j) * cam.n, cam.n);
    }
    return IntensityImage(cam, std::move(px));
}

IntensityImage simulate_tilted_lens_measurement(const GridSpec& nominal, const PoincareState& s,
                                                const LensSpec& lens, double plane_offset, int oversample)
{
    lens.validate();
    const TiltedLensSimulator sim(nominal, lens.focal, lens.tilt, oversample);
    return sim.measure(s, lens.beta, plane_offset);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c)
{
    auto fin = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return fin(fin(fin(a) ^ b) ^ c);
}

IntensityImage add_noise(const IntensityImage& img, std::uint64_t seed, const NoiseModel& model)
{
    if (!model.active()) return img;
    const double peak = img.max();
    if (!(peak > 0.0)) return img;
    boost::random::mt19937_64 rng(seed);
    std::vector<double> px = img.pixels();
    if (model.kind == NoiseModel::Kind::gaussian) {
        boost::random::normal_distribution<double> noise(0.0, model.sigma_rel * peak);
        for (double& p : px) p = std::max(0.0, p + noise(rng));
    } else {
        const double to_counts = model.poisson_scale / peak;
        for (double& p : px) {
            std::poisson_distribution<long long> counts(p * to_counts);
            p = p > 0.0 ? static_cast<double>(counts(rng)) / to_counts : 0.0;
        }
    }
    return IntensityImage(img.grid(), std::move(px));
}

IntensityImage rotate_image(const IntensityImage& img, double angle)
{
    const int n = img.n();
    const double c = std::cos(angle), s = std::sin(angle);
    const double mid = n / 2;
    std::vector<double> px(img.pixels().size(), 0.0);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            // inverse map: output pixel pulls from the source rotated by -angle
            const double dx = i - mid, dy = j - mid;
            const double sx = mid + c * dx + s * dy;
            const double sy = mid - s * dx + c * dy;
            if (sx < 0.0 || sy < 0.0 || sx > n - 1 || sy > n - 1) continue;
            const int i0 = std::min(static_cast<int>(sx), n - 2);
            const int j0 = std::min(static_cast<int>(sy), n - 2);
            const double ax = sx - i0, ay = sy - j0;
            const double top = img.at(i0, j0) * (1 - ax) + img.at(i0 + 1, j0) * ax;
            const double bot = img.at(i0, j0 + 1) * (1 - ax) + img.at(i0 + 1, j0 + 1) * ax;
            px[static_cast<std::size_t>(j) * n + i] = top * (1 - ay) + bot * ay;
        }
    }
    return IntensityImage(img.grid(), std::move(px));
}

}  // namespace oam
