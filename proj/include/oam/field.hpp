// SPDX-License-Identifier: Apache-2.0
//
// Transverse field synthesis and the simulated camera.
//
// Grids are square, n x n, row-major. Column i maps to x = (i - n/2) * pitch
// and row j to y = (j - n/2) * pitch, so pixel (n/2, n/2) sits on the optical
// axis. Angles in the image plane are measured from +x towards +y.

#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "oam/state.hpp"

namespace oam {

class InvalidGrid : public Error {
public:
    using Error::Error;
};

class AliasingRisk : public Error {
public:
    using Error::Error;
};

struct GridSpec {
    int n = 256;              ///< pixels per side, power of two, >= 64
    double pitch = 0.0;       ///< pixel size [m]
    double wavelength = 0.0;  ///< [m]
    double waist = 0.0;       ///< nominal beam radius in this plane [m]

    /// Throws InvalidGrid when an invariant fails.
    void validate() const;

    double window() const { return n * pitch; }
    double coordinate(int index) const { return (index - n / 2) * pitch; }
    std::size_t size() const { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n); }

    /// n = 256, lambda = 633 nm, w0 = 0.765 mm, window = 8 w0.
    static GridSpec defaults();

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct ComplexField {
    GridSpec grid;
    std::vector<std::complex<double>> values;

    ComplexField() = default;
    explicit ComplexField(const GridSpec& g);
    ComplexField(const GridSpec& g, std::vector<std::complex<double>> v);

    std::complex<double>& at(int i, int j) { return values[static_cast<std::size_t>(j) * grid.n + i]; }
    const std::complex<double>& at(int i, int j) const { return values[static_cast<std::size_t>(j) * grid.n + i]; }

    /// sum |value|^2 * pitch^2
    double power() const;
};

/// <a|b> = sum conj(a) b * pitch^2 on a shared grid.
std::complex<double> inner_product(const ComplexField& a, const ComplexField& b);

class IntensityImage {
public:
    IntensityImage() = default;
    /// Throws InvalidGrid on size mismatch, negative or non-finite pixels.
    IntensityImage(const GridSpec& g, std::vector<double> pixels);

    const GridSpec& grid() const { return grid_; }
    int n() const { return grid_.n; }
    const std::vector<double>& pixels() const { return pixels_; }
    double at(int i, int j) const { return pixels_[static_cast<std::size_t>(j) * grid_.n + i]; }
    double total() const;
    double max() const;

private:
    GridSpec grid_;
    std::vector<double> pixels_;
};

/// Tilted spherical thin lens. beta is a Poincare-frame angle: the lens
/// coordinate x_beta is at beta/2 from the horizontal.
struct LensSpec {
    double focal = 0.336;          ///< [m]
    double tilt = deg2rad(27.0);   ///< xi [rad], 0 <= xi < pi/2
    double beta = 0.0;             ///< [rad]

    void validate() const;
};

/// p = 0, |l| = 1 Laguerre-Gaussian at its waist: ((x + i l y)/w0) exp(-r^2/w0^2),
/// unit power on the grid. charge must be +1 or -1.
ComplexField lg_field(const GridSpec& grid, int charge);

/// cos(theta/2) LG+ + e^{i phi} sin(theta/2) LG-, unit power.
ComplexField superpose(const GridSpec& grid, const PoincareState& s);

/// First-order Hermite-Gaussian with lobes along alpha: ((x cos a + y sin a)/w0) exp(-r^2/w0^2).
ComplexField hg_field(const GridSpec& grid, double alpha);

IntensityImage intensity(const ComplexField& field);

/// Pure-phase transmission exp[-i k/(2f) (sec(xi) x_b^2 + cos(xi) y_b^2)],
/// x_b = cos(beta/2) x + sin(beta/2) y, y_b = -sin(beta/2) x + cos(beta/2) y.
ComplexField tilted_lens_mask(const GridSpec& grid, const LensSpec& lens);

/// Fraction of spectral power the band-limited angular-spectrum transfer
/// function would discard for this field and distance.
double band_limit_loss(const ComplexField& field, double distance);

/// Band-limited angular-spectrum propagation. Throws AliasingRisk when more
/// than `max_loss` of the power falls outside the sampled passband.
ComplexField propagate(const ComplexField& field, double distance, double max_loss = 1e-9);

/// LG+ and LG- precomputed on one grid, for fast rendering of many superpositions.
class ModeBasis {
public:
    explicit ModeBasis(const GridSpec& grid);

    const GridSpec& grid() const { return grid_; }
    const ComplexField& plus() const { return plus_; }
    const ComplexField& minus() const { return minus_; }

    /// Field c_plus LG+ + c_minus LG- (amplitudes are used as given).
    ComplexField field(const StateVector2& amps) const;
    /// |c_plus LG+ + c_minus LG-|^2
    IntensityImage render(const StateVector2& amps) const;
    IntensityImage render(const PoincareState& s) const;

private:
    GridSpec grid_;
    ComplexField plus_;
    ComplexField minus_;
};

/// Tilted-lens converter simulation: prepared field -> lens mask -> free
/// propagation to f + plane_offset -> camera.
///
/// The simulation grid has the nominal window and `oversample` times the
/// nominal pixel count; the camera image is the central nominal-size crop, so
/// its pitch is pitch / oversample. The converter MC(beta) is realized by the
/// mask programmed with beta + pi: under e^{+ikz} propagation the sec(xi) axis
/// focuses first, and the mode along it lags by pi/2, which is MC(beta + pi)
/// in the LG+ ~ e^{+i phi} convention.
class TiltedLensSimulator {
public:
    TiltedLensSimulator(const GridSpec& nominal, double focal, double tilt, int oversample = 4);

    const GridSpec& nominal_grid() const { return nominal_; }
    const GridSpec& simulation_grid() const { return basis_.grid(); }
    /// Grid of the returned camera images.
    GridSpec camera_grid() const;
    double focal() const { return focal_; }
    double tilt() const { return tilt_; }

    /// Image at distance focal + plane_offset behind a lens realizing MC(beta).
    IntensityImage measure(const PoincareState& s, double beta, double plane_offset) const;
    IntensityImage measure(const StateVector2& amps, double beta, double plane_offset) const;

private:
    GridSpec nominal_;
    double focal_;
    double tilt_;
    int oversample_;
    ModeBasis basis_;
};

/// One-shot form of TiltedLensSimulator::measure for `lens` (lens.beta is the
/// realized converter angle).
IntensityImage simulate_tilted_lens_measurement(const GridSpec& nominal, const PoincareState& s,
                                                const LensSpec& lens, double plane_offset,
                                                int oversample = 4);

struct NoiseModel {
    enum class Kind { none, gaussian, poisson };
    Kind kind = Kind::none;
    double sigma_rel = 0.0;      ///< gaussian: sigma as a fraction of the image peak
    double poisson_scale = 0.0;  ///< poisson: expected counts at the image peak

    static NoiseModel gaussian(double sigma_rel) { return {Kind::gaussian, sigma_rel, 0.0}; }
    static NoiseModel poisson(double peak_counts) { return {Kind::poisson, 0.0, peak_counts}; }
    bool active() const
    {
        return (kind == Kind::gaussian && sigma_rel > 0.0) || (kind == Kind::poisson && poisson_scale > 0.0);
    }
};

/// Deterministic for a given seed. Negative results are clipped to 0.
IntensityImage add_noise(const IntensityImage& img, std::uint64_t seed, const NoiseModel& model);

/// Mixes several integers into one well-spread seed (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

/// Rotates an image by `angle` about the pixel (n/2, n/2) with bilinear resampling.
IntensityImage rotate_image(const IntensityImage& img, double angle);

}  // namespace oam
