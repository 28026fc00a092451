// SPDX-License-Identifier: Apache-2.0
//
// Run configuration and the commands behind the oam-tomo tool.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oam/calibration.hpp"
#include "oam/tomography.hpp"

namespace oam::cli {

/// Invalid user input; maps to exit code 2.
class UsageError : public Error {
public:
    using Error::Error;
};

enum class Pipeline { abstract, physical };

struct RunConfig {
    GridSpec grid = GridSpec::defaults();
    double focal = 0.336;
    double tilt = deg2rad(27.0);
    std::optional<double> plane_offset;  ///< physical pipeline camera plane; calibrated when absent
    int oversample = 4;
    Pipeline pipeline = Pipeline::abstract;

    NoiseModel image_noise;       ///< applied to every simulated image
    double alpha_sigma = 0.0;     ///< Gaussian noise added to each Method II alpha [rad]
    std::uint64_t seed = 1;

    double beta_step = deg2rad(2.0);
    AnalysisOptions analysis;
    Method1Options method1;
    EstimatorConfig estimator;
    CalibrationOptions calibration;

    // noisy pass of `reproduce`
    double reproduce_image_sigma = 0.05;
    double reproduce_alpha_sigma = deg2rad(2.0);
    int reproduce_seeds = 100;

    std::filesystem::path output_dir = "out";
    std::string image_format = "pgm";

    /// Throws UsageError describing the first violated constraint.
    void validate() const;
};

/// Unknown keys are rejected. Missing keys keep their defaults; when the grid
/// gives a waist but no pitch, the window is 8 waists.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);
RunConfig load_config(const std::filesystem::path& path);

/// Where the simulated images come from for one state.
std::unique_ptr<MeasurementSource> make_source(const RunConfig& cfg, const PoincareState& s, std::uint64_t seed);

/// Camera plane for the physical pipeline: the configured offset, a saved
/// calibration in the output directory, or a fresh calibration.
double resolve_plane_offset(const RunConfig& cfg);

/// Table 1 sample: the poles plus theta in {45, 90, 135} x phi in {0, 45, ..., 315} deg.
std::vector<PoincareState> table1_targets();
/// phi = 0, theta in {0, 45, 90, 135, 180} deg (points A to E).
std::vector<PoincareState> theta_sequence();
/// theta = 135 deg, phi in {0, 45, ..., 315} deg (points D1 to D8).
std::vector<PoincareState> phi_sequence();

struct Table1Row {
    int point = 0;
    PoincareState target;
    TriangleEstimate estimate;
};

/// Columns: point, theta_t, phi_t, theta_e, d_theta, phi_e, d_phi, fidelity, d_fidelity, branch (degrees).
nlohmann::json table1_row_json(const Table1Row& row);
std::string table1_csv_header();
std::string table1_csv_line(const Table1Row& row);

// Commands. Each returns the process exit code and writes under cfg.output_dir.
enum class RenderSet { direct, converter, triplet, scan };
/// direct: the prepared state; converter: one converted image at `converter_beta`;
/// triplet: the three Method II images; scan: the direct image plus the Method I converter scan.
int cmd_render(const RunConfig& cfg, const PoincareState& s, RenderSet set, double converter_beta = 0.0);
int cmd_calibrate(const RunConfig& cfg);
int cmd_method1(const RunConfig& cfg, const std::optional<PoincareState>& s,
                const std::optional<std::filesystem::path>& image_dir);
int cmd_method2(const RunConfig& cfg, const std::optional<PoincareState>& s,
                const std::optional<std::filesystem::path>& image_prefix);
int cmd_reproduce(const RunConfig& cfg, const std::string& target);

}  // namespace oam::cli
