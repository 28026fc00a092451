// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <string_view>

#include "oam/cli.hpp"
#include "oam/io.hpp"

namespace oam::cli {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed)
{
    if (!j.is_object()) throw UsageError(std::string(where) + " must be a JSON object");
    for (const auto& item : j.items()) {
        bool ok = false;
        for (auto a : allowed) ok |= item.key() == a;
        if (!ok) throw UsageError("unknown config key '" + std::string(where) + "." + item.key() + "'");
    }
}

template <typename T>
void read(const json& j, const char* key, T& out)
{
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw UsageError(std::string("config key '") + key + "': " + e.what());
    }
}

void read_deg(const json& j, const char* key, double& out_rad)
{
    double deg = rad2deg(out_rad);
    read(j, key, deg);
    out_rad = deg2rad(deg);
}

}  // namespace

void RunConfig::validate() const
{
    try {
        grid.validate();
        LensSpec{focal, tilt, 0.0}.validate();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    if (oversample < 1 || (oversample & (oversample - 1)) != 0) throw UsageError("lens.oversample must be a power of two");
    if (plane_offset && !std::isfinite(*plane_offset)) throw UsageError("lens.plane_offset_m must be finite");
    if (image_noise.sigma_rel < 0.0 || image_noise.poisson_scale < 0.0 || alpha_sigma < 0.0)
        throw UsageError("noise levels must be non-negative");
    if (!(beta_step > 0.0) || beta_step > deg2rad(2.0) + 1e-12)
        throw UsageError("method1.beta_step_deg must lie in (0, 2]");
    if (std::abs(std::round(kTwoPi / beta_step) * beta_step - kTwoPi) > 1e-9)
        throw UsageError("method1.beta_step_deg must divide 360");
    if (analysis.n_samples < 90 || method1.scan_samples < 90) throw UsageError("line scans need at least 90 angles");
    if (analysis.floor_percentile < 0.0 || analysis.floor_percentile >= 100.0)
        throw UsageError("analysis.floor_percentile must lie in [0, 100)");
    if (analysis.aperture_rings != 0.0 && !(analysis.aperture_rings >= 1.0))
        throw UsageError("analysis.aperture_rings must be 0 or at least 1");
    if (!(estimator.blind_threshold >= 0.0 && estimator.blind_threshold < 1.0))
        throw UsageError("tomography.blind_threshold must lie in [0, 1)");
    if (!(estimator.narrow_ratio > 0.0 && estimator.narrow_ratio <= 1.0))
        throw UsageError("tomography.narrow_ratio must lie in (0, 1]");
    if (!(estimator.membership_tol > 0.0)) throw UsageError("tomography.membership_tol_rad must be positive");
    if (!(calibration.step > 0.0) || calibration.span < 0.0) throw UsageError("invalid calibration scan");
    if (reproduce_seeds < 1) throw UsageError("reproduce.seeds must be at least 1");
    if (reproduce_image_sigma < 0.0 || reproduce_alpha_sigma < 0.0)
        throw UsageError("reproduce noise levels must be non-negative");
    if (image_format != "pgm" && image_format != "png") throw UsageError("image_format must be 'pgm' or 'png'");
}

RunConfig config_from_json(const json& j)
{
    RunConfig c;
    check_keys(j, "config", {"grid", "lens", "pipeline", "noise", "seed", "method1", "analysis", "tomography",
                             "calibration", "reproduce", "output", "image_format"});

    if (j.contains("grid")) {
        const json& g = j["grid"];
        check_keys(g, "grid", {"n", "pitch_m", "wavelength_m", "waist_m"});
        read(g, "n", c.grid.n);
        read(g, "wavelength_m", c.grid.wavelength);
        read(g, "waist_m", c.grid.waist);
        c.grid.pitch = 8.0 * c.grid.waist / c.grid.n;
        read(g, "pitch_m", c.grid.pitch);
    }
    if (j.contains("lens")) {
        const json& l = j["lens"];
        check_keys(l, "lens", {"focal_m", "tilt_deg", "plane_offset_m", "oversample"});
        read(l, "focal_m", c.focal);
        read_deg(l, "tilt_deg", c.tilt);
        read(l, "oversample", c.oversample);
        if (l.contains("plane_offset_m") && !l["plane_offset_m"].is_null()) {
            double z = 0.0;
            read(l, "plane_offset_m", z);
            c.plane_offset = z;
        }
    }
    if (j.contains("pipeline")) {
        const std::string p = j["pipeline"].is_string() ? j["pipeline"].get<std::string>() : "";
        if (p == "abstract")
            c.pipeline = Pipeline::abstract;
        else if (p == "physical")
            c.pipeline = Pipeline::physical;
        else
            throw UsageError("pipeline must be 'abstract' or 'physical'");
    }
    if (j.contains("noise")) {
        const json& n = j["noise"];
        check_keys(n, "noise", {"image_sigma_rel", "poisson_peak", "alpha_sigma_deg"});
        double sigma = 0.0, peak = 0.0;
        read(n, "image_sigma_rel", sigma);
        read(n, "poisson_peak", peak);
        if (sigma > 0.0 && peak > 0.0) throw UsageError("choose either image_sigma_rel or poisson_peak");
        if (sigma != 0.0) c.image_noise = NoiseModel::gaussian(sigma);
        if (peak != 0.0) c.image_noise = NoiseModel::poisson(peak);
        read_deg(n, "alpha_sigma_deg", c.alpha_sigma);
    }
    read(j, "seed", c.seed);
    if (j.contains("method1")) {
        const json& m = j["method1"];
        check_keys(m, "method1", {"beta_step_deg", "scan_samples", "flat_spread", "pole_gate"});
        read_deg(m, "beta_step_deg", c.beta_step);
        read(m, "scan_samples", c.method1.scan_samples);
        read(m, "flat_spread", c.method1.flat_spread);
        read(m, "pole_gate", c.method1.pole_gate);
    }
    if (j.contains("analysis")) {
        const json& a = j["analysis"];
        check_keys(a, "analysis", {"n_samples", "floor_percentile", "ridge_exclusion_px", "low_visibility", "aperture_rings"});
        read(a, "n_samples", c.analysis.n_samples);
        read(a, "floor_percentile", c.analysis.floor_percentile);
        read(a, "ridge_exclusion_px", c.analysis.ridge_exclusion);
        read(a, "low_visibility", c.analysis.low_visibility_threshold);
        read(a, "aperture_rings", c.analysis.aperture_rings);
    }
    c.method1.analysis = c.analysis;
    c.calibration.analysis = c.analysis;
    if (j.contains("tomography")) {
        const json& t = j["tomography"];
        check_keys(t, "tomography",
                   {"blind_threshold", "narrow_ratio", "resolution_deg", "membership_tol_rad", "alpha_uncertainty_deg"});
        read(t, "blind_threshold", c.estimator.blind_threshold);
        read(t, "narrow_ratio", c.estimator.narrow_ratio);
        read_deg(t, "resolution_deg", c.estimator.resolution);
        read(t, "membership_tol_rad", c.estimator.membership_tol);
        read_deg(t, "alpha_uncertainty_deg", c.estimator.alpha_uncertainty);
    }
    if (j.contains("calibration")) {
        const json& k = j["calibration"];
        check_keys(k, "calibration", {"span_m", "step_m", "min_visibility"});
        read(k, "span_m", c.calibration.span);
        read(k, "step_m", c.calibration.step);
        read(k, "min_visibility", c.calibration.min_visibility);
    }
    if (j.contains("reproduce")) {
        const json& r = j["reproduce"];
        check_keys(r, "reproduce", {"image_sigma_rel", "alpha_sigma_deg", "seeds"});
        read(r, "image_sigma_rel", c.reproduce_image_sigma);
        read_deg(r, "alpha_sigma_deg", c.reproduce_alpha_sigma);
        read(r, "seeds", c.reproduce_seeds);
    }
    if (j.contains("output")) {
        std::string out;
        read(j, "output", out);
        c.output_dir = out;
    }
    read(j, "image_format", c.image_format);
    c.validate();
    return c;
}

json config_to_json(const RunConfig& c)
{
    json noise = {{"alpha_sigma_deg", rad2deg(c.alpha_sigma)}};
    noise["image_sigma_rel"] = c.image_noise.kind == NoiseModel::Kind::gaussian ? c.image_noise.sigma_rel : 0.0;
    noise["poisson_peak"] = c.image_noise.kind == NoiseModel::Kind::poisson ? c.image_noise.poisson_scale : 0.0;
    return {
        {"grid", grid_to_json(c.grid)},
        {"lens",
         {{"focal_m", c.focal},
          {"tilt_deg", rad2deg(c.tilt)},
          {"plane_offset_m", c.plane_offset ? json(*c.plane_offset) : json(nullptr)},
          {"oversample", c.oversample}}},
        {"pipeline", c.pipeline == Pipeline::abstract ? "abstract" : "physical"},
        {"noise", noise},
        {"seed", c.seed},
        {"method1",
         {{"beta_step_deg", rad2deg(c.beta_step)},
          {"scan_samples", c.method1.scan_samples},
          {"flat_spread", c.method1.flat_spread},
          {"pole_gate", c.method1.pole_gate}}},
        {"analysis",
         {{"n_samples", c.analysis.n_samples},
          {"floor_percentile", c.analysis.floor_percentile},
          {"ridge_exclusion_px", c.analysis.ridge_exclusion},
          {"low_visibility", c.analysis.low_visibility_threshold},
          {"aperture_rings", c.analysis.aperture_rings}}},
        {"tomography",
         {{"blind_threshold", c.estimator.blind_threshold},
          {"narrow_ratio", c.estimator.narrow_ratio},
          {"resolution_deg", rad2deg(c.estimator.resolution)},
          {"membership_tol_rad", c.estimator.membership_tol},
          {"alpha_uncertainty_deg", rad2deg(c.estimator.alpha_uncertainty)}}},
        {"calibration",
         {{"span_m", c.calibration.span},
          {"step_m", c.calibration.step},
          {"min_visibility", c.calibration.min_visibility}}},
        {"reproduce",
         {{"image_sigma_rel", c.reproduce_image_sigma},
          {"alpha_sigma_deg", rad2deg(c.reproduce_alpha_sigma)},
          {"seeds", c.reproduce_seeds}}},
        {"output", c.output_dir.string()},
        {"image_format", c.image_format},
    };
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError("config file " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

}  // namespace oam::cli
