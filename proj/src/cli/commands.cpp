// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <regex>

#include "oam/cli.hpp"
#include "oam/io.hpp"

namespace oam::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw UsageError("cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string fmt(double v, int digits = 4)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

fs::path image_path(const RunConfig& cfg, const std::string& stem)
{
    return cfg.output_dir / (stem + "." + cfg.image_format);
}

std::shared_ptr<const TiltedLensSimulator> make_simulator(const RunConfig& cfg)
{
    return std::make_shared<const TiltedLensSimulator>(cfg.grid, cfg.focal, cfg.tilt, cfg.oversample);
}

json calibration_json(const CalibrationRecord& rec, const RunConfig& cfg)
{
    return {{"plane_offset_m", rec.plane_offset},
            {"visibility", rec.visibility},
            {"alpha_deg", rad2deg(rec.alpha)},
            {"focal_m", cfg.focal},
            {"tilt_deg", rad2deg(cfg.tilt)},
            {"waist_m", cfg.grid.waist},
            {"wavelength_m", cfg.grid.wavelength}};
}

// A saved calibration only applies to the lens and beam it was made for.
std::optional<double> saved_plane_offset(const RunConfig& cfg)
{
    const fs::path path = cfg.output_dir / "calibration.json";
    std::ifstream in(path);
    if (!in) return std::nullopt;
    try {
        const json j = json::parse(in);
        const bool same = std::abs(j.at("focal_m").get<double>() - cfg.focal) < 1e-12 &&
                          std::abs(j.at("tilt_deg").get<double>() - rad2deg(cfg.tilt)) < 1e-9 &&
                          std::abs(j.at("waist_m").get<double>() - cfg.grid.waist) < 1e-15 &&
                          std::abs(j.at("wavelength_m").get<double>() - cfg.grid.wavelength) < 1e-18;
        if (same) return j.at("plane_offset_m").get<double>();
    } catch (const json::exception&) {
    }
    return std::nullopt;
}

std::optional<fs::path> find_image(const fs::path& stem)
{
    for (const char* ext : {".pgm", ".png", ".PGM", ".PNG"}) {
        fs::path p = stem;
        p += ext;
        if (fs::exists(p)) return p;
    }
    return std::nullopt;
}

json estimate_json(const TriangleEstimate& e)
{
    json v = json::array();
    for (const auto& p : e.vertices) v.push_back({p.x(), p.y(), p.z()});
    return {{"state", state_to_json(e.state)},
            {"branch", to_string(e.branch)},
            {"vertices", v},
            {"used_closest_approach", e.used_closest_approach},
            {"used_overlap", e.used_overlap}};
}

}  // namespace

std::unique_ptr<MeasurementSource> make_source(const RunConfig& cfg, const PoincareState& s, std::uint64_t seed)
{
    if (cfg.pipeline == Pipeline::abstract) return std::make_unique<AbstractSource>(cfg.grid, s, cfg.image_noise, seed);
    return std::make_unique<PhysicalSource>(make_simulator(cfg), s, resolve_plane_offset(cfg), cfg.image_noise, seed);
}

double resolve_plane_offset(const RunConfig& cfg)
{
    if (cfg.plane_offset) return *cfg.plane_offset;
    if (auto saved = saved_plane_offset(cfg)) return *saved;
    const CalibrationRecord rec = calibrate_tilt(*make_simulator(cfg), cfg.calibration);
    return rec.plane_offset;
}

json table1_row_json(const Table1Row& row)
{
    const auto& e = row.estimate;
    return {{"point", row.point},
            {"theta_t", rad2deg(row.target.theta())},
            {"phi_t", rad2deg(row.target.phi())},
            {"theta_e", rad2deg(e.state.theta())},
            {"d_theta", rad2deg(e.err_theta)},
            {"phi_e", rad2deg(e.state.phi())},
            {"d_phi", e.err_phi ? json(rad2deg(*e.err_phi)) : json(nullptr)},
            {"fidelity", e.fidelity_vs_target ? json(*e.fidelity_vs_target) : json(nullptr)},
            {"d_fidelity", e.d_fidelity ? json(*e.d_fidelity) : json(nullptr)},
            {"branch", to_string(e.branch)}};
}

std::string table1_csv_header() { return "point,theta_t,phi_t,theta_e,d_theta,phi_e,d_phi,fidelity,d_fidelity,branch\n"; }

std::string table1_csv_line(const Table1Row& row)
{
    const auto& e = row.estimate;
    std::string s = std::to_string(row.point);
    s += "," + fmt(rad2deg(row.target.theta()), 2) + "," + fmt(rad2deg(row.target.phi()), 2);
    s += "," + fmt(rad2deg(e.state.theta()), 3) + "," + fmt(rad2deg(e.err_theta), 3);
    s += "," + fmt(rad2deg(e.state.phi()), 3) + "," + (e.err_phi ? fmt(rad2deg(*e.err_phi), 3) : std::string());
    s += "," + (e.fidelity_vs_target ? fmt(*e.fidelity_vs_target, 6) : std::string());
    s += "," + (e.d_fidelity ? fmt(*e.d_fidelity, 6) : std::string());
    s += "," + to_string(e.branch) + "\n";
    return s;
}

int cmd_render(const RunConfig& cfg, const PoincareState& s, RenderSet set, double converter_beta)
{
    ensure_dir(cfg.output_dir);
    const auto source = make_source(cfg, s, cfg.seed);
    json meta = {{"state", state_to_json(s)}, {"pipeline", cfg.pipeline == Pipeline::abstract ? "abstract" : "physical"}};
    json files = json::array();
    auto emit = [&](const MeasurementKind& kind, const std::string& stem) {
        const fs::path p = image_path(cfg, stem);
        write_image(p, source->image(kind));
        files.push_back(p.filename().string());
    };
    switch (set) {
    case RenderSet::direct:
        emit(MeasurementKind::direct(), "render");
        break;
    case RenderSet::converter:
        meta["converter_beta_deg"] = rad2deg(converter_beta);
        emit(MeasurementKind::converter(converter_beta), "render_" + MeasurementKind::converter(converter_beta).label());
        break;
    case RenderSet::triplet:
        for (const auto& kind : standard_kinds()) emit(kind, "triplet_" + kind.label());
        break;
    case RenderSet::scan:
        emit(MeasurementKind::direct(), "scan_direct");
        for (double b : beta_grid(cfg.beta_step)) {
            char stem[32];
            std::snprintf(stem, sizeof stem, "scan_b%07.3f", rad2deg(b));
            emit(MeasurementKind::converter(b), stem);
        }
        break;
    }
    meta["files"] = files;
    write_json(cfg.output_dir / "render.json", meta);
    return 0;
}

int cmd_calibrate(const RunConfig& cfg)
{
    if (cfg.pipeline != Pipeline::physical) throw UsageError("calibrate needs the physical pipeline (--pipeline physical)");
    ensure_dir(cfg.output_dir);
    CalibrationRecord rec;
    int code = 0;
    try {
        rec = calibrate_tilt(*make_simulator(cfg), cfg.calibration);
    } catch (const CalibrationFailed& e) {
        std::cerr << "calibration failed: " << e.what() << "\n";
        code = 3;
    }
    if (code == 0) {
        write_json(cfg.output_dir / "calibration.json", calibration_json(rec, cfg));
        std::string csv = "plane_offset_mm,visibility\n";
        for (std::size_t i = 0; i < rec.offsets.size(); ++i)
            csv += fmt(rec.offsets[i] * 1e3, 3) + "," + fmt(rec.visibilities[i], 6) + "\n";
        write_text(cfg.output_dir / "calibration_scan.csv", csv);
        std::cout << "plane offset " << fmt(rec.plane_offset * 1e3, 3) << " mm, visibility " << fmt(rec.visibility)
                  << ", alpha " << fmt(rad2deg(rec.alpha), 2) << " deg\n";
    }
    return code;
}

int cmd_method1(const RunConfig& cfg, const std::optional<PoincareState>& s, const std::optional<fs::path>& image_dir)
{
    ensure_dir(cfg.output_dir);
    std::unique_ptr<MeasurementSource> source;
    std::vector<double> betas;
    if (image_dir) {
        // files <anything>_b<degrees>.<ext>, plus an optional <anything>_direct.<ext>
        auto set = std::make_unique<ImageSetSource>();
        std::map<double, fs::path> scans;
        const std::regex scan_name(R"(.*_b([0-9]+(\.[0-9]+)?)\.(pgm|png|PGM|PNG))");
        const std::regex direct_name(R"(.*_direct\.(pgm|png|PGM|PNG))");
        if (!fs::is_directory(*image_dir)) throw UsageError(image_dir->string() + " is not a directory");
        for (const auto& entry : fs::directory_iterator(*image_dir)) {
            const std::string name = entry.path().filename().string();
            std::smatch m;
            if (std::regex_match(name, m, scan_name))
                scans[deg2rad(std::stod(m[1].str()))] = entry.path();
            else if (std::regex_match(name, direct_name))
                set->add(MeasurementKind::direct(), read_image(entry.path(), cfg.grid));
        }
        if (scans.empty()) throw UsageError("no *_b<deg> images in " + image_dir->string());
        for (const auto& [beta, path] : scans) {
            set->add(MeasurementKind::converter(beta), read_image(path, cfg.grid));
            betas.push_back(beta);
        }
        source = std::move(set);
    } else {
        if (!s) throw UsageError("method1 needs a state (--theta-deg/--phi-deg) or --images");
        source = make_source(cfg, *s, cfg.seed);
        betas = beta_grid(cfg.beta_step);
    }

    Method1Result r;
    try {
        r = method1_scan(*source, betas, cfg.method1);
    } catch (const Error& e) {
        if (image_dir) throw UsageError(e.what());
        throw;
    }
    json out = {{"beta_mc_deg", rad2deg(r.reading.beta_mc)},
                {"alpha_hg_deg", rad2deg(r.reading.alpha_hg)},
                {"theta_deg", rad2deg(r.state.theta())},
                {"phi_deg", rad2deg(r.state.phi())},
                {"pole", r.pole},
                {"peak_visibility", r.peak_visibility}};
    if (s) {
        out["target"] = state_to_json(*s);
        out["fidelity"] = fidelity(*s, r.state);
        if (!r.pole) out["equal_modulus_residual"] = equal_modulus_residual(*s, r.reading.beta_mc);
    }
    write_json(cfg.output_dir / "method1.json", out);
    std::string csv = "beta_deg,visibility\n";
    for (std::size_t i = 0; i < r.betas.size(); ++i)
        csv += fmt(rad2deg(r.betas[i]), 3) + "," + fmt(r.visibilities[i], 6) + "\n";
    write_text(cfg.output_dir / "visibility_curve.csv", csv);
    std::cout << "theta " << fmt(rad2deg(r.state.theta()), 2) << " deg, phi " << fmt(rad2deg(r.state.phi()), 2)
              << " deg" << (r.pole ? " (pole)" : "") << "\n";
    return 0;
}

int cmd_method2(const RunConfig& cfg, const std::optional<PoincareState>& s, const std::optional<fs::path>& image_prefix)
{
    ensure_dir(cfg.output_dir);
    std::array<MeasuredReading, 3> readings;
    if (image_prefix) {
        fs::path prefix = *image_prefix;
        if (fs::is_directory(prefix)) {
            // a directory holding exactly one *_direct image names the triplet
            std::optional<fs::path> found;
            for (const auto& entry : fs::directory_iterator(prefix)) {
                const std::string name = entry.path().filename().string();
                const auto pos = name.rfind("_direct.");
                if (pos == std::string::npos) continue;
                if (found) throw UsageError("more than one *_direct image in " + prefix.string());
                found = entry.path().parent_path() / name.substr(0, pos);
            }
            if (!found) throw UsageError("no *_direct image in " + prefix.string());
            prefix = *found;
        }
        ImageSetSource set;
        for (const auto& kind : standard_kinds()) {
            fs::path stem = prefix;
            stem += "_" + kind.label();
            const auto file = find_image(stem);
            if (!file) throw UsageError("missing image " + stem.string() + ".{pgm,png}");
            set.add(kind, read_image(*file, cfg.grid));
        }
        readings = acquire_readings(set, cfg.analysis);
    } else {
        if (!s) throw UsageError("method2 needs a state (--theta-deg/--phi-deg) or --images");
        readings = acquire_readings(*make_source(cfg, *s, cfg.seed), cfg.analysis);
    }
    readings = perturb_readings(readings, cfg.alpha_sigma, mix_seed(cfg.seed, 0xa1));

    Table1Row row;
    row.point = 1;
    if (s) row.target = *s;
    row.estimate = estimate_state(readings, s, cfg.estimator);

    json out = table1_row_json(row);
    if (!s) {
        out.erase("theta_t");
        out.erase("phi_t");
    }
    json rj = json::array();
    for (const auto& r : readings) {
        json one = reading_to_json(r.reading);
        one["measurement"] = r.kind.label();
        rj.push_back(one);
    }
    out["readings"] = rj;
    out["estimate"] = estimate_json(row.estimate);
    write_json(cfg.output_dir / "method2.json", out);
    write_text(cfg.output_dir / "method2.csv", table1_csv_header() + table1_csv_line(row));
    std::cout << "theta " << fmt(rad2deg(row.estimate.state.theta()), 2) << " deg, phi "
              << fmt(rad2deg(row.estimate.state.phi()), 2) << " deg, branch " << to_string(row.estimate.branch);
    if (row.estimate.fidelity_vs_target) std::cout << ", fidelity " << fmt(*row.estimate.fidelity_vs_target, 6);
    std::cout << "\n";
    return 0;
}

}  // namespace oam::cli
