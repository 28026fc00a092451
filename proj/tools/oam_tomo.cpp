// SPDX-License-Identifier: Apache-2.0
//
// oam-tomo: simulate first-order OAM states and reconstruct them from images.

#include <CLI11.hpp>

#include <iostream>

#include "oam/cli.hpp"
#include "oam/io.hpp"

using namespace oam;

namespace {

struct Options {
    std::string config;
    std::optional<double> theta_deg;
    std::optional<double> phi_deg;
    std::string out;
    std::optional<double> noise_sigma;
    std::optional<double> alpha_sigma_deg;
    std::optional<std::uint64_t> seed;
    std::string pipeline;
    std::optional<double> plane_offset_mm;
    std::optional<int> seeds;
    std::string format;
};

void add_common(CLI::App* cmd, Options& o)
{
    cmd->add_option("--config", o.config, "JSON run configuration");
    cmd->add_option("--out", o.out, "output directory (overrides the config)");
    cmd->add_option("--noise-sigma", o.noise_sigma, "Gaussian image noise, fraction of the image peak");
    cmd->add_option("--alpha-sigma-deg", o.alpha_sigma_deg, "Gaussian noise on each Method II alpha [deg]");
    cmd->add_option("--seed", o.seed, "noise seed");
    cmd->add_option("--pipeline", o.pipeline, "abstract | physical")->check(CLI::IsMember({"abstract", "physical"}));
    cmd->add_option("--plane-offset-mm", o.plane_offset_mm, "camera plane offset from the focal plane [mm]");
    cmd->add_option("--format", o.format, "image format of written files")->check(CLI::IsMember({"pgm", "png"}));
}

void add_state(CLI::App* cmd, Options& o)
{
    cmd->add_option("--theta-deg", o.theta_deg, "polar angle of the state [deg]");
    cmd->add_option("--phi-deg", o.phi_deg, "azimuth of the state [deg]");
}

cli::RunConfig build_config(const Options& o)
{
    cli::RunConfig cfg = o.config.empty() ? cli::config_from_json(nlohmann::json::object()) : cli::load_config(o.config);
    if (!o.out.empty()) cfg.output_dir = o.out;
    if (o.noise_sigma) cfg.image_noise = NoiseModel::gaussian(*o.noise_sigma);
    if (o.alpha_sigma_deg) cfg.alpha_sigma = deg2rad(*o.alpha_sigma_deg);
    if (o.seed) cfg.seed = *o.seed;
    if (!o.pipeline.empty()) cfg.pipeline = o.pipeline == "physical" ? cli::Pipeline::physical : cli::Pipeline::abstract;
    if (o.plane_offset_mm) cfg.plane_offset = *o.plane_offset_mm * 1e-3;
    if (o.seeds) cfg.reproduce_seeds = *o.seeds;
    if (!o.format.empty()) cfg.image_format = o.format;
    cfg.validate();
    return cfg;
}

std::optional<PoincareState> state_of(const Options& o)
{
    if (!o.theta_deg && !o.phi_deg) return std::nullopt;
    try {
        return PoincareState::from_degrees(o.theta_deg.value_or(0.0), o.phi_deg.value_or(0.0));
    } catch (const Error& e) {
        throw cli::UsageError(e.what());
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Simulate first-order OAM states and reconstruct them from intensity images"};
    app.require_subcommand(1);
    Options o;

    auto* render = app.add_subcommand("render", "write the intensity image(s) of a prepared state");
    add_common(render, o);
    add_state(render, o);
    std::optional<double> converter_deg;
    bool triplet = false, scan = false;
    render->add_option("--converter-deg", converter_deg, "image after the converter at this beta [deg]");
    render->add_flag("--triplet", triplet, "write the three Method II images");
    render->add_flag("--scan", scan, "write the direct image and the Method I converter scan");

    auto* calibrate = app.add_subcommand("calibrate", "find the camera plane of the simulated tilted lens");
    add_common(calibrate, o);

    auto* method1 = app.add_subcommand("method1", "reconstruct a state by scanning the converter angle");
    add_common(method1, o);
    add_state(method1, o);
    std::string images1;
    method1->add_option("--images", images1, "directory of *_b<deg> scan images (and optionally *_direct)");

    auto* method2 = app.add_subcommand("method2", "reconstruct a state from three images");
    add_common(method2, o);
    add_state(method2, o);
    std::string images2;
    method2->add_option("--images", images2, "prefix (or directory) of *_direct, *_mc00, *_mc45 images");

    auto* reproduce = app.add_subcommand("reproduce", "rerun a figure or table sample set");
    add_common(reproduce, o);
    std::string target;
    reproduce->add_option("target", target, "fig5 | fig6 | table1")->required()->check(CLI::IsMember({"fig5", "fig6", "table1"}));
    reproduce->add_option("--seeds", o.seeds, "seeds of the noisy pass");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const cli::RunConfig cfg = build_config(o);
        const auto s = state_of(o);
        if (*render) {
            if (!s) throw cli::UsageError("render needs --theta-deg and/or --phi-deg");
            if (static_cast<int>(triplet) + static_cast<int>(scan) + static_cast<int>(converter_deg.has_value()) > 1)
                throw cli::UsageError("choose at most one of --converter-deg, --triplet, --scan");
            cli::RenderSet set = cli::RenderSet::direct;
            if (triplet) set = cli::RenderSet::triplet;
            if (scan) set = cli::RenderSet::scan;
            if (converter_deg) set = cli::RenderSet::converter;
            return cli::cmd_render(cfg, *s, set, deg2rad(converter_deg.value_or(0.0)));
        }
        if (*calibrate) return cli::cmd_calibrate(cfg);
        if (*method1)
            return cli::cmd_method1(cfg, s, images1.empty() ? std::nullopt : std::optional<std::filesystem::path>(images1));
        if (*method2)
            return cli::cmd_method2(cfg, s, images2.empty() ? std::nullopt : std::optional<std::filesystem::path>(images2));
        if (*reproduce) return cli::cmd_reproduce(cfg, target);
    } catch (const cli::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidState& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidGrid& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const TooManyBlind& e) {
        std::cerr << "analysis failed: " << e.what() << "\n";
        return 3;
    } catch (const CalibrationFailed& e) {
        std::cerr << "analysis failed: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "analysis failed: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
