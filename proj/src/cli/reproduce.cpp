// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

#include "oam/cli.hpp"
#include "oam/io.hpp"

namespace oam::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<PoincareState> table1_targets()
{
    std::vector<PoincareState> out;
    out.push_back(PoincareState::from_degrees(0, 0));
    for (double t : {45.0, 90.0, 135.0}) out.push_back(PoincareState::from_degrees(t, 0));
    out.push_back(PoincareState::from_degrees(180, 0));
    for (int k = 1; k < 8; ++k)
        for (double t : {45.0, 90.0, 135.0}) out.push_back(PoincareState::from_degrees(t, 45.0 * k));
    return out;
}

std::vector<PoincareState> theta_sequence()
{
    std::vector<PoincareState> out;
    for (int k = 0; k <= 4; ++k) out.push_back(PoincareState::from_degrees(45.0 * k, 0));
    return out;
}

std::vector<PoincareState> phi_sequence()
{
    std::vector<PoincareState> out;
    for (int k = 0; k < 8; ++k) out.push_back(PoincareState::from_degrees(135, 45.0 * k));
    return out;
}

namespace {

std::string fmt(double v, int digits = 4)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
}

double mean(const std::vector<double>& v)
{
    if (v.empty()) return std::nan("");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v)
{
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double predicted_alpha(const PoincareState& s)
{
    const double a = std::fmod(0.5 * (s.phi() - s.theta()) + 0.25 * kPi, kPi);
    return a < 0.0 ? a + kPi : a;
}

// Method I on a point sequence (A-E or D1-D8), noiseless and with image noise.
void reproduce_method1(const RunConfig& cfg, const std::string& name, const std::vector<PoincareState>& points,
                       const std::vector<std::string>& labels)
{
    const auto betas = beta_grid(cfg.beta_step);
    json rows = json::array();
    std::string csv = "point,theta_t,phi_t,beta_mc,beta_line,alpha_line,alpha_pred,alpha_dev,theta_e,phi_e,pole\n";
    double max_dev = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        RunConfig clean = cfg;
        clean.image_noise = {};
        const auto source = make_source(clean, points[i], cfg.seed);
        const Method1Result r = method1_scan(*source, betas, cfg.method1);
        // the scan may settle on phi + pi, which is equally valid; the plotted line is read at beta = phi
        double beta_line = r.reading.beta_mc;
        double alpha_line = r.reading.alpha_hg;
        if (!r.pole && std::abs(angle_difference(beta_line, points[i].phi())) > 0.5 * kPi) {
            beta_line = wrap_2pi(beta_line - kPi);
            alpha_line = mode_orientation(source->image(MeasurementKind::converter(beta_line)), cfg.analysis).alpha;
        }
        const double pred = predicted_alpha(points[i]);
        const double dev = orientation_difference(alpha_line, pred);
        max_dev = std::max(max_dev, std::abs(dev));
        rows.push_back({{"point", labels[i]},
                        {"theta_t", rad2deg(points[i].theta())},
                        {"phi_t", rad2deg(points[i].phi())},
                        {"beta_mc", rad2deg(r.reading.beta_mc)},
                        {"alpha_hg", rad2deg(r.reading.alpha_hg)},
                        {"beta_line", rad2deg(beta_line)},
                        {"alpha_line", rad2deg(alpha_line)},
                        {"alpha_pred", rad2deg(pred)},
                        {"alpha_dev", rad2deg(dev)},
                        {"theta_e", rad2deg(r.state.theta())},
                        {"phi_e", rad2deg(r.state.phi())},
                        {"pole", r.pole}});
        csv += labels[i] + "," + fmt(rad2deg(points[i].theta()), 2) + "," + fmt(rad2deg(points[i].phi()), 2) + "," +
               fmt(rad2deg(r.reading.beta_mc), 3) + "," + fmt(rad2deg(beta_line), 3) + "," + fmt(rad2deg(alpha_line), 3) + "," +
               fmt(rad2deg(pred), 3) + "," + fmt(rad2deg(dev), 3) + "," + fmt(rad2deg(r.state.theta()), 3) + "," +
               fmt(rad2deg(r.state.phi()), 3) + "," + (r.pole ? "1" : "0") + "\n";
    }
    write_text(cfg.output_dir / (name + "_noiseless.csv"), csv);

    // noisy pass: propagated error bars and direct RMS errors over seeds, per point
    json noisy = json::array();
    std::string ncsv = "point,theta_t,phi_t,d_beta,d_alpha,d_theta,d_phi,rms_theta,rms_phi,seeds\n";
    std::vector<double> d_theta, d_phi, rms_theta, rms_phi;
    const NoiseModel noise = NoiseModel::gaussian(cfg.reproduce_image_sigma);
    if (cfg.reproduce_image_sigma > 0.0) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            RunConfig noisy_cfg = cfg;
            noisy_cfg.image_noise = noise;
            std::vector<Method1Result> runs;
            double st = 0.0;
            for (int seed = 0; seed < cfg.reproduce_seeds; ++seed) {
                const auto source = make_source(noisy_cfg, points[i], mix_seed(cfg.seed, i + 1, static_cast<std::uint64_t>(seed)));
                runs.push_back(method1_scan(*source, betas, cfg.method1));
                st += std::pow(runs.back().state.theta() - points[i].theta(), 2);
                runs.back().betas.clear();
                runs.back().visibilities.clear();
            }
            const auto bars = method1_error_bars(points[i], runs);
            const double rt = bars ? bars->rms_theta : std::sqrt(st / cfg.reproduce_seeds);
            rms_theta.push_back(rt);
            json row = {{"point", labels[i]}, {"rms_theta", rad2deg(rt)}, {"rms_phi", nullptr},
                        {"d_beta", nullptr}, {"d_alpha", nullptr}, {"d_theta", nullptr}, {"d_phi", nullptr}};
            std::string cells = ",,,";
            std::string rp_cell;
            if (bars) {
                d_theta.push_back(bars->d_theta);
                d_phi.push_back(bars->d_phi);
                rms_phi.push_back(bars->rms_phi);
                row["rms_phi"] = rad2deg(bars->rms_phi);
                row["d_beta"] = rad2deg(bars->d_beta);
                row["d_alpha"] = rad2deg(bars->d_alpha);
                row["d_theta"] = rad2deg(bars->d_theta);
                row["d_phi"] = rad2deg(bars->d_phi);
                cells = fmt(rad2deg(bars->d_beta), 3) + "," + fmt(rad2deg(bars->d_alpha), 3) + "," +
                        fmt(rad2deg(bars->d_theta), 3) + "," + fmt(rad2deg(bars->d_phi), 3);
                rp_cell = fmt(rad2deg(bars->rms_phi), 3);
            }
            noisy.push_back(row);
            ncsv += labels[i] + "," + fmt(rad2deg(points[i].theta()), 2) + "," + fmt(rad2deg(points[i].phi()), 2) + "," +
                    cells + "," + fmt(rad2deg(rt), 3) + "," + rp_cell + "," + std::to_string(cfg.reproduce_seeds) + "\n";
        }
        write_text(cfg.output_dir / (name + "_noisy.csv"), ncsv);
    }

    json summary = {{"target", name},
                    {"noiseless", {{"max_alpha_dev_deg", rad2deg(max_dev)}, {"rows", rows}}},
                    {"noisy",
                     {{"image_sigma_rel", cfg.reproduce_image_sigma},
                      {"seeds", cfg.reproduce_seeds},
                      {"mean_d_theta_deg", number_or_null(rad2deg(mean(d_theta)))},
                      {"mean_d_phi_deg", number_or_null(rad2deg(mean(d_phi)))},
                      {"mean_rms_theta_deg", number_or_null(rad2deg(mean(rms_theta)))},
                      {"mean_rms_phi_deg", number_or_null(rad2deg(mean(rms_phi)))},
                      {"rows", noisy}}}};
    write_text(cfg.output_dir / (name + "_summary.json"), summary.dump(2) + "\n");
    std::cout << name << ": max |alpha_HG - prediction| " << fmt(rad2deg(max_dev), 3) << " deg";
    if (!d_theta.empty())
        std::cout << "; noisy error bars theta " << fmt(rad2deg(mean(d_theta)), 2) << " deg, phi "
                  << fmt(rad2deg(mean(d_phi)), 2) << " deg";
    std::cout << "\n";
}

void reproduce_table1(const RunConfig& cfg)
{
    const auto targets = table1_targets();
    std::vector<std::array<MeasuredReading, 3>> readings;
    for (std::size_t i = 0; i < targets.size(); ++i)
        readings.push_back(acquire_readings(*make_source(cfg, targets[i], mix_seed(cfg.seed, i + 1)), cfg.analysis));

    // noiseless pass (or image noise only, when configured)
    std::string csv = table1_csv_header();
    json rows = json::array();
    std::vector<double> fids;
    double max_err = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        Table1Row row{static_cast<int>(i + 1), targets[i], estimate_state(readings[i], targets[i], cfg.estimator)};
        csv += table1_csv_line(row);
        rows.push_back(table1_row_json(row));
        fids.push_back(*row.estimate.fidelity_vs_target);
        max_err = std::max(max_err, spherical_distance(row.estimate.bloch, state_to_bloch(targets[i])));
    }
    write_text(cfg.output_dir / "table1_noiseless.csv", csv);

    // alpha-noise pass; per point means over seeds
    std::string ncsv = table1_csv_header();
    json nrows = json::array();
    std::vector<double> all_f, all_dt, all_dp;
    if (cfg.reproduce_alpha_sigma > 0.0) {
        for (std::size_t i = 0; i < targets.size(); ++i) {
            std::vector<double> f, dt, dp;
            Vec3 sum{};
            std::map<Branch, int> branches;
            for (int seed = 0; seed < cfg.reproduce_seeds; ++seed) {
                const auto noisy = perturb_readings(readings[i], cfg.reproduce_alpha_sigma,
                                                    mix_seed(cfg.seed, i + 1, static_cast<std::uint64_t>(seed)));
                const TriangleEstimate e = estimate_state(noisy, targets[i], cfg.estimator);
                f.push_back(*e.fidelity_vs_target);
                dt.push_back(e.err_theta);
                if (e.err_phi) dp.push_back(*e.err_phi);
                sum = sum + e.bloch.vec();
                ++branches[e.branch];
            }
            all_f.insert(all_f.end(), f.begin(), f.end());
            all_dt.insert(all_dt.end(), dt.begin(), dt.end());
            all_dp.insert(all_dp.end(), dp.begin(), dp.end());
            Table1Row row;
            row.point = static_cast<int>(i + 1);
            row.target = targets[i];
            row.estimate.bloch = UnitVector3::normalized(sum);
            row.estimate.state = bloch_to_state(row.estimate.bloch);
            row.estimate.err_theta = mean(dt);
            if (!dp.empty() && dp.size() * 2 >= f.size()) row.estimate.err_phi = mean(dp);
            row.estimate.fidelity_vs_target = mean(f);
            row.estimate.d_fidelity = stddev(f);
            row.estimate.branch =
                std::max_element(branches.begin(), branches.end(), [](auto& a, auto& b) { return a.second < b.second; })
                    ->first;
            ncsv += table1_csv_line(row);
            nrows.push_back(table1_row_json(row));
        }
        write_text(cfg.output_dir / "table1_noisy.csv", ncsv);
    }

    json summary = {
        {"target", "table1"},
        {"noiseless",
         {{"mean_fidelity", mean(fids)},
          {"min_fidelity", *std::min_element(fids.begin(), fids.end())},
          {"max_angle_error_deg", rad2deg(max_err)},
          {"rows", rows}}},
        {"noisy",
         {{"alpha_sigma_deg", rad2deg(cfg.reproduce_alpha_sigma)},
          {"seeds", cfg.reproduce_seeds},
          {"mean_fidelity", number_or_null(mean(all_f))},
          {"sd_fidelity", number_or_null(stddev(all_f))},
          {"mean_d_theta_deg", number_or_null(rad2deg(mean(all_dt)))},
          {"mean_d_phi_deg", number_or_null(rad2deg(mean(all_dp)))},
          {"rows", nrows}}},
    };
    write_text(cfg.output_dir / "table1_summary.json", summary.dump(2) + "\n");
    std::cout << "table1: noiseless mean fidelity " << fmt(mean(fids), 6) << ", worst angle error "
              << fmt(rad2deg(max_err), 3) << " deg";
    if (!all_f.empty())
        std::cout << "; noisy mean fidelity " << fmt(mean(all_f), 4) << " +- " << fmt(stddev(all_f), 4)
                  << ", mean d_theta " << fmt(rad2deg(mean(all_dt)), 2) << " deg, d_phi "
                  << fmt(rad2deg(mean(all_dp)), 2) << " deg";
    std::cout << "\n";
}

}  // namespace

int cmd_reproduce(const RunConfig& cfg, const std::string& target)
{
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw UsageError("cannot create output directory " + cfg.output_dir.string());
    if (target == "fig5") {
        reproduce_method1(cfg, "fig5", theta_sequence(), {"A", "B", "C", "D", "E"});
    } else if (target == "fig6") {
        std::vector<std::string> labels;
        for (int k = 1; k <= 8; ++k) labels.push_back("D" + std::to_string(k));
        reproduce_method1(cfg, "fig6", phi_sequence(), labels);
    } else if (target == "table1") {
        reproduce_table1(cfg);
    } else {
        throw UsageError("reproduce target must be fig5, fig6 or table1");
    }
    return 0;
}

}  // namespace oam::cli
