#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "torsim/budget.hpp"
#include "torsim/config.hpp"
#include "torsim/constants.hpp"
#include "torsim/csl.hpp"
#include "torsim/csv.hpp"
#include "torsim/estimation.hpp"
#include "torsim/readout.hpp"
#include "torsim/simulate.hpp"
#include "torsim/version.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_data = 3;
constexpr int exit_fit = 4;

using torsim::FileMeta;

FileMeta make_meta(const torsim::Config& cfg) {
    FileMeta m;
    m.tool_version = torsim::version;
    m.config_hash = cfg.hash;
    return m;
}

std::string json_dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

int run_budget(const std::string& config_path, const std::string& measured_path, const std::string& out_dir) {
    const torsim::Config cfg = torsim::load_config(config_path);
    const torsim::FrequencyGrid grid = cfg.budget_grid();

    std::optional<torsim::SpectralDensity> measured;
    if (!measured_path.empty()) {
        const auto raw = torsim::read_psd_csv(measured_path, torsim::Unit::torque_nm);
        std::vector<double> v(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) v[i] = raw.interpolate(grid[i]);
        measured = torsim::SpectralDensity(grid, std::move(v), torsim::Unit::torque_nm);
    }

    const torsim::NoiseBudget budget = torsim::assemble_budget(cfg.budget, grid, measured);
    const FileMeta meta = make_meta(cfg);

    std::ostringstream csv;
    csv << "# tool torsim " << torsim::version << "\n";
    csv << "# config_hash " << cfg.hash << "\n";
    csv << "# unit Nm/sqrt(Hz) (amplitude spectral density)\n";
    csv << "frequency_hz";
    for (const auto& [name, s] : budget.components) csv << "," << name;
    csv << ",total";
    if (budget.measured) csv << ",measured";
    csv << "\n";
    csv << std::setprecision(17);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        csv << grid[i];
        for (const auto& [name, s] : budget.components) csv << "," << std::sqrt(s.values[i]);
        csv << "," << std::sqrt(budget.total.values[i]);
        if (budget.measured) csv << "," << std::sqrt(budget.measured->values[i]);
        csv << "\n";
    }
    torsim::write_text_atomic(out_dir + "/budget.csv", csv.str());

    nlohmann::json summary;
    summary["tool_version"] = torsim::version;
    summary["config_hash"] = cfg.hash;
    summary["grid"] = {{"f_min_hz", cfg.estimation.f_min_hz},
                       {"f_max_hz", cfg.estimation.f_max_hz},
                       {"points", cfg.estimation.points}};
    for (const auto& [name, s] : budget.components) {
        summary["components"][name] = {
            {"asd_at_100hz", std::sqrt(s.interpolate(100.0))},
            {"band_rms_50_150hz", std::sqrt(s.integrate_band(50.0, std::min(150.0, cfg.estimation.f_max_hz)))}};
    }
    summary["total"] = {{"asd_at_100hz", std::sqrt(budget.total.interpolate(100.0))}};
    if (budget.measured) {
        const auto excess = torsim::excess_report(budget, 50.0, std::min(150.0, cfg.estimation.f_max_hz));
        std::size_t flagged = 0;
        double first_flag = 0.0, last_flag = 0.0;
        for (std::size_t i = 0; i < excess.flagged.size(); ++i) {
            if (excess.flagged[i]) {
                if (flagged == 0) first_flag = excess.grid[i];
                last_flag = excess.grid[i];
                ++flagged;
            }
        }
        summary["excess"] = {{"band_lo_hz", excess.band_lo_hz},
                             {"band_hi_hz", excess.band_hi_hz},
                             {"band_power_ratio", excess.band_ratio},
                             {"threshold", excess.threshold},
                             {"flagged_bins", flagged},
                             {"flagged_first_hz", first_flag},
                             {"flagged_last_hz", last_flag}};
        std::ostringstream exc;
        exc << "# tool torsim " << torsim::version << "\n";
        exc << "# config_hash " << cfg.hash << "\n";
        exc << "frequency_hz,power_ratio,flagged\n";
        exc << std::setprecision(17);
        for (std::size_t i = 0; i < excess.grid.size(); ++i)
            exc << excess.grid[i] << "," << excess.power_ratio[i] << "," << (excess.flagged[i] ? 1 : 0) << "\n";
        torsim::write_text_atomic(out_dir + "/excess.csv", exc.str());
    }
    torsim::write_text_atomic(out_dir + "/budget_summary.json", json_dump(summary));
    std::cout << "budget: wrote " << out_dir << "/budget.csv\n";
    return exit_ok;
}

int run_simulate(const std::string& config_path, double duration_s, std::uint64_t seed,
                 const std::string& out_dir) {
    const torsim::Config cfg = torsim::load_config(config_path);
    const torsim::ReadoutPair pair = torsim::simulate_pair(cfg, duration_s, seed);
    FileMeta meta = make_meta(cfg);
    meta.extra.push_back("seed " + std::to_string(seed));
    torsim::write_pair_csv(out_dir + "/simulated_pair.csv", pair.x_a, pair.x_b, meta);
    std::cout << "simulate: wrote " << out_dir << "/simulated_pair.csv\n";
    return exit_ok;
}

int run_calibrate(const std::string& input, double line_hz, double band_halfwidth_hz, double l_eff_m,
                  const std::string& out_dir) {
    auto [x_a, x_b] = torsim::read_pair_csv(input, torsim::Unit::displacement_m);
    torsim::ReadoutPair pair{std::move(x_a), std::move(x_b), l_eff_m};
    const auto cal = torsim::calibrate_alpha(pair, line_hz, band_halfwidth_hz);
    if (!cal.ok) {
        std::cerr << "calibrate: " << cal.message << "\n";
        return exit_fit;
    }
    const double broadband = torsim::broadband_suppression(pair, cal.alpha, 50.0, 100.0);

    nlohmann::json j;
    j["tool_version"] = torsim::version;
    j["alpha"] = cal.alpha;
    j["line_hz"] = line_hz;
    j["suppression_vs_single_sensor"] = cal.suppression_vs_single;
    j["suppression_vs_unity_alpha"] = cal.suppression_vs_unity;
    j["broadband_suppression_50_100hz"] = broadband;
    torsim::write_text_atomic(out_dir + "/calibration.json", json_dump(j));
    std::cout << "calibrate: alpha = " << cal.alpha
              << ", line suppression (vs single sensor) = " << cal.suppression_vs_single << "\n";
    return exit_ok;
}

int run_fit_spring(const std::string& input, const std::string& out_dir) {
    const auto tf = torsim::read_transfer_magphase_csv(input);
    const auto fit = torsim::fit_optical_spring(tf);
    if (!fit.ok) {
        std::cerr << "fit-spring: " << fit.message << "\n";
        return exit_fit;
    }
    nlohmann::json j;
    j["tool_version"] = torsim::version;
    j["input"] = input;
    j["omega_eff_rad_s"] = fit.omega_eff_rad_s;
    j["f_eff_hz"] = fit.omega_eff_rad_s / torsim::constants::two_pi;
    j["gamma_eff_rad_s"] = fit.gamma_eff_rad_s;
    j["quality_eff"] = fit.omega_eff_rad_s / fit.gamma_eff_rad_s;
    j["gain"] = fit.gain;
    j["residual"] = fit.residual;
    const std::string stem = std::filesystem::path(input).stem().string();
    torsim::write_text_atomic(out_dir + "/spring_fit_" + stem + ".json", json_dump(j));
    std::cout << "fit-spring: f_eff = " << fit.omega_eff_rad_s / torsim::constants::two_pi << " Hz\n";
    return exit_ok;
}

int run_csl(const std::string& config_path, double sensitivity_asd, const std::string& measured_path,
            const std::vector<std::string>& overlays, const std::string& out_dir) {
    const torsim::Config cfg = torsim::load_config(config_path);
    const auto& cc = cfg.csl;

    double s_measured = 0.0;
    std::string source;
    if (sensitivity_asd > 0.0) {
        s_measured = sensitivity_asd * sensitivity_asd;
        source = "command line --sensitivity";
    } else if (!measured_path.empty()) {
        const auto m = torsim::read_psd_csv(measured_path, torsim::Unit::torque_nm);
        std::vector<double> band;
        for (std::size_t i = 0; i < m.size(); ++i)
            if (m.grid[i] >= cc.band_lo_hz && m.grid[i] <= cc.band_hi_hz) band.push_back(m.values[i]);
        if (band.empty()) throw torsim::DataError(measured_path + ": no samples in the sensitivity band");
        std::nth_element(band.begin(), band.begin() + band.size() / 2, band.end());
        s_measured = band[band.size() / 2];
        source = "band-median of " + measured_path;
    } else {
        const auto budget = torsim::assemble_budget(cfg.budget, cfg.budget_grid());
        std::vector<double> band;
        for (std::size_t i = 0; i < budget.total.size(); ++i)
            if (budget.total.grid[i] >= cc.band_lo_hz && budget.total.grid[i] <= cc.band_hi_hz)
                band.push_back(budget.total.values[i]);
        if (band.empty())
            throw torsim::ConfigError("csl band [" + std::to_string(cc.band_lo_hz) + ", " +
                                      std::to_string(cc.band_hi_hz) +
                                      "] Hz lies outside the estimation grid");
        std::nth_element(band.begin(), band.begin() + band.size() / 2, band.end());
        s_measured = band[band.size() / 2];
        source = "band-median of budget total (projection)";
    }

    const auto landscape =
        torsim::exclusion_landscape(s_measured, cc.r_min_m, cc.r_max_m, cc.points, cfg.budget.pendulum, overlays);

    std::ostringstream csv;
    csv << "# tool torsim " << torsim::version << "\n";
    csv << "# config_hash " << cfg.hash << "\n";
    csv << "# sensitivity_nm2_per_hz " << std::setprecision(17) << s_measured << "\n";
    csv << "# sensitivity_source " << source << "\n";
    csv << "r_m,lambda_per_s,label,extrapolated\n";
    for (const auto& pt : landscape.curve)
        csv << pt.r_m << "," << pt.lambda_max_per_s << ",exclusion," << (pt.extrapolated ? 1 : 0) << "\n";
    for (const auto& ov : landscape.overlays)
        for (std::size_t i = 0; i < ov.r_m.size(); ++i)
            csv << ov.r_m[i] << "," << ov.lambda_per_s[i] << "," << ov.label << ",0\n";
    torsim::write_text_atomic(out_dir + "/csl_exclusion.csv", csv.str());

    nlohmann::json j;
    j["tool_version"] = torsim::version;
    j["config_hash"] = cfg.hash;
    j["sensitivity_nm2_per_hz"] = s_measured;
    j["sensitivity_asd_nm_sqrthz"] = std::sqrt(s_measured);
    j["sensitivity_source"] = source;
    j["band_lo_hz"] = cc.band_lo_hz;
    j["band_hi_hz"] = cc.band_hi_hz;
    j["points"] = landscape.curve.size();
    j["overlays"] = overlays.size();
    torsim::write_text_atomic(out_dir + "/csl_summary.json", json_dump(j));
    std::cout << "csl: wrote " << out_dir << "/csl_exclusion.csv (sensitivity " << std::sqrt(s_measured)
              << " Nm/sqrt(Hz), " << source << ")\n";
    return exit_ok;
}

int run_ringdown(const std::string& input, const std::string& out_dir) {
    const auto x = torsim::read_timeseries_csv(input, torsim::Unit::angle_rad);
    const auto fit = torsim::ringdown_fit(x);
    if (!fit.ok) {
        std::cerr << "ringdown: " << fit.message << "\n";
        return exit_fit;
    }
    nlohmann::json j;
    j["tool_version"] = torsim::version;
    j["omega_m_rad_s"] = fit.omega_rad_s;
    j["f_m_hz"] = fit.omega_rad_s / torsim::constants::two_pi;
    j["gamma_m_rad_s"] = fit.gamma_rad_s;
    j["quality"] = fit.quality;
    j["gamma_ci_rad_s"] = fit.gamma_ci_rad_s;
    j["residual_norm"] = fit.residual_norm;
    torsim::write_text_atomic(out_dir + "/ringdown.json", json_dump(j));
    std::cout << "ringdown: f_m = " << fit.omega_rad_s / torsim::constants::two_pi << " Hz, Q = " << fit.quality
              << "\n";
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"torsion-pendulum torque sensing: noise spectra, readout calibration and collapse bounds"};
    app.set_version_flag("--version", torsim::version);
    app.require_subcommand(1);

    std::string config_path, measured_path, input_path, out_dir = ".";
    double duration_s = 60.0, line_hz = 73.0, band_halfwidth_hz = 2.0, l_eff_m = 0.01;
    double sensitivity = 0.0;
    std::uint64_t seed = 1;
    std::vector<std::string> overlays;

    auto* budget = app.add_subcommand("budget", "assemble the torque noise budget");
    budget->add_option("--config", config_path, "configuration JSON")->required();
    budget->add_option("--measured", measured_path, "measured torque PSD CSV overlay");
    budget->add_option("--out", out_dir, "output directory");

    auto* simulate = app.add_subcommand("simulate", "generate a synthetic two-channel readout record");
    simulate->add_option("--config", config_path, "configuration JSON")->required();
    simulate->add_option("--duration", duration_s, "record length in seconds");
    simulate->add_option("--seed", seed, "random seed");
    simulate->add_option("--out", out_dir, "output directory");

    auto* calibrate = app.add_subcommand("calibrate", "find the common-mode coefficient alpha");
    calibrate->add_option("--input", input_path, "two-channel CSV (time_s,x_a,x_b)")->required();
    calibrate->add_option("--line-hz", line_hz, "common-mode line frequency");
    calibrate->add_option("--band-halfwidth", band_halfwidth_hz, "analysis half-band around the line");
    calibrate->add_option("--l-eff", l_eff_m, "lever arm in meters");
    calibrate->add_option("--out", out_dir, "output directory");

    auto* fit_spring = app.add_subcommand("fit-spring", "fit the optical-spring response");
    fit_spring->add_option("--input", input_path, "CSV frequency_hz,magnitude_db,phase_deg")->required();
    fit_spring->add_option("--out", out_dir, "output directory");

    auto* csl = app.add_subcommand("csl", "collapse-model exclusion curve");
    csl->add_option("--config", config_path, "configuration JSON")->required();
    csl->add_option("--sensitivity", sensitivity, "torque sensitivity in Nm/sqrt(Hz), overrides config");
    csl->add_option("--measured", measured_path, "measured torque PSD CSV (band median used)");
    csl->add_option("--overlay", overlays, "overlay curve CSV (r_m,lambda_per_s,label); repeatable");
    csl->add_option("--out", out_dir, "output directory");

    auto* ringdown = app.add_subcommand("ringdown", "estimate omega_m, gamma_m, Q from a free decay");
    ringdown->add_option("--input", input_path, "CSV time_s,value")->required();
    ringdown->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;  // bad usage is a config error
    }

    try {
        if (budget->parsed()) return run_budget(config_path, measured_path, out_dir);
        if (simulate->parsed()) return run_simulate(config_path, duration_s, seed, out_dir);
        if (calibrate->parsed()) return run_calibrate(input_path, line_hz, band_halfwidth_hz, l_eff_m, out_dir);
        if (fit_spring->parsed()) return run_fit_spring(input_path, out_dir);
        if (csl->parsed()) return run_csl(config_path, sensitivity, measured_path, overlays, out_dir);
        if (ringdown->parsed()) return run_ringdown(input_path, out_dir);
    } catch (const torsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const torsim::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return exit_data;
    } catch (const std::invalid_argument& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return exit_data;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_data;
    }
    return exit_ok;
}
