#include "torsim/csl.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "torsim/constants.hpp"

namespace torsim {

void CslParams::validate() const {
    if (!(lambda_per_s > 0.0) || !(r_m > 0.0))
        throw std::invalid_argument("CslParams: lambda and r must be positive");
}

namespace {

// (8 pi hbar^2 r^2 / m0^2) * (rho I / d): PSD per unit diffusion rate.
double csl_coupling(double r_m, const PendulumParams& p) {
    const double hbar = constants::hbar;
    const double m0 = constants::atomic_mass_unit;
    const double inertia = moment_of_inertia(p);
    return 8.0 * constants::pi * hbar * hbar * r_m * r_m / (m0 * m0) *
           (p.density_kg_m3 * inertia / p.bar_thickness_m);
}

}  // namespace

double csl_torque_psd(const CslParams& c, const PendulumParams& p) {
    c.validate();
    p.validate();
    return c.lambda_per_s * csl_coupling(c.r_m, p);
}

double lambda_bound(double s_measured_nm2_hz, double r_m, const PendulumParams& p) {
    if (!(s_measured_nm2_hz > 0.0)) throw std::invalid_argument("lambda_bound: measured PSD must be positive");
    if (!(r_m > 0.0)) throw std::invalid_argument("lambda_bound: r must be positive");
    p.validate();
    return s_measured_nm2_hz / csl_coupling(r_m, p);
}

std::vector<double> lambda_bound(double s_measured_nm2_hz, const std::vector<double>& r_grid_m,
                                 const PendulumParams& p) {
    std::vector<double> out(r_grid_m.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = lambda_bound(s_measured_nm2_hz, r_grid_m[i], p);
    return out;
}

namespace {

OverlayCurve load_overlay(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("overlay file not readable: " + path);
    OverlayCurve curve;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        // skip a header row if present
        if (lineno == 1 && line.find_first_not_of("0123456789.eE+-, \t\r") != std::string::npos &&
            line.find("r_m") != std::string::npos)
            continue;
        std::istringstream ss(line);
        std::string r_str, l_str, label;
        if (!std::getline(ss, r_str, ',') || !std::getline(ss, l_str, ',') || !std::getline(ss, label)) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected `r_m, lambda_per_s, label`");
        }
        double r = 0.0, l = 0.0;
        try {
            r = std::stod(r_str);
            l = std::stod(l_str);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed number");
        }
        if (!(r > 0.0) || !(l > 0.0))
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": r and lambda must be positive");
        while (!label.empty() && (label.front() == ' ' || label.front() == '\t')) label.erase(label.begin());
        while (!label.empty() && (label.back() == '\r' || label.back() == ' ')) label.pop_back();
        if (curve.label.empty()) curve.label = label;
        curve.r_m.push_back(r);
        curve.lambda_per_s.push_back(l);
    }
    if (curve.r_m.empty()) throw std::runtime_error(path + ": no overlay rows");
    return curve;
}

}  // namespace

ExclusionLandscape exclusion_landscape(double s_measured_nm2_hz, double r_min_m, double r_max_m,
                                       std::size_t points, const PendulumParams& p,
                                       const std::vector<std::string>& overlay_files) {
    if (!(r_min_m > 0.0) || !(r_max_m >= r_min_m))
        throw std::invalid_argument("exclusion_landscape: need 0 < r_min <= r_max");
    if (points == 0) throw std::invalid_argument("exclusion_landscape: need at least one point");
    p.validate();

    // the coupling formula carries no geometric cutoff; flag correlation
    // lengths beyond the oscillator dimensions as extrapolation
    const double largest_dim = std::max({p.bar_length_m, p.bar_width_m, p.bar_thickness_m});

    ExclusionLandscape out;
    out.curve.resize(points);
    for (std::size_t i = 0; i < points; ++i) {
        double r = r_min_m;
        if (points > 1)
            r = std::exp(std::log(r_min_m) +
                         (std::log(r_max_m) - std::log(r_min_m)) * static_cast<double>(i) /
                             static_cast<double>(points - 1));
        out.curve[i].r_m = r;
        out.curve[i].lambda_max_per_s = lambda_bound(s_measured_nm2_hz, r, p);
        out.curve[i].extrapolated = r > largest_dim;
    }
    for (const auto& path : overlay_files) out.overlays.push_back(load_overlay(path));
    return out;
}

}  // namespace torsim
