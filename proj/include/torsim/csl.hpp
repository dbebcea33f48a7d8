#pragma once

#include <string>
#include <vector>

#include "torsim/mechanics.hpp"

namespace torsim {

// Spontaneous-collapse model parameters: diffusion rate and correlation length.
struct CslParams {
    double lambda_per_s = 0.0;
    double r_m = 0.0;

    void validate() const;
};

// Flat torque PSD the collapse model adds to the oscillator:
// S = lambda * (8 pi hbar^2 r^2 / m0^2) * (rho I / d), in (Nm)^2/Hz.
double csl_torque_psd(const CslParams& c, const PendulumParams& p);

// Largest diffusion rate consistent with a measured torque PSD at a given
// correlation length; rates above are excluded.
double lambda_bound(double s_measured_nm2_hz, double r_m, const PendulumParams& p);
std::vector<double> lambda_bound(double s_measured_nm2_hz, const std::vector<double>& r_grid_m,
                                 const PendulumParams& p);

struct ExclusionPoint {
    double r_m = 0.0;
    double lambda_max_per_s = 0.0;
    bool extrapolated = false;  // r exceeds the oscillator dimensions
};

struct OverlayCurve {
    std::string label;
    std::vector<double> r_m;
    std::vector<double> lambda_per_s;
};

struct ExclusionLandscape {
    std::vector<ExclusionPoint> curve;
    std::vector<OverlayCurve> overlays;
};

// Log-spaced exclusion curve plus externally supplied curves passed through
// untouched. Overlay files are CSV rows `r_m, lambda_per_s, label`.
ExclusionLandscape exclusion_landscape(double s_measured_nm2_hz, double r_min_m, double r_max_m,
                                       std::size_t points, const PendulumParams& p,
                                       const std::vector<std::string>& overlay_files = {});

}  // namespace torsim
