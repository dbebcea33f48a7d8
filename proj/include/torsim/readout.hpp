#pragma once

#include <string>
#include <vector>

#include "torsim/spectra.hpp"

namespace torsim {

// Displacement signals of the two cavity readouts (meters), one per bar end.
struct ReadoutPair {
    TimeSeries x_a;
    TimeSeries x_b;
    double l_eff_m = 0.0;

    void validate() const;
};

// theta(t) = (x_B - alpha * x_A) / L_eff, in radians.
TimeSeries combine_differential(const ReadoutPair& pair, double alpha);

struct AlphaCalibration {
    bool ok = false;
    std::string message;
    double alpha = 0.0;
    // line-band amplitude at alpha* over the single-sensor (alpha = 0) one
    double suppression_vs_single = 0.0;
    // same, referenced to the naive alpha = 1 combination
    double suppression_vs_unity = 0.0;
    std::vector<double> scan_alpha;   // coarse-scan profile, for diagnostics
    std::vector<double> scan_power;
};

struct AlphaSearchOptions {
    double search_lo = 0.0;
    double search_hi = 2.0;
    std::size_t coarse_points = 50;
    std::size_t segment_length = 1024;
    double overlap = 0.5;
    double tolerance = 1e-4;
};

// Finds alpha minimizing the band power of the combined signal around a
// common-mode line (golden-section refinement after a coarse scan; the
// coarse profile is checked for a single interior minimum first).
AlphaCalibration calibrate_alpha(const ReadoutPair& pair, double line_frequency_hz, double band_halfwidth_hz,
                                 const AlphaSearchOptions& opts = {});

// RMS amplitude over [f_lo, f_hi] of the alpha* combination over the
// single-sensor (alpha = 0) reference.
double broadband_suppression(const ReadoutPair& pair, double alpha_star, double f_lo_hz, double f_hi_hz,
                             std::size_t segment_length = 1024, double overlap = 0.5);

struct SpringFit {
    bool ok = false;
    std::string message;
    double omega_eff_rad_s = 0.0;
    double gamma_eff_rad_s = 0.0;
    double gain = 0.0;
    double residual = 0.0;  // RMS of the stacked log-magnitude/phase residual
    int iterations = 0;
};

// Least-squares fit of G(w) = gain * w_eff^2 / (w_eff^2 - w^2 + i g w) to a
// measured response, in log-magnitude and phase with equal weight, using a
// damped Gauss-Newton iteration seeded from the magnitude peak.
SpringFit fit_optical_spring(const TransferFunction& measured);

}  // namespace torsim
