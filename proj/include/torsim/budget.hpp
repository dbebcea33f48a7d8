#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "torsim/mechanics.hpp"
#include "torsim/optics.hpp"
#include "torsim/spectra.hpp"

namespace torsim {

// Torque-referred noise decomposition; `total` is always the quadrature sum
// of the components on the shared grid.
struct NoiseBudget {
    std::vector<std::pair<std::string, SpectralDensity>> components;
    SpectralDensity total;
    std::optional<SpectralDensity> measured;

    const SpectralDensity* find(const std::string& name) const;
};

// Two-stage isolation stack: flat below the platform resonance, f^-4 above,
// pinned to -70 dB (vertical) or -100 dB (horizontal) at 100 Hz.
TransferFunction isolation_transfer(const std::string& preset, const FrequencyGrid& grid,
                                    double corner_hz = 20.0);

// Generic ground-motion model: amplitude asd_1hz * f^exponent in m/sqrt(Hz).
SpectralDensity ground_motion_psd(double asd_1hz, double exponent, const FrequencyGrid& grid);

// Ground displacement through the isolation stack into cavity length
// (x length_coupling), attenuated by the differential readout (x cmrr),
// referred to torque through the optically stiffened susceptibility.
SpectralDensity seismic_component(const SpectralDensity& ground, const TransferFunction& isolation,
                                  double cmrr, const PendulumParams& p, double kappa_ref_nm_rad,
                                  double length_coupling = 1.0);

// Viscously damped holder resonances, thermal displacement referred to torque.
SpectralDensity mirror_holder_component(const std::vector<BendingMode>& modes, double temperature_k,
                                        const FrequencyGrid& grid, const TransferFunction& referral);

struct LaserNoiseBreakdown {
    SpectralDensity frequency_rp;  // frequency noise -> intracavity power -> torque
    SpectralDensity rin_rp;        // intensity noise -> classical radiation pressure torque
    SpectralDensity rin_sensing;   // intensity noise -> readout-equivalent torque
    SpectralDensity total;
};

// Laser frequency and intensity noise referred to torque for one readout
// cavity. `differential_suppression` is the residual fraction of this
// common-mode noise surviving the two-cavity subtraction.
LaserNoiseBreakdown laser_noise_component(const SpectralDensity& freq_noise, const SpectralDensity& rin,
                                          const CavityParams& c, const PendulumParams& p,
                                          double kappa_ref_nm_rad, const FrequencyGrid& grid,
                                          double differential_suppression = 1.0);

struct SeismicConfig {
    double ground_asd_1hz = 1e-7;     // m/sqrt(Hz) at 1 Hz
    double ground_exponent = -2.0;
    std::string isolation = "vertical";
    double length_coupling = 1.0;     // platform motion -> cavity length
    double cmrr = 1.0;                // common-mode residual of the differential readout
};

struct LaserConfig {
    double frequency_noise_asd = 0.0;     // Hz/sqrt(Hz), flat
    double rin_asd = 0.0;                 // 1/sqrt(Hz), flat
    double differential_suppression = 1.0;
};

struct BudgetConfig {
    PendulumParams pendulum;
    std::vector<CavityParams> cavities;   // two readout cavities
    double omega_eff_readout_rad_s = 0.0; // measured spring used for torque referral
    SeismicConfig seismic;
    LaserConfig laser;
    std::vector<BendingMode> holder_modes;
    std::vector<BendingMode> bending_modes;
};

// Builds every component on `grid` and their quadrature total. Component
// failures are rethrown with the component name attached.
NoiseBudget assemble_budget(const BudgetConfig& cfg, const FrequencyGrid& grid,
                            std::optional<SpectralDensity> measured = std::nullopt);

struct ExcessReport {
    FrequencyGrid grid;
    std::vector<double> power_ratio;   // measured / total per bin
    std::vector<bool> flagged;         // ratio above threshold
    double band_ratio = 0.0;           // integrated over the requested band
    double threshold = 2.0;
    double band_lo_hz = 0.0;
    double band_hi_hz = 0.0;
};

ExcessReport excess_report(const NoiseBudget& b, double band_lo_hz, double band_hi_hz,
                           double power_threshold = 2.0);

}  // namespace torsim
