#pragma once

#include <string>
#include <vector>

#include "torsim/spectra.hpp"

namespace torsim {

enum class DampingModel { viscous, structural };

// Torsion oscillator: a uniform bar suspended at its center, rotating about
// the vertical fiber axis.
struct PendulumParams {
    double mass_kg = 0.0;
    double bar_length_m = 0.0;
    double bar_width_m = 0.0;
    double bar_thickness_m = 0.0;
    double density_kg_m3 = 0.0;
    double omega_m_rad_s = 0.0;   // torsion resonance
    double quality = 0.0;         // Q of the torsion mode
    double l_eff_m = 0.0;         // lever arm of the readout spots
    double temperature_k = 0.0;
    DampingModel damping = DampingModel::structural;

    void validate() const;                       // throws on hard violations
    std::vector<std::string> warnings() const;   // soft consistency checks
};

// Internal or holder resonance characterized by its thermal response at the
// readout point.
struct BendingMode {
    double omega_rad_s = 0.0;
    double quality = 0.0;
    double effective_mass_kg = 0.0;

    void validate() const;
};

// I = m (L^2 + w^2) / 12 for rotation about the vertical center axis.
double moment_of_inertia(const PendulumParams& p);

// viscous: omega_m/Q; structural: (omega_m/Q)(omega_m/omega).
double damping_rate(const PendulumParams& p, double omega_rad_s);

// One-sided thermal torque PSD, 4 kB T I gamma(omega), in (Nm)^2/Hz.
SpectralDensity thermal_torque_psd(const PendulumParams& p, const FrequencyGrid& grid);

// Angle response to torque with an optional lossless optical stiffness:
// chi(omega) = 1 / (I (omega_eff^2 - omega^2 + i omega gamma(omega))),
// omega_eff^2 = omega_m^2 + kappa_opt/I. The loss term always uses the
// mechanical damping model, so an optical spring dilutes the dissipation.
TransferFunction susceptibility(const PendulumParams& p, double kappa_opt_nm_rad, const FrequencyGrid& grid);

// Resonance frequency of the optically stiffened mode.
double effective_omega(const PendulumParams& p, double kappa_opt_nm_rad);

// Thermal displacement PSD (m^2/Hz) of structurally damped modes at the
// readout spot, summed incoherently.
SpectralDensity bending_mode_thermal(const std::vector<BendingMode>& modes, double temperature_k,
                                     const FrequencyGrid& grid);

// Same for viscously damped modes (used for the mirror-holder resonances).
SpectralDensity viscous_mode_thermal(const std::vector<BendingMode>& modes, double temperature_k,
                                     const FrequencyGrid& grid);

// Sensing referral: displacement (m) seen in a cavity -> equivalent torque
// (Nm) on the pendulum, |H| = 1/(L_eff |chi|).
TransferFunction torque_referral(const PendulumParams& p, double kappa_opt_nm_rad, const FrequencyGrid& grid);

}  // namespace torsim
