#pragma once

#include "torsim/mechanics.hpp"
#include "torsim/spectra.hpp"

namespace torsim {

// Drive and geometry of one readout cavity. Detuning is measured in cavity
// half-linewidths; positive means blue-detuned.
struct CavityParams {
    double finesse = 0.0;
    double round_trip_m = 0.0;     // round-trip optical path
    double input_power_w = 0.0;
    double wavelength_m = 0.0;
    double detuning = 0.0;         // half-linewidths
    double mode_coupling = 0.0;    // eta in [0, 1]

    void validate() const;

    double fsr_hz() const;             // c / round_trip
    double linewidth_fwhm_hz() const;  // FSR / finesse
    double max_circulating_w() const;  // eta * P_in * F / pi, on resonance
};

// eta * P_in * (F/pi) / (1 + delta^2).
double circulating_power(const CavityParams& c);

struct OpticalSpring {
    double linear_stiffness_n_m = 0.0;      // per cavity, along the optical axis
    double torsional_per_cavity_nm_rad = 0.0;
    double torsional_total_nm_rad = 0.0;    // both cavities
};

// Adiabatic (instantaneous-cavity) spring from the detuning dependence of
// intracavity radiation pressure: K = 16 F P_max delta / (c lambda (1+delta^2)^2).
// Red detuning (delta < 0) gives a negative (anti-restoring) stiffness.
OpticalSpring optical_spring_stiffness(const CavityParams& c, double l_eff_m);

struct EffectiveResonance {
    double omega_eff_rad_s = 0.0;
    bool adiabatic_ok = true;  // false when omega_eff exceeds linewidth/10
};

// Torsion frequency stiffened by two identical cavities.
EffectiveResonance effective_resonance(const CavityParams& c, const PendulumParams& p);

// Quantum radiation pressure torque noise: flat PSD (2 hbar / delta) m
// omega_eff^2 L_eff^2 in (Nm)^2/Hz. Rejects delta = 0 (no spring-mediated
// back-action in this model on resonance).
SpectralDensity qrpn_torque_psd(double detuning, double mass_kg, double omega_eff_rad_s, double l_eff_m,
                                const FrequencyGrid& grid);

// Detuned-cavity phase-readout imprecision of the two-cavity differential
// signal, referred to torque through the optically stiffened susceptibility.
// A single overall calibration factor (see optics.cpp) sets the absolute
// scale to the design sensitivity at the reference parameters.
// If omega_eff_override_rad_s > 0, the referral uses that spring instead of
// the model-derived one.
SpectralDensity shot_noise_torque_floor(const CavityParams& c, const PendulumParams& p,
                                        const FrequencyGrid& grid, double omega_eff_override_rad_s = 0.0);

// Displacement-equivalent imprecision ASD^2 (m^2/Hz) of one cavity readout,
// before torque referral and calibration.
double shot_noise_displacement_psd(const CavityParams& c);

}  // namespace torsim
