#include "torsim/mechanics.hpp"

#include <cmath>
#include <stdexcept>

#include "torsim/constants.hpp"

namespace torsim {

namespace {
constexpr double kb = constants::boltzmann;

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string("PendulumParams: ") + name + " must be positive and finite");
}
}  // namespace

void PendulumParams::validate() const {
    require_positive(mass_kg, "mass_kg");
    require_positive(bar_length_m, "bar_length_m");
    require_positive(bar_width_m, "bar_width_m");
    require_positive(bar_thickness_m, "bar_thickness_m");
    require_positive(density_kg_m3, "density_kg_m3");
    require_positive(omega_m_rad_s, "omega_m_rad_s");
    require_positive(l_eff_m, "l_eff_m");
    if (!(temperature_k >= 0.0) || !std::isfinite(temperature_k))
        throw std::invalid_argument("PendulumParams: temperature_k must be >= 0");
    if (!(quality > 0.5))
        throw std::invalid_argument("PendulumParams: quality must exceed 1/2 (underdamped)");
}

std::vector<std::string> PendulumParams::warnings() const {
    std::vector<std::string> w;
    const double m_geom = density_kg_m3 * bar_length_m * bar_width_m * bar_thickness_m;
    if (std::abs(mass_kg - m_geom) > 0.2 * m_geom)
        w.push_back("mass_kg differs from density*volume by more than 20% (" + std::to_string(mass_kg) +
                    " vs " + std::to_string(m_geom) + " kg)");
    return w;
}

void BendingMode::validate() const {
    if (!(omega_rad_s > 0.0) || !(quality > 0.5) || !(effective_mass_kg > 0.0))
        throw std::invalid_argument("BendingMode: frequency, quality (>1/2) and effective mass must be positive");
}

double moment_of_inertia(const PendulumParams& p) {
    return p.mass_kg * (p.bar_length_m * p.bar_length_m + p.bar_width_m * p.bar_width_m) / 12.0;
}

double damping_rate(const PendulumParams& p, double omega_rad_s) {
    if (!(omega_rad_s > 0.0)) throw std::invalid_argument("damping_rate: omega must be positive");
    const double gamma_viscous = p.omega_m_rad_s / p.quality;
    if (p.damping == DampingModel::viscous) return gamma_viscous;
    return gamma_viscous * (p.omega_m_rad_s / omega_rad_s);
}

SpectralDensity thermal_torque_psd(const PendulumParams& p, const FrequencyGrid& grid) {
    p.validate();
    const double inertia = moment_of_inertia(p);
    const double scale = 4.0 * kb * p.temperature_k * inertia;
    std::vector<double> s(grid.size());
    const auto& f = grid.values();
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(f.size()); ++i)
        s[static_cast<std::size_t>(i)] = scale * damping_rate(p, constants::two_pi * f[static_cast<std::size_t>(i)]);
    return SpectralDensity(grid, std::move(s), Unit::torque_nm);
}

double effective_omega(const PendulumParams& p, double kappa_opt_nm_rad) {
    if (kappa_opt_nm_rad < 0.0) throw std::invalid_argument("effective_omega: kappa_opt must be >= 0");
    const double inertia = moment_of_inertia(p);
    return std::sqrt(p.omega_m_rad_s * p.omega_m_rad_s + kappa_opt_nm_rad / inertia);
}

TransferFunction susceptibility(const PendulumParams& p, double kappa_opt_nm_rad, const FrequencyGrid& grid) {
    p.validate();
    if (kappa_opt_nm_rad < 0.0) throw std::invalid_argument("susceptibility: kappa_opt must be >= 0");
    const double inertia = moment_of_inertia(p);
    const double w_eff2 = p.omega_m_rad_s * p.omega_m_rad_s + kappa_opt_nm_rad / inertia;
    std::vector<std::complex<double>> h(grid.size());
    const auto& f = grid.values();
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(f.size()); ++i) {
        const double w = constants::two_pi * f[static_cast<std::size_t>(i)];
        // loss on the mechanical stiffness only: i*w*gamma(w) equals the
        // constant imaginary stiffness I*omega_m^2/Q in the structural case
        const std::complex<double> denom(w_eff2 - w * w, w * damping_rate(p, w));
        h[static_cast<std::size_t>(i)] = 1.0 / (inertia * denom);
    }
    return TransferFunction(grid, std::move(h), Unit::torque_nm, Unit::angle_rad);
}

namespace {

// Thermal displacement PSD of a single mode; loss angle structural or viscous.
double mode_thermal_psd(const BendingMode& m, double temperature_k, double omega, bool structural) {
    const double gamma = structural ? (m.omega_rad_s / m.quality) * (m.omega_rad_s / omega)
                                    : m.omega_rad_s / m.quality;
    const double s_force = 4.0 * kb * temperature_k * m.effective_mass_kg * gamma;
    const double d_re = m.omega_rad_s * m.omega_rad_s - omega * omega;
    const double d_im = omega * gamma;
    const double chi2 = 1.0 / (m.effective_mass_kg * m.effective_mass_kg * (d_re * d_re + d_im * d_im));
    return s_force * chi2;
}

SpectralDensity modes_thermal(const std::vector<BendingMode>& modes, double temperature_k,
                              const FrequencyGrid& grid, bool structural) {
    if (modes.empty()) throw std::invalid_argument("mode thermal: mode list is empty");
    if (temperature_k < 0.0) throw std::invalid_argument("mode thermal: temperature must be >= 0");
    for (const auto& m : modes) m.validate();
    std::vector<double> s(grid.size(), 0.0);
    const auto& f = grid.values();
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(f.size()); ++i) {
        const double w = constants::two_pi * f[static_cast<std::size_t>(i)];
        double acc = 0.0;
        for (const auto& m : modes) acc += mode_thermal_psd(m, temperature_k, w, structural);
        s[static_cast<std::size_t>(i)] = acc;
    }
    return SpectralDensity(grid, std::move(s), Unit::displacement_m);
}

}  // namespace

SpectralDensity bending_mode_thermal(const std::vector<BendingMode>& modes, double temperature_k,
                                     const FrequencyGrid& grid) {
    return modes_thermal(modes, temperature_k, grid, true);
}

SpectralDensity viscous_mode_thermal(const std::vector<BendingMode>& modes, double temperature_k,
                                     const FrequencyGrid& grid) {
    return modes_thermal(modes, temperature_k, grid, false);
}

TransferFunction torque_referral(const PendulumParams& p, double kappa_opt_nm_rad, const FrequencyGrid& grid) {
    const auto chi = susceptibility(p, kappa_opt_nm_rad, grid);
    std::vector<std::complex<double>> h(grid.size());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = 1.0 / (p.l_eff_m * chi.values[i]);
    return TransferFunction(grid, std::move(h), Unit::displacement_m, Unit::torque_nm);
}

}  // namespace torsim
