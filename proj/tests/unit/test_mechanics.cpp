#include <doctest.h>

#include "approx.hpp"

#include <cmath>

#include "torsim/constants.hpp"
#include "torsim/mechanics.hpp"

using namespace torsim;
using constants::two_pi;

namespace {

// 10 mg silica bar, 90 mHz torsion mode, Q = 2.6e3, structural damping
PendulumParams bar_pendulum() {
    PendulumParams p;
    p.mass_kg = 1.0e-5;
    p.bar_length_m = 0.015;
    p.bar_width_m = 0.0015;
    p.bar_thickness_m = 0.0002;
    p.density_kg_m3 = 2200.0;
    p.omega_m_rad_s = two_pi * 0.09;
    p.quality = 2600.0;
    p.l_eff_m = 0.01;
    p.temperature_k = 300.0;
    p.damping = DampingModel::structural;
    return p;
}

// discretize the bar into point masses and sum dm * r^2 about the vertical
// center axis
double inertia_by_discretization(const PendulumParams& p, std::size_t cells) {
    const double dm = p.mass_kg / static_cast<double>(cells * cells);
    double acc = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
        const double x = (-0.5 + (static_cast<double>(i) + 0.5) / static_cast<double>(cells)) * p.bar_length_m;
        for (std::size_t j = 0; j < cells; ++j) {
            const double y =
                (-0.5 + (static_cast<double>(j) + 0.5) / static_cast<double>(cells)) * p.bar_width_m;
            acc += dm * (x * x + y * y);
        }
    }
    return acc;
}

// dense grid concentrating points inside the resonance line via a tangent map
FrequencyGrid resonance_grid(double f_center, double halfwidth_hz, double span_factor, std::size_t n) {
    const double f_lo = f_center / span_factor;
    const double f_hi = f_center * span_factor;
    const double u_lo = std::atan((f_lo - f_center) / halfwidth_hz);
    const double u_hi = std::atan((f_hi - f_center) / halfwidth_hz);
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = u_lo + (u_hi - u_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        f[i] = f_center + halfwidth_hz * std::tan(u);
    }
    return FrequencyGrid(std::move(f));
}

}  // namespace

TEST_CASE("moment of inertia") {
    auto p = bar_pendulum();
    const double i_formula = moment_of_inertia(p);
    CHECK(i_formula == approx_rel(1.89375e-10).epsilon(1e-6));

    SUBCASE("matches a point-mass discretization sum") {
        CHECK(i_formula == approx_rel(inertia_by_discretization(p, 400)).epsilon(1e-5));
    }
    SUBCASE("square cross-section reduces to m L^2 / 6") {
        p.bar_width_m = p.bar_length_m;
        CHECK(moment_of_inertia(p) ==
              approx_rel(p.mass_kg * p.bar_length_m * p.bar_length_m / 6.0).epsilon(1e-12));
    }
    SUBCASE("linear in mass") {
        auto p2 = bar_pendulum();
        p2.mass_kg *= 2.0;
        CHECK(moment_of_inertia(p2) == approx_rel(2.0 * i_formula).epsilon(1e-12));
    }
}

TEST_CASE("damping rate models") {
    auto p = bar_pendulum();
    const double gamma_viscous = p.omega_m_rad_s / p.quality;

    SUBCASE("structural equals viscous on resonance") {
        p.damping = DampingModel::structural;
        CHECK(damping_rate(p, p.omega_m_rad_s) == approx_rel(gamma_viscous).epsilon(1e-15));
    }
    SUBCASE("structural halves at twice the resonance") {
        CHECK(damping_rate(p, 2.0 * p.omega_m_rad_s) == approx_rel(0.5 * gamma_viscous).epsilon(1e-15));
    }
    SUBCASE("bar parameters give ~2 pi x 35 uHz on resonance") {
        // 0.09 Hz / 2600 = 34.6 uHz, matching the measured 35 +- 3 uHz
        CHECK(damping_rate(p, p.omega_m_rad_s) ==
              approx_rel(two_pi * 35e-6).epsilon(0.1));
    }
}

TEST_CASE("thermal torque spectral density") {
    auto p = bar_pendulum();
    const auto grid = FrequencyGrid::log_spaced(1.0, 1000.0, 200);

    SUBCASE("0.8e-18 Nm/sqrt(Hz) at 100 Hz for the bar parameters") {
        const auto s = thermal_torque_psd(p, grid);
        CHECK(std::sqrt(s.interpolate(100.0)) == approx_rel(0.8e-18).epsilon(0.10));
        // frozen direct evaluation: 4 kB T I omega_m^2 / (Q omega)
        CHECK(std::sqrt(s.interpolate(100.0)) == approx_rel(7.8369e-19).epsilon(1e-4));
        CHECK(s.unit == Unit::torque_nm);
    }
    SUBCASE("angular-frequency convention: value at f uses omega = 2 pi f") {
        const auto s = thermal_torque_psd(p, FrequencyGrid({100.0}));
        const double expected = 4.0 * constants::boltzmann * p.temperature_k * moment_of_inertia(p) *
                                p.omega_m_rad_s * p.omega_m_rad_s / (p.quality * two_pi * 100.0);
        CHECK(s.values[0] == approx_rel(expected).epsilon(1e-14));
    }
    SUBCASE("zero temperature gives zero everywhere") {
        p.temperature_k = 0.0;
        const auto s = thermal_torque_psd(p, grid);
        for (double v : s.values) CHECK(v == 0.0);
    }
    SUBCASE("structural / viscous ratio is omega_m / omega at machine precision") {
        auto pv = bar_pendulum();
        pv.damping = DampingModel::viscous;
        const auto ss = thermal_torque_psd(p, grid);
        const auto sv = thermal_torque_psd(pv, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double expected = p.omega_m_rad_s / (two_pi * grid[i]);
            CHECK(ss.values[i] / sv.values[i] == approx_rel(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("susceptibility") {
    auto p = bar_pendulum();
    const double inertia = moment_of_inertia(p);

    SUBCASE("DC compliance 1/(I omega_m^2) for kappa = 0") {
        const auto chi = susceptibility(p, 0.0, FrequencyGrid({1e-4}));
        CHECK(std::abs(chi.values[0]) ==
              approx_rel(1.0 / (inertia * p.omega_m_rad_s * p.omega_m_rad_s)).epsilon(1e-5));
    }
    SUBCASE("free-mass rolloff 1/(I omega^2) far above resonance") {
        const double f = 1000.0;
        const auto chi = susceptibility(p, 0.0, FrequencyGrid({f}));
        const double w = two_pi * f;
        CHECK(std::abs(chi.values[0]) == approx_rel(1.0 / (inertia * w * w)).epsilon(1e-6));
    }
    SUBCASE("spring-dominated plateau: |chi(100 Hz)| within 2% of 1/(I omega_eff^2) for a 1 kHz spring") {
        const double w_eff = two_pi * 1000.0;
        const double kappa = inertia * (w_eff * w_eff - p.omega_m_rad_s * p.omega_m_rad_s);
        CHECK(effective_omega(p, kappa) == approx_rel(w_eff).epsilon(1e-12));
        const auto chi = susceptibility(p, kappa, FrequencyGrid({100.0}));
        CHECK(std::abs(chi.values[0]) == approx_rel(1.0 / (inertia * w_eff * w_eff)).epsilon(0.02));
    }
    SUBCASE("viscous peak magnitude is Q_eff/(I omega_eff^2) within 1%") {
        p.damping = DampingModel::viscous;
        const double w_eff = two_pi * 10.0;
        const double kappa = inertia * (w_eff * w_eff - p.omega_m_rad_s * p.omega_m_rad_s);
        const double gamma = p.omega_m_rad_s / p.quality;
        const double q_eff = w_eff / gamma;
        const auto chi = susceptibility(p, kappa, FrequencyGrid({10.0}));
        CHECK(std::abs(chi.values[0]) ==
              approx_rel(q_eff / (inertia * w_eff * w_eff)).epsilon(0.01));
    }
}

TEST_CASE("equipartition: integral of S_tau |chi|^2 equals kB T / (I omega_m^2) for a viscous resonance") {
    auto p = bar_pendulum();
    p.damping = DampingModel::viscous;
    const double inertia = moment_of_inertia(p);
    const double gamma = p.omega_m_rad_s / p.quality;
    const double f_m = p.omega_m_rad_s / two_pi;
    const double halfwidth_hz = gamma / (2.0 * two_pi);  // half-power half-width of the angle PSD

    const auto grid = resonance_grid(f_m, halfwidth_hz, 1000.0, 200001);
    const auto s_angle = apply_transfer(susceptibility(p, 0.0, grid), thermal_torque_psd(p, grid));
    const double variance = s_angle.integrate();
    const double expected = constants::boltzmann * p.temperature_k / (inertia * p.omega_m_rad_s * p.omega_m_rad_s);
    CHECK(variance == approx_rel(expected).epsilon(0.01));
}

TEST_CASE("mode thermal displacement") {
    BendingMode m;
    m.omega_rad_s = two_pi * 300.0;
    m.quality = 50.0;
    m.effective_mass_kg = 1e-3;
    const double t_k = 300.0;

    SUBCASE("structural on-resonance peak equals 4 kB T Q / (mu omega^3)") {
        const FrequencyGrid grid({150.0, 300.0, 600.0});
        const auto s = bending_mode_thermal({m}, t_k, grid);
        const double expected = 4.0 * constants::boltzmann * t_k * m.quality /
                                (m.effective_mass_kg * std::pow(m.omega_rad_s, 3));
        CHECK(s.values[1] == approx_rel(expected).epsilon(1e-6));
        CHECK(s.unit == Unit::displacement_m);
    }
    SUBCASE("zero temperature gives zero") {
        const auto s = bending_mode_thermal({m}, 0.0, FrequencyGrid::linear(10.0, 500.0, 20));
        for (double v : s.values) CHECK(v == 0.0);
    }
    SUBCASE("two identical modes give exactly twice one") {
        const auto grid = FrequencyGrid::log_spaced(10.0, 1000.0, 50);
        const auto one = bending_mode_thermal({m}, t_k, grid);
        const auto two = bending_mode_thermal({m, m}, t_k, grid);
        for (std::size_t i = 0; i < grid.size(); ++i)
            CHECK(two.values[i] == approx_rel(2.0 * one.values[i]).epsilon(1e-14));
    }
    SUBCASE("empty mode list is rejected") {
        CHECK_THROWS_AS(bending_mode_thermal({}, t_k, FrequencyGrid({1.0})), std::invalid_argument);
    }
}

TEST_CASE("torque referral round trip is the identity") {
    auto p = bar_pendulum();
    const auto grid = FrequencyGrid::log_spaced(10.0, 500.0, 60);
    const double kappa = moment_of_inertia(p) * (std::pow(two_pi * 1000.0, 2));
    const auto chi = susceptibility(p, kappa, grid);
    const auto referral = torque_referral(p, kappa, grid);

    // torque PSD -> angle -> displacement at the spot -> back to torque
    const auto torque = thermal_torque_psd(p, grid);
    auto angle = apply_transfer(chi, torque);
    std::vector<double> disp(angle.values);
    for (double& v : disp) v *= p.l_eff_m * p.l_eff_m;
    const SpectralDensity displacement(grid, disp, Unit::displacement_m);
    const auto back = apply_transfer(referral, displacement);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(back.values[i] == approx_rel(torque.values[i]).epsilon(1e-12));
}

TEST_CASE("parameter validation") {
    auto p = bar_pendulum();
    p.quality = 0.4;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);

    auto p2 = bar_pendulum();
    p2.mass_kg = 3e-5;  // 3x the geometric mass
    CHECK_FALSE(p2.warnings().empty());
    CHECK(bar_pendulum().warnings().empty());
}
