#include <doctest.h>

#include "approx.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "torsim/budget.hpp"
#include "torsim/constants.hpp"

using namespace torsim;
using constants::two_pi;

namespace {

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

CavityParams cavity(double finesse) {
    CavityParams c;
    c.finesse = finesse;
    c.round_trip_m = 0.09;
    c.input_power_w = 0.02;
    c.wavelength_m = 1.064e-6;
    c.detuning = 1.0 / std::sqrt(3.0);
    c.mode_coupling = 0.7;
    return c;
}

BudgetConfig reference_config() {
    BudgetConfig cfg;
    cfg.pendulum = bar_pendulum();
    cfg.cavities = {cavity(3000.0), cavity(2400.0)};
    cfg.omega_eff_readout_rad_s = two_pi * 1000.0;
    cfg.seismic = {1e-7, -2.0, "vertical", 6.6e-3, 0.01};
    cfg.laser = {0.03, 1.3e-8, 0.2};
    cfg.holder_modes = {{two_pi * 230.0, 6.0, 4.1e4},
                        {two_pi * 350.0, 8.0, 2.5e4},
                        {two_pi * 480.0, 5.0, 1.2e4}};
    cfg.bending_modes = {{two_pi * 5200.0, 1e5, 5.4e-3}};
    return cfg;
}

double kappa_for(const PendulumParams& p, double w_eff) {
    return moment_of_inertia(p) * (w_eff * w_eff - p.omega_m_rad_s * p.omega_m_rad_s);
}

}  // namespace

TEST_CASE("isolation presets pin the attenuation at 100 Hz") {
    const FrequencyGrid grid({10.0, 20.0, 100.0, 200.0});
    SUBCASE("vertical: 70 dB at 100 Hz, f^-4 above the corner") {
        const auto h = isolation_transfer("vertical", grid);
        CHECK(h.magnitude(2) == approx_rel(3.16227766e-4).epsilon(1e-6));
        CHECK(h.magnitude(3) / h.magnitude(2) == approx_rel(1.0 / 16.0).epsilon(1e-9));
        CHECK(h.magnitude(0) == h.magnitude(1));  // flat below the corner
    }
    SUBCASE("horizontal: 100 dB at 100 Hz") {
        const auto h = isolation_transfer("horizontal", grid);
        CHECK(h.magnitude(2) == approx_rel(1e-5).epsilon(1e-6));
    }
    SUBCASE("unknown preset rejected") {
        CHECK_THROWS_AS(isolation_transfer("sideways", grid), std::invalid_argument);
    }
}

TEST_CASE("seismic component") {
    const auto p = bar_pendulum();
    const auto grid = FrequencyGrid::log_spaced(10.0, 500.0, 100);
    const auto ground = ground_motion_psd(1e-7, -2.0, grid);
    const auto iso = isolation_transfer("vertical", grid);
    const double kappa = kappa_for(p, two_pi * 1000.0);

    SUBCASE("zero cmrr kills the component") {
        const auto s = seismic_component(ground, iso, 0.0, p, kappa, 1.0);
        for (double v : s.values) CHECK(v == 0.0);
    }
    SUBCASE("scales with cmrr^2") {
        const auto s1 = seismic_component(ground, iso, 0.1, p, kappa, 1.0);
        const auto s2 = seismic_component(ground, iso, 0.2, p, kappa, 1.0);
        for (std::size_t i = 0; i < grid.size(); ++i)
            CHECK(s2.values[i] == approx_rel(4.0 * s1.values[i]).epsilon(1e-12));
    }
    SUBCASE("output is a torque PSD") {
        CHECK(seismic_component(ground, iso, 0.1, p, kappa, 1.0).unit == Unit::torque_nm);
    }
}

TEST_CASE("mirror holder component") {
    const auto p = bar_pendulum();
    const double t_k = 300.0;

    SUBCASE("single mode at 300 Hz with Q = 8: peak position and width") {
        // unit referral isolates the mode Lorentzian
        const auto grid = FrequencyGrid::linear(200.0, 400.0, 2001);
        const auto unit_ref = TransferFunction::unity(grid, Unit::displacement_m, Unit::torque_nm);
        const BendingMode mode{two_pi * 300.0, 8.0, 0.1};
        const auto s = mirror_holder_component({mode}, t_k, grid, unit_ref);

        const auto peak_it = std::max_element(s.values.begin(), s.values.end());
        const std::size_t peak = static_cast<std::size_t>(peak_it - s.values.begin());
        CHECK(grid[peak] == approx_rel(300.0).epsilon(0.01));

        // full width at half maximum ~ f0 / Q = 37.5 Hz
        const double half = *peak_it / 2.0;
        double f_lo = 0.0, f_hi = 0.0;
        for (std::size_t i = 1; i < grid.size(); ++i) {
            if (s.values[i - 1] < half && s.values[i] >= half) f_lo = grid[i];
            if (s.values[i - 1] >= half && s.values[i] < half) f_hi = grid[i];
        }
        CHECK(f_hi - f_lo == approx_rel(300.0 / 8.0).epsilon(0.05));
    }
    SUBCASE("zero temperature gives zero") {
        const auto grid = FrequencyGrid::linear(100.0, 400.0, 10);
        const auto unit_ref = TransferFunction::unity(grid, Unit::displacement_m, Unit::torque_nm);
        const auto s = mirror_holder_component({{two_pi * 300.0, 8.0, 0.1}}, 0.0, grid, unit_ref);
        for (double v : s.values) CHECK(v == 0.0);
    }
    SUBCASE("two modes add pointwise") {
        const auto grid = FrequencyGrid::linear(100.0, 400.0, 50);
        const auto unit_ref = TransferFunction::unity(grid, Unit::displacement_m, Unit::torque_nm);
        const BendingMode m1{two_pi * 200.0, 6.0, 0.1};
        const BendingMode m2{two_pi * 330.0, 9.0, 0.2};
        const auto s1 = mirror_holder_component({m1}, t_k, grid, unit_ref);
        const auto s2 = mirror_holder_component({m2}, t_k, grid, unit_ref);
        const auto both = mirror_holder_component({m1, m2}, t_k, grid, unit_ref);
        for (std::size_t i = 0; i < grid.size(); ++i)
            CHECK(both.values[i] == approx_rel(s1.values[i] + s2.values[i]).epsilon(1e-12));
    }
}

TEST_CASE("laser noise component") {
    const auto p = bar_pendulum();
    const auto grid = FrequencyGrid::log_spaced(10.0, 500.0, 50);
    const double kappa = kappa_for(p, two_pi * 1000.0);
    const auto freq = SpectralDensity::flat(grid, 0.03 * 0.03, Unit::frequency_hz);
    const auto rin = SpectralDensity::flat(grid, 1.3e-8 * 1.3e-8, Unit::relative);

    SUBCASE("frequency-noise radiation pressure term vanishes on resonance") {
        auto c = cavity(3000.0);
        c.detuning = 0.0;
        const auto zero_rin = SpectralDensity::flat(grid, 0.0, Unit::relative);
        const auto out = laser_noise_component(freq, zero_rin, c, p, kappa, grid);
        for (double v : out.frequency_rp.values) CHECK(v == 0.0);
        for (double v : out.total.values) CHECK(v == 0.0);
    }
    SUBCASE("direct evaluation of the frequency-noise chain (no suppression)") {
        // dP/ddelta / hwhm * 2 L_eff / c at the reference cavity, frozen
        const auto out = laser_noise_component(freq, rin, cavity(3000.0), p, kappa, grid);
        CHECK(std::sqrt(out.frequency_rp.values[0]) ==
              approx_rel(3.1303645529938706e-17).epsilon(1e-9));
    }
    SUBCASE("RIN radiation-pressure torque is RIN * 2 P_circ L_eff / c, flat") {
        const auto out = laser_noise_component(freq, rin, cavity(3000.0), p, kappa, grid);
        for (double v : out.rin_rp.values)
            CHECK(std::sqrt(v) == approx_rel(8.695875757639125e-18).epsilon(1e-9));
    }
    SUBCASE("suppression scales all terms linearly in amplitude") {
        const auto full = laser_noise_component(freq, rin, cavity(3000.0), p, kappa, grid, 1.0);
        const auto fifth = laser_noise_component(freq, rin, cavity(3000.0), p, kappa, grid, 0.2);
        for (std::size_t i = 0; i < grid.size(); ++i)
            CHECK(fifth.total.values[i] == approx_rel(0.04 * full.total.values[i]).epsilon(1e-9));
    }
    SUBCASE("terms add in quadrature") {
        const auto out = laser_noise_component(freq, rin, cavity(3000.0), p, kappa, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double expected =
                out.frequency_rp.values[i] + out.rin_rp.values[i] + out.rin_sensing.values[i];
            CHECK(out.total.values[i] == approx_rel(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("assembled budget") {
    const auto cfg = reference_config();
    const auto grid = FrequencyGrid::log_spaced(10.0, 500.0, 300);
    const auto b = assemble_budget(cfg, grid);

    SUBCASE("total is exactly the quadrature sum and dominates every component") {
        std::vector<SpectralDensity> parts;
        for (const auto& [n, s] : b.components) parts.push_back(s);
        const auto recomputed = quadrature_sum(parts);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(b.total.values[i] == recomputed.values[i]);
            for (const auto& [n, s] : b.components) CHECK(b.total.values[i] >= s.values[i]);
        }
    }
    SUBCASE("component ordering does not change the total") {
        std::vector<SpectralDensity> parts;
        for (const auto& [n, s] : b.components) parts.push_back(s);
        std::mt19937_64 rng(5);
        std::shuffle(parts.begin(), parts.end(), rng);
        const auto shuffled = quadrature_sum(parts);
        for (std::size_t i = 0; i < grid.size(); ++i)
            CHECK(shuffled.values[i] == approx_rel(b.total.values[i]).epsilon(1e-12));
    }
    SUBCASE("suspension thermal sits an order of magnitude below a 2e-17 overlay at 100 Hz") {
        const auto* susp = b.find("suspension_thermal");
        REQUIRE(susp != nullptr);
        const double asd = std::sqrt(susp->interpolate(100.0));
        CHECK(asd == approx_rel(0.8e-18).epsilon(0.10));
        CHECK(asd / 2e-17 < 0.125);
    }
    SUBCASE("every expected component is present") {
        for (const char* name : {"seismic", "mirror_holder", "laser", "bending_mode", "suspension_thermal",
                                 "qrpn", "shot_noise"})
            CHECK(b.find(name) != nullptr);
    }
    SUBCASE("zeroing all but one component makes the total equal it") {
        auto quiet = cfg;
        quiet.seismic.cmrr = 0.0;
        quiet.laser.frequency_noise_asd = 0.0;
        quiet.laser.rin_asd = 0.0;
        quiet.pendulum.temperature_k = 0.0;  // kills holder, bending and suspension
        const auto b2 = assemble_budget(quiet, grid);
        const auto* qrpn = b2.find("qrpn");
        const auto* shot = b2.find("shot_noise");
        REQUIRE(qrpn != nullptr);
        REQUIRE(shot != nullptr);
        for (std::size_t i = 0; i < grid.size(); ++i)
            CHECK(b2.total.values[i] ==
                  approx_rel(qrpn->values[i] + shot->values[i]).epsilon(1e-12));
    }
    SUBCASE("component failures carry the component name") {
        auto bad = cfg;
        bad.seismic.isolation = "diagonal";
        CHECK_THROWS_WITH_AS(assemble_budget(bad, grid), doctest::Contains("seismic"), std::runtime_error);
    }
}

TEST_CASE("excess report") {
    const auto cfg = reference_config();
    const auto grid = FrequencyGrid::log_spaced(10.0, 500.0, 300);

    SUBCASE("measured equal to total gives ratio one everywhere") {
        auto b = assemble_budget(cfg, grid);
        b.measured = b.total;
        const auto rep = excess_report(b, 50.0, 150.0);
        for (double r : rep.power_ratio) CHECK(r == approx_rel(1.0).epsilon(1e-12));
        for (bool f : rep.flagged) CHECK_FALSE(f);
    }
    SUBCASE("doubling the measured amplitude gives power ratio four") {
        auto b = assemble_budget(cfg, grid);
        std::vector<double> v(b.total.values);
        for (double& x : v) x *= 4.0;
        b.measured = SpectralDensity(grid, v, Unit::torque_nm);
        const auto rep = excess_report(b, 50.0, 150.0);
        for (double r : rep.power_ratio) CHECK(r == approx_rel(4.0).epsilon(1e-12));
        CHECK(rep.band_ratio == approx_rel(4.0).epsilon(1e-12));
    }
    SUBCASE("flat 2e-17 excess over the budget flags only inside 50-150 Hz") {
        auto b = assemble_budget(cfg, grid);
        std::vector<double> v(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double base = 1.05 * 1.05 * b.total.values[i];
            const double excess = (grid[i] >= 50.0 && grid[i] <= 150.0) ? 4e-34 : 0.0;
            v[i] = std::max(base, excess);
        }
        b.measured = SpectralDensity(grid, v, Unit::torque_nm);
        const auto rep = excess_report(b, 50.0, 150.0);
        std::size_t flagged = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (rep.flagged[i]) {
                ++flagged;
                CHECK(grid[i] >= 50.0);
                CHECK(grid[i] <= 150.0);
            }
        }
        CHECK(flagged > 10);
        CHECK(rep.band_ratio > 2.0);
    }
    SUBCASE("missing measured overlay is rejected") {
        const auto b = assemble_budget(cfg, grid);
        CHECK_THROWS_AS(excess_report(b, 50.0, 150.0), std::invalid_argument);
    }
}
