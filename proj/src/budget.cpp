#include "torsim/budget.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "torsim/constants.hpp"

namespace torsim {

const SpectralDensity* NoiseBudget::find(const std::string& name) const {
    for (const auto& [n, s] : components)
        if (n == name) return &s;
    return nullptr;
}

TransferFunction isolation_transfer(const std::string& preset, const FrequencyGrid& grid, double corner_hz) {
    double db_at_100;
    if (preset == "vertical")
        db_at_100 = -70.0;
    else if (preset == "horizontal")
        db_at_100 = -100.0;
    else
        throw std::invalid_argument("isolation_transfer: preset must be 'vertical' or 'horizontal'");
    const double target = std::pow(10.0, db_at_100 / 20.0);
    const double plateau = target * std::pow(100.0 / corner_hz, 4.0);
    std::vector<std::complex<double>> h(grid.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double f = grid[i];
        h[i] = f <= corner_hz ? plateau : plateau * std::pow(corner_hz / f, 4.0);
    }
    return TransferFunction(grid, std::move(h), Unit::displacement_m, Unit::displacement_m);
}

SpectralDensity ground_motion_psd(double asd_1hz, double exponent, const FrequencyGrid& grid) {
    if (!(asd_1hz >= 0.0)) throw std::invalid_argument("ground_motion_psd: amplitude must be >= 0");
    std::vector<double> s(grid.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double a = asd_1hz * std::pow(grid[i], exponent);
        s[i] = a * a;
    }
    return SpectralDensity(grid, std::move(s), Unit::displacement_m);
}

SpectralDensity seismic_component(const SpectralDensity& ground, const TransferFunction& isolation,
                                  double cmrr, const PendulumParams& p, double kappa_ref_nm_rad,
                                  double length_coupling) {
    if (!(cmrr >= 0.0)) throw std::invalid_argument("seismic_component: cmrr must be >= 0");
    if (!(length_coupling >= 0.0)) throw std::invalid_argument("seismic_component: length_coupling must be >= 0");
    SpectralDensity on_platform = apply_transfer(isolation, ground);
    const double k2 = (cmrr * length_coupling) * (cmrr * length_coupling);
    for (double& v : on_platform.values) v *= k2;
    const auto referral = torque_referral(p, kappa_ref_nm_rad, on_platform.grid);
    return apply_transfer(referral, on_platform);
}

SpectralDensity mirror_holder_component(const std::vector<BendingMode>& modes, double temperature_k,
                                        const FrequencyGrid& grid, const TransferFunction& referral) {
    const SpectralDensity displacement = viscous_mode_thermal(modes, temperature_k, grid);
    return apply_transfer(referral, displacement);
}

LaserNoiseBreakdown laser_noise_component(const SpectralDensity& freq_noise, const SpectralDensity& rin,
                                          const CavityParams& c, const PendulumParams& p,
                                          double kappa_ref_nm_rad, const FrequencyGrid& grid,
                                          double differential_suppression) {
    c.validate();
    p.validate();
    if (!freq_noise.grid.same_as(grid) || !rin.grid.same_as(grid))
        throw std::invalid_argument("laser_noise_component: grid mismatch");
    if (freq_noise.unit != Unit::frequency_hz || rin.unit != Unit::relative)
        throw std::invalid_argument("laser_noise_component: expected Hz^2/Hz frequency noise and relative^2/Hz RIN");
    if (!(differential_suppression >= 0.0))
        throw std::invalid_argument("laser_noise_component: suppression must be >= 0");

    const double delta = c.detuning;
    const double d2 = delta * delta;
    const double hwhm_hz = c.linewidth_fwhm_hz() / 2.0;
    const double p_max = c.max_circulating_w();
    const double p_circ = p_max / (1.0 + d2);
    const double dp_ddelta = p_max * 2.0 * std::abs(delta) / ((1.0 + d2) * (1.0 + d2));
    const double rp_per_watt = 2.0 * p.l_eff_m / constants::speed_of_light;  // Nm per W on one bar end

    // laser frequency -> detuning -> circulating power -> radiation pressure
    const double freq_to_torque = (dp_ddelta / hwhm_hz) * rp_per_watt * differential_suppression;
    std::vector<double> s_freq(grid.size());
    for (std::size_t i = 0; i < s_freq.size(); ++i)
        s_freq[i] = freq_noise.values[i] * freq_to_torque * freq_to_torque;

    // intensity noise -> classical radiation pressure
    const double rin_to_torque = p_circ * rp_per_watt * differential_suppression;
    std::vector<double> s_rin_rp(grid.size());
    for (std::size_t i = 0; i < s_rin_rp.size(); ++i)
        s_rin_rp[i] = rin.values[i] * rin_to_torque * rin_to_torque;

    // intensity noise mimicking displacement in the detuned readout
    bool any_rin = false;
    for (double v : rin.values) any_rin = any_rin || v > 0.0;
    std::vector<double> s_rin_sense(grid.size(), 0.0);
    if (any_rin) {
        if (delta == 0.0)
            throw std::invalid_argument(
                "laser_noise_component: readout slope vanishes on resonance; RIN sensing term undefined");
        const double x_per_rin = (1.0 + d2) / (2.0 * std::abs(delta)) * c.wavelength_m / (4.0 * c.finesse) *
                                 differential_suppression;
        const auto referral = torque_referral(p, kappa_ref_nm_rad, grid);
        for (std::size_t i = 0; i < s_rin_sense.size(); ++i)
            s_rin_sense[i] = rin.values[i] * x_per_rin * x_per_rin * std::norm(referral.values[i]);
    }

    LaserNoiseBreakdown out;
    out.frequency_rp = SpectralDensity(grid, std::move(s_freq), Unit::torque_nm);
    out.rin_rp = SpectralDensity(grid, std::move(s_rin_rp), Unit::torque_nm);
    out.rin_sensing = SpectralDensity(grid, std::move(s_rin_sense), Unit::torque_nm);
    out.total = quadrature_sum(
        std::vector<SpectralDensity>{out.frequency_rp, out.rin_rp, out.rin_sensing});
    return out;
}

NoiseBudget assemble_budget(const BudgetConfig& cfg, const FrequencyGrid& grid,
                            std::optional<SpectralDensity> measured) {
    cfg.pendulum.validate();
    if (cfg.cavities.size() != 2)
        throw std::invalid_argument("assemble_budget: expected exactly two readout cavities");
    for (const auto& c : cfg.cavities) c.validate();
    if (!(cfg.omega_eff_readout_rad_s > cfg.pendulum.omega_m_rad_s))
        throw std::invalid_argument("assemble_budget: readout omega_eff must exceed the bare resonance");

    const PendulumParams& p = cfg.pendulum;
    const double inertia = moment_of_inertia(p);
    const double kappa_ref =
        inertia * (cfg.omega_eff_readout_rad_s * cfg.omega_eff_readout_rad_s - p.omega_m_rad_s * p.omega_m_rad_s);
    const auto referral = torque_referral(p, kappa_ref, grid);

    NoiseBudget b;
    auto add = [&](const char* name, auto&& make) {
        try {
            b.components.emplace_back(name, make());
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string("budget component '") + name + "' failed: " + e.what());
        }
    };

    add("seismic", [&] {
        const auto ground = ground_motion_psd(cfg.seismic.ground_asd_1hz, cfg.seismic.ground_exponent, grid);
        const auto iso = isolation_transfer(cfg.seismic.isolation, grid);
        return seismic_component(ground, iso, cfg.seismic.cmrr, p, kappa_ref, cfg.seismic.length_coupling);
    });
    add("mirror_holder", [&] {
        return mirror_holder_component(cfg.holder_modes, p.temperature_k, grid, referral);
    });
    add("laser", [&] {
        const auto freq = SpectralDensity::flat(
            grid, cfg.laser.frequency_noise_asd * cfg.laser.frequency_noise_asd, Unit::frequency_hz);
        const auto rin = SpectralDensity::flat(grid, cfg.laser.rin_asd * cfg.laser.rin_asd, Unit::relative);
        return laser_noise_component(freq, rin, cfg.cavities[0], p, kappa_ref, grid,
                                     cfg.laser.differential_suppression)
            .total;
    });
    add("bending_mode", [&] {
        return apply_transfer(referral, bending_mode_thermal(cfg.bending_modes, p.temperature_k, grid));
    });
    add("suspension_thermal", [&] { return thermal_torque_psd(p, grid); });
    add("qrpn", [&] {
        return qrpn_torque_psd(cfg.cavities[0].detuning, p.mass_kg, cfg.omega_eff_readout_rad_s, p.l_eff_m,
                               grid);
    });
    add("shot_noise", [&] {
        return shot_noise_torque_floor(cfg.cavities[0], p, grid, cfg.omega_eff_readout_rad_s);
    });

    std::vector<SpectralDensity> parts;
    parts.reserve(b.components.size());
    for (const auto& [n, s] : b.components) parts.push_back(s);
    b.total = quadrature_sum(parts);
    if (measured) {
        if (!measured->grid.same_as(grid))
            throw std::invalid_argument("assemble_budget: measured overlay grid mismatch");
        b.measured = std::move(measured);
    }
    return b;
}

ExcessReport excess_report(const NoiseBudget& b, double band_lo_hz, double band_hi_hz,
                           double power_threshold) {
    if (!b.measured) throw std::invalid_argument("excess_report: budget has no measured overlay");
    if (!(band_hi_hz > band_lo_hz)) throw std::invalid_argument("excess_report: empty band");
    const auto& measured = *b.measured;
    ExcessReport rep;
    rep.grid = b.total.grid;
    rep.threshold = power_threshold;
    rep.band_lo_hz = band_lo_hz;
    rep.band_hi_hz = band_hi_hz;
    rep.power_ratio.resize(b.total.size());
    rep.flagged.resize(b.total.size());
    for (std::size_t i = 0; i < b.total.size(); ++i) {
        rep.power_ratio[i] = b.total.values[i] > 0.0 ? measured.values[i] / b.total.values[i]
                                                     : std::numeric_limits<double>::infinity();
        rep.flagged[i] = rep.power_ratio[i] > power_threshold;
    }
    const double mb = measured.integrate_band(band_lo_hz, band_hi_hz);
    const double tb = b.total.integrate_band(band_lo_hz, band_hi_hz);
    rep.band_ratio = tb > 0.0 ? mb / tb : std::numeric_limits<double>::infinity();
    return rep;
}

}  // namespace torsim
