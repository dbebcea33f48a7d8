#include "torsim/simulate.hpp"

#include <cmath>
#include <stdexcept>

#include "torsim/constants.hpp"
#include "torsim/estimation.hpp"
#include "torsim/rng.hpp"

namespace torsim {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace

ReadoutPair simulate_pair(const Config& cfg, double duration_s, std::uint64_t seed) {
    const auto& sim = cfg.simulate;
    const double fs = sim.sample_rate_hz;
    const std::size_t n = static_cast<std::size_t>(std::llround(duration_s * fs));
    if (n < 2 * cfg.estimation.segment_length)
        throw std::invalid_argument("simulate: duration too short for the analysis segment length (need >= " +
                                    std::to_string(2 * cfg.estimation.segment_length) + " samples)");

    const PendulumParams& p = cfg.budget.pendulum;
    const double inertia = moment_of_inertia(p);
    const double kappa =
        inertia * (cfg.budget.omega_eff_readout_rad_s * cfg.budget.omega_eff_readout_rad_s -
                   p.omega_m_rad_s * p.omega_m_rad_s);

    // thermal torsion angle, shaped through the trapped susceptibility
    const double f_low = 0.5 * fs / static_cast<double>(n);
    const auto target_grid = FrequencyGrid::log_spaced(f_low, fs / 2.0, 600);
    const auto chi = susceptibility(p, kappa, target_grid);
    const auto theta_target = apply_transfer(chi, thermal_torque_psd(p, target_grid));
    const TimeSeries theta = synthesize_timeseries(theta_target, duration_s, fs, mix_seed(seed, 0));

    GaussianRng rng_a(mix_seed(seed, 1));
    GaussianRng rng_b(mix_seed(seed, 2));
    const double noise_sigma = sim.sensing_noise_asd_m * std::sqrt(fs / 2.0);

    std::vector<double> x_a(n), x_b(n);
    const double w_line = constants::two_pi * sim.line_hz;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        const double line = sim.line_amplitude_m * std::sin(w_line * t);
        x_a[i] = line + noise_sigma * rng_a.normal();
        x_b[i] = sim.alpha_true * line + theta.samples[i] * p.l_eff_m + noise_sigma * rng_b.normal();
    }

    ReadoutPair pair;
    pair.x_a = TimeSeries(fs, std::move(x_a), Unit::displacement_m);
    pair.x_b = TimeSeries(fs, std::move(x_b), Unit::displacement_m);
    pair.l_eff_m = p.l_eff_m;
    return pair;
}

}  // namespace torsim
