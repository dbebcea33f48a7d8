#include <doctest.h>

#include "approx.hpp"

#include <cmath>

#include "torsim/constants.hpp"
#include "torsim/estimation.hpp"
#include "torsim/mechanics.hpp"
#include "torsim/rng.hpp"

using namespace torsim;
using constants::two_pi;

namespace {

TimeSeries white_noise(std::size_t n, double fs, double sigma, std::uint64_t seed) {
    GaussianRng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = sigma * rng.normal();
    return TimeSeries(fs, std::move(v), Unit::displacement_m);
}

double mean_of(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += v[i];
    return acc / static_cast<double>(hi - lo);
}

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

}  // namespace

TEST_CASE("welch of unit-variance white noise is flat at 2/fs") {
    const double fs = 1000.0;
    const std::size_t seg = 1024;
    const TimeSeries x = white_noise(seg + 255 * seg / 2, fs, 1.0, 21);  // 256 averages
    const auto psd = welch_psd(x, seg, 0.5);
    const double level = mean_of(psd.values, 0, psd.size());
    CHECK(level == approx_rel(2.0 / fs).epsilon(0.02));

    SUBCASE("integral recovers the sample variance (Parseval) within 3%") {
        CHECK(psd.integrate() == approx_rel(x.variance()).epsilon(0.03));
    }
}

TEST_CASE("welch of an on-bin sine integrates to A^2/2 over the peak") {
    const double fs = 1000.0;
    const std::size_t seg = 1024;
    const std::size_t n = 8 * seg;
    const double f0 = 128.0 * fs / static_cast<double>(seg);  // exactly on bin 128
    const double amp = 2.0;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = amp * std::sin(two_pi * f0 * static_cast<double>(i) / fs);
    const auto psd = welch_psd(TimeSeries(fs, std::move(v), Unit::displacement_m), seg, 0.5);
    const double peak_power = psd.integrate_band(f0 - 4.0 * fs / seg, f0 + 4.0 * fs / seg);
    CHECK(peak_power == approx_rel(amp * amp / 2.0).epsilon(0.01));
}

TEST_CASE("welch preconditions") {
    const TimeSeries x = white_noise(512, 100.0, 1.0, 3);
    CHECK_THROWS_AS(welch_psd(x, 1024, 0.5), std::invalid_argument);  // shorter than one segment
    CHECK_THROWS_AS(welch_psd(x, 511, 0.5), std::invalid_argument);   // odd segment
    CHECK_THROWS_AS(welch_psd(x, 256, 1.0), std::invalid_argument);   // full overlap
}

TEST_CASE("synthesize -> welch round trip reproduces a 1/f target") {
    const double fs = 1000.0;
    const std::size_t seg = 1024;
    const std::size_t averages = 800;
    const double duration = (seg + (averages - 1) * seg / 2) / fs;

    // 1/f over the analyzed band, zero below the second welch bin so the
    // sample variance and the estimator see the same power (content at the
    // first bin would leak into the dropped DC bin)
    const double f_first = fs / static_cast<double>(seg);
    const auto target_grid = FrequencyGrid::log_spaced(1e-3, fs / 2.0, 500);
    std::vector<double> tv(target_grid.size());
    for (std::size_t i = 0; i < tv.size(); ++i)
        tv[i] = target_grid[i] < 2.0 * f_first ? 0.0 : 1e-6 / target_grid[i];
    const SpectralDensity target(target_grid, tv, Unit::angle_rad);

    const TimeSeries x = synthesize_timeseries(target, duration, fs, 12345);
    const auto psd = welch_psd(x, seg, 0.5);

    // RMS log error over the central decade 4..40 Hz
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < psd.size(); ++i) {
        const double f = psd.grid[i];
        if (f < 4.0 || f > 40.0) continue;
        const double e = std::log(psd.values[i] / (1e-6 / f));
        acc += e * e;
        ++count;
    }
    CHECK(count > 20);
    CHECK(std::sqrt(acc / static_cast<double>(count)) < 0.05);

    SUBCASE("Parseval within 3%") {
        CHECK(psd.integrate() == approx_rel(x.variance()).epsilon(0.03));
    }
    SUBCASE("same seed reproduces the series exactly") {
        const TimeSeries y = synthesize_timeseries(target, duration, fs, 12345);
        REQUIRE(y.size() == x.size());
        for (std::size_t i = 0; i < x.size(); i += 997) CHECK(y.samples[i] == x.samples[i]);
    }
    SUBCASE("different seed gives a different series") {
        const TimeSeries y = synthesize_timeseries(target, duration, fs, 54321);
        double max_diff = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            max_diff = std::max(max_diff, std::abs(y.samples[i] - x.samples[i]));
        CHECK(max_diff > 0.0);
    }
}

TEST_CASE("synthesize of a flat target reproduces the total variance") {
    const double fs = 500.0;
    const auto grid = FrequencyGrid::log_spaced(1e-3, 250.0, 100);
    const auto target = SpectralDensity::flat(grid, 4e-3, Unit::displacement_m);
    const TimeSeries x = synthesize_timeseries(target, 80.0, fs, 7);
    CHECK(x.variance() == approx_rel(4e-3 * 250.0).epsilon(0.05));
}

TEST_CASE("synthesize rejects a target that does not cover the band") {
    const auto grid = FrequencyGrid::linear(1.0, 10.0, 10);
    const auto target = SpectralDensity::flat(grid, 1.0, Unit::displacement_m);
    CHECK_THROWS_AS(synthesize_timeseries(target, 10.0, 100.0, 1), std::invalid_argument);
}

TEST_CASE("suspension thermal spectrum shaped through the susceptibility survives the round trip") {
    auto p = bar_pendulum();
    const double fs = 16.0;
    const double duration = 6400.0;

    // analytic angle PSD; below 0.3 Hz the resonance peak is clipped flat so
    // its (unresolvable) line does not leak into the comparison band
    const auto grid = FrequencyGrid::log_spaced(1e-4, fs / 2.0, 600);
    const auto analytic = apply_transfer(susceptibility(p, 0.0, grid), thermal_torque_psd(p, grid));
    std::vector<double> tv(analytic.values);
    const double clip = analytic.interpolate(0.3);
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i] < 0.3) tv[i] = clip;
    const SpectralDensity target(grid, tv, Unit::angle_rad);

    const TimeSeries theta = synthesize_timeseries(target, duration, fs, 2024);
    const auto est = welch_psd(theta, 512, 0.5);

    // band-averaged comparison over half-decade slices of [0.5, 2] Hz
    for (double lo : {0.5, 1.0}) {
        const double hi = 2.0 * lo;
        double est_band = 0.0, ana_band = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < est.size(); ++i) {
            if (est.grid[i] < lo || est.grid[i] > hi) continue;
            est_band += est.values[i];
            ana_band += analytic.interpolate(est.grid[i]);
            ++count;
        }
        REQUIRE(count > 5);
        CHECK(est_band / ana_band == approx_rel(1.0).epsilon(0.10));
    }
}

TEST_CASE("coherence") {
    const double fs = 200.0;
    const std::size_t seg = 256;
    const std::size_t n = seg + 99 * seg / 2;  // 100 averages

    SUBCASE("y = 2x gives unit coherence") {
        const TimeSeries x = white_noise(n, fs, 1.0, 31);
        std::vector<double> y(x.samples);
        for (double& v : y) v *= 2.0;
        const auto c = coherence(x, TimeSeries(fs, std::move(y), x.unit), seg, 0.5);
        for (double v : c.values) CHECK(v == approx_rel(1.0).epsilon(1e-10));
    }
    SUBCASE("independent noises give mean coherence ~ 1/averages") {
        const TimeSeries x = white_noise(n, fs, 1.0, 32);
        const TimeSeries y = white_noise(n, fs, 1.0, 33);
        const auto c = coherence(x, y, seg, 0.5);
        const double mean = mean_of(c.values, 0, c.size());
        CHECK(mean > 0.5 / 100.0);
        CHECK(mean < 2.0 / 100.0);
    }
    SUBCASE("equal-power independent contamination gives ~0.5") {
        const TimeSeries x = white_noise(n, fs, 1.0, 34);
        const TimeSeries nn = white_noise(n, fs, 1.0, 35);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = x.samples[i] + nn.samples[i];
        const auto c = coherence(x, TimeSeries(fs, std::move(y), x.unit), seg, 0.5);
        CHECK(mean_of(c.values, 0, c.size()) == approx_rel(0.5).epsilon(0.06));
    }
    SUBCASE("symmetric in its arguments") {
        const TimeSeries x = white_noise(n, fs, 1.0, 36);
        const TimeSeries y = white_noise(n, fs, 1.3, 37);
        const auto cxy = coherence(x, y, seg, 0.5);
        const auto cyx = coherence(y, x, seg, 0.5);
        for (std::size_t i = 0; i < cxy.size(); ++i) CHECK(cxy.values[i] == cyx.values[i]);
    }
    SUBCASE("values live in [0, 1]") {
        const TimeSeries x = white_noise(n, fs, 1.0, 38);
        const TimeSeries y = white_noise(n, fs, 1.0, 39);
        const auto c = coherence(x, y, seg, 0.5);
        for (double v : c.values) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
    SUBCASE("fewer than two segments is rejected") {
        const TimeSeries x = white_noise(seg, fs, 1.0, 40);
        const TimeSeries y = white_noise(seg, fs, 1.0, 41);
        CHECK_THROWS_AS(coherence(x, y, seg, 0.5), std::invalid_argument);
    }
}

namespace {

TimeSeries decay_fixture(double f0_hz, double gamma, double fs, double duration, double amp = 1e-6,
                         double phi = 0.3) {
    const std::size_t n = static_cast<std::size_t>(duration * fs);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        v[i] = amp * std::exp(-gamma * t / 2.0) * std::cos(two_pi * f0_hz * t + phi);
    }
    return TimeSeries(fs, std::move(v), Unit::angle_rad);
}

}  // namespace

TEST_CASE("ringdown fit") {
    const double f0 = 0.09;
    const double omega = two_pi * f0;

    SUBCASE("bar parameters: Q = 2.6e3 recovered within 2%, omega within 0.1%") {
        const double q_true = 2600.0;
        const auto x = decay_fixture(f0, omega / q_true, 2.0, 3000.0);
        const auto fit = ringdown_fit(x);
        REQUIRE(fit.ok);
        CHECK(fit.quality == approx_rel(q_true).epsilon(0.02));
        CHECK(fit.omega_rad_s == approx_rel(omega).epsilon(0.001));
    }
    SUBCASE("zero damping comes out consistent with zero") {
        const auto x = decay_fixture(f0, 0.0, 2.0, 3000.0);
        const auto fit = ringdown_fit(x);
        REQUIRE(fit.ok);
        CHECK(std::abs(fit.gamma_rad_s) <= std::max(fit.gamma_ci_rad_s, 1e-6 * fit.omega_rad_s));
    }
    SUBCASE("doubling gamma halves Q and leaves omega unchanged") {
        const double gamma1 = omega / 2600.0;
        const auto fit1 = ringdown_fit(decay_fixture(f0, gamma1, 2.0, 3000.0));
        const auto fit2 = ringdown_fit(decay_fixture(f0, 2.0 * gamma1, 2.0, 3000.0));
        REQUIRE(fit1.ok);
        REQUIRE(fit2.ok);
        CHECK(fit2.quality == approx_rel(0.5 * fit1.quality).epsilon(0.02));
        CHECK(fit2.omega_rad_s == approx_rel(fit1.omega_rad_s).epsilon(0.001));
    }
    SUBCASE("white noise is rejected") {
        const auto fit = ringdown_fit(white_noise(4096, 2.0, 1.0, 77));
        CHECK_FALSE(fit.ok);
        CHECK_FALSE(fit.message.empty());
    }
    SUBCASE("overdamped (pure exponential) input is rejected") {
        std::vector<double> v(4096);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(-static_cast<double>(i) / 500.0);
        const auto fit = ringdown_fit(TimeSeries(2.0, std::move(v), Unit::angle_rad));
        CHECK_FALSE(fit.ok);
    }
    SUBCASE("growing envelope is rejected") {
        const auto fit = ringdown_fit(decay_fixture(f0, -omega / 500.0, 2.0, 3000.0));
        CHECK_FALSE(fit.ok);
    }
    SUBCASE("too few cycles is rejected") {
        const auto fit = ringdown_fit(decay_fixture(0.001, 0.0, 2.0, 2000.0));
        CHECK_FALSE(fit.ok);
    }
}
