#include "torsim/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "torsim/constants.hpp"
#include "torsim/fft.hpp"
#include "torsim/rng.hpp"

namespace torsim {

namespace {

using fft::cplx;

std::vector<double> hann_window(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.5 * (1.0 - std::cos(constants::two_pi * static_cast<double>(i) / static_cast<double>(n)));
    return w;
}

struct SegmentPlan {
    std::size_t segment_length = 0;
    std::size_t step = 0;
    std::size_t count = 0;
    std::vector<double> window;
    double window_power = 0.0;  // sum of w^2
};

SegmentPlan plan_segments(std::size_t series_length, std::size_t segment_length, double overlap_fraction) {
    if (segment_length < 4 || segment_length % 2 != 0)
        throw std::invalid_argument("welch: segment_length must be even and >= 4");
    if (segment_length > series_length)
        throw std::invalid_argument("welch: series shorter than one segment");
    if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0))
        throw std::invalid_argument("welch: overlap_fraction must be in [0, 1)");
    SegmentPlan p;
    p.segment_length = segment_length;
    p.step = std::max<std::size_t>(1, static_cast<std::size_t>(
                                          std::llround((1.0 - overlap_fraction) * static_cast<double>(segment_length))));
    p.count = 1 + (series_length - segment_length) / p.step;
    p.window = hann_window(segment_length);
    for (double w : p.window) p.window_power += w * w;
    return p;
}

// Windowed, mean-removed spectrum of one segment.
std::vector<cplx> segment_spectrum(const std::vector<double>& x, std::size_t offset, const SegmentPlan& p) {
    const std::size_t n = p.segment_length;
    std::vector<double> seg(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x[offset + i];
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) seg[i] = (x[offset + i] - mean) * p.window[i];
    return fft::rfft(seg);
}

FrequencyGrid welch_grid(double fs, std::size_t n) {
    std::vector<double> f(n / 2);
    for (std::size_t k = 1; k <= n / 2; ++k) f[k - 1] = static_cast<double>(k) * fs / static_cast<double>(n);
    return FrequencyGrid(std::move(f));
}

// One-sided scale per bin k = 1..n/2 (factor 2 everywhere except Nyquist).
double one_sided_scale(std::size_t k, std::size_t n, double fs, double window_power) {
    const double base = 1.0 / (fs * window_power);
    return (k == n / 2) ? base : 2.0 * base;
}

}  // namespace

SpectralDensity welch_psd(const TimeSeries& x, std::size_t segment_length, double overlap_fraction) {
    const SegmentPlan p = plan_segments(x.size(), segment_length, overlap_fraction);
    const std::size_t nbins = segment_length / 2;
    const std::size_t nseg = p.count;

    // per-segment periodograms filled in parallel, reduced in fixed order
    std::vector<double> rows(nseg * nbins);
#pragma omp parallel for schedule(static)
    for (long long s = 0; s < static_cast<long long>(nseg); ++s) {
        const auto spec = segment_spectrum(x.samples, static_cast<std::size_t>(s) * p.step, p);
        double* row = rows.data() + static_cast<std::size_t>(s) * nbins;
        for (std::size_t k = 1; k <= nbins; ++k)
            row[k - 1] = std::norm(spec[k]) * one_sided_scale(k, segment_length, x.sample_rate_hz, p.window_power);
    }

    std::vector<double> acc(nbins, 0.0);
    for (std::size_t s = 0; s < nseg; ++s)
        for (std::size_t k = 0; k < nbins; ++k) acc[k] += rows[s * nbins + k];
    for (double& v : acc) v /= static_cast<double>(nseg);

    return SpectralDensity(welch_grid(x.sample_rate_hz, segment_length), std::move(acc), x.unit);
}

SpectralDensity coherence(const TimeSeries& x, const TimeSeries& y, std::size_t segment_length,
                          double overlap_fraction) {
    if (x.sample_rate_hz != y.sample_rate_hz)
        throw std::invalid_argument("coherence: sample rates differ");
    if (x.size() != y.size()) throw std::invalid_argument("coherence: lengths differ");
    const SegmentPlan p = plan_segments(x.size(), segment_length, overlap_fraction);
    if (p.count < 2) throw std::invalid_argument("coherence: need at least 2 segments");
    const std::size_t nbins = segment_length / 2;
    const std::size_t nseg = p.count;

    std::vector<double> rows_xx(nseg * nbins), rows_yy(nseg * nbins);
    std::vector<cplx> rows_xy(nseg * nbins);
#pragma omp parallel for schedule(static)
    for (long long s = 0; s < static_cast<long long>(nseg); ++s) {
        const std::size_t off = static_cast<std::size_t>(s) * p.step;
        const auto sx = segment_spectrum(x.samples, off, p);
        const auto sy = segment_spectrum(y.samples, off, p);
        const std::size_t base = static_cast<std::size_t>(s) * nbins;
        for (std::size_t k = 1; k <= nbins; ++k) {
            rows_xx[base + k - 1] = std::norm(sx[k]);
            rows_yy[base + k - 1] = std::norm(sy[k]);
            rows_xy[base + k - 1] = sx[k] * std::conj(sy[k]);
        }
    }

    std::vector<double> pxx(nbins, 0.0), pyy(nbins, 0.0);
    std::vector<cplx> pxy(nbins, cplx(0.0, 0.0));
    for (std::size_t s = 0; s < nseg; ++s) {
        const std::size_t base = s * nbins;
        for (std::size_t k = 0; k < nbins; ++k) {
            pxx[k] += rows_xx[base + k];
            pyy[k] += rows_yy[base + k];
            pxy[k] += rows_xy[base + k];
        }
    }

    std::vector<double> c(nbins, 0.0);
    for (std::size_t k = 0; k < nbins; ++k) {
        const double denom = pxx[k] * pyy[k];
        c[k] = denom > 0.0 ? std::clamp(std::norm(pxy[k]) / denom, 0.0, 1.0) : 0.0;
    }
    return SpectralDensity(welch_grid(x.sample_rate_hz, segment_length), std::move(c), Unit::dimensionless);
}

TimeSeries synthesize_timeseries(const SpectralDensity& target, double duration_s, double sample_rate_hz,
                                 std::uint64_t seed) {
    if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("synthesize: sample_rate must be > 0");
    const std::size_t m = static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
    if (m < 2) throw std::invalid_argument("synthesize: duration*sample_rate must be >= 2");
    const double f_low = sample_rate_hz / static_cast<double>(m);
    const double f_nyq = sample_rate_hz / 2.0;
    if (target.grid.values().front() > f_low * (1.0 + 1e-9) || target.grid.values().back() < f_nyq * (1.0 - 1e-9))
        throw std::invalid_argument("synthesize: target grid must cover the synthesis band [" +
                                    std::to_string(f_low) + ", " + std::to_string(f_nyq) + "] Hz");

    GaussianRng rng(seed);
    const std::size_t half = m / 2;
    std::vector<cplx> spectrum(half + 1, cplx(0.0, 0.0));
    const double fm = static_cast<double>(m);
    for (std::size_t k = 1; k <= half; ++k) {
        const double fk = static_cast<double>(k) * sample_rate_hz / fm;
        const double s = target.interpolate(fk);
        const bool nyquist = (m % 2 == 0 && k == half);
        if (nyquist) {
            spectrum[k] = cplx(std::sqrt(s * sample_rate_hz * fm / 2.0) * rng.normal(), 0.0);
        } else {
            const double amp = std::sqrt(s * sample_rate_hz * fm / 4.0);
            spectrum[k] = cplx(amp * rng.normal(), amp * rng.normal());
        }
    }
    return TimeSeries(sample_rate_hz, fft::irfft(spectrum, m), target.unit);
}

namespace {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;         // standard error of the slope
    double residual_rms = 0.0;
};

LineFit fit_line(const std::vector<double>& t, const std::vector<double>& y) {
    const std::size_t n = t.size();
    double tm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        tm += t[i];
        ym += y[i];
    }
    tm /= static_cast<double>(n);
    ym /= static_cast<double>(n);
    double stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        stt += (t[i] - tm) * (t[i] - tm);
        sty += (t[i] - tm) * (y[i] - ym);
    }
    LineFit f;
    f.slope = sty / stt;
    f.intercept = ym - f.slope * tm;
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * t[i]);
        ssr += r * r;
    }
    f.residual_rms = std::sqrt(ssr / static_cast<double>(n));
    f.slope_se = std::sqrt(ssr / static_cast<double>(n - 2) / stt);
    return f;
}

}  // namespace

RingdownResult ringdown_fit(const TimeSeries& x) {
    RingdownResult res;
    const std::size_t n = x.size();
    if (n < 64) {
        res.message = "record too short";
        return res;
    }

    // crude resonance check on the whole record
    {
        std::vector<double> d(x.samples);
        const double mu = x.mean();
        for (double& v : d) v -= mu;
        const auto spec = fft::rfft(d);
        std::vector<double> power(spec.size() - 1);
        for (std::size_t k = 1; k < spec.size(); ++k) power[k - 1] = std::norm(spec[k]);
        std::vector<double> sorted(power);
        std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
        const double median = sorted[sorted.size() / 2];
        const auto peak_it = std::max_element(power.begin(), power.end());
        const std::size_t peak_bin = static_cast<std::size_t>(peak_it - power.begin()) + 1;
        if (median > 0.0 && *peak_it < 50.0 * median) {
            res.message = "no dominant spectral line (peak/median power ratio too low)";
            return res;
        }
        if (peak_bin < 3) {
            res.message = "spectral peak at DC: input looks overdamped or drifting";
            return res;
        }
    }

    const auto analytic = fft::analytic_signal(x.samples);
    const std::size_t trim = n / 10;  // Hilbert edge transients
    const std::size_t lo = trim, hi = n - trim;
    const double dt = 1.0 / x.sample_rate_hz;

    std::vector<double> t(hi - lo), log_env(hi - lo), phase(hi - lo);
    double prev_phase = std::arg(analytic[lo]);
    double unwrapped = prev_phase;
    for (std::size_t i = lo; i < hi; ++i) {
        const double a = std::abs(analytic[i]);
        const double ph = std::arg(analytic[i]);
        double dph = ph - prev_phase;
        while (dph > constants::pi) dph -= constants::two_pi;
        while (dph < -constants::pi) dph += constants::two_pi;
        unwrapped += (i == lo) ? 0.0 : dph;
        prev_phase = ph;
        const std::size_t j = i - lo;
        t[j] = static_cast<double>(i) * dt;
        log_env[j] = std::log(std::max(a, 1e-300));
        phase[j] = unwrapped;
    }

    const LineFit phase_fit = fit_line(t, phase);
    const double omega = std::abs(phase_fit.slope);
    const double cycles = omega * (t.back() - t.front()) / constants::two_pi;
    if (cycles < 5.0) {
        res.message = "fewer than 5 oscillation cycles in record";
        return res;
    }

    const LineFit env_fit = fit_line(t, log_env);
    const double gamma = -2.0 * env_fit.slope;
    const double gamma_ci = 2.0 * 1.96 * env_fit.slope_se;
    res.residual_norm = env_fit.residual_rms;

    if (gamma < -gamma_ci) {
        res.message = "envelope grows: input is not a decaying oscillation (residual " +
                      std::to_string(env_fit.residual_rms) + ")";
        return res;
    }

    res.ok = true;
    res.omega_rad_s = omega;
    res.gamma_rad_s = gamma;
    res.gamma_ci_rad_s = gamma_ci;
    res.quality = gamma > 0.0 ? omega / gamma : std::numeric_limits<double>::infinity();
    return res;
}

namespace reference {

SpectralDensity welch_psd(const TimeSeries& x, std::size_t segment_length, double overlap_fraction) {
    const SegmentPlan p = plan_segments(x.size(), segment_length, overlap_fraction);
    const std::size_t nbins = segment_length / 2;
    std::vector<double> acc(nbins, 0.0);
    for (std::size_t s = 0; s < p.count; ++s) {
        const auto spec = segment_spectrum(x.samples, s * p.step, p);
        for (std::size_t k = 1; k <= nbins; ++k)
            acc[k - 1] += std::norm(spec[k]) * one_sided_scale(k, segment_length, x.sample_rate_hz, p.window_power);
    }
    for (double& v : acc) v /= static_cast<double>(p.count);
    return SpectralDensity(welch_grid(x.sample_rate_hz, segment_length), std::move(acc), x.unit);
}

SpectralDensity coherence(const TimeSeries& x, const TimeSeries& y, std::size_t segment_length,
                          double overlap_fraction) {
    if (x.sample_rate_hz != y.sample_rate_hz)
        throw std::invalid_argument("coherence: sample rates differ");
    if (x.size() != y.size()) throw std::invalid_argument("coherence: lengths differ");
    const SegmentPlan p = plan_segments(x.size(), segment_length, overlap_fraction);
    if (p.count < 2) throw std::invalid_argument("coherence: need at least 2 segments");
    const std::size_t nbins = segment_length / 2;
    std::vector<double> pxx(nbins, 0.0), pyy(nbins, 0.0);
    std::vector<cplx> pxy(nbins, cplx(0.0, 0.0));
    for (std::size_t s = 0; s < p.count; ++s) {
        const auto sx = segment_spectrum(x.samples, s * p.step, p);
        const auto sy = segment_spectrum(y.samples, s * p.step, p);
        for (std::size_t k = 1; k <= nbins; ++k) {
            pxx[k - 1] += std::norm(sx[k]);
            pyy[k - 1] += std::norm(sy[k]);
            pxy[k - 1] += sx[k] * std::conj(sy[k]);
        }
    }
    std::vector<double> c(nbins, 0.0);
    for (std::size_t k = 0; k < nbins; ++k) {
        const double denom = pxx[k] * pyy[k];
        c[k] = denom > 0.0 ? std::clamp(std::norm(pxy[k]) / denom, 0.0, 1.0) : 0.0;
    }
    return SpectralDensity(welch_grid(x.sample_rate_hz, segment_length), std::move(c), Unit::dimensionless);
}

}  // namespace reference

}  // namespace torsim
