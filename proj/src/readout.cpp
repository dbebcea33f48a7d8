#include "torsim/readout.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "torsim/constants.hpp"
#include "torsim/estimation.hpp"

namespace torsim {

void ReadoutPair::validate() const {
    if (x_a.sample_rate_hz != x_b.sample_rate_hz)
        throw std::invalid_argument("ReadoutPair: sample rates differ");
    if (x_a.size() != x_b.size()) throw std::invalid_argument("ReadoutPair: lengths differ");
    if (!(l_eff_m > 0.0)) throw std::invalid_argument("ReadoutPair: l_eff must be positive");
}

TimeSeries combine_differential(const ReadoutPair& pair, double alpha) {
    pair.validate();
    if (!std::isfinite(alpha)) throw std::invalid_argument("combine_differential: alpha must be finite");
    std::vector<double> theta(pair.x_a.size());
    const double inv_l = 1.0 / pair.l_eff_m;
    for (std::size_t i = 0; i < theta.size(); ++i)
        theta[i] = (pair.x_b.samples[i] - alpha * pair.x_a.samples[i]) * inv_l;
    return TimeSeries(pair.x_a.sample_rate_hz, std::move(theta), Unit::angle_rad);
}

namespace {

double band_power(const ReadoutPair& pair, double alpha, double f_lo, double f_hi,
                  std::size_t segment_length, double overlap) {
    const TimeSeries combined = combine_differential(pair, alpha);
    const SpectralDensity psd = welch_psd(combined, segment_length, overlap);
    return psd.integrate_band(f_lo, f_hi);
}

}  // namespace

AlphaCalibration calibrate_alpha(const ReadoutPair& pair, double line_frequency_hz, double band_halfwidth_hz,
                                 const AlphaSearchOptions& opts) {
    pair.validate();
    const double nyquist = pair.x_a.sample_rate_hz / 2.0;
    if (!(band_halfwidth_hz > 0.0) || line_frequency_hz - band_halfwidth_hz <= 0.0 ||
        line_frequency_hz + band_halfwidth_hz >= nyquist)
        throw std::invalid_argument("calibrate_alpha: line band must lie inside (0, Nyquist)");
    if (!(opts.search_hi > opts.search_lo) || opts.coarse_points < 5)
        throw std::invalid_argument("calibrate_alpha: bad search interval");

    const double f_lo = line_frequency_hz - band_halfwidth_hz;
    const double f_hi = line_frequency_hz + band_halfwidth_hz;
    auto objective = [&](double a) {
        return band_power(pair, a, f_lo, f_hi, opts.segment_length, opts.overlap);
    };

    AlphaCalibration cal;
    cal.scan_alpha.resize(opts.coarse_points);
    cal.scan_power.resize(opts.coarse_points);
    for (std::size_t i = 0; i < opts.coarse_points; ++i) {
        cal.scan_alpha[i] = opts.search_lo + (opts.search_hi - opts.search_lo) * static_cast<double>(i) /
                                                 static_cast<double>(opts.coarse_points - 1);
        cal.scan_power[i] = objective(cal.scan_alpha[i]);
    }

    // the band power is exactly quadratic in alpha, so a healthy profile has
    // one interior minimum; anything else means degenerate or inconsistent data
    std::size_t best = 0;
    std::size_t interior_minima = 0;
    for (std::size_t i = 0; i < opts.coarse_points; ++i) {
        if (cal.scan_power[i] < cal.scan_power[best]) best = i;
        if (i > 0 && i + 1 < opts.coarse_points && cal.scan_power[i] < cal.scan_power[i - 1] &&
            cal.scan_power[i] < cal.scan_power[i + 1])
            ++interior_minima;
    }
    // depth of the null on the independent-noise-normalized profile; without
    // common-mode content J(alpha) ~ (1 + alpha^2) N and the depth collapses
    // to estimator scatter, while a usable calibration line dominates its band
    double norm_min = std::numeric_limits<double>::infinity();
    double norm_max = 0.0;
    for (std::size_t i = 0; i < opts.coarse_points; ++i) {
        const double jn = cal.scan_power[i] / (1.0 + cal.scan_alpha[i] * cal.scan_alpha[i]);
        norm_min = std::min(norm_min, jn);
        norm_max = std::max(norm_max, jn);
    }
    if (!(norm_max > 0.0) || 1.0 - norm_min / norm_max < 0.5) {
        cal.message = "objective has no significant null: no common-mode line content to calibrate on";
        return cal;
    }
    if (interior_minima == 0) {
        cal.message = "band-power minimum sits on the search boundary; no common-mode null inside interval";
        return cal;
    }
    if (interior_minima > 1) {
        cal.message = "band-power profile has multiple local minima; see scan profile";
        return cal;
    }

    // golden-section refinement around the coarse minimum; ties toward
    // smaller alpha are inherited from the scan order
    double a = best > 0 ? cal.scan_alpha[best - 1] : cal.scan_alpha[best];
    double b = best + 1 < opts.coarse_points ? cal.scan_alpha[best + 1] : cal.scan_alpha[best];
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = objective(x1);
    double f2 = objective(x2);
    while (b - a > opts.tolerance) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = objective(x2);
        }
    }
    cal.alpha = 0.5 * (a + b);

    const double p_star = objective(cal.alpha);
    const double p_single = objective(0.0);
    const double p_unity = objective(1.0);
    cal.suppression_vs_single = p_single > 0.0 ? std::sqrt(p_star / p_single) : 0.0;
    cal.suppression_vs_unity = p_unity > 0.0 ? std::sqrt(p_star / p_unity) : 0.0;
    cal.ok = true;
    return cal;
}

double broadband_suppression(const ReadoutPair& pair, double alpha_star, double f_lo_hz, double f_hi_hz,
                             std::size_t segment_length, double overlap) {
    pair.validate();
    if (!(f_hi_hz > f_lo_hz) || f_hi_hz >= pair.x_a.sample_rate_hz / 2.0)
        throw std::invalid_argument("broadband_suppression: band must lie inside (0, Nyquist)");
    const double p_star = band_power(pair, alpha_star, f_lo_hz, f_hi_hz, segment_length, overlap);
    const double p_ref = band_power(pair, 0.0, f_lo_hz, f_hi_hz, segment_length, overlap);
    return p_ref > 0.0 ? std::sqrt(p_star / p_ref) : 0.0;
}

namespace {

using cplx = std::complex<double>;

cplx spring_model(double w, double gain, double w_eff, double g_eff) {
    return gain * w_eff * w_eff / cplx(w_eff * w_eff - w * w, g_eff * w);
}

// residual vector: log|G| differences then wrap-safe phase differences
void residuals(const TransferFunction& data, double gain, double w_eff, double g_eff, std::vector<double>& r) {
    const std::size_t n = data.size();
    r.resize(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = constants::two_pi * data.grid[i];
        const cplx m = spring_model(w, gain, w_eff, g_eff);
        r[i] = std::log(std::abs(m)) - std::log(std::abs(data.values[i]));
        r[n + i] = std::arg(m * std::conj(data.values[i]));
    }
}

double cost(const std::vector<double>& r) {
    double acc = 0.0;
    for (double v : r) acc += v * v;
    return acc;
}

bool solve3(double a[3][3], double b[3], double x[3]) {
    int idx[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::abs(a[idx[row]][col]) > std::abs(a[idx[piv]][col])) piv = row;
        std::swap(idx[col], idx[piv]);
        if (std::abs(a[idx[col]][col]) < 1e-300) return false;
        for (int row = col + 1; row < 3; ++row) {
            const double f = a[idx[row]][col] / a[idx[col]][col];
            for (int k = col; k < 3; ++k) a[idx[row]][k] -= f * a[idx[col]][k];
            b[idx[row]] -= f * b[idx[col]];
        }
    }
    for (int col = 2; col >= 0; --col) {
        double acc = b[idx[col]];
        for (int k = col + 1; k < 3; ++k) acc -= a[idx[col]][k] * x[k];
        x[col] = acc / a[idx[col]][col];
    }
    return true;
}

}  // namespace

SpringFit fit_optical_spring(const TransferFunction& measured) {
    SpringFit fit;
    const std::size_t n = measured.size();
    if (n < 8) {
        fit.message = "too few points";
        return fit;
    }

    std::vector<double> mag(n);
    for (std::size_t i = 0; i < n; ++i) {
        mag[i] = std::abs(measured.values[i]);
        if (!(mag[i] > 0.0)) {
            fit.message = "non-positive magnitude sample";
            return fit;
        }
    }
    const std::size_t peak = static_cast<std::size_t>(std::max_element(mag.begin(), mag.end()) - mag.begin());
    std::vector<double> sorted(mag);
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    if (mag[peak] < 1.3 * median) {
        fit.message = "no resonant feature: magnitude is flat within noise";
        return fit;
    }
    if (measured.grid.values().back() / measured.grid.values().front() < std::sqrt(10.0)) {
        fit.message = "grid spans less than half a decade around the resonance";
        return fit;
    }

    // peak-picked initialization: plateau gain below resonance, width from Q
    double w_eff = constants::two_pi * measured.grid[peak];
    double gain = mag.front();
    double g_eff = w_eff * gain / mag[peak];  // |G(w_eff)| = gain * w_eff / g_eff
    if (!(g_eff > 0.0)) g_eff = w_eff / 10.0;

    // damped Gauss-Newton on p = (ln gain, ln w_eff, ln g_eff)
    std::vector<double> r, r_trial;
    residuals(measured, gain, w_eff, g_eff, r);
    double current = cost(r);
    double lambda = 1e-3;
    const double eps = 1e-7;
    int iter = 0;
    bool converged = false;
    for (; iter < 100 && !converged; ++iter) {
        // numerical Jacobian in the log-parameters
        std::vector<double> jac[3];
        const double p0[3] = {std::log(gain), std::log(w_eff), std::log(g_eff)};
        for (int k = 0; k < 3; ++k) {
            double p[3] = {p0[0], p0[1], p0[2]};
            p[k] += eps;
            residuals(measured, std::exp(p[0]), std::exp(p[1]), std::exp(p[2]), r_trial);
            jac[k].resize(r.size());
            for (std::size_t i = 0; i < r.size(); ++i) jac[k][i] = (r_trial[i] - r[i]) / eps;
        }
        double jtj[3][3], jtr[3];
        for (int a = 0; a < 3; ++a) {
            jtr[a] = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) jtr[a] += jac[a][i] * r[i];
            for (int b = 0; b < 3; ++b) {
                jtj[a][b] = 0.0;
                for (std::size_t i = 0; i < r.size(); ++i) jtj[a][b] += jac[a][i] * jac[b][i];
            }
        }

        bool stepped = false;
        for (int attempt = 0; attempt < 12 && !stepped; ++attempt) {
            double lhs[3][3];
            double rhs[3] = {-jtr[0], -jtr[1], -jtr[2]};
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) lhs[a][b] = jtj[a][b] + (a == b ? lambda * jtj[a][a] : 0.0);
            double step[3];
            if (!solve3(lhs, rhs, step)) {
                lambda *= 10.0;
                continue;
            }
            const double g_t = std::exp(p0[0] + step[0]);
            const double w_t = std::exp(p0[1] + step[1]);
            const double d_t = std::exp(p0[2] + step[2]);
            residuals(measured, g_t, w_t, d_t, r_trial);
            const double trial = cost(r_trial);
            if (trial < current) {
                gain = g_t;
                w_eff = w_t;
                g_eff = d_t;
                r.swap(r_trial);
                const double improvement = (current - trial) / std::max(current, 1e-300);
                current = trial;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                converged = improvement < 1e-12;
            } else {
                lambda *= 10.0;
            }
        }
        if (!stepped) break;
    }

    fit.ok = true;
    fit.gain = gain;
    fit.omega_eff_rad_s = w_eff;
    fit.gamma_eff_rad_s = g_eff;
    fit.residual = std::sqrt(current / static_cast<double>(r.size()));
    fit.iterations = iter;
    return fit;
}

}  // namespace torsim
