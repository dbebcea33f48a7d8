#include "torsim/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace torsim {

std::string unit_name(Unit u) {
    switch (u) {
        case Unit::torque_nm: return "Nm";
        case Unit::angle_rad: return "rad";
        case Unit::displacement_m: return "m";
        case Unit::power_w: return "W";
        case Unit::frequency_hz: return "Hz";
        case Unit::relative: return "relative";
        case Unit::dimensionless: return "1";
    }
    return "?";
}

std::string psd_unit_name(Unit u) {
    if (u == Unit::dimensionless) return "1/Hz";
    return unit_name(u) + "^2/Hz";
}

std::string asd_unit_name(Unit u) {
    if (u == Unit::dimensionless) return "1/sqrt(Hz)";
    return unit_name(u) + "/sqrt(Hz)";
}

FrequencyGrid::FrequencyGrid(std::vector<double> values_hz) : values_(std::move(values_hz)) {
    if (values_.empty()) throw std::invalid_argument("FrequencyGrid: empty");
    double prev = 0.0;
    for (double f : values_) {
        if (!std::isfinite(f) || f <= 0.0)
            throw std::invalid_argument("FrequencyGrid: frequencies must be finite and positive");
        if (f <= prev)
            throw std::invalid_argument("FrequencyGrid: frequencies must be strictly increasing");
        prev = f;
    }
}

FrequencyGrid FrequencyGrid::log_spaced(double f_min_hz, double f_max_hz, std::size_t n) {
    if (n < 2 || f_min_hz <= 0.0 || f_max_hz <= f_min_hz)
        throw std::invalid_argument("FrequencyGrid::log_spaced: need n >= 2 and 0 < f_min < f_max");
    std::vector<double> v(n);
    const double lg0 = std::log(f_min_hz);
    const double lg1 = std::log(f_max_hz);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = std::exp(lg0 + (lg1 - lg0) * static_cast<double>(i) / static_cast<double>(n - 1));
    v.front() = f_min_hz;
    v.back() = f_max_hz;
    return FrequencyGrid(std::move(v));
}

FrequencyGrid FrequencyGrid::linear(double f_min_hz, double f_max_hz, std::size_t n) {
    if (n < 2 || f_min_hz <= 0.0 || f_max_hz <= f_min_hz)
        throw std::invalid_argument("FrequencyGrid::linear: need n >= 2 and 0 < f_min < f_max");
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = f_min_hz + (f_max_hz - f_min_hz) * static_cast<double>(i) / static_cast<double>(n - 1);
    return FrequencyGrid(std::move(v));
}

bool FrequencyGrid::same_as(const FrequencyGrid& other, double rel_tol) const {
    if (values_.size() != other.values_.size()) return false;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double a = values_[i];
        const double b = other.values_[i];
        if (std::abs(a - b) > rel_tol * std::max(std::abs(a), std::abs(b))) return false;
    }
    return true;
}

SpectralDensity::SpectralDensity(FrequencyGrid g, std::vector<double> v, Unit u)
    : grid(std::move(g)), values(std::move(v)), unit(u) {
    if (values.size() != grid.size())
        throw std::invalid_argument("SpectralDensity: values/grid length mismatch");
    for (double x : values) {
        if (!std::isfinite(x) || x < 0.0)
            throw std::invalid_argument("SpectralDensity: values must be finite and non-negative");
    }
}

SpectralDensity SpectralDensity::flat(const FrequencyGrid& g, double level, Unit u) {
    return SpectralDensity(g, std::vector<double>(g.size(), level), u);
}

double SpectralDensity::integrate() const {
    const auto& f = grid.values();
    double acc = 0.0;
    for (std::size_t i = 1; i < f.size(); ++i)
        acc += 0.5 * (values[i] + values[i - 1]) * (f[i] - f[i - 1]);
    return acc;
}

double SpectralDensity::integrate_band(double f_lo_hz, double f_hi_hz) const {
    if (f_hi_hz <= f_lo_hz) throw std::invalid_argument("integrate_band: empty band");
    const auto& f = grid.values();
    double acc = 0.0;
    for (std::size_t i = 1; i < f.size(); ++i) {
        const double a = std::max(f[i - 1], f_lo_hz);
        const double b = std::min(f[i], f_hi_hz);
        if (b <= a) continue;
        // linear interpolation of the PSD across the clipped interval
        const double span = f[i] - f[i - 1];
        const double va = values[i - 1] + (values[i] - values[i - 1]) * (a - f[i - 1]) / span;
        const double vb = values[i - 1] + (values[i] - values[i - 1]) * (b - f[i - 1]) / span;
        acc += 0.5 * (va + vb) * (b - a);
    }
    return acc;
}

double SpectralDensity::interpolate(double f_hz) const {
    const auto& f = grid.values();
    if (f_hz <= f.front()) return values.front();
    if (f_hz >= f.back()) return values.back();
    const auto it = std::upper_bound(f.begin(), f.end(), f_hz);
    const std::size_t i = static_cast<std::size_t>(it - f.begin());
    const double f0 = f[i - 1], f1 = f[i];
    const double v0 = values[i - 1], v1 = values[i];
    if (v0 <= 0.0 || v1 <= 0.0) {
        const double t = (f_hz - f0) / (f1 - f0);
        return v0 + (v1 - v0) * t;
    }
    const double t = (std::log(f_hz) - std::log(f0)) / (std::log(f1) - std::log(f0));
    return std::exp(std::log(v0) + (std::log(v1) - std::log(v0)) * t);
}

TransferFunction::TransferFunction(FrequencyGrid g, std::vector<std::complex<double>> v, Unit in, Unit out)
    : grid(std::move(g)), values(std::move(v)), input(in), output(out) {
    if (values.size() != grid.size())
        throw std::invalid_argument("TransferFunction: values/grid length mismatch");
    for (const auto& z : values) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw std::invalid_argument("TransferFunction: values must be finite");
    }
}

TransferFunction TransferFunction::unity(const FrequencyGrid& g, Unit in, Unit out) {
    return TransferFunction(g, std::vector<std::complex<double>>(g.size(), {1.0, 0.0}), in, out);
}

TimeSeries::TimeSeries(double fs_hz, std::vector<double> s, Unit u)
    : sample_rate_hz(fs_hz), samples(std::move(s)), unit(u) {
    if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("TimeSeries: sample_rate must be > 0");
    for (double x : samples)
        if (!std::isfinite(x)) throw std::invalid_argument("TimeSeries: samples must be finite");
}

double TimeSeries::mean() const {
    if (samples.empty()) return 0.0;
    double acc = 0.0;
    for (double x : samples) acc += x;
    return acc / static_cast<double>(samples.size());
}

double TimeSeries::variance() const {
    if (samples.size() < 2) return 0.0;
    const double mu = mean();
    double acc = 0.0;
    for (double x : samples) acc += (x - mu) * (x - mu);
    return acc / static_cast<double>(samples.size());
}

SpectralDensity quadrature_sum(std::span<const SpectralDensity> components) {
    if (components.empty()) throw std::invalid_argument("quadrature_sum: no components");
    const auto& first = components.front();
    std::vector<double> total(first.size(), 0.0);
    for (std::size_t c = 0; c < components.size(); ++c) {
        const auto& s = components[c];
        if (!s.grid.same_as(first.grid))
            throw std::invalid_argument("quadrature_sum: component " + std::to_string(c) +
                                        " grid differs from component 0");
        if (s.unit != first.unit)
            throw std::invalid_argument("quadrature_sum: component " + std::to_string(c) + " has unit " +
                                        psd_unit_name(s.unit) + ", expected " + psd_unit_name(first.unit));
        for (std::size_t i = 0; i < total.size(); ++i) total[i] += s.values[i];
    }
    return SpectralDensity(first.grid, std::move(total), first.unit);
}

SpectralDensity quadrature_sum(const std::vector<SpectralDensity>& components) {
    return quadrature_sum(std::span<const SpectralDensity>(components));
}

SpectralDensity apply_transfer(const TransferFunction& h, const SpectralDensity& s) {
    if (!h.grid.same_as(s.grid)) throw std::invalid_argument("apply_transfer: grid mismatch");
    if (h.input != s.unit)
        throw std::invalid_argument("apply_transfer: PSD unit " + psd_unit_name(s.unit) +
                                    " does not match response input " + unit_name(h.input));
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(h.values[i]) * s.values[i];
    return SpectralDensity(s.grid, std::move(out), h.output);
}

TransferFunction compose(const TransferFunction& h1, const TransferFunction& h2) {
    if (!h1.grid.same_as(h2.grid)) throw std::invalid_argument("compose: grid mismatch");
    if (h1.input != h2.output)
        throw std::invalid_argument("compose: unit chain mismatch (h2 output must feed h1 input)");
    std::vector<std::complex<double>> out(h1.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = h1.values[i] * h2.values[i];
    return TransferFunction(h1.grid, std::move(out), h2.input, h1.output);
}

}  // namespace torsim
