#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace torsim {

// Amplitude-domain unit of a spectral quantity. A SpectralDensity tagged
// with Unit::torque_nm carries (Nm)^2/Hz, and so on. The enumeration is
// closed; there is no general unit algebra.
enum class Unit {
    torque_nm,
    angle_rad,
    displacement_m,
    power_w,
    frequency_hz,
    relative,
    dimensionless,
};

std::string unit_name(Unit u);            // "Nm", "rad", ...
std::string psd_unit_name(Unit u);        // "Nm^2/Hz", ...
std::string asd_unit_name(Unit u);        // "Nm/sqrt(Hz)", ...

// Strictly increasing, finite, positive frequencies in Hz. All formula
// evaluation converts to angular frequency via omega = 2*pi*f at the point
// of use; grids are always plain Hz.
class FrequencyGrid {
  public:
    FrequencyGrid() = default;
    explicit FrequencyGrid(std::vector<double> values_hz);

    static FrequencyGrid log_spaced(double f_min_hz, double f_max_hz, std::size_t n);
    static FrequencyGrid linear(double f_min_hz, double f_max_hz, std::size_t n);

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    bool same_as(const FrequencyGrid& other, double rel_tol = 0.0) const;

  private:
    std::vector<double> values_;
};

// One-sided power spectral density on a frequency grid: integrating over
// f in (0, inf) gives the total variance of the underlying quantity.
struct SpectralDensity {
    FrequencyGrid grid;
    std::vector<double> values;  // unit^2/Hz, >= 0
    Unit unit = Unit::dimensionless;

    SpectralDensity() = default;
    SpectralDensity(FrequencyGrid g, std::vector<double> v, Unit u);

    static SpectralDensity flat(const FrequencyGrid& g, double level, Unit u);

    std::size_t size() const { return values.size(); }

    // Trapezoidal integral over the grid, in unit^2.
    double integrate() const;
    double integrate_band(double f_lo_hz, double f_hi_hz) const;

    // Value at an arbitrary frequency, log-log interpolated (linear in
    // linear space where a bracketing value is zero).
    double interpolate(double f_hz) const;
};

// Complex frequency response H(f); applying it to a PSD multiplies by
// |H|^2 and converts the unit from `input` to `output`.
struct TransferFunction {
    FrequencyGrid grid;
    std::vector<std::complex<double>> values;
    Unit input = Unit::dimensionless;
    Unit output = Unit::dimensionless;

    TransferFunction() = default;
    TransferFunction(FrequencyGrid g, std::vector<std::complex<double>> v, Unit in, Unit out);

    static TransferFunction unity(const FrequencyGrid& g, Unit in, Unit out);

    std::size_t size() const { return values.size(); }
    double magnitude(std::size_t i) const { return std::abs(values[i]); }
};

// Uniformly sampled real-valued series.
struct TimeSeries {
    double sample_rate_hz = 0.0;
    std::vector<double> samples;
    Unit unit = Unit::dimensionless;

    TimeSeries() = default;
    TimeSeries(double fs_hz, std::vector<double> s, Unit u);

    std::size_t size() const { return samples.size(); }
    double duration_s() const { return samples.empty() ? 0.0 : static_cast<double>(samples.size()) / sample_rate_hz; }
    double mean() const;
    double variance() const;  // about the sample mean
};

// Incoherent sum of PSD components. All inputs must share grid and unit.
SpectralDensity quadrature_sum(std::span<const SpectralDensity> components);
SpectralDensity quadrature_sum(const std::vector<SpectralDensity>& components);

// S_out(f) = |H(f)|^2 * S_in(f); unit flows input -> output.
SpectralDensity apply_transfer(const TransferFunction& h, const SpectralDensity& s);

// Pointwise product of responses (grids must match, units must chain).
TransferFunction compose(const TransferFunction& h1, const TransferFunction& h2);

}  // namespace torsim
