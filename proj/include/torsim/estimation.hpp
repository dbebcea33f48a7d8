#pragma once

#include <cstdint>
#include <string>

#include "torsim/spectra.hpp"

namespace torsim {

// Averaged-periodogram PSD estimate: Hann window, per-segment mean removal,
// mean averaging over segments, one-sided normalization (a white process of
// variance sigma^2 comes out flat at 2*sigma^2/fs). Grid is k*fs/N for
// k = 1..N/2. Segment periodograms are computed in parallel; the reduction
// order is fixed so the result does not depend on thread count.
SpectralDensity welch_psd(const TimeSeries& x, std::size_t segment_length, double overlap_fraction);

// Magnitude-squared coherence in [0, 1]; needs at least two segments.
SpectralDensity coherence(const TimeSeries& x, const TimeSeries& y, std::size_t segment_length,
                          double overlap_fraction);

// Gaussian series whose one-sided PSD matches `target` (log-log interpolated
// onto the synthesis bins). Deterministic for a fixed seed.
TimeSeries synthesize_timeseries(const SpectralDensity& target, double duration_s, double sample_rate_hz,
                                 std::uint64_t seed);

struct RingdownResult {
    bool ok = false;
    std::string message;
    double omega_rad_s = 0.0;        // carrier frequency
    double gamma_rad_s = 0.0;        // energy damping rate (envelope ~ exp(-gamma t / 2))
    double quality = 0.0;            // omega / gamma
    double gamma_ci_rad_s = 0.0;     // 95% regression interval half-width on gamma
    double residual_norm = 0.0;      // normalized log-envelope regression residual
};

// Fit A*exp(-gamma t/2)*cos(omega t + phi): omega from the analytic-signal
// phase slope, gamma from a log-envelope linear regression.
RingdownResult ringdown_fit(const TimeSeries& x);

// Straightforward single-threaded implementations kept as the test oracle
// for the parallel kernels above.
namespace reference {
SpectralDensity welch_psd(const TimeSeries& x, std::size_t segment_length, double overlap_fraction);
SpectralDensity coherence(const TimeSeries& x, const TimeSeries& y, std::size_t segment_length,
                          double overlap_fraction);
}  // namespace reference

}  // namespace torsim
