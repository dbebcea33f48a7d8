#pragma once

#include <complex>
#include <vector>

namespace torsim::fft {

using cplx = std::complex<double>;

// In-place forward/inverse DFT for any length (radix-2 when n is a power
// of two, Bluestein otherwise). Inverse includes the 1/n factor.
void forward(std::vector<cplx>& data);
void inverse(std::vector<cplx>& data);

// Real-input forward transform; returns bins 0..n/2 (inclusive).
std::vector<cplx> rfft(const std::vector<double>& x);

// Inverse of rfft for a real series of length n.
std::vector<double> irfft(const std::vector<cplx>& spectrum, std::size_t n);

// Analytic signal x + i*H[x] via the frequency-domain Hilbert transform.
std::vector<cplx> analytic_signal(const std::vector<double>& x);

}  // namespace torsim::fft
