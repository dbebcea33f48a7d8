#include "torsim/fft.hpp"

#include <cmath>
#include <stdexcept>

#include "torsim/constants.hpp"

namespace torsim::fft {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Iterative radix-2 Cooley-Tukey; n must be a power of two.
void fft_pow2(std::vector<cplx>& a, bool invert) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (invert ? 1.0 : -1.0) * constants::two_pi / static_cast<double>(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (invert) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (auto& z : a) z *= inv_n;
    }
}

// Bluestein chirp-z for arbitrary n, built on the power-of-two kernel.
void fft_bluestein(std::vector<cplx>& a, bool invert) {
    const std::size_t n = a.size();
    const std::size_t m = next_pow2(2 * n - 1);
    const double sign = invert ? 1.0 : -1.0;

    std::vector<cplx> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        // angle = pi * k^2 / n, evaluated mod 2n to keep the argument small
        const std::size_t k2 = (static_cast<std::size_t>(k) * k) % (2 * n);
        const double ang = sign * constants::pi * static_cast<double>(k2) / static_cast<double>(n);
        chirp[k] = cplx(std::cos(ang), std::sin(ang));
    }

    std::vector<cplx> x(m, cplx(0.0, 0.0)), y(m, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * chirp[k];
    y[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) y[k] = y[m - k] = std::conj(chirp[k]);

    fft_pow2(x, false);
    fft_pow2(y, false);
    for (std::size_t k = 0; k < m; ++k) x[k] *= y[k];
    fft_pow2(x, true);

    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
    if (invert) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (auto& z : a) z *= inv_n;
    }
}

}  // namespace

void forward(std::vector<cplx>& data) {
    if (data.empty()) return;
    if (is_pow2(data.size()))
        fft_pow2(data, false);
    else
        fft_bluestein(data, false);
}

void inverse(std::vector<cplx>& data) {
    if (data.empty()) return;
    if (is_pow2(data.size()))
        fft_pow2(data, true);
    else
        fft_bluestein(data, true);
}

std::vector<cplx> rfft(const std::vector<double>& x) {
    std::vector<cplx> a(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) a[i] = cplx(x[i], 0.0);
    forward(a);
    a.resize(x.size() / 2 + 1);
    return a;
}

std::vector<double> irfft(const std::vector<cplx>& spectrum, std::size_t n) {
    if (spectrum.size() != n / 2 + 1)
        throw std::invalid_argument("irfft: spectrum length must be n/2+1");
    std::vector<cplx> a(n);
    for (std::size_t k = 0; k < spectrum.size(); ++k) a[k] = spectrum[k];
    for (std::size_t k = spectrum.size(); k < n; ++k) a[k] = std::conj(spectrum[n - k]);
    inverse(a);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i].real();
    return out;
}

std::vector<cplx> analytic_signal(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<cplx> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = cplx(x[i], 0.0);
    forward(a);
    // zero negative frequencies, double positive ones, keep DC and Nyquist
    for (std::size_t k = 1; k < (n + 1) / 2; ++k) a[k] *= 2.0;
    for (std::size_t k = n / 2 + 1; k < n; ++k) a[k] = cplx(0.0, 0.0);
    inverse(a);
    return a;
}

}  // namespace torsim::fft
