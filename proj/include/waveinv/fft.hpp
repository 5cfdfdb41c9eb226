#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "waveinv/errors.hpp"

namespace waveinv {

inline size_t next_pow2(size_t n) {
    size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// In-place iterative radix-2 FFT; sign = -1 forward, +1 inverse (unscaled).
inline void fft_pow2(std::vector<std::complex<double>>& a, int sign) {
    const size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw SizeMismatch("fft: length must be a power of two");
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const double pi = 3.14159265358979323846;
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * pi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (sign > 0) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& z : a) z *= inv;
    }
}

/// Forward DFT of a real signal zero-padded to at least `min_len` (rounded up
/// to a power of two). Returns the complex spectrum; bin k corresponds to
/// angular frequency 2*pi*k/(N*dt) (wrapped to negative for k > N/2).
inline std::vector<std::complex<double>> real_dft_padded(const double* x, size_t n, size_t min_len) {
    const size_t N = next_pow2(std::max(n, min_len));
    std::vector<std::complex<double>> a(N, {0.0, 0.0});
    for (size_t i = 0; i < n; ++i) a[i] = {x[i], 0.0};
    fft_pow2(a, -1);
    return a;
}

/// Signed angular frequency of DFT bin k for sample spacing dt and length N.
inline double dft_angular_frequency(size_t k, size_t N, double dt) {
    const double pi = 3.14159265358979323846;
    const long kk = (k <= N / 2) ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(N);
    return 2.0 * pi * static_cast<double>(kk) / (static_cast<double>(N) * dt);
}

/// Neumaier compensated accumulator.
struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

}  // namespace waveinv
