#include "sil/fft.hpp"

#include <cmath>

#include "sil/util.hpp"

namespace sil {

size_t next_pow2(size_t n) {
    size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft(std::vector<cdbl>& a, bool inverse) {
    size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw parameter_error("fft size must be a power of two");
    // bit-reversal permutation
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        double ang = 2.0 * M_PI / (double)len * (inverse ? 1.0 : -1.0);
        cdbl wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            cdbl w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                cdbl u = a[i + k];
                cdbl v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        double inv = 1.0 / (double)n;
        for (auto& z : a) z *= inv;
    }
}

std::vector<cdbl> autocorrelation(const std::vector<cdbl>& f) {
    size_t n = f.size();
    if (n == 0) return {};
    size_t m = 2 * next_pow2(n);
    // circular convolution of f with x -> conj(f(-x mod m)) gives
    // c(j) = sum_x f(x) conj(f(x - j)); m >= 2n kills wraparound, A(h) = c(-h)
    std::vector<cdbl> fa(m, cdbl{0, 0}), fb(m, cdbl{0, 0});
    for (size_t i = 0; i < n; ++i) fa[i] = f[i];
    for (size_t i = 0; i < n; ++i) fb[(m - i) % m] = std::conj(f[i]);
    fft(fa, false);
    fft(fb, false);
    for (size_t i = 0; i < m; ++i) fa[i] *= fb[i];
    fft(fa, true);
    std::vector<cdbl> out(n);
    out[0] = fa[0];
    for (size_t h = 1; h < n; ++h) out[h] = fa[m - h];
    return out;
}

}  // namespace sil
