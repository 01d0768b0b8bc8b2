#pragma once
// iterative radix-2 complex FFT, power-of-two sizes only.
// self-contained and deterministic; sizes here stay <= 2^22.
#include <complex>
#include <cstddef>
#include <vector>

namespace sil {

using cdbl = std::complex<double>;

size_t next_pow2(size_t n);

// in-place transform; inverse divides by size
void fft(std::vector<cdbl>& a, bool inverse);

// autocorrelation A(h) = sum_x f(x) conj(f(x+h)) for h in [0, n), n = f.size(),
// computed by FFT on a 2*next_pow2(n) grid (no wraparound)
std::vector<cdbl> autocorrelation(const std::vector<cdbl>& f);

}  // namespace sil
