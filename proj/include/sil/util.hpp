#pragma once
// small shared helpers: error taxonomy, mod-1 arithmetic, compensated sums
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace sil {

// parameter violations (bad flags, preconditions)
struct parameter_error : std::runtime_error {
    explicit parameter_error(const std::string& m) : std::runtime_error(m) {}
};
// problem size exceeds what the implementation can do exactly / in memory
struct capacity_error : std::runtime_error {
    explicit capacity_error(const std::string& m) : std::runtime_error(m) {}
};
// requested tolerance cannot be certified
struct precision_error : std::runtime_error {
    explicit precision_error(const std::string& m) : std::runtime_error(m) {}
};

// signed fractional part in [-1/2, 1/2)
inline double sfrac(double x) {
    double r = x - std::floor(x);
    return r >= 0.5 ? r - 1.0 : r;
}

// distance to the nearest integer, ||x||_{R/Z} in [0, 1/2]
inline double dist_mod1(double x) { return std::fabs(sfrac(x)); }

// e(x) = exp(2 pi i x)
inline std::complex<double> e_of(double x) {
    double t = 2.0 * M_PI * x;
    return {std::cos(t), std::sin(t)};
}

// Kahan-Neumaier compensated accumulator
struct kahan {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double t = s + x;
        if (std::fabs(s) >= std::fabs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double get() const { return s + c; }
};

struct kahan_c {
    kahan re, im;
    void add(std::complex<double> z) {
        re.add(z.real());
        im.add(z.imag());
    }
    std::complex<double> get() const { return {re.get(), im.get()}; }
};

// floor(a^b) guarded; throws capacity_error past 2^62
inline uint64_t upow_checked(uint64_t a, unsigned b) {
    uint64_t r = 1;
    while (b--) {
        if (a != 0 && r > (uint64_t(1) << 62) / a)
            throw capacity_error("integer power exceeds 2^62");
        r *= a;
    }
    return r;
}

inline int64_t ipow64(int64_t a, unsigned b) {
    int64_t r = 1;
    while (b--) r *= a;
    return r;
}

}  // namespace sil
