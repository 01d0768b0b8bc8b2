#pragma once
// TV norms per residue class, maximal sums over sub-progressions, C^d
// smoothness norms of phases, and Gowers U^s norms over intervals (naive and
// FFT-backed fast paths).
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "sil/arith.hpp"
#include "sil/phases.hpp"
#include "sil/util.hpp"

namespace sil {

struct Progression {
    int64_t first = 0;
    int64_t difference = 1;
    int64_t count = 1;
};

struct MaxSumResult {
    double value = 0.0;
    Progression witness;
    bool exact = true;  // false when q_max was clipped below H (lower-bound mode)
};

// ||f||_{TV(P;q)}: per residue class a mod q of the progression elements
// first + i*difference, sup|f| + sum of consecutive jumps; empty class adds 0
double tv_norm(std::span<const double> values, int64_t q, int64_t first = 0,
               int64_t difference = 1);
double tv_norm(std::span<const std::complex<double>> values, int64_t q, int64_t first = 0,
               int64_t difference = 1);

// sup over arithmetic progressions (difference <= q_max) of |sum of values|.
// Positions are base, base+1, ..., base+H-1; q_max = 0 picks the default policy
// (exact q_max = H when H <= 1e4, else min(H, 4096) with exact = false).
// Real input: exact prefix extremes per (difference, residue) class.
// Complex input: exact farthest pair of prefix sums per class (convex hull).
MaxSumResult maximal_sum(std::span<const double> values, uint64_t q_max = 0, int64_t base = 1,
                         int threads = 1);
MaxSumResult maximal_sum(std::span<const std::complex<double>> values, uint64_t q_max = 0,
                         int64_t base = 1, int threads = 1);

// max over 0<=j<=d, n in I of |I|^j ||Delta^j f(n)||_{R/Z} with
// Delta f(n) = f(n) - f(n-1), differences taken inside the window
double smoothness_norm(const PolyPhase& phase, Window w, int d);
// for polynomials the C^infinity norm is the C^degree norm
double smoothness_norm_cinf(const PolyPhase& phase, Window w);

struct GowersResult {
    int s = 1;
    double unnormalized = 0.0;
    double normalizer = 1.0;
    double normalized = 0.0;
};

// exact 2^s-linear sum over Z with conjugation pattern C^{|omega|}; budget
// guards H^{s+1} <= op_budget
GowersResult gowers_norm_naive(std::span<const std::complex<double>> values, int s,
                               double op_budget = 1e9);
// s = 2: ||f||_{U^2}^4 = sum_h |A(h)|^2 by FFT autocorrelation (H <= 1e7);
// s = 3: ||f||_{U^3}^8 = sum_h ||f conj(f(.+h))||_{U^2}^4 (H <= 1e5)
GowersResult gowers_norm_fast(std::span<const std::complex<double>> values, int s);

}  // namespace sil
