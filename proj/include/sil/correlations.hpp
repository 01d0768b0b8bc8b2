#pragma once
// Correlation constants for arithmetic functions along arithmetic progressions:
// singular series, local divisor-correlation factors, empirical correlation sums,
// and small-modulus main terms. Local computations are exact rationals
// (boost::multiprecision); floats appear only when per-prime factors are
// multiplied into a final product.

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sil/arith.hpp"

namespace sil {

using bigint = boost::multiprecision::cpp_int;
using bigrat = boost::multiprecision::cpp_rational;

// Offsets h_1..h_ell, pairwise distinct. Correlation sums run over
// prod_j f(n + h_j); the progression case uses offsets 0, h, ..., (ell-1) h.
struct OffsetSystem {
    int ell = 0;
    std::vector<int64_t> offsets;
};

OffsetSystem make_offset_system(std::vector<int64_t> offsets);
OffsetSystem ap_offsets(int64_t h, int ell);  // {0, h, ..., (ell-1) h}, h >= 1

// Exact per-prime singular series factor (1 - nu_p/p) (1 - 1/p)^{-ell},
// nu_p = #{h_j mod p}.
bigrat singular_series_factor(int64_t p, const OffsetSystem& sys);

struct SingularSeriesResult {
    double value = 0.0;     // prod_{p <= p_max} factor, one rounding per factor
    int64_t p_max = 0;
    double tail_bound = 0;  // bound on |true/truncated - 1| * |value|; see notes below
};

// Truncated singular series over p <= p_max. Factors are exact rationals rounded
// once each; the product is accumulated in extended precision in ascending prime
// order (chunk layout is thread-count independent). tail_bound uses
// |log factor| <= 3 ell^2 / p^2 for p beyond p_max coprime to all offset
// differences, plus 2 ell / p for each prime beyond p_max dividing a difference
// (at most log2(prod |h_i - h_j|) / log2(p_max) of them).
SingularSeriesResult singular_series(const OffsetSystem& sys, int64_t p_max, int threads = 1);

// d_{k,p}(p^a) = binom(k-1+a, k-1): the p-component of the k-fold divisor
// function. Throws capacity_error if the binomial exceeds int64.
int64_t local_dkp(int64_t p, int k, int64_t a);

// Mean value of d_{k,p} over n: (1 - 1/p)^{1-k}, exact.
bigrat local_dkp_mean(int64_t p, int k);

// Density of {n : e_j | n + j h for all j}: 1/lcm(e_j) when the congruences are
// pairwise compatible (gcd(e_i, e_j) divides (i - j) h), else 0.
bigrat alpha_density(const std::vector<int64_t>& moduli, int64_t h);

// Local limit lim_Y E_{n <= Y} prod_j d_{k,p}(n + h_j), exact. Expands through
// divisibility patterns p^{a_j} | n + h_j with weights d_{k-1,p}; compatibility
// forces all but the largest exponent below T0 = max_{i<j} v_p(h_i - h_j), so
// the sum closes exactly with one geometric tail per slot whenever T0 <= M - 2.
// Otherwise exponents are truncated at M - 2 and *tail_out receives a rigorous
// bound on the dropped mass (0 when the enumeration is complete).
bigrat dk_local_limit(int64_t p, int k, const OffsetSystem& sys, int M, double* tail_out = nullptr);

struct LocalFactorResult {
    int64_t p = 0;
    bigrat numerator;    // local limit for offsets 0, h, ..., (ell-1) h
    bigrat denominator;  // (mean of d_{k,p})^ell
    bigrat ratio;        // numerator / denominator; ratio * denominator == numerator
    double tail_bound = 0.0;  // truncation bound on numerator; exact when 0
};

// Per-prime factor of the divisor correlation constant. M >= 2 caps the
// divisibility depth; throws precision_error when tolerance > 0 and the
// truncation bound at this M exceeds it.
LocalFactorResult local_correlation_factor(int64_t p, int k, int ell, int64_t h, int M,
                                           double tolerance = 0.0);

struct CorrelationConstant {
    double value = 0.0;
    double tail_bound = 0.0;  // truncation bounds + bound on the product beyond p_max
    int64_t p_max = 0;
    int M = 0;  // starting depth; per-prime depth adapts up to 12 until tails < 1e-12
};

// prod_{p <= p_max} ratio_p for offsets 0, h, ..., (ell-1) h. Exact rational per
// prime, one rounding each, product in extended precision in ascending prime
// order. tail_bound combines per-prime truncation bounds with
// |C_p - 1| <= 6 k^2 ell^2 / p^2 beyond p_max (primes dividing h contribute
// 8 k ell / p each).
CorrelationConstant correlation_constant(int64_t h, int k, int ell, int64_t p_max, int M,
                                         int threads = 1);

// Streamed sum_{n <= X} prod_j f(n + h_j) for f in {lambda, mu, dk}. Offsets
// must be >= 0; [1, X + max offset] is sieved in one block (capacity_error
// beyond 1.2e8 entries). Chunked compensated summation, thread-count
// independent.
double empirical_correlation(fn_kind kind, int k_param, uint64_t X, const OffsetSystem& sys,
                             int threads = 1);

struct WTrickFactor {
    int64_t p = 0;
    bigrat value;
};

struct WTrickMainTerm {
    double value = 0.0;                 // product of the factors, rounded once each
    std::vector<WTrickFactor> factors;  // ascending p <= w, exact
};

// Main term prod_{p <= w} lim_Y E_n prod_j g_p(n + h_j) for the small-modulus
// factorization. g_tag = lambda_w: g_p = (p/(p-1)) 1_{p coprime}, local limit
// computed by residue enumeration mod p (equals the singular series factor).
// g_tag = dk with parameter k: local limit via dk_local_limit at depth M.
WTrickMainTerm w_trick_main_term(fn_kind g_tag, int k, double w, const OffsetSystem& sys,
                                 int M = 10);

// External formats.
struct CorrelationRow {
    int64_t h = 0;
    double empirical = 0.0;
    double main_term = 0.0;
    double ratio = 0.0;
};

std::string correlation_table_csv(const std::vector<CorrelationRow>& rows);
std::string correlation_constant_json(int64_t h, int k, int ell, const CorrelationConstant& c);
std::string singular_series_json(const OffsetSystem& sys, const SingularSeriesResult& s);

}  // namespace sil
