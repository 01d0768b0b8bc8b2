#pragma once
// polynomial phases P(n) = sum_j alpha_j (n - n0)^j mod 1, discorrelation
// sums sum f(n) e(-P(n)), rigorous linear-phase suprema, Taylor phases for
// n^{iT}, and rational log-phase fitting.
#include <complex>
#include <cstdint>
#include <vector>

#include "sil/arith.hpp"
#include "sil/util.hpp"

namespace sil {

struct PolyPhase {
    int64_t base = 0;            // expansion point n0
    int degree = 0;              // <= 6 by default
    std::vector<double> coeffs;  // alpha_0..alpha_degree, stored in [-1/2, 1/2)
};

PolyPhase make_poly_phase(int64_t base, const std::vector<double>& coeffs, int max_degree = 6);

// P(n) mod 1 in [-1/2, 1/2); Horner in u = n - base, reduced every step
double eval_mod1(const PolyPhase& p, int64_t n);

// q * P, coefficientwise mod 1 (same values mod 1 at integers)
PolyPhase scale_phase(const PolyPhase& p, int64_t q);

// re-center the expansion point (binomial re-expansion in long double)
PolyPhase shift_base(const PolyPhase& p, int64_t new_base);

// Q(n) = P(a n), expansion point moved near new_base ~ base/a
PolyPhase dilate_phase(const PolyPhase& p, int64_t a);

// coefficients (T/2pi)(-1)^{j-1}/(j x^j) for j = 1..J plus constant
// (T/2pi) log x, so e(P(y)) tracks y^{iT} on [x, x+H] with error
// O_J(T (H/X)^{J+1})
PolyPhase taylor_log_phase(uint64_t X, uint64_t x, double T, int J);

// sum over the window of f(n) e(-P(n)), compensated
std::complex<double> discorrelation_sum(const ValueTable& f, const PolyPhase& p);

struct LinearSupResult {
    double alpha_star = 0.0;    // grid argmax, mod 1
    double value = 0.0;         // |sum f(n) e(-alpha_star (n - x))|
    double rigorous_gap = 0.0;  // bound on (true sup over alpha) - value
};

// grid of >= oversample*H phases via zero-padded FFT; derivative bound gives
// rigorous_gap = pi * H * sum|f| / gridsize
LinearSupResult max_linear_discorrelation(const ValueTable& f, int oversample, int threads = 1);

struct LogPhaseFit {
    double T = 0.0;
    int64_t q = 1;
    double residual = 0.0;  // C^d-style discrepancy of qP - (T/2pi) log over the window
};

// scan q <= q_max, lift T from the degree-1 coefficient, measure the
// finite-difference discrepancy of qP - (T/2pi) log; smallest residual wins,
// ties to smaller q
LogPhaseFit fit_log_phase(const PolyPhase& p, Window w, int64_t q_max);

// HEURISTIC coarse grid search over degree-d phases with coefficients in
// smoothness-bounded boxes (d in {2,3}); no rigor is claimed for the gap to
// the true sup, unlike max_linear_discorrelation
struct PolySupHeuristic {
    PolyPhase phase;
    double value = 0.0;
};
PolySupHeuristic heuristic_poly_sup(const ValueTable& f, int degree, double coeff_box,
                                    int steps_per_coeff);

}  // namespace sil
