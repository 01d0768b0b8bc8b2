#pragma once
// Approximants: Lambda# (coprimality to primes below R), the w-trick variant
// Lambda_w, the truncated type-I form Lambda#_I, and dk# built from the P_m
// polynomials.

#include <cstdint>
#include <vector>

#include "sil/arith.hpp"

namespace sil {

// Lambda#(n) = (PR/phi(PR)) 1_{gcd(n,PR)=1} with R = exp((log X)^{1/10})
struct LambdaSharpParams {
    uint64_t X = 1;
    double R = 1.0;
    uint64_t PR = 1;             // product of primes p < R
    double normalization = 1.0;  // PR/phi(PR)
    bool degenerate = false;     // R < 2: PR = 1 and the approximant is constant 1
};

LambdaSharpParams make_lambda_sharp_params(uint64_t X);

// Lambda_w(n) = (W/phi(W)) 1_{gcd(n,W)=1} with W = prod_{p<=w} p
struct WTrickParams {
    double w = 2.0;
    uint64_t W = 2;
    double normalization = 2.0;  // W/phi(W)
};

WTrickParams make_wtrick_params(double w);

// dk#(n) = sum over m | n, m <= Rk^{2k-2} of P_m(log n), Rk = X^{eps/(10k)}
struct DkSharpParams {
    uint64_t X = 1;
    int k = 2;
    double epsilon = 1.0;
    double Rk = 1.0;
    double support_bound = 1.0;  // Rk^{2k-2}
    bool degenerate = false;     // Rk < 2: no integer in (1, Rk]
};

DkSharpParams make_dk_sharp_params(uint64_t X, int k, double epsilon = 1.0);

// P_m(t) = sum_i coefficients[i] t^i, degree <= k-1
struct PmPolynomial {
    int64_t m = 1;
    std::vector<double> coefficients;
};

// coefficients of P_m via the ordered-factorization expansion: tuples
// m = n_1...n_{k-1} with a prefix of factors <= Rk and the rest in (Rk, Rk^2]
PmPolynomial pm_polynomial(int64_t m, const DkSharpParams& params);

ValueTable lambda_sharp(Window w, const LambdaSharpParams& params);
ValueTable lambda_w(Window w, const WTrickParams& params);
// truncated Moebius form: normalization * sum_{d <= X^{eps/5}, d | gcd(n,PR)} mu(d);
// coincides with lambda_sharp exactly once PR <= X^{eps/5}
ValueTable lambda_sharp_type1(Window w, const LambdaSharpParams& params, double epsilon);
ValueTable dk_sharp(Window w, const DkSharpParams& params);

}  // namespace sil
