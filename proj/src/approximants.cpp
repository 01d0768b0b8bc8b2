#include "sil/approximants.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sil/util.hpp"

namespace sil {

namespace {

// primes in [2, bound); bound stays tiny here (R < 5 for any feasible X,
// w <= 47 before W overflows), trial division is plenty
std::vector<uint64_t> primes_below(double bound) {
    std::vector<uint64_t> ps;
    for (uint64_t n = 2; (double)n < bound; ++n) {
        bool prime = true;
        for (uint64_t p : ps) {
            if (p * p > n) break;
            if (n % p == 0) {
                prime = false;
                break;
            }
        }
        if (prime) ps.push_back(n);
    }
    return ps;
}

void check_within_4x(Window w, uint64_t X, const char* who) {
    if (w.end() > 4 * X) throw parameter_error(std::string(who) + ": window exceeds 4X");
}

// coprimality table over one period of the squarefree modulus
ValueTable periodic_coprime_table(Window w, uint64_t modulus, double norm, fn_kind kind) {
    ValueTable out{w, kind, 0, std::vector<double>(w.length, 0.0)};
    std::vector<char> ok(modulus, 1);
    for (uint64_t r = 0; r < modulus; ++r) ok[r] = std::gcd(r, modulus) == 1 ? 1 : 0;
    for (uint64_t i = 0; i < w.length; ++i)
        out.values[i] = ok[(w.start + 1 + i) % modulus] ? norm : 0.0;
    return out;
}

}  // namespace

LambdaSharpParams make_lambda_sharp_params(uint64_t X) {
    if (X < 1) throw parameter_error("lambda sharp needs X >= 1");
    LambdaSharpParams p;
    p.X = X;
    p.R = X == 1 ? 1.0 : std::exp(std::pow(std::log((double)X), 0.1));
    uint64_t pr = 1, phi = 1;
    for (uint64_t q : primes_below(p.R)) {
        pr *= q;
        phi *= q - 1;
    }
    p.PR = pr;
    p.normalization = (double)pr / (double)phi;
    p.degenerate = p.R < 2.0;
    return p;
}

WTrickParams make_wtrick_params(double w) {
    if (!(w >= 2.0)) throw parameter_error("w-trick needs w >= 2");
    if (w > 47.0) throw capacity_error("W overflows 64 bits past w = 47");
    WTrickParams p;
    p.w = w;
    uint64_t W = 1, phi = 1;
    for (uint64_t q : primes_below(std::floor(w) + 0.5)) {
        W *= q;
        phi *= q - 1;
    }
    p.W = W;
    p.normalization = (double)W / (double)phi;
    return p;
}

ValueTable lambda_sharp(Window w, const LambdaSharpParams& params) {
    check_within_4x(w, params.X, "lambda_sharp");
    return periodic_coprime_table(w, params.PR, params.normalization, fn_kind::lambda_sharp);
}

ValueTable lambda_w(Window w, const WTrickParams& params) {
    ValueTable out{w, fn_kind::lambda_w, 0, std::vector<double>(w.length, 0.0)};
    auto ps = primes_below(params.w + 0.5);
    for (uint64_t i = 0; i < w.length; ++i) {
        uint64_t n = w.start + 1 + i;
        bool coprime = true;
        for (uint64_t p : ps)
            if (n % p == 0) {
                coprime = false;
                break;
            }
        out.values[i] = coprime ? params.normalization : 0.0;
    }
    return out;
}

ValueTable lambda_sharp_type1(Window w, const LambdaSharpParams& params, double epsilon) {
    if (!(epsilon > 0.0) || epsilon > 1.0)
        throw parameter_error("lambda_sharp_type1 needs epsilon in (0,1]");
    check_within_4x(w, params.X, "lambda_sharp_type1");
    double cutoff = std::pow((double)params.X, epsilon / 5.0);
    auto ps = primes_below(params.R);
    ValueTable out{w, fn_kind::lambda_sharp_t1, 0, std::vector<double>(w.length, 0.0)};
    // squarefree divisors d of PR with d <= cutoff, each contributing
    // normalization * mu(d) on its multiples
    size_t np = ps.size();
    for (size_t mask = 0; mask < (size_t{1} << np); ++mask) {
        uint64_t d = 1;
        int bits = 0;
        for (size_t b = 0; b < np; ++b)
            if (mask & (size_t{1} << b)) {
                d *= ps[b];
                ++bits;
            }
        if ((double)d > cutoff) continue;
        double add = (bits & 1) ? -params.normalization : params.normalization;
        uint64_t first = (w.start / d + 1) * d;  // smallest multiple of d > start
        for (uint64_t n = first; n <= w.end(); n += d) out.values[n - w.start - 1] += add;
    }
    return out;
}

DkSharpParams make_dk_sharp_params(uint64_t X, int k, double epsilon) {
    if (X < 1) throw parameter_error("dk sharp needs X >= 1");
    if (k < 2 || k > 8) throw parameter_error("dk sharp covers 2 <= k <= 8");
    if (!(epsilon > 0.0) || epsilon > 1.0) throw parameter_error("dk sharp needs epsilon in (0,1]");
    DkSharpParams p;
    p.X = X;
    p.k = k;
    p.epsilon = epsilon;
    p.Rk = std::pow((double)X, epsilon / (10.0 * k));
    p.support_bound = std::pow(p.Rk, 2.0 * k - 2.0);
    p.degenerate = p.Rk < 2.0;
    return p;
}

namespace {

// shared enumeration: ordered tuples m = n_1...n_{k-1} with n_1..n_j <= Rk and
// the rest in (Rk, Rk^2], each contributing
//   C(k,j) (t - log(n_1...n_j) - (k-j) log Rk)^{k-1-j} / ((k-1-j)! log^{k-1-j} Rk)
// to the coefficient row of m (as a polynomial in t)
struct pm_builder {
    const DkSharpParams& params;
    int64_t support;
    double lg;                   // log Rk
    int64_t small_max;           // floor(Rk)
    int64_t big_lo, big_hi;      // integers in (Rk, Rk^2]
    std::vector<double> logv;    // log of 1..big_hi
    std::vector<double>* rows = nullptr;    // coefficient rows, k doubles per m
    std::vector<double>* single = nullptr;  // single-m row when rows == null
    int64_t single_m = 0;
    bool divisors_only = false;  // single-m mode: factors must divide single_m

    pm_builder(const DkSharpParams& p, int64_t sup) : params(p), support(sup) {
        lg = params.epsilon / (10.0 * params.k) * std::log((double)params.X);
        small_max = (int64_t)std::floor(params.Rk);
        big_lo = (int64_t)std::floor(params.Rk) + 1;
        big_hi = (int64_t)std::floor(params.Rk * params.Rk);
        while ((double)big_hi > params.Rk * params.Rk) --big_hi;
        int64_t lmax = std::max<int64_t>({small_max, big_hi, 1});
        logv.assign((size_t)lmax + 1, 0.0);
        for (int64_t v = 1; v <= lmax; ++v) logv[(size_t)v] = std::log((double)v);
    }

    void add_tuple(int64_t m, int j, double log_small) {
        if (!rows && m != single_m) return;  // partial products divide m without reaching it
        int k = params.k;
        int e = k - 1 - j;
        double c = log_small + (double)(k - j) * lg;
        double kj = 1.0;  // C(k,j)
        for (int i = 0; i < j; ++i) kj = kj * (double)(k - i) / (double)(i + 1);
        double efact = 1.0;
        for (int i = 2; i <= e; ++i) efact *= (double)i;
        double denom = efact * std::pow(lg, (double)e);
        double* row = rows ? rows->data() + (size_t)m * (size_t)k : single->data();
        // (t - c)^e expanded in powers of t
        double binei = 1.0;  // C(e,i)
        for (int i = 0; i <= e; ++i) {
            row[i] += kj * binei * std::pow(-c, (double)(e - i)) / denom;
            binei = binei * (double)(e - i) / (double)(i + 1);
        }
    }

    void rec_big(int64_t prod, int depth, int j, double log_small) {
        if (depth == 0) {
            add_tuple(prod, j, log_small);
            return;
        }
        for (int64_t b = big_lo; b <= big_hi; ++b) {
            if (prod > support / b) break;
            if (divisors_only && single_m % (prod * b) != 0) continue;
            rec_big(prod * b, depth - 1, j, log_small);
        }
    }

    void rec_small(int64_t prod, int depth, int j, double log_small) {
        if (depth == 0) {
            rec_big(prod, params.k - 1 - j, j, log_small);
            return;
        }
        for (int64_t d = 1; d <= small_max; ++d) {
            if (prod > support / d) break;
            if (divisors_only && single_m % (prod * d) != 0) continue;
            rec_small(prod * d, depth - 1, j, log_small + logv[(size_t)d]);
        }
    }

    void run() {
        for (int j = 0; j <= params.k - 1; ++j) rec_small(1, j, j, 0.0);
    }
};

}  // namespace

PmPolynomial pm_polynomial(int64_t m, const DkSharpParams& params) {
    if (m < 1 || (double)m > params.support_bound)
        throw parameter_error("pm_polynomial needs 1 <= m <= support bound");
    PmPolynomial out;
    out.m = m;
    out.coefficients.assign((size_t)params.k, 0.0);
    pm_builder b(params, m);
    b.single = &out.coefficients;
    b.single_m = m;
    b.divisors_only = true;
    b.run();
    return out;
}

ValueTable dk_sharp(Window w, const DkSharpParams& params) {
    check_within_4x(w, params.X, "dk_sharp");
    int64_t S = (int64_t)std::floor(params.support_bound);
    if (S > 1'000'000) throw capacity_error("dk sharp support exceeds divisor budget");
    int k = params.k;
    std::vector<double> rows((size_t)(S + 1) * (size_t)k, 0.0);
    pm_builder b(params, S);
    b.rows = &rows;
    b.run();
    ValueTable out{w, fn_kind::dk_sharp, k, std::vector<double>(w.length, 0.0)};
    std::vector<double> logn(w.length);
    for (uint64_t i = 0; i < w.length; ++i)
        logn[i] = std::log((double)(w.start + 1 + i));
    for (int64_t m = 1; m <= S; ++m) {
        const double* row = rows.data() + (size_t)m * (size_t)k;
        bool zero = true;
        for (int i = 0; i < k; ++i)
            if (row[i] != 0.0) zero = false;
        if (zero) continue;
        for (uint64_t n = (w.start / (uint64_t)m + 1) * (uint64_t)m; n <= w.end();
             n += (uint64_t)m) {
            double t = logn[n - w.start - 1];
            double acc = 0.0;
            for (int i = k - 1; i >= 0; --i) acc = acc * t + row[i];
            out.values[n - w.start - 1] += acc;
        }
    }
    return out;
}

}  // namespace sil
