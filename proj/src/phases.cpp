#include "sil/phases.hpp"

#include <algorithm>
#include <cmath>

#include "sil/fft.hpp"
#include "sil/parallel.hpp"

namespace sil {

namespace {

// signed fractional part of a long double, in [-1/2, 1/2)
double sfracl(long double x) {
    long double r = x - std::floor(x);
    if (r < 0.0L) r += 1.0L;
    return (double)(r >= 0.5L ? r - 1.0L : r);
}

}  // namespace

PolyPhase make_poly_phase(int64_t base, const std::vector<double>& coeffs, int max_degree) {
    if (coeffs.empty()) throw parameter_error("phase needs at least the constant coefficient");
    if ((int)coeffs.size() - 1 > max_degree)
        throw parameter_error("phase degree exceeds the configured maximum");
    PolyPhase p;
    p.base = base;
    p.degree = (int)coeffs.size() - 1;
    p.coeffs.resize(coeffs.size());
    for (size_t j = 0; j < coeffs.size(); ++j) p.coeffs[j] = sfrac(coeffs[j]);
    return p;
}

double eval_mod1(const PolyPhase& p, int64_t n) {
    double u = (double)(n - p.base);
    double acc = 0.0;
    for (int j = p.degree; j >= 0; --j) acc = sfrac(acc * u + p.coeffs[j]);
    return acc;
}

PolyPhase scale_phase(const PolyPhase& p, int64_t q) {
    PolyPhase out = p;
    for (auto& c : out.coeffs) c = sfracl((long double)q * (long double)c);
    return out;
}

PolyPhase shift_base(const PolyPhase& p, int64_t new_base) {
    // binomial re-expansion; precision degrades once |delta|^degree exceeds
    // the long double mantissa, so keep shifts small relative to coefficients
    long double delta = (long double)(new_base - p.base);
    int d = p.degree;
    std::vector<double> beta(d + 1);
    for (int i = 0; i <= d; ++i) {
        long double acc = 0.0L;
        long double binom = 1.0L;  // C(j, i) built incrementally over j
        long double pw = 1.0L;     // delta^{j-i}
        for (int j = i; j <= d; ++j) {
            acc += sfracl((long double)p.coeffs[j] * binom * pw);
            binom = binom * (long double)(j + 1) / (long double)(j + 1 - i);
            pw *= delta;
        }
        beta[i] = sfracl(acc);
    }
    PolyPhase out;
    out.base = new_base;
    out.degree = d;
    out.coeffs = std::move(beta);
    return out;
}

PolyPhase dilate_phase(const PolyPhase& p, int64_t a) {
    if (a < 1) throw parameter_error("dilate_phase needs a >= 1");
    // Q(n) = P(a n) expanded around m0 ~ base/a: with c = a*m0 - base,
    // beta_i = sum_j alpha_j C(j,i) a^i c^{j-i}
    int64_t m0 = (p.base >= 0 ? (p.base + a / 2) / a : -((-p.base + a / 2) / a));
    long double c = (long double)(a * m0 - p.base);
    int d = p.degree;
    std::vector<double> beta(d + 1);
    for (int i = 0; i <= d; ++i) {
        long double acc = 0.0L;
        long double binom = 1.0L;
        long double pw = 1.0L;
        long double ai = std::pow((long double)a, (long double)i);
        for (int j = i; j <= d; ++j) {
            acc += sfracl((long double)p.coeffs[j] * binom * ai * pw);
            binom = binom * (long double)(j + 1) / (long double)(j + 1 - i);
            pw *= c;
        }
        beta[i] = sfracl(acc);
    }
    PolyPhase out;
    out.base = m0;
    out.degree = d;
    out.coeffs = std::move(beta);
    return out;
}

PolyPhase taylor_log_phase(uint64_t X, uint64_t x, double T, int J) {
    if (J < 1) throw parameter_error("taylor_log_phase needs J >= 1");
    if (J > 6) throw parameter_error("taylor_log_phase degree cap is 6");
    if (x < X || x > 2 * X) throw parameter_error("taylor_log_phase needs x in [X, 2X]");
    double c = T / (2.0 * M_PI);
    std::vector<double> coeffs(J + 1);
    coeffs[0] = sfrac(c * std::log((double)x));
    double xp = (double)x;
    for (int j = 1; j <= J; ++j) {
        double term = c / ((double)j * xp);
        coeffs[j] = sfrac(j % 2 == 1 ? term : -term);
        xp *= (double)x;
    }
    PolyPhase p;
    p.base = (int64_t)x;
    p.degree = J;
    p.coeffs = std::move(coeffs);
    return p;
}

std::complex<double> discorrelation_sum(const ValueTable& f, const PolyPhase& p) {
    kahan_c acc;
    for (uint64_t i = 0; i < f.values.size(); ++i) {
        if (f.values[i] == 0.0) continue;
        int64_t n = (int64_t)(f.window.start + 1 + i);
        acc.add(f.values[i] * e_of(-eval_mod1(p, n)));
    }
    return acc.get();
}

LinearSupResult max_linear_discorrelation(const ValueTable& f, int oversample, int threads) {
    if (oversample < 2) throw parameter_error("oversample must be >= 2");
    uint64_t H = f.window.length;
    uint64_t want = (uint64_t)oversample * H;
    if (want > (uint64_t(1) << 22)) throw capacity_error("phase grid over transform budget");
    size_t M = next_pow2(std::max<uint64_t>(want, 2));
    // S(g/M) = sum_n f(n) e(-(g/M)(n - x)) is the forward-DFT bin g of f
    // placed at grid index n - x
    std::vector<cdbl> grid(M, cdbl{0.0, 0.0});
    double abs_sum = 0.0;
    for (uint64_t i = 0; i < H; ++i) {
        grid[i + 1] = cdbl{f.values[i], 0.0};
        abs_sum += std::fabs(f.values[i]);
    }
    fft(grid, false);
    struct best_t {
        double val = -1.0;
        size_t idx = 0;
    };
    best_t best = parallel_reduce(
        M, threads, best_t{},
        [&](size_t b, size_t e) {
            best_t loc;
            for (size_t g = b; g < e; ++g) {
                double v = std::abs(grid[g]);
                if (v > loc.val) {
                    loc.val = v;
                    loc.idx = g;
                }
            }
            return loc;
        },
        [](best_t a, const best_t& b) {
            if (b.val > a.val || (b.val == a.val && a.val >= 0 && b.idx < a.idx)) return b;
            return a;
        });
    LinearSupResult out;
    out.alpha_star = (double)best.idx / (double)M;
    out.value = best.val;
    out.rigorous_gap = M_PI * (double)H * abs_sum / (double)M;
    return out;
}

namespace {

long double sfracl_keep(long double x) {
    long double r = x - std::floor(x);
    if (r < 0.0L) r += 1.0L;
    return r >= 0.5L ? r - 1.0L : r;
}

long double dist_mod1_ld(long double x) {
    long double r = x - std::floor(x);
    if (r < 0.0L) r += 1.0L;
    return std::min(r, 1.0L - r);
}

}  // namespace

LogPhaseFit fit_log_phase(const PolyPhase& phase, Window w, int64_t q_max) {
    if (q_max < 1) throw parameter_error("fit_log_phase needs q_max >= 1");
    uint64_t x = w.start, H = w.length;
    PolyPhase p = phase.base == (int64_t)x ? phase : shift_base(phase, (int64_t)x);
    double alpha1 = p.degree >= 1 ? p.coeffs[1] : 0.0;
    int dmax = std::max(p.degree, 2) + 1;
    // T is only pinned by the degree-1 coefficient up to the lifts under which
    // q P - (T/2pi)log can still be an integer-valued polynomial mod 1: adding
    // binom(u,k) to P shifts alpha_1 by 1/k, so candidate T/(2pi x) values run
    // over {q alpha_1} + (1/lcm(2..d))Z, and the residual picks the winner.
    // This keeps the fit invariant under integer-valued gauge changes of P
    static const int lcm_tab[7] = {1, 1, 2, 6, 12, 60, 60};
    int K = lcm_tab[std::min(p.degree, 6)];
    LogPhaseFit best;
    best.residual = -1.0;
    int d = p.degree;
    long double binom[8][8] = {};
    for (int n = 0; n < 8; ++n) {
        binom[n][0] = 1.0L;
        for (int i = 1; i <= n; ++i) binom[n][i] = binom[n - 1][i - 1] + binom[n - 1][i];
    }
    // j-th backward differences of log(x+u), u = i+1; row j valid for i >= j
    std::vector<std::vector<long double>> dlg((size_t)dmax + 1, std::vector<long double>(H));
    for (uint64_t i = 0; i < H; ++i)
        dlg[0][i] = std::log1p((long double)(i + 1) / (long double)x);
    for (int j = 1; j <= dmax; ++j) {
        dlg[(size_t)j] = dlg[(size_t)j - 1];
        auto& row = dlg[(size_t)j];
        for (uint64_t i = H; i-- > (uint64_t)std::min<uint64_t>((uint64_t)j, H);) row[i] -= row[i - 1];
    }
    // dc[j] holds Delta^j(qP) as an explicit polynomial in u with every
    // coefficient reduced back into [-1/2, 1/2): shifting a coefficient by an
    // integer moves the value by an integer at integer arguments, so nothing
    // changes mod 1, while Horner intermediates stay small.  True fits then
    // carry absolute error far below the H^j amplification, and integer-valued
    // gauges added to P drop out at the coefficient level instead of surviving
    // into large values whose rounding noise the differencing would amplify
    std::vector<std::vector<long double>> dc((size_t)dmax + 1,
                                             std::vector<long double>((size_t)d + 1, 0.0L));
    std::vector<std::vector<long double>> vp((size_t)dmax + 1, std::vector<long double>(H, 0.0L));
    std::vector<long double> cand;
    for (int64_t q = 1; q <= q_max; ++q) {
        dc[0][0] = 0.0L;
        for (int j = 1; j <= d; ++j)
            dc[0][(size_t)j] = sfracl_keep((long double)q * (long double)p.coeffs[j]);
        for (int j = 1; j <= dmax; ++j) {
            for (int i = 0; i <= d; ++i) {
                long double b = 0.0L;
                for (int k = i + 1; k <= d; ++k)
                    b += dc[(size_t)j - 1][(size_t)k] * binom[k][i] *
                         (((k - i) & 1) ? 1.0L : -1.0L);
                dc[(size_t)j][(size_t)i] = sfracl_keep(b);
            }
        }
        for (int j = 1; j <= dmax && (uint64_t)j < H; ++j) {
            const auto& a = dc[(size_t)j];
            auto& row = vp[(size_t)j];
            int dj = std::max(d - j, 0);
            for (uint64_t i = (uint64_t)j; i < H; ++i) {
                long double u = (long double)(i + 1);
                long double acc = 0.0L;
                for (int k = dj; k >= 0; --k) acc = sfracl_keep(acc * u + a[(size_t)k]);
                row[i] = acc;
            }
        }
        long double base_frac = sfracl_keep((long double)q * (long double)alpha1);
        cand.clear();
        for (int m = -2; m <= 2; ++m)
            for (int j = 0; j < K; ++j)
                cand.push_back(base_frac + (long double)m + (long double)j / (long double)K);
        std::sort(cand.begin(), cand.end(), [](long double a, long double b) {
            long double fa = std::fabs(a), fb = std::fabs(b);
            return fa < fb || (fa == fb && a < b);
        });
        for (long double t_frac : cand) {
            long double t_over = (long double)x * t_frac;  // T/(2pi)
            long double res = 0.0L;
            long double scale = (long double)H;
            for (int j = 1; j <= dmax && (uint64_t)j < H; ++j) {
                const auto& pv = vp[(size_t)j];
                const auto& lv = dlg[(size_t)j];
                for (uint64_t i = (uint64_t)j; i < H; ++i)
                    res = std::max(res, scale * dist_mod1_ld(pv[i] - t_over * lv[i]));
                scale *= (long double)H;
            }
            if (best.residual < 0 || (double)res < best.residual) {
                best.residual = (double)res;
                best.q = q;
                best.T = (double)(2.0L * (long double)M_PI * t_over);
            }
        }
    }
    return best;
}

PolySupHeuristic heuristic_poly_sup(const ValueTable& f, int degree, double coeff_box,
                                    int steps_per_coeff) {
    if (degree < 2 || degree > 3) throw parameter_error("heuristic_poly_sup covers degree 2 or 3");
    if (steps_per_coeff < 2) throw parameter_error("need at least 2 steps per coefficient");
    double total = std::pow((double)steps_per_coeff, degree);
    if (total > 1e6) throw capacity_error("heuristic grid too large");
    std::vector<double> c(degree + 1, 0.0);
    std::vector<int> idx(degree, 0);
    PolySupHeuristic out;
    out.value = -1.0;
    for (;;) {
        for (int j = 1; j <= degree; ++j)
            c[j] = -coeff_box + 2.0 * coeff_box * (double)idx[j - 1] / (double)(steps_per_coeff - 1);
        PolyPhase p = make_poly_phase((int64_t)f.window.start, c);
        double v = std::abs(discorrelation_sum(f, p));
        if (v > out.value) {
            out.value = v;
            out.phase = p;
        }
        int b = 0;
        while (b < degree && idx[b] == steps_per_coeff - 1) idx[b++] = 0;
        if (b == degree) break;
        ++idx[b];
    }
    return out;
}

}  // namespace sil
