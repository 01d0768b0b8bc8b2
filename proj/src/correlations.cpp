#include "sil/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "sil/io.hpp"
#include "sil/parallel.hpp"
#include "sil/util.hpp"

namespace sil {

namespace {

bool is_prime_i64(int64_t p) {
    if (p < 2) return false;
    for (int64_t q = 2; q * q <= p; ++q)
        if (p % q == 0) return false;
    return true;
}

void require_prime(int64_t p, const char* who) {
    if (!is_prime_i64(p)) throw parameter_error(std::string(who) + ": p must be prime");
}

int64_t vp_of(int64_t p, int64_t m) {
    // p-adic valuation; m != 0
    int64_t v = 0;
    m = m < 0 ? -m : m;
    while (m % p == 0) {
        m /= p;
        ++v;
    }
    return v;
}

// binom(n, r) with an int64 range check
int64_t binom_checked(int64_t n, int64_t r) {
    if (r < 0 || n < 0 || r > n) return 0;
    if (r > n - r) r = n - r;
    unsigned __int128 acc = 1;
    for (int64_t i = 1; i <= r; ++i) {
        acc = acc * (unsigned __int128)(n - r + i) / (unsigned __int128)i;
        if (acc > (unsigned __int128)INT64_MAX)
            throw capacity_error("binomial coefficient exceeds int64");
    }
    return (int64_t)acc;
}

void validate_system(const OffsetSystem& sys, const char* who) {
    if (sys.ell < 1 || sys.ell > 8 || (int)sys.offsets.size() != sys.ell)
        throw parameter_error(std::string(who) + ": need 1 <= ell <= 8 with matching offsets");
    for (int i = 0; i < sys.ell; ++i)
        for (int j = i + 1; j < sys.ell; ++j)
            if (sys.offsets[i] == sys.offsets[j])
                throw parameter_error(std::string(who) + ": offsets must be pairwise distinct");
}

int nu_mod_p(int64_t p, const std::vector<int64_t>& offs) {
    int64_t rs[8];
    int m = 0;
    for (int64_t h : offs) {
        int64_t r = h % p;
        if (r < 0) r += p;
        bool seen = false;
        for (int i = 0; i < m; ++i) seen = seen || rs[i] == r;
        if (!seen) rs[m++] = r;
    }
    return m;
}

bigint ipow_big(int64_t base, int64_t e) {
    bigint r(1), b(base);
    while (e > 0) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

// sum_{a <= B} binom(k-2+a, k-2) p^{-a}; k >= 2
bigrat weight_head(int64_t p, int k, int64_t B) {
    bigrat acc(0);
    for (int64_t a = 0; a <= B; ++a)
        acc += bigrat(bigint(binom_checked(k - 2 + a, k - 2)), ipow_big(p, a));
    return acc;
}

// bound the mass of compatible divisibility patterns whose two largest
// exponents both exceed B: the second-largest exponent s has at most
// ell^2 (s+1)^{ell-2} placements, per-slot weights are at most (s+1)^{k-2},
// and the density is at most p^{-a} at largest exponent a >= s. Both
// geometric sums are certified by ratio tests; infinity when they fail.
double deep_tail_bound(int64_t p, int k, int ell, int64_t B) {
    double dp = (double)p;
    double grow = 1.0 + 1.0 / (double)(B + 2);
    double ein = (double)(k - 2);
    double rin = std::pow(grow, ein) / dp;
    double eout = (double)(ell - 2) + (double)(k - 2) * ell;
    double rout = std::pow(grow, eout) / dp;
    if (rin >= 1.0 || rout >= 1.0) return INFINITY;
    double s0 = (double)(B + 1);
    double u = (double)ell * ell * std::pow(s0 + 1.0, eout) * std::pow(dp, -s0) / (1.0 - rin);
    return u / (1.0 - rout);
}

}  // namespace

OffsetSystem make_offset_system(std::vector<int64_t> offsets) {
    OffsetSystem sys{(int)offsets.size(), std::move(offsets)};
    validate_system(sys, "make_offset_system");
    for (int64_t h : sys.offsets)
        if (h < -(int64_t(1) << 60) || h > (int64_t(1) << 60))
            throw parameter_error("make_offset_system: |offset| over 2^60");
    return sys;
}

OffsetSystem ap_offsets(int64_t h, int ell) {
    if (h < 1) throw parameter_error("ap_offsets: need h >= 1");
    if (ell < 1 || ell > 8) throw parameter_error("ap_offsets: need 1 <= ell <= 8");
    if (h > (int64_t(1) << 57)) throw parameter_error("ap_offsets: h over 2^57");
    std::vector<int64_t> offs((size_t)ell);
    for (int j = 0; j < ell; ++j) offs[(size_t)j] = (int64_t)j * h;
    return OffsetSystem{ell, std::move(offs)};
}

bigrat singular_series_factor(int64_t p, const OffsetSystem& sys) {
    require_prime(p, "singular_series_factor");
    validate_system(sys, "singular_series_factor");
    int nu = nu_mod_p(p, sys.offsets);
    bigrat f(bigint(p - nu), bigint(p));
    for (int i = 0; i < sys.ell; ++i) f *= bigrat(bigint(p), bigint(p - 1));
    return f;
}

SingularSeriesResult singular_series(const OffsetSystem& sys, int64_t p_max, int threads) {
    validate_system(sys, "singular_series");
    if (p_max < sys.ell + 2) throw parameter_error("singular_series: need p_max >= ell + 2");
    if (threads < 1) throw parameter_error("singular_series: need threads >= 1");
    auto pl = primes_up_to((uint64_t)p_max);
    const auto& ps = pl.primes;
    const int ell = sys.ell;
    long double prod = parallel_reduce(
        ps.size(), threads, (long double)1.0L,
        [&](size_t b, size_t e) {
            long double acc = 1.0L;
            for (size_t i = b; i < e; ++i) {
                int64_t p = (int64_t)ps[i];
                int nu = nu_mod_p(p, sys.offsets);
                if (ell <= 3 && p <= 2000000) {
                    // (p - nu) p^{ell-1} and (p-1)^ell stay below 2^63: the
                    // factor is an exact integer ratio, rounded once here
                    uint64_t num = (uint64_t)(p - nu), den = 1;
                    for (int t = 0; t < ell - 1; ++t) num *= (uint64_t)p;
                    for (int t = 0; t < ell; ++t) den *= (uint64_t)(p - 1);
                    acc *= (long double)num / (long double)den;
                } else {
                    acc *= singular_series_factor(p, sys).convert_to<long double>();
                }
            }
            return acc;
        },
        [](long double a, long double b) { return a * b; });
    // beyond p_max: factors with nu = ell satisfy |log f| <= ell^2/p^2 once
    // p >= 2 ell; primes at most 4 ell^2 are covered one by one, and a prime
    // dividing some offset difference costs |log f| <= 2 ell/(p - ell)
    long double texp = 0.0L;
    int64_t safe = std::max<int64_t>(p_max, 4 * (int64_t)ell * ell);
    for (int64_t q = p_max + 1; q <= safe; ++q) {
        if (!is_prime_i64(q)) continue;
        texp += 2.0L * ell / (long double)(q - ell);
    }
    texp += 3.0L * ell * ell / (long double)safe;
    long double bad_bits = 0.0L;
    for (int i = 0; i < ell; ++i)
        for (int j = i + 1; j < ell; ++j)
            bad_bits += log2l((long double)std::llabs(sys.offsets[i] - sys.offsets[j]));
    texp += (bad_bits / log2l((long double)p_max)) * 2.0L * ell / (long double)p_max;
    double value = (double)prod;
    return SingularSeriesResult{value, p_max, std::fabs(value) * (double)expm1l(texp)};
}

int64_t local_dkp(int64_t p, int k, int64_t a) {
    require_prime(p, "local_dkp");
    if (k < 1) throw parameter_error("local_dkp: need k >= 1");
    if (a < 0) throw parameter_error("local_dkp: need a >= 0");
    return binom_checked(k - 1 + a, k - 1);
}

bigrat local_dkp_mean(int64_t p, int k) {
    require_prime(p, "local_dkp_mean");
    if (k < 1) throw parameter_error("local_dkp_mean: need k >= 1");
    bigrat m(1);
    for (int i = 0; i < k - 1; ++i) m *= bigrat(bigint(p), bigint(p - 1));
    return m;
}

bigrat alpha_density(const std::vector<int64_t>& moduli, int64_t h) {
    if (moduli.empty() || moduli.size() > 8)
        throw parameter_error("alpha_density: need 1 to 8 moduli");
    if (h < 0) throw parameter_error("alpha_density: need h >= 0");
    for (int64_t e : moduli)
        if (e < 1) throw parameter_error("alpha_density: moduli must be >= 1");
    int ell = (int)moduli.size();
    for (int i = 0; i < ell; ++i) {
        for (int j = i + 1; j < ell; ++j) {
            int64_t g = std::gcd(moduli[(size_t)i], moduli[(size_t)j]);
            if (((__int128)(j - i) * h) % g != 0) return bigrat(0);
        }
    }
    bigint l(1);
    for (int64_t e : moduli) {
        bigint be(e);
        l = l / gcd(l, be) * be;
    }
    return bigrat(bigint(1), l);
}

bigrat dk_local_limit(int64_t p, int k, const OffsetSystem& sys, int M, double* tail_out) {
    require_prime(p, "dk_local_limit");
    validate_system(sys, "dk_local_limit");
    if (k < 1 || k > 8) throw parameter_error("dk_local_limit: need 1 <= k <= 8");
    if (M < 2 || M > 12) throw parameter_error("dk_local_limit: need 2 <= M <= 12");
    if (tail_out) *tail_out = 0.0;
    if (k == 1) return bigrat(1);
    const int ell = sys.ell;
    bigrat mean = local_dkp_mean(p, k);
    if (ell == 1) return mean;

    // pairwise depth thresholds: exponents a_i, a_j are jointly realizable
    // only when min(a_i, a_j) <= v_p(h_i - h_j)
    int64_t vth[8][8];
    int64_t t0 = 0;
    for (int i = 0; i < ell; ++i) {
        for (int j = i + 1; j < ell; ++j) {
            int64_t v = vp_of(p, sys.offsets[(size_t)i] - sys.offsets[(size_t)j]);
            vth[i][j] = vth[j][i] = v;
            t0 = std::max(t0, v);
        }
    }
    const bool complete = t0 <= (int64_t)M - 2;
    const int64_t B = std::min<int64_t>(t0, M - 2);

    std::vector<int64_t> wt((size_t)B + 1);
    for (int64_t a = 0; a <= B; ++a) wt[(size_t)a] = binom_checked(k - 2 + a, k - 2);

    bigrat acc(0);
    {  // every exponent at most B; joint density p^{-max} when compatible
        std::vector<int64_t> a((size_t)ell, 0);
        for (;;) {
            bool ok = true;
            int64_t amax = 0;
            for (int i = 0; i < ell && ok; ++i) {
                amax = std::max(amax, a[(size_t)i]);
                for (int j = i + 1; j < ell && ok; ++j)
                    ok = std::min(a[(size_t)i], a[(size_t)j]) <= vth[i][j];
            }
            if (ok) {
                int64_t w = 1;
                for (int i = 0; i < ell; ++i) w *= wt[(size_t)a[(size_t)i]];
                acc += bigrat(bigint(w), ipow_big(p, amax));
            }
            int i = 0;
            while (i < ell && ++a[(size_t)i] > B) a[(size_t)i++] = 0;
            if (i == ell) break;
        }
    }
    // exactly one exponent beyond B: the deep slot dominates the density and
    // sums to an exact geometric tail; every other slot i is pinned at or
    // below its pair threshold with the deep slot j
    bigrat stail = mean - weight_head(p, k, B);
    for (int j = 0; j < ell; ++j) {
        std::vector<int64_t> a((size_t)ell, 0);
        for (;;) {
            bool ok = true;
            for (int i = 0; i < ell && ok; ++i) {
                if (i == j) continue;
                ok = a[(size_t)i] <= vth[i][j];
                for (int j2 = i + 1; j2 < ell && ok; ++j2) {
                    if (j2 == j) continue;
                    ok = std::min(a[(size_t)i], a[(size_t)j2]) <= vth[i][j2];
                }
            }
            if (ok) {
                int64_t w = 1;
                for (int i = 0; i < ell; ++i)
                    if (i != j) w *= wt[(size_t)a[(size_t)i]];
                acc += bigrat(bigint(w)) * stail;
            }
            int i = 0;
            for (;;) {
                if (i == j) ++i;
                if (i >= ell) break;
                if (++a[(size_t)i] <= B) break;
                a[(size_t)i++] = 0;
            }
            if (i >= ell) break;
        }
    }
    if (!complete && tail_out) *tail_out = deep_tail_bound(p, k, ell, B);
    return acc;
}

LocalFactorResult local_correlation_factor(int64_t p, int k, int ell, int64_t h, int M,
                                           double tolerance) {
    if (ell < 1 || ell > 8)
        throw parameter_error("local_correlation_factor: need 1 <= ell <= 8");
    if (h < 1) throw parameter_error("local_correlation_factor: need h >= 1");
    auto sys = ap_offsets(h, ell);
    double tail = 0.0;
    bigrat num = dk_local_limit(p, k, sys, M, &tail);
    bigrat mean = local_dkp_mean(p, k);
    bigrat den(1);
    for (int i = 0; i < ell; ++i) den *= mean;
    if (tolerance > 0.0 && !(tail <= tolerance))
        throw precision_error("local_correlation_factor: tail bound above tolerance at M = " +
                              std::to_string(M));
    return LocalFactorResult{p, num, den, num / den, tail};
}

CorrelationConstant correlation_constant(int64_t h, int k, int ell, int64_t p_max, int M,
                                         int threads) {
    if (h < 1) throw parameter_error("correlation_constant: need h >= 1");
    if (k < 1 || k > 8) throw parameter_error("correlation_constant: need 1 <= k <= 8");
    if (ell < 1 || ell > 8) throw parameter_error("correlation_constant: need 1 <= ell <= 8");
    if (p_max < 2) throw parameter_error("correlation_constant: need p_max >= 2");
    if (M < 2 || M > 12) throw parameter_error("correlation_constant: need 2 <= M <= 12");
    if (threads < 1) throw parameter_error("correlation_constant: need threads >= 1");
    auto pl = primes_up_to((uint64_t)p_max);
    const auto& ps = pl.primes;
    struct Part {
        long double prod = 1.0L;
        double texp = 0.0;
        int64_t bad_p = 0;
    };
    Part total = parallel_reduce(
        ps.size(), threads, Part{},
        [&](size_t b, size_t e) {
            Part part;
            for (size_t i = b; i < e; ++i) {
                int64_t p = (int64_t)ps[i];
                // deepen the cutoff until the truncation is certified tiny
                LocalFactorResult f;
                int m = M;
                for (;;) {
                    f = local_correlation_factor(p, k, ell, h, m);
                    if (f.tail_bound < 1e-12 || m >= 12) break;
                    ++m;
                }
                if (!(f.tail_bound < 1e-12)) {
                    if (part.bad_p == 0) part.bad_p = p;
                    continue;
                }
                part.prod *= f.ratio.convert_to<long double>();
                part.texp += 2.0 * f.tail_bound / f.denominator.convert_to<double>();
            }
            return part;
        },
        [](Part a, Part b) {
            a.prod *= b.prod;
            a.texp += b.texp;
            if (a.bad_p == 0) a.bad_p = b.bad_p;
            return a;
        });
    if (total.bad_p != 0)
        throw precision_error(
            "correlation_constant: truncation not certified below 1e-12 at depth 12 for p = " +
            std::to_string(total.bad_p));
    // beyond p_max: |C_p - 1| <= 6 k^2 ell^2 / p^2 once p >= 4 k ell and
    // p does not divide h; primes up to 4 k ell get a coarse per-prime bound,
    // and each prime dividing h costs the B = 0 deep-pattern bound extra
    double texp = total.texp;
    int64_t safe = std::max<int64_t>(p_max, 4 * (int64_t)k * ell);
    for (int64_t q = p_max + 1; q <= safe; ++q) {
        if (!is_prime_i64(q)) continue;
        double x = std::pow((double)q, -1.0 / ell);
        texp += (double)(k - 1) * ell * (-std::log1p(-x) - std::log1p(-1.0 / (double)q));
    }
    texp += 12.0 * k * k * ell * ell / (double)safe;
    double n_bad = std::log2((double)h + 1.0) / std::log2((double)p_max + 1.0);
    double per_bad =
        12.0 * k * k * ell * ell / ((double)p_max * p_max) + 2.0 * deep_tail_bound(p_max, k, ell, 0);
    texp += n_bad * per_bad;
    double value = (double)total.prod;
    return CorrelationConstant{value, std::fabs(value) * std::expm1(texp), p_max, M};
}

double empirical_correlation(fn_kind kind, int k_param, uint64_t X, const OffsetSystem& sys,
                             int threads) {
    validate_system(sys, "empirical_correlation");
    if (X < 1) throw parameter_error("empirical_correlation: need X >= 1");
    if (threads < 1) throw parameter_error("empirical_correlation: need threads >= 1");
    if (kind != fn_kind::lambda && kind != fn_kind::mu && kind != fn_kind::dk)
        throw parameter_error("empirical_correlation: kind must be lambda, mu, or dk");
    int64_t maxoff = 0;
    for (int64_t h : sys.offsets) {
        if (h < 0) throw parameter_error("empirical_correlation: offsets must be >= 0");
        maxoff = std::max(maxoff, h);
    }
    uint64_t total = X + (uint64_t)maxoff;
    if (total > 120000000ull)
        throw capacity_error("empirical_correlation: window over 1.2e8 entries");
    Window w = make_window(1, std::max<uint64_t>(total, 2) - 1);  // covers n in [2, total]
    ValueTable t = kind == fn_kind::lambda ? sieve_lambda(w)
                   : kind == fn_kind::mu   ? sieve_mu(w)
                                           : sieve_dk(w, k_param);
    const double at_one = kind == fn_kind::lambda ? 0.0 : 1.0;
    const double* vals = t.values.data();
    kahan out = parallel_reduce(
        X, threads, kahan{},
        [&](size_t b, size_t e) {
            kahan acc;
            for (size_t i = b; i < e; ++i) {
                uint64_t n = i + 1;
                double prod = 1.0;
                for (int j = 0; j < sys.ell && prod != 0.0; ++j) {
                    uint64_t m = n + (uint64_t)sys.offsets[(size_t)j];
                    prod *= m == 1 ? at_one : vals[m - 2];
                }
                if (prod != 0.0) acc.add(prod);
            }
            return acc;
        },
        [](kahan a, kahan b) {
            a.add(b.s);
            a.add(b.c);
            return a;
        });
    return out.get();
}

WTrickMainTerm w_trick_main_term(fn_kind g_tag, int k, double w, const OffsetSystem& sys, int M) {
    validate_system(sys, "w_trick_main_term");
    if (!(w >= 2.0 && w <= 50.0)) throw parameter_error("w_trick_main_term: need 2 <= w <= 50");
    if (g_tag != fn_kind::lambda_w && g_tag != fn_kind::dk)
        throw parameter_error("w_trick_main_term: g must be lambda_w or dk");
    if (g_tag == fn_kind::dk && (k < 1 || k > 8))
        throw parameter_error("w_trick_main_term: need 1 <= k <= 8 for dk");
    if (M < 2 || M > 12) throw parameter_error("w_trick_main_term: need 2 <= M <= 12");
    WTrickMainTerm res;
    long double prod = 1.0L;
    for (int64_t p = 2; p <= (int64_t)w; ++p) {
        if (!is_prime_i64(p)) continue;
        bigrat f;
        if (g_tag == fn_kind::lambda_w) {
            // local limit of prod_j (p/(p-1)) 1_{p coprime to n + h_j} by
            // residue enumeration mod p
            int64_t cnt = 0;
            for (int64_t r = 0; r < p; ++r) {
                bool ok = true;
                for (int j = 0; j < sys.ell && ok; ++j) {
                    int64_t s = (r + sys.offsets[(size_t)j]) % p;
                    ok = (s < 0 ? s + p : s) != 0;
                }
                cnt += ok;
            }
            f = bigrat(bigint(cnt), bigint(p));
            for (int i = 0; i < sys.ell; ++i) f *= bigrat(bigint(p), bigint(p - 1));
        } else {
            double tail = 0.0;
            int m = M;
            for (;;) {
                f = dk_local_limit(p, k, sys, m, &tail);
                if (tail < 1e-12 || m >= 12) break;
                ++m;
            }
            if (!(tail < 1e-12))
                throw precision_error("w_trick_main_term: local limit not certified at p = " +
                                      std::to_string(p));
        }
        res.factors.push_back(WTrickFactor{p, f});
        prod *= f.convert_to<long double>();
    }
    res.value = (double)prod;
    return res;
}

std::string correlation_table_csv(const std::vector<CorrelationRow>& rows) {
    std::string out = "h,empirical,main_term,ratio\n";
    for (const auto& r : rows) {
        out += std::to_string(r.h) + "," + fmt_g17(r.empirical) + "," + fmt_g17(r.main_term) +
               "," + fmt_g17(r.ratio) + "\n";
    }
    return out;
}

std::string correlation_constant_json(int64_t h, int k, int ell, const CorrelationConstant& c) {
    nlohmann::ordered_json j;
    j["h"] = h;
    j["k"] = k;
    j["ell"] = ell;
    j["p_max"] = c.p_max;
    j["M"] = c.M;
    j["value"] = c.value;
    j["tail_bound"] = c.tail_bound;
    return j.dump(2) + "\n";
}

std::string singular_series_json(const OffsetSystem& sys, const SingularSeriesResult& s) {
    nlohmann::ordered_json j;
    j["ell"] = sys.ell;
    j["offsets"] = sys.offsets;
    j["p_max"] = s.p_max;
    j["value"] = s.value;
    j["tail_bound"] = s.tail_bound;
    return j.dump(2) + "\n";
}

}  // namespace sil
