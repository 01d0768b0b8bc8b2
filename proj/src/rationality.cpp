#include "sil/rationality.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "sil/util.hpp"

#include <nlohmann/json.hpp>

#include "sil/interval_norms.hpp"
#include "sil/parallel.hpp"
#include "sil/rng.hpp"

namespace sil {

namespace {

// exact while the running product stays below 2^53
double ipow_d(double b, int e) {
    double r = 1.0;
    while (e-- > 0) r *= b;
    return r;
}

int64_t checked_sfold_product(const std::vector<int64_t>& h) {
    __int128 prod = 1;
    for (int k = 2; k <= (int)h.size(); ++k) prod *= k;
    for (int64_t v : h) {
        prod *= v;
        if (prod > ((__int128)1 << 62)) throw capacity_error("s-fold scalar exceeds 2^62");
    }
    return (int64_t)prod;
}

// distinct nonzero subset sums of h, sorted; the zero corner is the base pair
std::vector<int64_t> corner_shifts(const std::vector<int64_t>& h) {
    std::vector<int64_t> sums{0};
    for (int64_t v : h) {
        size_t m = sums.size();
        for (size_t i = 0; i < m; ++i) sums.push_back(sums[i] + v);
    }
    std::sort(sums.begin(), sums.end());
    sums.erase(std::unique(sums.begin(), sums.end()), sums.end());
    sums.erase(sums.begin());
    return sums;
}

struct pair_view {
    std::vector<int64_t> keys;
    std::vector<std::vector<int64_t>> cols;
};

pair_view build_pair_view(const std::vector<std::pair<int64_t, int64_t>>& pairs) {
    auto sorted = pairs;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    pair_view v;
    for (const auto& [a, b] : sorted) {
        if (v.keys.empty() || v.keys.back() != a) {
            v.keys.push_back(a);
            v.cols.emplace_back();
        }
        v.cols.back().push_back(b);
    }
    return v;
}

int64_t cube_count(const pair_view& v, const std::vector<int64_t>& shifts) {
    int64_t c = 0;
    for (const auto& col : v.cols)
        for (int64_t n2 : col) {
            bool ok = true;
            for (int64_t sh : shifts)
                if (!std::binary_search(col.begin(), col.end(), n2 + sh)) {
                    ok = false;
                    break;
                }
            c += ok;
        }
    return c;
}

int32_t index_of(const std::vector<int64_t>& keys, int64_t n) {
    auto it = std::lower_bound(keys.begin(), keys.end(), n);
    if (it == keys.end() || *it != n) return -1;
    return (int32_t)(it - keys.begin());
}

struct solve_ctx {
    const ContagionInstance* inst = nullptr;
    std::vector<double> pw1, pw2;   // n^s per support entry
    std::vector<int32_t> pi1, pi2;  // per pair, indices into S1 / S2
};

solve_ctx make_ctx(const ContagionInstance& inst) {
    if (inst.S1.size() != inst.alpha1.size() || inst.S2.size() != inst.alpha2.size())
        throw parameter_error("alpha arrays must parallel their supports");
    solve_ctx c;
    c.inst = &inst;
    c.pw1.reserve(inst.S1.size());
    for (int64_t n : inst.S1) c.pw1.push_back(ipow_d((double)n, inst.s));
    c.pw2.reserve(inst.S2.size());
    for (int64_t n : inst.S2) c.pw2.push_back(ipow_d((double)n, inst.s));
    c.pi1.reserve(inst.pairs.size());
    c.pi2.reserve(inst.pairs.size());
    for (const auto& [a, b] : inst.pairs) {
        int32_t i = index_of(inst.S1, a), j = index_of(inst.S2, b);
        if (i < 0 || j < 0) throw parameter_error("pairs reference points outside S1 x S2");
        c.pi1.push_back(i);
        c.pi2.push_back(j);
    }
    return c;
}

int64_t count_satisfied(const solve_ctx& c, int64_t q, double alpha_star, double tol,
                        std::vector<char>* mask_out) {
    const auto& inst = *c.inst;
    double qd = (double)q;
    std::vector<char> ok1(inst.S1.size()), ok2(inst.S2.size());
    for (size_t i = 0; i < inst.S1.size(); ++i)
        ok1[i] = dist_mod1(qd * (inst.alpha1[i] - alpha_star * c.pw1[i])) <= tol;
    for (size_t j = 0; j < inst.S2.size(); ++j)
        ok2[j] = dist_mod1(qd * (inst.alpha2[j] - alpha_star * c.pw2[j])) <= tol;
    int64_t cnt = 0;
    if (mask_out) mask_out->assign(inst.pairs.size(), 0);
    for (size_t k = 0; k < inst.pairs.size(); ++k) {
        bool ok = ok1[(size_t)c.pi1[k]] && ok2[(size_t)c.pi2[k]];
        cnt += ok;
        if (mask_out) (*mask_out)[k] = ok;
    }
    return cnt;
}

// arithmetic progressions n, n+d, ..., n+s d inside a sorted support, kept as
// flattened index tuples of width s+1
struct ap_list {
    int64_t d = 0;
    std::vector<int32_t> tuples;
};

ap_list collect_aps(const std::vector<int64_t>& S, int s, int64_t d) {
    ap_list out;
    out.d = d;
    std::vector<int32_t> tmp((size_t)s + 1);
    for (size_t i = 0; i < S.size(); ++i) {
        tmp[0] = (int32_t)i;
        bool ok = true;
        for (int k = 1; k <= s; ++k) {
            int32_t j = index_of(S, S[i] + (int64_t)k * d);
            if (j < 0) {
                ok = false;
                break;
            }
            tmp[(size_t)k] = j;
        }
        if (ok) out.tuples.insert(out.tuples.end(), tmp.begin(), tmp.end());
    }
    return out;
}

// alternating Pascal row (-1)^{s-i} C(s,i), the forward-difference weights
std::vector<double> diff_coeffs(int s) {
    std::vector<double> c((size_t)s + 1);
    double binom = 1.0;
    for (int i = 0; i <= s; ++i) {
        c[(size_t)i] = ((s - i) & 1) ? -binom : binom;
        binom = binom * (double)(s - i) / (double)(i + 1);
    }
    return c;
}

// one centered-median correction of theta from the s-fold differences of xs
// along the progressions; fact_d = s! d^s
double ladder_refine(const std::vector<double>& xs, const ap_list& aps, int s,
                     const std::vector<double>& coef, double fact_d, double theta,
                     std::vector<double>& scratch) {
    size_t w = (size_t)s + 1;
    size_t m = aps.tuples.size() / w;
    if (m == 0) return theta;
    scratch.clear();
    for (size_t t = 0; t < m; ++t) {
        double F = 0.0;
        for (size_t k = 0; k < w; ++k) F += coef[k] * xs[(size_t)aps.tuples[t * w + k]];
        scratch.push_back(sfrac(sfrac(F) - sfrac(fact_d * theta)));
    }
    size_t mid = (scratch.size() - 1) / 2;
    std::nth_element(scratch.begin(), scratch.begin() + (ptrdiff_t)mid, scratch.end());
    return sfrac(theta + scratch[mid] / fact_d);
}

}  // namespace

RationalityCertificate vinogradov_solve(const PolyPhase& phase, Window w,
                                        const std::vector<int64_t>& hit_set, int64_t q_max,
                                        int threads) {
    if (q_max < 1) throw parameter_error("vinogradov_solve needs q_max >= 1");
    if (w.length < 1) throw parameter_error("vinogradov_solve needs a nonempty window");
    for (int64_t n : hit_set)
        if (n <= (int64_t)w.start || n > (int64_t)w.end())
            throw parameter_error("vinogradov_solve: hit set leaves the window");
    struct best_t {
        double s = std::numeric_limits<double>::infinity();
        int64_t q = 0;
    };
    best_t best = parallel_reduce(
        (size_t)q_max, threads, best_t{},
        [&](size_t b, size_t e) {
            best_t local;
            for (size_t qi = b; qi < e; ++qi) {
                int64_t q = (int64_t)qi + 1;
                double v = smoothness_norm_cinf(scale_phase(phase, q), w);
                if (v < local.s) local = {v, q};
            }
            return local;
        },
        [](best_t a, const best_t& b) { return b.s < a.s ? b : a; });
    return {best.q, best.s};
}

CubeResult find_cube(const std::vector<std::pair<int64_t, int64_t>>& pairs, int64_t H, int s,
                     uint64_t budget, int threads) {
    if (H < 1) throw parameter_error("find_cube needs H >= 1");
    if (s < 1 || s > 8) throw parameter_error("find_cube supports 1 <= s <= 8");
    if (budget < 1) budget = 1;
    if (pairs.empty()) return {std::vector<int64_t>((size_t)s, 1), 0};
    pair_view view = build_pair_view(pairs);

    struct best_t {
        int64_t count = -1;
        uint64_t idx = ~uint64_t(0);
        std::vector<int64_t> h;
    };
    auto better = [](const best_t& a, const best_t& b) {
        if (b.count != a.count) return b.count > a.count;
        return b.idx < a.idx;
    };
    auto join = [&](best_t a, const best_t& b) { return better(a, b) ? b : a; };

    __int128 tot = 1;
    bool exhaustive = true;
    for (int i = 0; i < s; ++i) {
        tot *= H;
        if (tot > (__int128)budget) {
            exhaustive = false;
            break;
        }
    }

    best_t best;
    if (exhaustive) {
        best = parallel_reduce(
            (size_t)tot, threads, best_t{},
            [&](size_t b, size_t e) {
                best_t local;
                std::vector<int64_t> h((size_t)s);
                for (size_t idx = b; idx < e; ++idx) {
                    uint64_t rem = idx;
                    for (int i = s - 1; i >= 0; --i) {
                        h[(size_t)i] = (int64_t)(rem % (uint64_t)H) + 1;
                        rem /= (uint64_t)H;
                    }
                    best_t cand{cube_count(view, corner_shifts(h)), idx, h};
                    if (better(local, cand)) local = cand;
                }
                return local;
            },
            join);
    } else {
        rng root(0x66696e6463756265ULL);  // fixed stream: cube restarts
        best = parallel_reduce(
            (size_t)budget, threads, best_t{},
            [&](size_t b, size_t e) {
                best_t local;
                std::vector<int64_t> h((size_t)s);
                for (size_t j = b; j < e; ++j) {
                    rng rj = root.split(j);
                    for (int i = 0; i < s; ++i) h[(size_t)i] = 1 + (int64_t)rj.below((uint64_t)H);
                    best_t cand{cube_count(view, corner_shifts(h)), j, h};
                    if (better(local, cand)) local = cand;
                }
                return local;
            },
            join);
        // single deterministic coordinate-descent pass over the best restart
        for (int i = 0; i < s; ++i) {
            std::vector<int64_t> h = best.h;
            for (int64_t v = 1; v <= H; ++v) {
                h[(size_t)i] = v;
                int64_t c = cube_count(view, corner_shifts(h));
                if (c > best.count) best = {c, best.idx, h};
            }
        }
    }
    if (best.count < 0) return {std::vector<int64_t>((size_t)s, 1), 0};
    return {best.h, best.count};
}

int64_t s_fold_alternating_sum(int64_t n20, const std::vector<int64_t>& h) {
    int s = (int)h.size();
    if (s < 1 || s > 12) throw parameter_error("s_fold needs 1 <= s <= 12");
    __int128 span = 0;
    for (int64_t v : h) {
        if (v < 1) throw parameter_error("s_fold shifts must be positive");
        span += v;
    }
    if (span > ((__int128)1 << 62)) throw capacity_error("s-fold shifts exceed 2^62");
    long double m = fabsl((long double)n20) + (long double)(int64_t)span + 1.0L;
    if ((long double)s * log2l(m) > 120.0L)
        throw capacity_error("s-fold corners exceed the 128-bit range");
    __int128 acc = 0;
    for (uint32_t mask = 0; mask < (1u << s); ++mask) {
        int64_t corner = n20;
        for (int i = 0; i < s; ++i)
            if (mask & (1u << i)) corner += h[(size_t)i];
        __int128 pw = 1;
        for (int k = 0; k < s; ++k) pw *= corner;
        acc += ((s - std::popcount(mask)) & 1) ? -pw : pw;
    }
    if (acc > (__int128)std::numeric_limits<int64_t>::max() ||
        acc < (__int128)std::numeric_limits<int64_t>::min())
        throw capacity_error("s-fold scalar exceeds 64 bits");
    return (int64_t)acc;
}

SFoldResult s_fold_reduce(const std::vector<int64_t>& support, const std::vector<double>& values,
                          int64_t n20, const std::vector<int64_t>& h) {
    if (support.size() != values.size())
        throw parameter_error("s_fold_reduce needs parallel support/value arrays");
    if (std::adjacent_find(support.begin(), support.end(), std::greater_equal<int64_t>()) !=
        support.end())
        throw parameter_error("s_fold_reduce support must be strictly increasing");
    int s = (int)h.size();
    int64_t hs = s_fold_alternating_sum(n20, h);
    if (hs != checked_sfold_product(h)) throw precision_error("s-fold corner identity failed");
    double beta = 0.0;
    for (uint32_t mask = 0; mask < (1u << s); ++mask) {
        int64_t corner = n20;
        for (int i = 0; i < s; ++i)
            if (mask & (1u << i)) corner += h[(size_t)i];
        int32_t j = index_of(support, corner);
        if (j < 0) throw parameter_error("s_fold_reduce: corner outside the alpha support");
        double v = values[(size_t)j];
        beta += ((s - std::popcount(mask)) & 1) ? -v : v;
    }
    return {hs, sfrac(beta)};
}

double contagion_defect(const ContagionInstance& inst) {
    solve_ctx c = make_ctx(inst);
    double worst = 0.0;
    for (size_t k = 0; k < inst.pairs.size(); ++k) {
        size_t i = (size_t)c.pi1[k], j = (size_t)c.pi2[k];
        double d = dist_mod1(c.pw1[i] * inst.alpha2[j] - c.pw2[j] * inst.alpha1[i]);
        worst = std::max(worst, d);
    }
    return worst;
}

void validate_contagion_instance(const ContagionInstance& inst) {
    if (inst.P < 1) throw parameter_error("contagion instance needs P >= 1");
    if (inst.s < 1 || inst.s > 8) throw parameter_error("contagion instance needs 1 <= s <= 8");
    if (inst.S1.size() != inst.alpha1.size() || inst.S2.size() != inst.alpha2.size())
        throw parameter_error("alpha arrays must parallel their supports");
    if (inst.S1.empty() || inst.S2.empty())
        throw parameter_error("contagion instance needs nonempty supports");
    auto check_side = [&](const std::vector<int64_t>& S, const std::vector<double>& a,
                          const char* side) {
        for (size_t i = 0; i < S.size(); ++i) {
            if (S[i] < inst.P || S[i] > 2 * inst.P)
                throw parameter_error(std::string(side) + " leaves [P, 2P]");
            if (i > 0 && S[i] <= S[i - 1])
                throw parameter_error(std::string(side) + " must be sorted and unique");
            if (std::fabs(a[i]) > 0.5 + 1e-9)
                throw parameter_error("alpha values must be reduced mod 1");
        }
    };
    check_side(inst.S1, inst.alpha1, "S1");
    check_side(inst.S2, inst.alpha2, "S2");
    for (size_t k = 1; k < inst.pairs.size(); ++k)
        if (!(inst.pairs[k - 1] < inst.pairs[k]))
            throw parameter_error("pairs must be lexicographically sorted and unique");
    if (inst.epsilon < 0.0) throw parameter_error("epsilon must be nonnegative");
    if ((double)inst.pairs.size() + 1e-9 < inst.eta * (double)inst.P * (double)inst.P)
        throw parameter_error("pair set thinner than the claimed eta");
    if (contagion_defect(inst) > inst.epsilon)
        throw parameter_error("a pair violates the epsilon hypothesis");
}

std::vector<char> contagion_satisfied_mask(const ContagionInstance& inst, int64_t q,
                                           double alpha_star, double tol) {
    if (q < 1) throw parameter_error("contagion mask needs q >= 1");
    solve_ctx c = make_ctx(inst);
    std::vector<char> mask;
    count_satisfied(c, q, alpha_star, tol, &mask);
    return mask;
}

ContagionSolution contagion_solve(const ContagionInstance& inst, int64_t q_max, double tol_factor,
                                  int threads) {
    validate_contagion_instance(inst);
    if (q_max < 1) throw parameter_error("contagion_solve needs q_max >= 1");
    if (tol_factor < 0.0) throw parameter_error("contagion_solve needs tol_factor >= 0");
    solve_ctx ctx = make_ctx(inst);
    int s = inst.s;
    double tol = tol_factor * inst.epsilon / ipow_d((double)inst.P, s);

    // stage 1: cube over the pair set, sized to keep corners inside [P, 2P]
    int64_t span2 = inst.S2.back() - inst.S2.front();
    int64_t H_cube = std::clamp<int64_t>(span2 / (2 * s), 1, 12);
    CubeResult cube = find_cube(inst.pairs, H_cube, s, uint64_t(1) << 18, threads);

    // stage 2: pigeonhole the column holding the most fully-contained cubes,
    // then reduce alpha2 there
    std::vector<int64_t> shifts = corner_shifts(cube.h);
    std::vector<char> full_ok(inst.pairs.size(), 0);
    std::vector<int64_t> tally(inst.S2.size(), 0);
    for (size_t k = 0; k < inst.pairs.size(); ++k) {
        bool ok = true;
        for (int64_t sh : shifts)
            if (!std::binary_search(
                    inst.pairs.begin(), inst.pairs.end(),
                    std::pair<int64_t, int64_t>{inst.pairs[k].first, inst.pairs[k].second + sh})) {
                ok = false;
                break;
            }
        if (ok) {
            full_ok[k] = 1;
            ++tally[(size_t)ctx.pi2[k]];
        }
    }
    size_t j20 = 0;
    for (size_t j = 1; j < tally.size(); ++j)
        if (tally[j] > tally[j20]) j20 = j;
    SFoldResult red{s_fold_alternating_sum(0, cube.h), 0.0};
    if (tally[j20] > 0) red = s_fold_reduce(inst.S2, inst.alpha2, inst.S2[j20], cube.h);
    std::vector<int64_t> column;
    for (size_t k = 0; k < inst.pairs.size(); ++k)
        if (full_ok[k] && ctx.pi2[k] == (int32_t)j20) column.push_back(inst.pairs[k].first);

    // stage 3: certificate for beta n^s over the S1 window. The scan below
    // revisits every q <= q_max, so the certificate only contributes its own
    // candidate, evaluated after the scan
    std::vector<double> pc((size_t)s + 1, 0.0);
    pc[(size_t)s] = red.beta;
    PolyPhase bphase = make_poly_phase(0, pc, std::max(6, s));
    Window w1{(uint64_t)(inst.S1.front() - 1),
              (uint64_t)(inst.S1.back() - inst.S1.front() + 1)};
    RationalityCertificate cert = vinogradov_solve(bphase, w1, column, q_max, threads);

    // stage 4: ascending q scan; each q gets a finite-difference ladder for
    // theta = q alpha* (branches resolve the mod-1/d1^s ambiguity)
    std::vector<double> coef = diff_coeffs(s);
    int64_t span1 = inst.S1.back() - inst.S1.front();
    int64_t d1 = 0;
    ap_list aps1;
    for (int64_t d = 1; d <= std::min<int64_t>(span1, 64); ++d) {
        aps1 = collect_aps(inst.S1, s, d);
        if (!aps1.tuples.empty()) {
            d1 = d;
            break;
        }
    }
    // large steps sharpen theta; cap s! d2^s so sfrac(fact_d theta) keeps
    // absolute precision well below the tolerance scale
    double fact = 1.0;
    for (int k = 2; k <= s; ++k) fact *= (double)k;
    int64_t cap_d2 = (int64_t)std::pow(67108864.0 / fact, 1.0 / (double)s);
    int64_t hi = std::min<int64_t>({span1 / std::max(1, s), std::max<int64_t>(cap_d2, 1), 512});
    size_t want = std::max<size_t>(4, inst.S1.size() / 16);
    int64_t d2 = 0;
    ap_list aps2;
    for (int64_t d = hi; d >= 1; --d) {
        ap_list cand = collect_aps(inst.S1, s, d);
        if (cand.tuples.size() / ((size_t)s + 1) >= want) {
            aps2 = std::move(cand);
            d2 = d;
            break;
        }
    }
    if (d2 == 0 && d1 > 0) {
        aps2 = aps1;
        d2 = d1;
    }
    double fact_d2 = fact * ipow_d((double)d2, s);
    long double den1_ld = d1 > 0 ? (long double)fact * powl((long double)d1, s) : 0.0L;
    int64_t den1 = den1_ld > 0.0L && den1_ld <= 64.0L ? (int64_t)llroundl(den1_ld) : 0;

    size_t step = std::max<size_t>(1, inst.pairs.size() / 128);
    std::vector<size_t> subidx;
    for (size_t k = 0; k < inst.pairs.size(); k += step) subidx.push_back(k);

    struct cand_t {
        int64_t count = -1;
        int64_t q = 0;
        double theta = 0.0;
    };
    auto join = [](cand_t a, const cand_t& b) { return b.count > a.count ? b : a; };
    auto subcount = [&](int64_t q, double theta) {
        double qd = (double)q;
        int64_t sc = 0;
        for (size_t k : subidx) {
            size_t i = (size_t)ctx.pi1[k], j = (size_t)ctx.pi2[k];
            if (dist_mod1(qd * inst.alpha1[i] - theta * ctx.pw1[i]) <= tol &&
                dist_mod1(qd * inst.alpha2[j] - theta * ctx.pw2[j]) <= tol)
                ++sc;
        }
        return sc;
    };

    cand_t best = parallel_reduce(
        (size_t)q_max, threads, cand_t{},
        [&](size_t b, size_t e) {
            cand_t local;
            std::vector<double> xs(inst.S1.size()), scratch, thetas;
            for (size_t qi = b; qi < e; ++qi) {
                int64_t q = (int64_t)qi + 1;
                for (size_t i = 0; i < xs.size(); ++i)
                    xs[i] = sfrac((double)q * inst.alpha1[i]);
                thetas.clear();
                if (den1 > 0) {
                    double F1 = 0.0;
                    for (int k = 0; k <= s; ++k)
                        F1 += coef[(size_t)k] * xs[(size_t)aps1.tuples[(size_t)k]];
                    F1 = sfrac(F1);
                    for (int64_t jb = 0; jb < den1; ++jb) {
                        double th = sfrac((F1 + (double)jb) / (double)den1);
                        for (int pass = 0; pass < 3; ++pass)
                            th = ladder_refine(xs, aps2, s, coef, fact_d2, th, scratch);
                        thetas.push_back(th);
                    }
                } else {
                    // no usable progressions: fall back to the reduction grid
                    int64_t m = std::min<int64_t>(red.h_scalar, 64);
                    for (int64_t a = 0; a < m; ++a)
                        thetas.push_back(
                            sfrac((double)q * (red.beta + (double)a) / (double)red.h_scalar));
                }
                double th_best = thetas.front();
                int64_t sc_best = -1;
                for (double th : thetas) {
                    int64_t sc = subcount(q, th);
                    if (sc > sc_best) {
                        sc_best = sc;
                        th_best = th;
                    }
                }
                // full counts only for subsample-promising q (always at first)
                if (local.count <= 0 ||
                    10 * sc_best * (int64_t)inst.pairs.size() >=
                        7 * local.count * (int64_t)subidx.size()) {
                    double astar = sfrac(th_best / (double)q);
                    int64_t full = count_satisfied(ctx, q, astar, tol, nullptr);
                    if (full > local.count) local = {full, q, th_best};
                }
            }
            return local;
        },
        join);

    {
        double thc = sfrac((double)cert.q * red.beta / (double)red.h_scalar);
        int64_t full = count_satisfied(ctx, cert.q, sfrac(thc / (double)cert.q), tol, nullptr);
        if (full > best.count) best = {full, cert.q, thc};
    }

    // stage 5: local 1-D polish of theta at the winning q
    if (tol > 0.0) {
        double pwmax = std::max(ctx.pw1.back(), ctx.pw2.back());
        double dth = tol / (8.0 * pwmax);
        for (int k = -8; k <= 8; ++k) {
            if (k == 0) continue;
            double th = sfrac(best.theta + (double)k * dth);
            int64_t full = count_satisfied(ctx, best.q, sfrac(th / (double)best.q), tol, nullptr);
            if (full > best.count) best = {full, best.q, th};
        }
    }

    ContagionSolution sol;
    sol.alpha_star = sfrac(best.theta / (double)best.q);
    sol.q = best.q;
    sol.satisfied = best.count;
    sol.tol_factor = tol_factor;
    sol.tolerance = tol;
    return sol;
}

ContagionPlant plant_contagion_instance(int64_t P, int s, double eta, double epsilon, int64_t q,
                                        double alpha_star, uint64_t seed) {
    if (P < 4) throw parameter_error("plant needs P >= 4");
    if (s < 1 || s > 4) throw parameter_error("plant supports 1 <= s <= 4");
    if (!(eta > 0.0 && eta < 0.5)) throw parameter_error("plant needs 0 < eta < 1/2");
    if (eta * (double)P * (double)P < 1.0) throw parameter_error("plant needs eta P^2 >= 1");
    if (q < 1 || q > P) throw parameter_error("plant needs 1 <= q <= P");
    if (epsilon < 0.0) throw parameter_error("plant needs epsilon >= 0");
    double fl_slack = std::max(1e-9, ipow_d(2.0 * (double)P, s) * 1e-14);
    if (epsilon > 0.0 && epsilon < fl_slack)
        throw parameter_error("plant noise below double slack at this scale");
    bool exact = epsilon == 0.0;
    if (exact && (q & (q - 1)) != 0)
        throw parameter_error("exact plant needs a power-of-two modulus");
    if (exact && ipow_d(2.0 * (double)P, s) > 67108864.0)
        throw parameter_error("exact plant needs (2P)^s <= 2^26");

    // 26 dyadic bits keep every alpha* n^s product exactly representable
    double as = sfrac(std::floor(sfrac(alpha_star) * 67108864.0 + 0.5) / 67108864.0);
    rng g(seed);
    size_t sz = (size_t)P + 1;
    ContagionInstance inst;
    inst.P = P;
    inst.s = s;
    inst.epsilon = epsilon;
    inst.eta = eta;
    inst.S1.resize(sz);
    inst.S2.resize(sz);
    for (size_t i = 0; i < sz; ++i) inst.S1[i] = inst.S2[i] = P + (int64_t)i;

    // offset c/q rides on a marked half of S2; the other rows stay clean
    std::vector<char> u(sz, 0);
    std::vector<int32_t> perm(sz);
    std::iota(perm.begin(), perm.end(), 0);
    for (size_t i = sz - 1; i > 0; --i) {
        size_t j = (size_t)g.below((uint64_t)i + 1);
        std::swap(perm[i], perm[j]);
    }
    for (size_t k = 0; k < sz / 2; ++k) u[(size_t)perm[k]] = 1;
    int64_t c = 0;
    if (q > 1)
        do c = 1 + (int64_t)g.below((uint64_t)q - 1);
        while (std::gcd(c, q) != 1);

    double dmax = exact ? 0.0 : 0.2 * epsilon / ipow_d(2.0 * (double)P, s);
    double off = q > 1 ? (double)c / (double)q : 0.0;
    inst.alpha1.resize(sz);
    inst.alpha2.resize(sz);
    for (size_t i = 0; i < sz; ++i) {
        double d = dmax > 0.0 ? (2.0 * g.unit() - 1.0) * dmax : 0.0;
        inst.alpha1[i] = sfrac(as * ipow_d((double)inst.S1[i], s) + d);
    }
    for (size_t i = 0; i < sz; ++i) {
        double d = dmax > 0.0 ? (2.0 * g.unit() - 1.0) * dmax : 0.0;
        inst.alpha2[i] = sfrac(as * ipow_d((double)inst.S2[i], s) + (u[i] ? off : 0.0) + d);
    }

    // a pair against a marked column needs q | c n1^s so the offset vanishes
    // from the cross difference
    std::vector<char> row_ok(sz, 1);
    if (q > 1)
        for (size_t i = 0; i < sz; ++i) {
            int64_t r = inst.S1[i] % q, rs = 1;
            for (int k = 0; k < s; ++k) rs = rs * r % q;
            row_ok[i] = rs * c % q == 0;
        }
    for (size_t i = 0; i < sz; ++i)
        for (size_t j = 0; j < sz; ++j)
            if (!u[j] || row_ok[i]) inst.pairs.push_back({inst.S1[i], inst.S2[j]});

    validate_contagion_instance(inst);  // holds by construction
    return {std::move(inst), as, q};
}

std::string contagion_instance_json(const ContagionInstance& inst) {
    nlohmann::ordered_json j;
    j["P"] = inst.P;
    j["s"] = inst.s;
    j["epsilon"] = inst.epsilon;
    j["eta"] = inst.eta;
    j["S1"] = inst.S1;
    j["alpha1"] = inst.alpha1;
    j["S2"] = inst.S2;
    j["alpha2"] = inst.alpha2;
    nlohmann::ordered_json p1 = nlohmann::ordered_json::array();
    nlohmann::ordered_json p2 = nlohmann::ordered_json::array();
    for (const auto& [a, b] : inst.pairs) {
        p1.push_back(a);
        p2.push_back(b);
    }
    j["pairs_n1"] = p1;
    j["pairs_n2"] = p2;
    return j.dump(2) + "\n";
}

ContagionInstance contagion_instance_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        ContagionInstance inst;
        inst.P = j.at("P").get<int64_t>();
        inst.s = j.at("s").get<int>();
        inst.epsilon = j.at("epsilon").get<double>();
        inst.eta = j.at("eta").get<double>();
        inst.S1 = j.at("S1").get<std::vector<int64_t>>();
        inst.alpha1 = j.at("alpha1").get<std::vector<double>>();
        inst.S2 = j.at("S2").get<std::vector<int64_t>>();
        inst.alpha2 = j.at("alpha2").get<std::vector<double>>();
        auto p1 = j.at("pairs_n1").get<std::vector<int64_t>>();
        auto p2 = j.at("pairs_n2").get<std::vector<int64_t>>();
        if (p1.size() != p2.size())
            throw parameter_error("contagion json: pair arrays differ in length");
        inst.pairs.reserve(p1.size());
        for (size_t k = 0; k < p1.size(); ++k) inst.pairs.push_back({p1[k], p2[k]});
        return inst;
    } catch (const nlohmann::json::exception& e) {
        throw parameter_error(std::string("contagion instance json: ") + e.what());
    }
}

std::string contagion_solution_json(const ContagionSolution& sol) {
    nlohmann::ordered_json j;
    j["alpha_star"] = sol.alpha_star;
    j["q"] = sol.q;
    j["satisfied"] = sol.satisfied;
    j["tol_factor"] = sol.tol_factor;
    j["tolerance"] = sol.tolerance;
    return j.dump(2) + "\n";
}

}  // namespace sil
