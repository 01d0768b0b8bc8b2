#include "sil/decompositions.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sil/io.hpp"
#include "sil/parallel.hpp"
#include "sil/util.hpp"

namespace sil {

namespace {

constexpr int64_t kSatLimit = int64_t(1) << 62;
constexpr int64_t kEnumLimit = int64_t(1) << 26;

int64_t mul_sat(int64_t a, int64_t b) {
    // a, b >= 1; saturate far above any window end so pruning stays exact
    if (a > kSatLimit / b) return kSatLimit;
    return a * b;
}

int64_t ceil_div(int64_t a, int64_t b) { return (a + b - 1) / b; }

uint64_t binom_u64(int n, int r) {
    if (r < 0 || r > n) return 0;
    uint64_t v = 1;
    for (int i = 0; i < r; ++i) v = v * (uint64_t)(n - i) / (uint64_t)(i + 1);
    return v;
}

// distinct orderings of a non-increasing exponent list
int64_t permutation_count(const std::vector<int>& exps) {
    int64_t total = 1;
    size_t i = 0, placed = 0;
    while (i < exps.size()) {
        size_t j = i;
        while (j < exps.size() && exps[j] == exps[i]) ++j;
        // multiply C(placed + run, run) for each run of equal exponents
        total *= (int64_t)binom_u64((int)(placed + (j - i)), (int)(j - i));
        placed += j - i;
        i = j;
    }
    return total;
}

// mu(n) for n in [0, bound], bound >= 1
std::vector<int8_t> mu_table(uint64_t bound) {
    std::vector<int8_t> mu(bound + 1, 0);
    mu[1] = 1;
    if (bound >= 2) {
        auto t = sieve_mu(make_window(1, bound - 1));
        for (uint64_t n = 2; n <= bound; ++n) mu[n] = (int8_t)t.values[n - 2];
    }
    return mu;
}

struct EvalFactor {
    factor_kind kind;
    int64_t lo, hi;
    const double* seq;
};

// generate all n = m_1 ... m_l inside (win_lo, win_hi] and add the weighted
// products into acc; factors are visited smallest block first so the widest
// loop is innermost, with suffix product bounds pruning dead branches
struct Evaluator {
    std::vector<EvalFactor> fac;
    std::vector<int64_t> suf_lo, suf_hi;
    const std::vector<int8_t>* mu;
    int64_t win_lo, win_hi;
    double* acc;

    void prepare(const ConvComponent& c, const std::vector<int8_t>& mu8, int64_t lo, int64_t hi) {
        mu = &mu8;
        win_lo = lo;
        win_hi = hi;
        fac.clear();
        for (const auto& f : c.factors) {
            const double* s = f.kind == factor_kind::explicit_seq ? f.seq->data() : nullptr;
            fac.push_back(EvalFactor{f.kind, f.lo(), f.hi(), s});
        }
        std::sort(fac.begin(), fac.end(), [](const EvalFactor& a, const EvalFactor& b) {
            if (a.hi != b.hi) return a.hi < b.hi;
            if (a.kind != b.kind) return (int)a.kind < (int)b.kind;
            return a.lo < b.lo;
        });
        size_t l = fac.size();
        suf_lo.assign(l + 1, 1);
        suf_hi.assign(l + 1, 1);
        for (size_t i = l; i-- > 0;) {
            suf_lo[i] = mul_sat(suf_lo[i + 1], fac[i].lo + 1);
            suf_hi[i] = mul_sat(suf_hi[i + 1], fac[i].hi);
        }
    }

    void run(double weight) {
        if (suf_lo[0] > win_hi) return;
        descend(0, 1, weight);
    }

    void descend(size_t i, int64_t P, double w) {
        if (w == 0.0) return;
        const EvalFactor& f = fac[i];
        if (i + 1 == fac.size()) {
            int64_t m_lo = std::max(f.lo + 1, ceil_div(win_lo + 1, P));
            int64_t m_hi = std::min(f.hi, win_hi / P);
            double* out = acc + (P * m_lo - win_lo - 1);
            switch (f.kind) {
                case factor_kind::unit:
                    for (int64_t m = m_lo; m <= m_hi; ++m, out += P) *out += w;
                    break;
                case factor_kind::log_weight:
                    for (int64_t m = m_lo; m <= m_hi; ++m, out += P)
                        *out += w * std::log((double)m);
                    break;
                case factor_kind::mobius_block:
                    for (int64_t m = m_lo; m <= m_hi; ++m, out += P)
                        if (int v = (*mu)[(size_t)m]; v != 0) *out += w * v;
                    break;
                case factor_kind::explicit_seq:
                    for (int64_t m = m_lo; m <= m_hi; ++m, out += P)
                        if (double v = f.seq[m - f.lo - 1]; v != 0.0) *out += w * v;
                    break;
            }
            return;
        }
        int64_t m_lo = std::max(f.lo + 1, ceil_div(ceil_div(win_lo + 1, P), suf_hi[i + 1]));
        int64_t m_hi = std::min(f.hi, (win_hi / P) / suf_lo[i + 1]);
        for (int64_t m = m_lo; m <= m_hi; ++m) {
            double v;
            switch (f.kind) {
                case factor_kind::unit: v = 1.0; break;
                case factor_kind::log_weight: v = std::log((double)m); break;
                case factor_kind::mobius_block: v = (*mu)[(size_t)m]; break;
                default: v = f.seq[m - f.lo - 1]; break;
            }
            if (v != 0.0) descend(i + 1, P * m, w * v);
        }
    }
};

void validate_component(const ConvComponent& c) {
    if (c.factors.empty()) throw parameter_error("component needs at least one factor");
    if (c.factors.size() > 16) throw capacity_error("component has too many factors");
    for (const auto& f : c.factors) {
        if (f.kind == factor_kind::explicit_seq) {
            if (!f.seq) throw parameter_error("explicit factor without values");
            if (!(0 <= f.seq_lo && f.seq_lo < f.seq_hi))
                throw parameter_error("explicit factor support must satisfy 0 <= lo < hi");
            if ((int64_t)f.seq->size() != f.seq_hi - f.seq_lo)
                throw parameter_error("explicit factor values do not match its support");
        } else {
            if (f.e < 0 || f.e > 62) throw parameter_error("block exponent out of range");
            if (f.kind == factor_kind::mobius_block && f.hi() > kEnumLimit)
                throw capacity_error("mobius block too large to sieve");
        }
    }
}

struct GenParams {
    fn_kind f;
    uint64_t X;
    int L, k;
    int B;       // blocks with e <= B reach past 4X
    int e_lo;    // smallest total exponent with 2^E >= ceil(X/2)
    int mu_cap;  // per-factor cap for mobius blocks: Z = 2^mu_cap, Z^L >= 4X
};

GenParams make_params(fn_kind f, uint64_t X, int L, int k) {
    if (f != fn_kind::lambda && f != fn_kind::mu && f != fn_kind::dk)
        throw parameter_error("decomposition needs lambda, mu or d_k");
    if (X < 16 || X > (uint64_t(1) << 40)) throw parameter_error("need 16 <= X <= 2^40");
    if (L < 1 || L > 8) throw parameter_error("need 1 <= L <= 8");
    if (k < 1 || k > 8) throw parameter_error("need 1 <= k <= 8");
    GenParams p{f, X, L, k, 0, 0, 0};
    p.B = (int)std::bit_width(4 * X - 1);
    p.e_lo = (int)std::bit_width((X + 1) / 2 - 1);
    p.mu_cap = (p.B + L - 1) / L;
    return p;
}

// one group of identically weighted factors: `count` blocks, exponents
// non-increasing within the group and bounded by `cap`
struct Group {
    factor_kind kind;
    int count;
    int cap;
};

struct Emitter {
    const GenParams* p;
    const std::function<void(const ConvComponent&)>* emit;
    std::vector<Group> groups;
    std::vector<std::vector<int>> exps;  // chosen exponents per group
    int64_t base_coeff = 1;
    int e_hi = 0;

    void walk_group(size_t g, int sum) {
        if (g == groups.size()) {
            if (sum >= p->e_lo) finish(sum);
            return;
        }
        walk_slot(g, 0, groups[g].cap, sum);
    }

    void walk_slot(size_t g, int slot, int bound, int sum) {
        const Group& gr = groups[g];
        if (slot == gr.count) {
            walk_group(g + 1, sum);
            return;
        }
        // largest admissible exponents for the remaining slots in this group
        // and the full caps of later groups
        for (int e = bound; e >= 0; --e) {
            int rest = e * (gr.count - slot - 1);
            for (size_t h = g + 1; h < groups.size(); ++h)
                rest += groups[h].cap * groups[h].count;
            if (sum + e + rest < p->e_lo) break;  // even maximal tails fall short
            if (sum + e > e_hi) continue;
            exps[g][slot] = e;
            walk_slot(g, slot + 1, e, sum + e);
        }
    }

    void finish(int total) {
        ConvComponent c;
        int64_t coeff = base_coeff;
        for (size_t g = 0; g < groups.size(); ++g) {
            std::vector<int> ge(exps[g].begin(), exps[g].begin() + groups[g].count);
            coeff *= permutation_count(ge);
            for (int e : ge) c.factors.push_back(FactorSpec{groups[g].kind, e, nullptr, 0, 0});
        }
        c.coefficient = coeff;
        std::sort(c.factors.begin(), c.factors.end(), [](const FactorSpec& a, const FactorSpec& b) {
            if (a.e != b.e) return a.e > b.e;
            return (int)a.kind < (int)b.kind;
        });
        c.support_hi = int64_t(1) << total;
        c.support_lo = c.support_hi >> c.factors.size();
        (*emit)(c);
    }
};

void generate(const GenParams& p, const std::function<void(const ConvComponent&)>& emit) {
    Emitter em;
    em.p = &p;
    em.emit = &emit;
    if (p.f == fn_kind::dk) {
        em.groups = {Group{factor_kind::unit, p.k, p.B}};
        em.base_coeff = 1;
        em.e_hi = p.B - 1 + p.k;
        em.exps.assign(1, std::vector<int>(p.k, 0));
        em.walk_group(0, 0);
        return;
    }
    for (int j = 1; j <= p.L; ++j) {
        em.groups.clear();
        em.groups.push_back(Group{factor_kind::mobius_block, j, p.mu_cap});
        if (p.f == fn_kind::lambda) em.groups.push_back(Group{factor_kind::log_weight, 1, p.B});
        if (j > 1) em.groups.push_back(Group{factor_kind::unit, j - 1, p.B});
        int ell = 0;
        for (const auto& g : em.groups) ell += g.count;
        em.base_coeff = (j % 2 == 1 ? 1 : -1) * (int64_t)binom_u64(p.L, j);
        em.e_hi = p.B - 1 + ell;
        em.exps.clear();
        for (const auto& g : em.groups) em.exps.emplace_back(g.count, 0);
        em.walk_group(0, 0);
    }
}

double exponent_of(const FactorSpec& f, double logx) {
    if (f.kind == factor_kind::explicit_seq)
        return std::log(std::max((double)f.seq_lo, 0.5)) / logx;
    return (f.e - 1) * std::log(2.0) / logx;
}

std::vector<uint64_t> range_primes(uint64_t bound) { return primes_up_to(bound).primes; }

}  // namespace

void for_each_hb_component(fn_kind f, uint64_t X, int L, int k,
                           const std::function<void(const ConvComponent&)>& emit) {
    generate(make_params(f, X, L, k), emit);
}

std::vector<ConvComponent> heath_brown_components(fn_kind f, uint64_t X, int L, int k) {
    std::vector<ConvComponent> out;
    for_each_hb_component(f, X, L, k, [&](const ConvComponent& c) { out.push_back(c); });
    return out;
}

ValueTable evaluate_component(const ConvComponent& comp, Window window) {
    window = make_window(window.start, window.length);
    if (window.length > (uint64_t)kEnumLimit) throw capacity_error("window too long to enumerate");
    validate_component(comp);
    uint64_t mu_hi = 1;
    for (const auto& f : comp.factors)
        if (f.kind == factor_kind::mobius_block) mu_hi = std::max(mu_hi, (uint64_t)f.hi());
    auto mu8 = mu_table(mu_hi);
    ValueTable t{window, fn_kind::custom, 0, std::vector<double>(window.length, 0.0)};
    Evaluator ev;
    ev.prepare(comp, mu8, (int64_t)window.start, (int64_t)window.end());
    ev.acc = t.values.data();
    ev.run((double)comp.coefficient);
    return t;
}

ValueTable hb_reconstruct(fn_kind f, uint64_t X, int L, Window window, int k, int threads) {
    auto p = make_params(f, X, L, k);
    window = make_window(window.start, window.length);
    Window full = hb_full_window(X);
    if (window.start < full.start || window.end() > full.end())
        throw parameter_error("window leaves the decomposed range");
    if (window.length > (uint64_t)kEnumLimit) throw capacity_error("window too long to enumerate");
    uint64_t Z = f == fn_kind::dk ? 1 : uint64_t(1) << p.mu_cap;
    if (Z > (uint64_t)kEnumLimit)
        throw capacity_error("mobius truncation too large to sieve; raise L");
    auto mu8 = mu_table(Z);
    auto comps = heath_brown_components(f, X, L, k);

    int64_t lo = (int64_t)window.start, hi = (int64_t)window.end();
    auto part = [&](size_t b, size_t e) {
        std::vector<double> acc(window.length, 0.0);
        Evaluator ev;
        for (size_t i = b; i < e; ++i) {
            ev.prepare(comps[i], mu8, lo, hi);
            ev.acc = acc.data();
            ev.run((double)comps[i].coefficient);
        }
        return acc;
    };
    auto join = [](std::vector<double> a, std::vector<double> b) {
        if (a.empty()) return b;
        for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
        return a;
    };
    auto values =
        parallel_reduce(comps.size(), threads, std::vector<double>{}, part, join);
    if (values.empty()) values.assign(window.length, 0.0);
    return ValueTable{window, f, f == fn_kind::dk ? k : 0, std::move(values)};
}

ValueTable hb_reconstruct(fn_kind f, uint64_t X, int L, int k, int threads) {
    return hb_reconstruct(f, X, L, hb_full_window(X), k, threads);
}

std::vector<double> component_exponents(const ConvComponent& comp, uint64_t X) {
    if (X < 2) throw parameter_error("need X >= 2");
    double logx = std::log((double)X);
    std::vector<double> out;
    out.reserve(comp.factors.size());
    for (const auto& f : comp.factors) out.push_back(exponent_of(f, logx));
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

ComponentClass classify_component(std::vector<double> exponents, uint64_t X, double theta,
                                  double epsilon) {
    if (exponents.empty()) throw parameter_error("no exponents to classify");
    if (X < 16) throw parameter_error("need X >= 16");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw parameter_error("need 0 < epsilon < 1");
    if (!(theta >= 1.0 / 3.0 - 1e-12 && theta <= 1.0 - epsilon))
        throw parameter_error("need 1/3 <= theta <= 1 - epsilon");
    for (double e : exponents)
        if (!std::isfinite(e)) throw parameter_error("exponent is not finite");
    std::sort(exponents.begin(), exponents.end(), std::greater<>());
    size_t ell = exponents.size();
    double lg2 = std::log(2.0) / std::log((double)X);
    double s = std::accumulate(exponents.begin(), exponents.end(), 0.0);
    if (std::fabs(s - 1.0) > ((double)ell + 2.0) * lg2 + 0.02 + 1e-12)
        throw parameter_error("support exponents do not sum to about 1");

    // thresholds scale with the actual total s, so tuples whose dyadic total
    // drifts off 1 still land in exactly one case
    if (exponents[0] > (1.0 - theta - epsilon / 2.0) * s) {
        double a1 = (s - exponents[0]) + ((double)ell - 1.0) * lg2;
        return ComponentClass{sum_class::type_I, a1, 0.0};
    }
    if (ell >= 2 &&
        exponents[0] + exponents[1] > (1.5 * (1.0 - theta) - epsilon / 2.0) * s) {
        double a1 = (s - exponents[0] - exponents[1]) + ((double)ell - 2.0) * lg2;
        return ComponentClass{sum_class::type_I2, a1, 0.0};
    }
    if (ell >= 3) {
        double target = epsilon / 10.0 * s;
        double merged = 0.0;
        size_t m = 0;
        for (size_t i = 2; i < ell; ++i) {
            merged += exponents[i];
            ++m;
            if (merged >= target) break;
        }
        if (merged >= target)
            return ComponentClass{sum_class::type_II, merged, merged + (double)m * lg2};
    }
    std::ostringstream os;
    os << "no class for exponents";
    for (double e : exponents) os << ' ' << fmt_g17(e);
    throw classification_error(os.str());
}

double tv_norm(std::span<const double> values, int64_t q, int64_t first_n) {
    if (q < 1) throw parameter_error("need q >= 1");
    double total = 0.0;
    for (int64_t r = 0; r < q; ++r) {
        int64_t i0 = ((r - first_n) % q + q) % q;
        double sup = 0.0, var = 0.0, prev = 0.0;
        bool any = false;
        for (size_t i = (size_t)i0; i < values.size(); i += (size_t)q) {
            double v = values[i];
            sup = std::max(sup, std::fabs(v));
            var += any ? std::fabs(v - prev) : std::fabs(v);
            prev = v;
            any = true;
        }
        if (any) total += sup + var + std::fabs(prev);
    }
    return total;
}

std::vector<double> factor_values(const FactorSpec& f) {
    if (f.kind == factor_kind::explicit_seq) {
        if (!f.seq) throw parameter_error("explicit factor without values");
        return *f.seq;
    }
    if (f.e < 0 || f.e > 30) throw capacity_error("block too large to materialize");
    int64_t lo = f.lo(), hi = f.hi();
    std::vector<double> out((size_t)(hi - lo));
    switch (f.kind) {
        case factor_kind::unit:
            std::fill(out.begin(), out.end(), 1.0);
            break;
        case factor_kind::log_weight:
            for (int64_t m = lo + 1; m <= hi; ++m) out[m - lo - 1] = std::log((double)m);
            break;
        default: {
            auto mu8 = mu_table((uint64_t)hi);
            for (int64_t m = lo + 1; m <= hi; ++m) out[m - lo - 1] = mu8[(size_t)m];
            break;
        }
    }
    return out;
}

RamareParts ramare_decompose(Window window, fn_kind f, int k, int64_t P1, int64_t P2) {
    window = make_window(window.start, window.length);
    if (f != fn_kind::mu && f != fn_kind::dk)
        throw parameter_error("prime-window split needs mu or d_k");
    if (f == fn_kind::dk && (k < 1 || k > 6)) throw parameter_error("need 1 <= k <= 6");
    if (!(2 <= P1 && P1 < P2)) throw parameter_error("need 2 <= P1 < P2");
    if (P2 > (int64_t(1) << 22)) throw capacity_error("prime range too large");
    int64_t end = (int64_t)window.end();
    int64_t cof_hi = end / P1;
    if (cof_hi > (int64_t(1) << 24)) throw capacity_error("window too deep for the prime range");

    auto f_table = [&](Window w) {
        return f == fn_kind::mu ? sieve_mu(w) : sieve_dk(w, k);
    };
    ValueTable tf = f_table(window);
    ValueTable cnt = prime_divisor_count_table(window, (uint64_t)P1, (uint64_t)P2);

    RamareParts parts;
    parts.lhs = ValueTable{window, fn_kind::custom, 0, std::vector<double>(window.length, 0.0)};
    parts.rhs = ValueTable{window, fn_kind::custom, 0, std::vector<double>(window.length, 0.0)};
    parts.error_mask.assign(window.length, 0);
    for (size_t i = 0; i < window.length; ++i)
        parts.lhs.values[i] = tf.values[i] * cnt.values[i];

    // f on the cofactor range, with f(1) = 1 handled off-table
    ValueTable cof = cof_hi >= 2 ? f_table(make_window(1, (uint64_t)(cof_hi - 1)))
                                 : ValueTable{make_window(1, 1), f, k, {0.0}};
    auto f_at = [&](int64_t m) { return m == 1 ? 1.0 : cof.at((uint64_t)m); };
    double fp = f == fn_kind::mu ? -1.0 : (double)k;

    auto primes = range_primes((uint64_t)std::min<int64_t>(P2, end));
    for (uint64_t p : primes) {
        if ((int64_t)p <= P1) continue;
        int64_t start = ((int64_t)window.start / (int64_t)p + 1) * (int64_t)p;
        for (int64_t n = start; n <= end; n += (int64_t)p)
            parts.rhs.values[n - (int64_t)window.start - 1] += fp * f_at(n / (int64_t)p);
        int64_t p2 = (int64_t)p * (int64_t)p;
        if (p2 <= end) {
            int64_t s2 = ((int64_t)window.start / p2 + 1) * p2;
            for (int64_t n = s2; n <= end; n += p2)
                parts.error_mask[n - (int64_t)window.start - 1] = 1;
        }
    }

    // the same bilinear form as an explicit two-block component
    auto pa = std::make_shared<std::vector<double>>((size_t)(P2 - P1), 0.0);
    for (uint64_t p : primes)
        if ((int64_t)p > P1) (*pa)[p - P1 - 1] = fp;
    auto pb = std::make_shared<std::vector<double>>((size_t)cof_hi, 0.0);
    for (int64_t m = 1; m <= cof_hi; ++m) (*pb)[m - 1] = f_at(m);
    FactorSpec fa{factor_kind::explicit_seq, 0, pa, P1, P2};
    FactorSpec fb{factor_kind::explicit_seq, 0, pb, 0, cof_hi};
    parts.main.coefficient = 1;
    parts.main.factors = cof_hi >= P2 ? std::vector<FactorSpec>{fb, fa}
                                      : std::vector<FactorSpec>{fa, fb};
    parts.main.support_lo = 0;
    parts.main.support_hi = P2 * cof_hi;
    return parts;
}

TKCheck turan_kubilius_check(uint64_t X, uint64_t H, uint64_t x, double eps1, double eps2,
                             int k) {
    if (X < 3) throw parameter_error("need X >= 3");
    if (k < 1 || k > 6) throw parameter_error("need 1 <= k <= 6");
    if (H < 2 || H > X) throw parameter_error("need 2 <= H <= X");
    if (x < X || x > 2 * X) throw parameter_error("need X <= x <= 2X");
    if (!(0.0 < eps1 && eps1 < eps2 && eps2 < 1.0))
        throw parameter_error("need 0 < eps1 < eps2 < 1");
    if (eps1 > eps2 * std::exp(-2.0 * k) * (1.0 + 1e-12))
        throw parameter_error("need eps1 <= eps2 exp(-2k)");
    double lo = std::pow((double)X, eps1), hi = std::pow((double)X, eps2);
    if (hi > (double)kEnumLimit) throw capacity_error("prime range too large");

    std::vector<uint64_t> ps;
    for (uint64_t p : range_primes((uint64_t)hi))
        if ((double)p > lo && (double)p <= hi) ps.push_back(p);

    double mean = 0.0;
    for (uint64_t p : ps) mean += (double)k / (double)p;

    Window w = make_window(x, H);
    std::vector<int> cnt(H, 0);
    for (uint64_t p : ps)
        for (uint64_t n = (x / p + 1) * p; n <= w.end(); n += p) ++cnt[n - x - 1];

    TKCheck out;
    if (k == 1) {
        for (size_t i = 0; i < H; ++i) out.lhs += std::fabs((double)cnt[i] - mean);
    } else {
        auto dk = sieve_dk(w, k);
        for (size_t i = 0; i < H; ++i)
            out.lhs += dk.values[i] * std::fabs((double)cnt[i] - mean);
    }
    out.rhs = 20.0 * std::sqrt((double)k) * (double)H *
              std::pow(std::log((double)X), (double)(k - 1)) *
              std::sqrt(std::log(eps2 / eps1));
    out.pass = out.lhs <= out.rhs;
    return out;
}

std::string hb_components_json(const std::vector<ConvComponent>& comps) {
    nlohmann::ordered_json j;
    j["count"] = comps.size();
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : comps) {
        nlohmann::ordered_json jc;
        jc["coefficient"] = c.coefficient;
        jc["support"] = {c.support_lo, c.support_hi};
        auto jf = nlohmann::ordered_json::array();
        for (const auto& f : c.factors) {
            nlohmann::ordered_json e;
            switch (f.kind) {
                case factor_kind::unit: e["kind"] = "unit"; break;
                case factor_kind::log_weight: e["kind"] = "log"; break;
                case factor_kind::mobius_block: e["kind"] = "mobius"; break;
                case factor_kind::explicit_seq: e["kind"] = "seq"; break;
            }
            if (f.kind == factor_kind::explicit_seq) {
                e["lo"] = f.seq_lo;
                e["hi"] = f.seq_hi;
            } else {
                e["e"] = f.e;
            }
            jf.push_back(e);
        }
        jc["factors"] = jf;
        arr.push_back(jc);
    }
    j["components"] = arr;
    return j.dump(2) + "\n";
}

std::string classification_table_csv(const std::vector<ClassificationRow>& rows) {
    std::string out = "ell,exponents,tag,a1,a2\n";
    for (const auto& r : rows) {
        out += std::to_string(r.exponents.size());
        out += ',';
        for (size_t i = 0; i < r.exponents.size(); ++i) {
            if (i) out += ' ';
            out += fmt_g17(r.exponents[i]);
        }
        out += ',';
        switch (r.cls.tag) {
            case sum_class::type_I: out += "I"; break;
            case sum_class::type_I2: out += "I2"; break;
            case sum_class::type_II: out += "II"; break;
        }
        out += ',';
        out += fmt_g17(r.cls.a1);
        out += ',';
        out += fmt_g17(r.cls.a2);
        out += '\n';
    }
    return out;
}

}  // namespace sil
