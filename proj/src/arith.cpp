#include "sil/arith.hpp"

#include <cmath>

#include "sil/io.hpp"

namespace sil {

namespace {

constexpr uint64_t kSegment = uint64_t(1) << 20;  // cache-resident inner loops
constexpr uint64_t kMaxN = uint64_t(1) << 53;     // exact-double range
constexpr uint64_t kMaxLen = uint64_t(1) << 28;   // table memory budget
constexpr double kTwo53 = 9007199254740992.0;

uint64_t isqrt(uint64_t n) {
    uint64_t r = (uint64_t)std::sqrt((double)n);
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

// visit(i, p, a) for every n = start+1+i in w and every p^a || n
template <class V>
void factor_window_impl(Window w, V&& visit) {
    uint64_t x = w.start, end = w.end();
    auto base = primes_up_to(isqrt(end)).primes;
    std::vector<uint64_t> rem;
    for (uint64_t lo = x; lo < end; lo += kSegment) {
        uint64_t hi = std::min(end, lo + kSegment);
        uint64_t m = hi - lo;
        rem.resize(m);
        for (uint64_t i = 0; i < m; ++i) rem[i] = lo + 1 + i;
        for (uint64_t p : base) {
            if (p * p > hi) break;
            for (uint64_t n = (lo / p + 1) * p; n <= hi; n += p) {
                uint64_t i = n - lo - 1;
                int a = 0;
                while (rem[i] % p == 0) {
                    rem[i] /= p;
                    ++a;
                }
                visit(n - x - 1, p, a);
            }
        }
        for (uint64_t i = 0; i < m; ++i)
            if (rem[i] > 1) visit(lo - x + i, rem[i], 1);  // single prime > sqrt(hi)
    }
}

uint64_t binom_small(uint64_t n, uint64_t r) {
    if (r > n) return 0;
    r = std::min(r, n - r);
    uint64_t num = 1;
    for (uint64_t i = 0; i < r; ++i) num = num * (n - i) / (i + 1);  // exact: prefix products divisible
    return num;
}

}  // namespace

Window make_window(uint64_t start, uint64_t length) {
    if (start < 1 || length < 1) throw parameter_error("window needs start >= 1 and length >= 1");
    if (length > kMaxLen) throw capacity_error("window length over memory budget");
    if (start > kMaxN - length) throw capacity_error("window end beyond 2^53");
    return Window{start, length};
}

bool integer_valued(fn_kind k) {
    return k == fn_kind::mu || k == fn_kind::dk || k == fn_kind::prime_count;
}

std::string kind_name(fn_kind k, int k_param) {
    switch (k) {
        case fn_kind::lambda: return "lambda";
        case fn_kind::mu: return "mu";
        case fn_kind::dk: return "d" + std::to_string(k_param);
        case fn_kind::prime_count: return "prime_count";
        case fn_kind::lambda_sharp: return "lambda_sharp";
        case fn_kind::lambda_sharp_t1: return "lambda_sharp_t1";
        case fn_kind::lambda_w: return "lambda_w";
        case fn_kind::dk_sharp: return "d" + std::to_string(k_param) + "_sharp";
        default: return "custom";
    }
}

void ValueTable::to_csv(const std::string& path) const {
    csv_writer csv;
    csv.header = "n,value";
    bool ints = integer_valued(kind);
    for (uint64_t i = 0; i < values.size(); ++i) {
        uint64_t n = window.start + 1 + i;
        if (ints)
            csv.row(std::to_string(n) + "," + std::to_string((long long)values[i]));
        else
            csv.row(std::to_string(n) + "," + fmt_g17(values[i]));
    }
    csv.write(path);
}

PrimeList primes_up_to(uint64_t bound) {
    if (bound > (uint64_t(1) << 31)) throw capacity_error("prime sieve bound over budget");
    PrimeList out;
    out.bound = bound;
    if (bound < 2) return out;
    std::vector<bool> comp(bound + 1, false);
    for (uint64_t p = 2; p * p <= bound; ++p)
        if (!comp[p])
            for (uint64_t q = p * p; q <= bound; q += p) comp[q] = true;
    for (uint64_t p = 2; p <= bound; ++p)
        if (!comp[p]) out.primes.push_back(p);
    return out;
}

ValueTable sieve_lambda(Window w) {
    w = make_window(w.start, w.length);
    uint64_t x = w.start, end = w.end();
    ValueTable t{w, fn_kind::lambda, 0, std::vector<double>(w.length, 0.0)};
    auto base = primes_up_to(isqrt(end)).primes;
    std::vector<bool> comp;
    for (uint64_t lo = x; lo < end; lo += kSegment) {
        uint64_t hi = std::min(end, lo + kSegment);
        comp.assign(hi - lo, false);
        for (uint64_t p : base) {
            if (p * p > hi) break;
            uint64_t first = std::max(p * p, (lo / p + 1) * p);
            for (uint64_t n = first; n <= hi; n += p) comp[n - lo - 1] = true;
        }
        for (uint64_t n = lo + 1; n <= hi; ++n)
            if (n >= 2 && !comp[n - lo - 1]) t.values[n - x - 1] = std::log((double)n);
    }
    // proper prime powers p^j, j >= 2 (their base prime is <= sqrt(end))
    for (uint64_t p : base) {
        if (p > end / p) break;
        for (uint64_t q = p * p;; q *= p) {
            if (q > x) t.values[q - x - 1] = std::log((double)p);
            if (q > end / p) break;
        }
    }
    return t;
}

ValueTable sieve_mu(Window w) {
    w = make_window(w.start, w.length);
    ValueTable t{w, fn_kind::mu, 0, std::vector<double>(w.length, 1.0)};
    factor_window_impl(w, [&](uint64_t i, uint64_t, int a) {
        if (a >= 2)
            t.values[i] = 0.0;
        else
            t.values[i] = -t.values[i];
    });
    return t;
}

ValueTable sieve_dk(Window w, int k, int k_max) {
    if (k < 1 || k > k_max) throw parameter_error("d_k needs 1 <= k <= " + std::to_string(k_max));
    w = make_window(w.start, w.length);
    ValueTable t{w, fn_kind::dk, k, std::vector<double>(w.length, 1.0)};
    // d_k(p^a) = C(a+k-1, k-1); multiplicative over p^a || n
    double cache[64];
    for (int a = 0; a < 64; ++a) cache[a] = (double)binom_small((uint64_t)a + k - 1, k - 1);
    factor_window_impl(w, [&](uint64_t i, uint64_t, int a) {
        t.values[i] *= cache[a];
        if (t.values[i] > kTwo53) throw capacity_error("d_k value exceeds 2^53");
    });
    return t;
}

ValueTable prime_divisor_count_table(Window w, uint64_t P1, uint64_t P2) {
    if (!(2 <= P1 && P1 < P2)) throw parameter_error("need 2 <= P1 < P2");
    w = make_window(w.start, w.length);
    uint64_t x = w.start, end = w.end();
    ValueTable t{w, fn_kind::prime_count, 0, std::vector<double>(w.length, 0.0)};
    auto ps = primes_up_to(std::min(P2, end));
    for (uint64_t p : ps.primes) {
        if (p <= P1) continue;
        for (uint64_t n = (x / p + 1) * p; n <= end; n += p) t.values[n - x - 1] += 1.0;
    }
    return t;
}

void factor_window(Window w, const std::function<void(uint64_t, uint64_t, int)>& visit) {
    w = make_window(w.start, w.length);
    factor_window_impl(w, visit);
}

}  // namespace sil
