#include "sil/interval_norms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>

#include "sil/fft.hpp"
#include "sil/parallel.hpp"

namespace sil {

namespace {

double mod_abs(double x) { return std::fabs(x); }
double mod_abs(std::complex<double> x) { return std::abs(x); }

template <class T>
double tv_norm_impl(std::span<const T> v, int64_t q, int64_t first, int64_t difference) {
    if (q < 1) throw parameter_error("tv_norm needs q >= 1");
    if (v.empty()) return 0.0;
    double total = 0.0;
    for (int64_t a = 0; a < q; ++a) {
        // residue class: elements n_i = first + i*difference with n_i == a (mod q)
        double sup = 0.0, jumps = 0.0;
        bool seen = false;
        T prev{};
        for (size_t i = 0; i < v.size(); ++i) {
            int64_t n = first + (int64_t)i * difference;
            if (((n - a) % q + q) % q != 0) continue;
            sup = std::max(sup, mod_abs(v[i]));
            if (seen) jumps += mod_abs(v[i] - prev);
            prev = v[i];
            seen = true;
        }
        if (seen) total += sup + jumps;
    }
    return total;
}

struct scan_best {
    double value = -1.0;
    int64_t q = 0, first = 0, count = 0;
    // strictly larger value wins; ties prefer smaller difference, then
    // smaller first element, then shorter witness
    void offer(double val, int64_t qq, int64_t fst, int64_t cnt) {
        bool better = val > value;
        bool tie = val == value &&
                   (qq < q || (qq == q && (fst < first || (fst == first && cnt < count))));
        if (better || tie) {
            value = val;
            q = qq;
            first = fst;
            count = cnt;
        }
    }
    void merge(const scan_best& o) {
        if (o.value >= 0) offer(o.value, o.q, o.first, o.count);
    }
};

// real case: per (difference, residue) class, running prefix extremes
void scan_real(std::span<const double> v, int64_t base, int64_t q, scan_best& best) {
    int64_t H = (int64_t)v.size();
    std::vector<double> prefix;
    for (int64_t r = 0; r < q && r < H; ++r) {
        prefix.clear();
        prefix.push_back(0.0);
        for (int64_t i = r; i < H; i += q) prefix.push_back(prefix.back() + v[i]);
        int64_t m = (int64_t)prefix.size() - 1;
        // sum over class slice (i, j] is prefix[j] - prefix[i]; the witness
        // elements start at array index r + q*i and there are j - i of them
        int64_t imin = 0, imax = 0;
        for (int64_t j = 1; j <= m; ++j) {
            double up = prefix[j] - prefix[imin];
            double dn = prefix[imax] - prefix[j];
            best.offer(up, q, base + r + q * imin, j - imin);
            best.offer(dn, q, base + r + q * imax, j - imax);
            if (prefix[j] < prefix[imin]) imin = j;
            if (prefix[j] > prefix[imax]) imax = j;
        }
    }
}

struct pt {
    double x, y;
    int64_t idx;
};

// strictly convex hull, counterclockwise (monotone chain)
std::vector<pt> convex_hull(std::vector<pt> s) {
    std::sort(s.begin(), s.end(), [](const pt& a, const pt& b) {
        return a.x < b.x || (a.x == b.x && (a.y < b.y || (a.y == b.y && a.idx < b.idx)));
    });
    auto cross = [](const pt& o, const pt& a, const pt& b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    };
    size_t n = s.size();
    if (n <= 2) return s;
    std::vector<pt> h(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) {  // lower hull
        while (k >= 2 && cross(h[k - 2], h[k - 1], s[i]) <= 0) --k;
        h[k++] = s[i];
    }
    for (size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper hull
        while (k >= t && cross(h[k - 2], h[k - 1], s[i]) <= 0) --k;
        h[k++] = s[i];
    }
    h.resize(k - 1);
    return h;
}

// complex case: max |S_j - S_i| is the farthest pair of prefix-sum points;
// rotating calipers over the hull keeps each class near-linear
void scan_complex(std::span<const std::complex<double>> v, int64_t base, int64_t q,
                  scan_best& best) {
    int64_t H = (int64_t)v.size();
    for (int64_t r = 0; r < q && r < H; ++r) {
        std::vector<pt> pts;
        std::complex<double> run{0.0, 0.0};
        pts.push_back({0.0, 0.0, 0});
        int64_t cnt = 0;
        for (int64_t i = r; i < H; i += q) {
            run += v[i];
            pts.push_back({run.real(), run.imag(), ++cnt});
        }
        auto hull = convex_hull(pts);
        size_t nh = hull.size();
        auto offer_pair = [&](const pt& a, const pt& b) {
            int64_t i = std::min(a.idx, b.idx), j = std::max(a.idx, b.idx);
            if (i == j) return;
            double dx = a.x - b.x, dy = a.y - b.y;
            best.offer(std::sqrt(dx * dx + dy * dy), q, base + r + q * i, j - i);
        };
        if (nh == 1) {
            best.offer(0.0, q, base + r, 1);  // all prefix sums equal: any slice sums to 0
        } else if (nh == 2) {
            offer_pair(hull[0], hull[1]);
        } else {
            auto area2 = [](const pt& a, const pt& b, const pt& c) {
                return std::fabs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
            };
            size_t j = 1;
            for (size_t i = 0; i < nh; ++i) {
                const pt& e0 = hull[i];
                const pt& e1 = hull[(i + 1) % nh];
                while (area2(e0, e1, hull[(j + 1) % nh]) > area2(e0, e1, hull[j]))
                    j = (j + 1) % nh;
                offer_pair(e0, hull[j]);
                offer_pair(e1, hull[j]);
            }
        }
    }
}

template <class T>
MaxSumResult maximal_sum_impl(std::span<const T> values, uint64_t q_max, int64_t base,
                              int threads) {
    uint64_t H = values.size();
    if (H < 1) throw parameter_error("maximal_sum needs a nonempty sequence");
    bool exact = true;
    if (q_max == 0)
        q_max = H > 10000 ? std::min<uint64_t>(H, 4096) : H;
    exact = q_max >= H;
    q_max = std::min<uint64_t>(q_max, H);
    scan_best best = parallel_reduce(
        q_max, threads, scan_best{},
        [&](size_t qb, size_t qe) {
            scan_best local;
            for (size_t qi = qb; qi < qe; ++qi) {
                if constexpr (std::is_same_v<T, double>)
                    scan_real(values, base, (int64_t)qi + 1, local);
                else
                    scan_complex(values, base, (int64_t)qi + 1, local);
            }
            return local;
        },
        [](scan_best a, const scan_best& b) {
            a.merge(b);
            return a;
        });
    MaxSumResult out;
    out.value = std::max(0.0, best.value);
    out.witness = Progression{best.first, best.q, best.count};
    out.exact = exact;
    return out;
}

}  // namespace

double tv_norm(std::span<const double> values, int64_t q, int64_t first, int64_t difference) {
    return tv_norm_impl(values, q, first, difference);
}
double tv_norm(std::span<const std::complex<double>> values, int64_t q, int64_t first,
               int64_t difference) {
    return tv_norm_impl(values, q, first, difference);
}

MaxSumResult maximal_sum(std::span<const double> values, uint64_t q_max, int64_t base,
                         int threads) {
    return maximal_sum_impl(values, q_max, base, threads);
}
MaxSumResult maximal_sum(std::span<const std::complex<double>> values, uint64_t q_max,
                         int64_t base, int threads) {
    return maximal_sum_impl(values, q_max, base, threads);
}

double smoothness_norm(const PolyPhase& phase, Window w, int d) {
    if (d < 0) throw parameter_error("smoothness_norm needs d >= 0");
    uint64_t H = w.length;
    std::vector<double> diff(H);
    for (uint64_t i = 0; i < H; ++i) diff[i] = eval_mod1(phase, (int64_t)(w.start + 1 + i));
    // mod-1 reduction only shifts Delta^j f by integers, so ||.||_{R/Z} of the
    // reduced differences equals that of the true ones
    double best = 0.0;
    double scale = 1.0;
    for (uint64_t j = 0; j < H && j <= (uint64_t)d; ++j) {
        for (uint64_t i = j; i < H; ++i) best = std::max(best, scale * dist_mod1(diff[i]));
        for (uint64_t i = H; i-- > j + 1;) diff[i] -= diff[i - 1];
        scale *= (double)H;
    }
    return best;
}

double smoothness_norm_cinf(const PolyPhase& phase, Window w) {
    return smoothness_norm(phase, w, phase.degree);
}

namespace {

// unnormalized ||f||_{U^s}^{2^s}: sum over x and h in Z^s of the 2^s-corner
// product with conjugation on odd |omega|
double gowers_power_naive(std::span<const std::complex<double>> f, int s) {
    int64_t H = (int64_t)f.size();
    int corners = 1 << s;
    std::vector<int64_t> offs(corners);
    std::vector<int64_t> h(s, -(H - 1));
    long double acc = 0.0L;
    for (;;) {
        int64_t lo = 0, hi = 0;
        for (int c = 0; c < corners; ++c) {
            int64_t o = 0;
            for (int b = 0; b < s; ++b)
                if (c & (1 << b)) o += h[b];
            offs[c] = o;
            lo = std::min(lo, o);
            hi = std::max(hi, o);
        }
        for (int64_t x = -lo; x < H - hi; ++x) {
            std::complex<double> prod{1.0, 0.0};
            for (int c = 0; c < corners; ++c) {
                std::complex<double> val = f[x + offs[c]];
                prod *= (std::popcount((unsigned)c) & 1) ? std::conj(val) : val;
            }
            acc += (long double)prod.real();
        }
        int b = 0;
        while (b < s && h[b] == H - 1) h[b++] = -(H - 1);
        if (b == s) break;
        ++h[b];
    }
    return (double)acc;
}

// sum over all h in Z of |A(h)|^2, A(h) = sum_x f(x) conj(f(x+h))
double u2_power(const std::vector<cdbl>& f) {
    auto A = autocorrelation(f);
    long double sum = std::norm(A[0]);
    for (size_t h = 1; h < A.size(); ++h) sum += 2.0L * (long double)std::norm(A[h]);
    return (double)sum;
}

double gowers_power_fast(std::span<const std::complex<double>> fs, int s) {
    std::vector<cdbl> f(fs.begin(), fs.end());
    size_t H = f.size();
    if (s == 2) return u2_power(f);
    // s = 3 recursion: ||f||_{U^3}^8 = sum_h ||f conj(f(.+h))||_{U^2}^4
    std::vector<cdbl> g(H);
    for (size_t x = 0; x < H; ++x) g[x] = f[x] * std::conj(f[x]);
    long double total = u2_power(g);
    for (size_t h = 1; h < H; ++h) {
        g.assign(H - h, cdbl{});
        for (size_t x = 0; x + h < H; ++x) g[x] = f[x] * std::conj(f[x + h]);
        total += 2.0L * (long double)u2_power(g);  // h and -h contribute equally
    }
    return (double)total;
}

double normalizer_power(uint64_t H, int s, bool fast_path) {
    static std::map<std::tuple<uint64_t, int, bool>, double> cache;
    static std::mutex mu;
    {
        std::lock_guard<std::mutex> lk(mu);
        auto it = cache.find({H, s, fast_path});
        if (it != cache.end()) return it->second;
    }
    std::vector<std::complex<double>> ones(H, {1.0, 0.0});
    double p = fast_path ? gowers_power_fast(ones, s) : gowers_power_naive(ones, s);
    std::lock_guard<std::mutex> lk(mu);
    cache[{H, s, fast_path}] = p;
    return p;
}

GowersResult finish_gowers(int s, double power, double norm_power) {
    GowersResult g;
    g.s = s;
    g.unnormalized = std::pow(std::max(0.0, power), 1.0 / (double)(1 << s));
    g.normalizer = std::pow(std::max(0.0, norm_power), 1.0 / (double)(1 << s));
    g.normalized = g.unnormalized / g.normalizer;
    return g;
}

}  // namespace

GowersResult gowers_norm_naive(std::span<const std::complex<double>> values, int s,
                               double op_budget) {
    if (s < 1) throw parameter_error("gowers_norm needs s >= 1");
    uint64_t H = values.size();
    if (H == 0) throw parameter_error("gowers_norm needs a nonempty sequence");
    if (std::pow((double)H, s + 1) > op_budget)
        throw capacity_error("gowers_norm_naive: H^{s+1} over op budget");
    double p = gowers_power_naive(values, s);
    return finish_gowers(s, p, normalizer_power(H, s, false));
}

GowersResult gowers_norm_fast(std::span<const std::complex<double>> values, int s) {
    uint64_t H = values.size();
    if (H == 0) throw parameter_error("gowers_norm needs a nonempty sequence");
    if (s == 2) {
        if (H > 10000000) throw capacity_error("gowers_norm_fast s=2 needs H <= 1e7");
    } else if (s == 3) {
        if (H > 100000) throw capacity_error("gowers_norm_fast s=3 needs H <= 1e5");
    } else {
        throw parameter_error("gowers_norm_fast supports s in {2,3}");
    }
    double p = gowers_power_fast(values, s);
    return finish_gowers(s, p, normalizer_power(H, s, true));
}

}  // namespace sil
