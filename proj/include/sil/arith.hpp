#pragma once
// segmented sieves for exact Lambda / mu / d_k values and prime-divisor
// statistics on half-open integer windows (x, x+H].
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sil/util.hpp"

namespace sil {

// half-open window (start, start+length]; entry for n sits at n - start - 1
struct Window {
    uint64_t start = 1;
    uint64_t length = 1;
    uint64_t end() const { return start + length; }
    bool contains(uint64_t n) const { return n > start && n <= end(); }
};

Window make_window(uint64_t start, uint64_t length);  // validates ranges

enum class fn_kind {
    lambda,
    mu,
    dk,
    prime_count,
    lambda_sharp,
    lambda_sharp_t1,
    lambda_w,
    dk_sharp,
    custom,
};

// true when values are exact integers (CSV prints integer text)
bool integer_valued(fn_kind k);
std::string kind_name(fn_kind k, int k_param);

struct ValueTable {
    Window window;
    fn_kind kind = fn_kind::custom;
    int k_param = 0;  // k for dk / dk_sharp, else 0
    std::vector<double> values;

    double at(uint64_t n) const {
        if (!window.contains(n)) throw parameter_error("ValueTable::at: n outside window");
        return values[n - window.start - 1];
    }
    void to_csv(const std::string& path) const;  // columns n,value
};

struct PrimeList {
    uint64_t bound = 0;
    std::vector<uint64_t> primes;
};

PrimeList primes_up_to(uint64_t bound);

ValueTable sieve_lambda(Window w);
ValueTable sieve_mu(Window w);
ValueTable sieve_dk(Window w, int k, int k_max = 6);
// number of distinct primes p in (P1, P2] dividing n, per n in the window
ValueTable prime_divisor_count_table(Window w, uint64_t P1, uint64_t P2);

// shared factorization pass: visit(i, p, a) for each n = start+1+i in the
// window and each prime power p^a || n. Exposed for reuse by other modules.
void factor_window(Window w, const std::function<void(uint64_t, uint64_t, int)>& visit);

}  // namespace sil
