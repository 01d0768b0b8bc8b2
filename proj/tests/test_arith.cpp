#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numeric>

#include "oracles.hpp"
#include "sil/arith.hpp"
#include "sil/rng.hpp"

using namespace sil;

TEST_CASE("primes_up_to basics") {
    auto p10 = primes_up_to(10);
    CHECK(p10.primes == std::vector<uint64_t>{2, 3, 5, 7});
    CHECK(primes_up_to(1).primes.empty());
    CHECK(primes_up_to(2).primes == std::vector<uint64_t>{2});
}

TEST_CASE("pi(10^6) against trial division count") {
    auto pl = primes_up_to(1000000);
    CHECK(pl.primes.size() == 78498);
    // independent count on a coarser bound to keep trial division cheap
    size_t slow = 0;
    for (uint64_t n = 2; n <= 100000; ++n)
        if (oracle::is_prime(n)) ++slow;
    size_t fast = 0;
    for (uint64_t p : pl.primes)
        if (p <= 100000) ++fast;
    CHECK(fast == slow);
}

TEST_CASE("sieve_lambda examples") {
    auto t = sieve_lambda(Window{8, 5});
    CHECK(t.at(9) == doctest::Approx(std::log(3.0)).epsilon(1e-15));
    CHECK(t.at(10) == 0.0);
    CHECK(t.at(11) == doctest::Approx(std::log(11.0)).epsilon(1e-15));
    CHECK(t.at(12) == 0.0);
    CHECK(t.at(13) == doctest::Approx(std::log(13.0)).epsilon(1e-15));
    auto t2 = sieve_lambda(Window{1, 1});
    CHECK(t2.at(2) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("psi(100) matches trial-division oracle") {
    auto t = sieve_lambda(Window{1, 99});
    double psi = 0.0;
    for (double v : t.values) psi += v;
    double psi_oracle = 0.0;
    for (uint64_t n = 2; n <= 100; ++n) psi_oracle += oracle::lambda(n);
    CHECK(psi == doctest::Approx(psi_oracle).epsilon(1e-9));
}

TEST_CASE("lambda support iff prime power, n <= 1e5") {
    auto t = sieve_lambda(Window{1, 99999});
    for (uint64_t n = 2; n <= 100000; ++n) {
        double want = oracle::lambda(n);
        double got = t.at(n);
        if (want == 0.0)
            CHECK(got == 0.0);
        else
            CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("sieve_mu examples and Mertens at 1e4") {
    auto t = sieve_mu(Window{9, 4});
    CHECK(t.at(10) == 1.0);
    CHECK(t.at(11) == -1.0);
    CHECK(t.at(12) == 0.0);
    CHECK(t.at(13) == -1.0);

    auto big = sieve_mu(Window{1, 9999});
    double mertens = 1.0;  // mu(1)
    for (double v : big.values) mertens += v;
    double mertens_oracle = 0.0;
    for (uint64_t n = 1; n <= 10000; ++n) mertens_oracle += oracle::mu(n);
    CHECK(mertens == mertens_oracle);
}

TEST_CASE("sieve_dk examples") {
    auto d2 = sieve_dk(Window{1, 20}, 2);
    CHECK(d2.at(12) == 6.0);
    auto d3 = sieve_dk(Window{1, 20}, 3);
    CHECK(d3.at(4) == 6.0);
    CHECK(d3.at(4) == (double)oracle::dk_recursive(4, 3));
    // spot-check the recursive count against the multiplicative formula
    for (uint64_t n = 2; n <= 20; ++n) {
        CHECK(d3.at(n) == (double)oracle::dk_recursive(n, 3));
        CHECK(d2.at(n) == (double)oracle::dk_recursive(n, 2));
    }
    auto d1 = sieve_dk(Window{1, 100}, 1);
    for (double v : d1.values) CHECK(v == 1.0);
    CHECK_THROWS_AS(sieve_dk(Window{1, 10}, 7), parameter_error);
    CHECK_THROWS_AS(sieve_dk(Window{1, 10}, 0), parameter_error);
}

TEST_CASE("hyperbola identity: sum d_2(n) = sum floor(N/d), N = 1e5") {
    const uint64_t N = 100000;
    auto t = sieve_dk(Window{1, N - 1}, 2);
    double lhs = 1.0;  // d_2(1)
    for (double v : t.values) lhs += v;
    uint64_t rhs = 0;
    for (uint64_t d = 1; d <= N; ++d) rhs += N / d;
    CHECK(lhs == (double)rhs);
}

TEST_CASE("multiplicativity on random coprime pairs") {
    const uint64_t bound = 1000000;
    auto mu_t = sieve_mu(Window{1, bound - 1});
    auto d3_t = sieve_dk(Window{1, bound - 1}, 3);
    rng g(20240817);
    int done = 0;
    while (done < 10000) {
        uint64_t a = 2 + g.below(998);
        uint64_t b = 2 + g.below(998);
        if (std::gcd(a, b) != 1) continue;
        ++done;
        CHECK(mu_t.at(a * b) == mu_t.at(a) * mu_t.at(b));
        CHECK(d3_t.at(a * b) == d3_t.at(a) * d3_t.at(b));
    }
}

TEST_CASE("segmentation invariance, including across the 2^20 boundary") {
    auto check_split = [](uint64_t x, uint64_t H) {
        auto whole = sieve_mu(Window{x, H});
        auto left = sieve_mu(Window{x, H / 2});
        auto right = sieve_mu(Window{x + H / 2, H - H / 2});
        for (uint64_t i = 0; i < H / 2; ++i) CHECK(whole.values[i] == left.values[i]);
        for (uint64_t i = H / 2; i < H; ++i) CHECK(whole.values[i] == right.values[i - H / 2]);
        auto lwhole = sieve_lambda(Window{x, H});
        auto lleft = sieve_lambda(Window{x, H / 2});
        auto lright = sieve_lambda(Window{x + H / 2, H - H / 2});
        for (uint64_t i = 0; i < H / 2; ++i) CHECK(lwhole.values[i] == lleft.values[i]);
        for (uint64_t i = H / 2; i < H; ++i) CHECK(lwhole.values[i] == lright.values[i - H / 2]);
    };
    check_split(999983, 64);
    check_split((uint64_t(1) << 20) - 32, 64);   // straddles a segment boundary
    check_split((uint64_t(1) << 20) - 512, 3000);
}

TEST_CASE("prime_divisor_count examples and oracle sweep") {
    auto t = prime_divisor_count_table(Window{29, 3}, 3, 10);
    CHECK(t.at(30) == 1.0);  // only 5; 7 does not divide 30
    CHECK(t.at(31) == 0.0);

    auto sweep = prime_divisor_count_table(Window{1, 1000}, 10, 100);
    for (uint64_t n = 2; n <= 1001; ++n) {
        int cnt = 0;
        for (auto& [p, a] : oracle::factorize(n))
            if (p > 10 && p <= 100) ++cnt;
        CHECK(sweep.at(n) == (double)cnt);
    }
    CHECK_THROWS_AS(prime_divisor_count_table(Window{1, 10}, 1, 10), parameter_error);
    CHECK_THROWS_AS(prime_divisor_count_table(Window{1, 10}, 10, 10), parameter_error);
}

TEST_CASE("csv serialization round trip shape") {
    auto t = sieve_mu(Window{9, 4});
    std::string path = "test_arith_mu.csv";
    t.to_csv(path);
    FILE* f = std::fopen(path.c_str(), "rb");
    REQUIRE(f != nullptr);
    char buf[256];
    std::string all;
    size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) all.append(buf, n);
    std::fclose(f);
    CHECK(all == "n,value\n10,1\n11,-1\n12,0\n13,-1\n");
    std::remove(path.c_str());
}

TEST_CASE("window validation") {
    CHECK_THROWS_AS(make_window(0, 5), parameter_error);
    CHECK_THROWS_AS(make_window(5, 0), parameter_error);
    CHECK_THROWS_AS(make_window(uint64_t(1) << 53, 10), capacity_error);
    auto t = sieve_mu(Window{100, 10});
    CHECK_THROWS_AS(t.at(100), parameter_error);
    CHECK_THROWS_AS(t.at(111), parameter_error);
    CHECK(t.at(101) == -1.0);  // 101 prime
}
