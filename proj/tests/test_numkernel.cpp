#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "grhcot/numkernel.hpp"

using namespace grhcot;

namespace {

i64 powmod(i64 a, i64 e, i64 m) {
    i64 r = 1;
    a = pos_mod(a, m);
    while (e) {
        if (e & 1) r = r * a % m;
        a = a * a % m;
        e >>= 1;
    }
    return r;
}

int legendre(i64 a, i64 p) {
    i64 r = powmod(a, (p - 1) / 2, p);
    return r == 0 ? 0 : (r == 1 ? 1 : -1);
}

bool is_prime(i64 n) {
    if (n < 2) return false;
    for (i64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

i64 count_alternating(int k) {
    std::vector<int> p(static_cast<std::size_t>(k));
    std::iota(p.begin(), p.end(), 0);
    i64 count = 0;
    do {
        bool ok = true;
        for (int i = 0; i + 1 < k && ok; ++i) ok = (i % 2 == 0) ? p[i] < p[i + 1] : p[i] > p[i + 1];
        count += ok;
    } while (std::next_permutation(p.begin(), p.end()));
    return count;
}

Rational B(int j) {
    if (j == 0) return 1;
    if (j == 1) return Rational(-1, 2);
    if (j % 2) return 0;
    return bernoulli(j);
}

BigInt binom(int n, int k) {
    BigInt r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

const std::vector<i64> Ds{-3, -4, -7, -8, -11, -15, -19, -20, -23, -24};

}  // namespace

TEST_CASE("fundamental discriminants") {
    for (i64 D : Ds) CHECK(Discriminant::is_fundamental(D));
    for (i64 D : {-1, -2, -5, -6, -9, -12, -16, -27, 5, 0}) CHECK_FALSE(Discriminant::is_fundamental(D));
    CHECK_THROWS_AS(Discriminant(-12), DomainError);
    CHECK(Discriminant(-4).modulus() == 4);
    CHECK(Discriminant(-8).even());
    CHECK_FALSE(Discriminant(-7).even());
}

TEST_CASE("kronecker against Euler's criterion at odd primes") {
    for (i64 D : Ds)
        for (i64 p = 3; p < 400; ++p) {
            if (!is_prime(p)) continue;
            CHECK(kronecker(D, p) == legendre(D, p));
        }
    // (D/2) from D mod 8
    for (i64 D : Ds) {
        int want = pos_mod(D, 2) == 0 ? 0 : (pos_mod(D, 8) == 1 || pos_mod(D, 8) == 7 ? 1 : -1);
        CHECK(kronecker(D, 2) == want);
    }
}

TEST_CASE("chi is periodic, completely multiplicative and balanced") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<i64> u(1, 10000);
    for (i64 d : Ds) {
        Discriminant D(d);
        i64 P = D.modulus();
        int sum = 0;
        for (i64 n = 1; n <= P; ++n) {
            sum += chi(D, n);
            CHECK(chi(D, n + P) == chi(D, n));
        }
        CHECK(sum == 0);
        CHECK(chi(D, -1) == -1);
        for (int t = 0; t < 300; ++t) {
            i64 a = u(rng), b = u(rng);
            CHECK(chi(D, a * b) == chi(D, a) * chi(D, b));
        }
    }
}

TEST_CASE("bernoulli numbers") {
    CHECK(bernoulli(2) == Rational(1, 6));
    CHECK(bernoulli(4) == Rational(-1, 30));
    CHECK(bernoulli(12) == Rational(-691, 2730));
    for (int m = 1; m <= 30; ++m) {
        Rational s = 0;
        for (int j = 0; j <= m; ++j) s += Rational(binom(m + 1, j)) * B(j);
        CHECK(s == 0);
    }
    CHECK_THROWS_AS(bernoulli(3), DomainError);
}

TEST_CASE("up-down numbers against brute-force enumeration") {
    CHECK(updown(0) == 1);
    CHECK(updown(4) == 5);
    CHECK(updown(5) == 16);
    for (int k = 1; k <= 10; ++k) CHECK(updown(k) == count_alternating(k));
    CHECK(updown(20) == BigInt("370371188237525"));
}

TEST_CASE("divisor functions") {
    auto d = divisor_count_table(2000);
    for (i64 n = 1; n <= 2000; ++n) {
        std::uint32_t cnt = 0;
        BigInt s1 = 0;
        for (i64 k = 1; k <= n; ++k)
            if (n % k == 0) ++cnt, s1 += k;
        CHECK(d[std::size_t(n)] == cnt);
        CHECK(divisor_sigma(0, n) == cnt);
        CHECK(divisor_sigma(1, n) == s1);
    }
    CHECK(divisor_sigma(2, 12) == 1 + 4 + 9 + 16 + 36 + 144);
}

TEST_CASE("reduce and fractions") {
    CHECK(reduce(2, 4) == std::pair{ReducedFraction{1, 2}, i64(2)});
    CHECK(reduce(3, 4) == std::pair{ReducedFraction{3, 4}, i64(1)});
    CHECK(reduce(6, 9) == std::pair{ReducedFraction{2, 3}, i64(3)});
    CHECK_THROWS_AS(reduce(0, 3), DomainError);
    CHECK(ReducedFraction::make(10, 4) == ReducedFraction{5, 2});
    CHECK(ReducedFraction::make(3, 9).str() == "1/3");
    CHECK(ReducedFraction{1, 3} < ReducedFraction{1, 2});
    CHECK(floor_div(-7, 2) == -4);
    CHECK(pos_mod(-7, 4) == 1);
}

TEST_CASE("precision context") {
    PrecisionContext c;
    CHECK_NOTHROW(c.validate());
    c.rel_tol = 0;
    CHECK_THROWS(c.validate());
    PrecisionContext b;
    b.term_budget = 10;
    CHECK_THROWS_AS(b.require_budget(11, "x"), BudgetExhausted);
    ParseError e(7, "bad");
    CHECK(e.line == 7);
    CHECK(std::string(e.what()).find("line 7") != std::string::npos);
}
