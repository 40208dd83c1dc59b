#include <doctest.h>

#include <cmath>
#include <numbers>

#include "grhcot/lfun.hpp"

using namespace grhcot;

namespace {
constexpr double pi = std::numbers::pi;

// direct sum to K plus the Euler-Maclaurin tail int_K^inf + f(K)/2
long double zeta_direct(long double s, long double a, i64 K) {
    long double sum = 0;
    for (i64 k = 0; k < K; ++k) sum += std::pow(k + a, -s);
    long double x = K + a;
    return sum + std::pow(x, 1 - s) / (s - 1) + 0.5L * std::pow(x, -s);
}

// sum_{n<=K} chi(n) n^{-s}, K a multiple of |D|, for Re s >= 2
Complex L_direct(const Discriminant& D, Complex s, i64 K) {
    std::complex<long double> sum = 0;
    std::complex<long double> ss(s.real(), s.imag());
    for (i64 n = 1; n <= K; ++n) {
        int c = chi(D, n);
        if (c) sum += (long double)c * std::exp(-ss * std::log((long double)n));
    }
    return {double(sum.real()), double(sum.imag())};
}
}  // namespace

TEST_CASE("Hurwitz zeta") {
    PrecisionContext ctx;
    CHECK(std::abs(hurwitz_zeta(Complex(2, 0), 1.0, ctx) - pi * pi / 6) < 1e-14);
    CHECK(std::abs(hurwitz_zeta(Complex(2, 0), 0.5, ctx).real() - double(zeta_direct(2, 0.5L, 1000000))) < 1e-12);
    CHECK(std::abs(hurwitz_zeta(Complex(2, 0), 0.5, ctx) - pi * pi / 2) < 1e-13);
    for (double a : {0.1, 0.25, 0.7, 1.0})
        for (double s : {1.5, 3.0, 4.5})
            CHECK(std::abs(hurwitz_zeta(Complex(s, 0), a, ctx).real() - double(zeta_direct(s, a, 200000))) <
                  1e-11 * std::abs(double(zeta_direct(s, a, 200000))));
    // two working precisions agree on the critical line
    auto d = hurwitz_zeta(Complex(0.5, 14), 0.25, ctx);
    PrecisionContext tight;
    tight.rel_tol = 1e-15;
    auto ld = hurwitz_zeta(std::complex<long double>(0.5L, 14.0L), 0.25L, tight, 200);
    CHECK(std::abs(d.real() - double(ld.real())) < 1e-11);
    CHECK(std::abs(d.imag() - double(ld.imag())) < 1e-11);
    CHECK(hurwitz_zeta_diff(1.0, 0.25, 0.75, ctx) == doctest::Approx(pi).epsilon(1e-13));
}

TEST_CASE("Dirichlet L-values") {
    PrecisionContext ctx;
    Discriminant D4(-4), D3(-3);
    CHECK(L_chi(D4, 1.0, ctx) == doctest::Approx(pi / 4).epsilon(1e-14));
    CHECK(L_chi(D4, 3.0, ctx) == doctest::Approx(pi * pi * pi / 32).epsilon(1e-14));
    CHECK(L_chi(D3, 1.0, ctx) == doctest::Approx(pi / (3 * std::sqrt(3.0))).epsilon(1e-14));
    CHECK(L_chi(D4, 2.0, ctx) == doctest::Approx(0.915965594177219015).epsilon(1e-14));
    int k = 0;
    for (i64 d : {-3, -4, -7, -8})
        for (double re : {2.0, 2.5, 3.5})
            for (double im : {0.0, 5.0, -12.0}) {
                if (++k > 20) break;
                Discriminant D(d);
                Complex s(re, im);
                i64 K = (-d) * 200000;
                Complex want = L_direct(D, s, K);
                CHECK(std::abs(L_chi(D, s, ctx) - want) < 1e-10);
            }
}

TEST_CASE("h' and L(1)") {
    PrecisionContext ctx;
    CHECK(h_prime(Discriminant(-4), ctx) == Rational(1, 2));
    CHECK(h_prime(Discriminant(-3), ctx) == Rational(1, 3));
    CHECK(h_prime(Discriminant(-7), ctx) == 1);
    CHECK(h_prime(Discriminant(-23), ctx) == 3);
    for (i64 d : {-3, -4, -7, -8, -11, -15}) {
        Discriminant D(d);
        double lhs = to_double(h_prime(D, ctx)) * pi / std::sqrt(double(-d));
        CHECK(std::abs(lhs - L_chi(D, 1.0, ctx)) < 1e-10);
    }
}

TEST_CASE("Mellin transform of C") {
    PrecisionContext ctx;
    Discriminant D(-4);
    auto m = mellin_C_check(D, Complex(-0.5, 0), ctx);
    double L12 = L_chi(D, 0.5, ctx);
    CHECK(std::abs(m.closed - 4 * L12 * L12) < 1e-12);
    CHECK(std::abs(m.numeric - m.closed) < 1e-6);
    auto a = mellin_C_check(D, Complex(-0.3, 0), ctx);
    auto b = mellin_C_check(D, Complex(-0.7, 0), ctx);
    CHECK(std::abs(a.closed - b.closed) < 1e-12);
    CHECK(std::abs(a.numeric - a.closed) < 1e-6);
    CHECK(std::abs(b.numeric - b.closed) < 1e-6);
    CHECK(std::abs(a.numeric - b.numeric) < 1e-6);
    for (double re : {-0.2, -0.4})
        for (double im : {0.0, 3.0, 7.5}) {
            Complex s(re, im);
            CHECK(std::abs(mellin_C_closed(D, s, ctx) - mellin_C_closed(D, -s - 1.0, ctx)) < 1e-8);
        }
    auto c = mellin_C_check(D, Complex(-0.4, 2.0), ctx);
    CHECK(std::abs(c.numeric - c.closed) < 1e-6);
    CHECK_THROWS_AS(mellin_C_check(D, Complex(0.2, 0), ctx), DomainError);
}

TEST_CASE("Mellin transform of S") {
    PrecisionContext ctx;
    Discriminant D4(-4), D3(-3);
    auto a = mellin_S_check(D4, 1.0, Complex(1, 0), ctx);
    CHECK(std::abs(a.closed - pi / 4) < 1e-14);
    CHECK(std::abs(a.numeric - pi / 4) < 1e-10);
    auto b = mellin_S_check(D4, 0.5, Complex(1, 0), ctx);
    CHECK(std::abs(b.numeric - pi / 8) < 1e-10);
    auto c = mellin_S_check(D3, 1.0, Complex(2, 0), ctx);
    CHECK(std::abs(c.numeric - c.closed) < 1e-8);
    auto e = mellin_S_check(Discriminant(-7), 0.3, Complex(1.5, 4), ctx);
    CHECK(std::abs(e.numeric - e.closed) < 1e-8);
}
