#pragma once

#include <complex>
#include <vector>

#include "grhcot/numkernel.hpp"

namespace grhcot {

using Complex = std::complex<double>;

// zeta(s, a), Euler-Maclaurin with 12 Bernoulli corrections.
template <typename Real>
std::complex<Real> hurwitz_zeta(std::complex<Real> s, Real a, const PrecisionContext& ctx,
                                i64 min_shift = 0);

Complex hurwitz_zeta(Complex s, double a, const PrecisionContext& ctx);

// zeta(s,a) - zeta(s,b) for real s > 0; s == 1 goes through digamma.
double hurwitz_zeta_diff(double s, double a, double b, const PrecisionContext& ctx);

// sum_{k>=1} c(k) k^{-s} for M-periodic c (c[r] = c(r mod M)) summing to zero over a period.
Complex periodic_dirichlet(const std::vector<double>& c, Complex s, const PrecisionContext& ctx);

Complex L_chi(const Discriminant& D, Complex s, const PrecisionContext& ctx);
double L_chi(const Discriminant& D, double s, const PrecisionContext& ctx);

// sqrt|D| L(1) / pi snapped to a rational with denominator <= 6.
Rational h_prime(const Discriminant& D, const PrecisionContext& ctx);

struct MellinCheck {
    Complex numeric;
    Complex closed;
    double error_estimate = 0;
};

// int_0^inf C(x) x^{s-1} dx against -L(-s) L(s+1) / (s (s+1)), -1 < Re s < 0.
MellinCheck mellin_C_check(const Discriminant& D, Complex s, const PrecisionContext& ctx);
Complex mellin_C_closed(const Discriminant& D, Complex s, const PrecisionContext& ctx);

// int_0^inf S(a/x) x^{s-1} dx against a^s L(s) / s, Re s > 0.
MellinCheck mellin_S_check(const Discriminant& D, double a, Complex s, const PrecisionContext& ctx);

}  // namespace grhcot
