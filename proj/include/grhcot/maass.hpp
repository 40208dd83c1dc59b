#pragma once

#include <complex>
#include <vector>

#include "grhcot/cotsum.hpp"
#include "grhcot/lfun.hpp"
#include "grhcot/numkernel.hpp"

namespace grhcot {

struct UpperHalfPoint {
    double x = 0;
    double y = 1;

    UpperHalfPoint(double x_, double y_);
    Complex z() const { return {x, y}; }
    static UpperHalfPoint from(Complex z) { return {z.real(), z.imag()}; }
};

Complex gamma_complex(Complex s);

double bessel_K0(double t, const PrecisionContext& ctx = {});

// sqrt(y) sum chi(n) d(n) K0(2 pi n y/|D|) sin(2 pi n x/|D|)
double eval_u(const Discriminant& D, const UpperHalfPoint& z, const PrecisionContext& ctx = {});

// sum chi(n) d(n) e^{+-2 pi i n z/|D|}, sign following Im z
Complex eval_f(const Discriminant& D, Complex z, const PrecisionContext& ctx = {});

Complex psi_series(const Discriminant& D, Complex z, const PrecisionContext& ctx = {});

// D = -4: (1/2 pi i) int_{Re s = c} Gamma(s) L(s)^2 / ((pi/2)^s cos(pi s/2)) z^{-s} ds
Complex psi_mellin(Complex z, double c = 0.5, const PrecisionContext& ctx = {});

struct PsiFromC {
    Complex lhs, rhs, ratio;
};

// D = -4: psi(z) against z int_{-inf}^0 C(t)/(t - z)^3 dt, folded onto (0,1] and
// sampled on the grid j/M with exact C(j/M).
PsiFromC psi_from_C_check(Complex z, i64 M = 2048, const PrecisionContext& ctx = {},
                          CValueCache& cache = default_cache());

// |d/dx + i d/dy| psi_mellin at z0 by central differences of width h
double holomorphy_residual(Complex z0, double h, double c = 0.5, const PrecisionContext& ctx = {});

struct InvarianceRow {
    double x, y;
    double u;
    double residual_T;  // |u(z + u_step) - eps(T) u(z)|
    double residual_S;  // |u(-1/z) + u(z)|
};

std::vector<InvarianceRow> invariance_residuals(const Discriminant& D, const std::vector<double>& xs,
                                                const std::vector<double>& ys, const PrecisionContext& ctx = {});

}  // namespace grhcot
