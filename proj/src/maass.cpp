#include "grhcot/maass.hpp"

#include <cmath>
#include <numbers>

#include "grhcot/qmf.hpp"
#include "grhcot/stepfn.hpp"

namespace grhcot {

namespace {
constexpr double pi = std::numbers::pi;
}

UpperHalfPoint::UpperHalfPoint(double x_, double y_) : x(x_), y(y_) {
    if (!(y > 0) || !std::isfinite(x) || !std::isfinite(y)) throw DomainError("point must lie in the upper half plane");
}

Complex gamma_complex(Complex s) {
    if (s.imag() == 0 && s.real() <= 0 && s.real() == std::floor(s.real())) throw DomainError("Gamma pole");
    Complex w = s, prod = 1;
    while (w.real() < 12) {
        prod *= w;
        w += 1.0;
    }
    // Stirling with 10 corrections
    static const double c[10] = {1.0 / 12, -1.0 / 360, 1.0 / 1260, -1.0 / 1680, 1.0 / 1188,
                                 -691.0 / 360360, 1.0 / 156, -3617.0 / 122400, 43867.0 / 244188, -174611.0 / 125400};
    Complex iw = 1.0 / w, iw2 = iw * iw, corr = 0, pw = iw;
    for (double ck : c) {
        corr += ck * pw;
        pw *= iw2;
    }
    Complex lg = (w - 0.5) * std::log(w) - w + 0.5 * std::log(2 * pi) + corr;
    return std::exp(lg) / prod;
}

double bessel_K0(double t, const PrecisionContext& ctx) {
    if (!(t > 0)) throw DomainError("K0 needs t > 0");
    ctx.validate();
    const double tol = std::max(ctx.rel_tol, 1e-16);
    if (t <= 2) {
        const double q = t * t / 4;
        double term = 1, I0 = 1, S = 0, Hk = 0;
        for (int k = 1; k < 60; ++k) {
            term *= q / (double(k) * double(k));
            Hk += 1.0 / k;
            I0 += term;
            S += term * Hk;
            if (term * Hk < 1e-18 * S) break;
        }
        return -(std::log(t / 2) + std::numbers::egamma) * I0 + S;
    }
    // asymptotic series, used when its smallest term meets the tolerance
    {
        double term = 1, sum = 1, prev = 1;
        for (int k = 1; k < 200; ++k) {
            double next = -term * double((2 * k - 1) * (2 * k - 1)) / (double(k) * 8 * t);
            if (std::abs(next) > std::abs(prev)) break;
            if (std::abs(next) < tol * 0.1) {
                return std::sqrt(pi / (2 * t)) * std::exp(-t) * sum;
            }
            sum += next;
            prev = term = next;
        }
    }
    // e^t K0(t) = int_0^inf exp(-t (cosh u - 1)) du, trapezoid rule
    const double umax = std::acosh(1 + 45 / t);
    auto trap = [&](double h) {
        double s = 0.5;
        for (double u = h; u <= umax; u += h) s += std::exp(-t * (std::cosh(u) - 1));
        return s * h;
    };
    return std::exp(-t) * trap(0.05);
}

namespace {
i64 series_terms(const Discriminant& D, double y, const PrecisionContext& ctx, const char* what) {
    const double rate = 2 * pi * std::abs(y) / double(D.modulus());
    const double need = (std::log(1 / ctx.rel_tol) + 12) / rate;
    if (!(need < double(ctx.term_budget))) throw BudgetExhausted(std::string(what) + ": Im z too small for the term budget");
    return i64(need) + 8;
}
}  // namespace

double eval_u(const Discriminant& D, const UpperHalfPoint& z, const PrecisionContext& ctx) {
    ctx.validate();
    const auto& st = step_table(D);
    const double P = double(st.period());
    const i64 N = series_terms(D, z.y, ctx, "eval_u");
    auto d = divisor_count_table(N);
    double sum = 0;
    for (i64 n = 1; n <= N; ++n) {
        int c = st.chi_at(n);
        if (c == 0) continue;
        double ph = std::fmod(double(n) * z.x, P) / P;
        sum += c * double(d[std::size_t(n)]) * bessel_K0(2 * pi * double(n) * z.y / P, ctx) * std::sin(2 * pi * ph);
    }
    return std::sqrt(z.y) * sum;
}

Complex eval_f(const Discriminant& D, Complex z, const PrecisionContext& ctx) {
    ctx.validate();
    if (z.imag() == 0) throw DomainError("f needs Im z != 0");
    const auto& st = step_table(D);
    const double P = double(st.period());
    const i64 N = series_terms(D, z.imag(), ctx, "eval_f");
    auto d = divisor_count_table(N);
    const double sg = z.imag() > 0 ? 1.0 : -1.0;
    Complex sum = 0;
    for (i64 n = 1; n <= N; ++n) {
        int c = st.chi_at(n);
        if (c == 0) continue;
        double ph = 2 * pi * std::fmod(double(n) * z.real(), P) / P;
        double mag = std::exp(-2 * pi * double(n) * std::abs(z.imag()) / P);
        sum += double(c) * double(d[std::size_t(n)]) * mag * Complex(std::cos(ph), sg * std::sin(ph));
    }
    return sum;
}

Complex psi_series(const Discriminant& D, Complex z, const PrecisionContext& ctx) {
    if (z.imag() == 0) throw DomainError("psi_series needs Im z != 0");
    return eval_f(D, z, ctx) + eval_f(D, -1.0 / z, ctx) / z;
}

Complex psi_mellin(Complex z, double c, const PrecisionContext& ctx) {
    ctx.validate();
    if (!(c > 0 && c < 1)) throw DomainError("psi_mellin needs 0 < c < 1");
    if (z == Complex(0) || (z.imag() == 0 && z.real() < 0)) throw DomainError("z must avoid (-inf, 0]");
    const double arg = std::abs(std::arg(z));
    const double decay = pi - arg;
    const double lt = std::log(1 / ctx.rel_tol);
    const double T = (lt + 12) / decay + 4;
    const double h = 2 * pi * std::min(c, 1 - c) / (lt + 8);
    const i64 nodes = i64(2 * T / h) + 1;
    if (!(decay > 0) || !(double(nodes) < double(ctx.term_budget))) throw BudgetExhausted("psi_mellin: |arg z| too close to pi");
    const Discriminant D(-4);
    const Complex logz = std::log(z);
    PrecisionContext inner = ctx;
    inner.rel_tol = std::max(ctx.rel_tol * 1e-2, 1e-15);
    auto F = [&](double t) {
        Complex s(c, t);
        Complex L = L_chi(D, s, inner);
        Complex G = gamma_complex(s) * L * L / (std::exp(s * std::log(pi / 2)) * std::cos(pi * s / 2.0));
        return G * std::exp(-s * logz);
    };
    Complex sum = F(0);
    for (i64 k = 1; double(k) * h <= T; ++k) sum += F(double(k) * h) + F(-double(k) * h);
    return sum * h / (2 * pi);
}

PsiFromC psi_from_C_check(Complex z, i64 M, const PrecisionContext& ctx, CValueCache& cache) {
    if (z.imag() == 0) throw DomainError("psi_from_C_check needs Im z != 0");
    if (M < 2) throw DomainError("grid needs M >= 2");
    ctx.require_budget(M * M, "psi_from_C_check grid");
    const Discriminant D(-4);
    const auto& st = step_table(D);
    // -z int_0^1 C(v) [(v+z)^{-3} + (1+zv)^{-3}] dv
    Complex sum = 0;
    for (i64 j = 1; j <= M; ++j) {
        auto f = reduce(j, M).first;
        double C = cache.get(st, f);
        double v = double(j) / double(M);
        Complex k = std::pow(v + z, -3.0) + std::pow(1.0 + z * v, -3.0);
        sum += (j == M ? 0.5 : 1.0) * C * k;
    }
    PsiFromC out;
    out.rhs = -z * sum / double(M);
    out.lhs = psi_series(D, z, ctx);
    out.ratio = out.lhs / out.rhs;
    return out;
}

double holomorphy_residual(Complex z0, double h, double c, const PrecisionContext& ctx) {
    const Complex I(0, 1);
    Complex dx = (psi_mellin(z0 + h, c, ctx) - psi_mellin(z0 - h, c, ctx)) / (2 * h);
    Complex dy = (psi_mellin(z0 + I * h, c, ctx) - psi_mellin(z0 - I * h, c, ctx)) / (2 * h);
    return std::abs(dx + I * dy);
}

std::vector<InvarianceRow> invariance_residuals(const Discriminant& D, const std::vector<double>& xs,
                                                const std::vector<double>& ys, const PrecisionContext& ctx) {
    const double step = double(GroupElement::translation_step(D));
    const double epsT = D.even() ? -1.0 : 1.0;
    std::vector<InvarianceRow> rows;
    for (double y : ys) {
        for (double x : xs) {
            UpperHalfPoint z(x, y);
            double u = eval_u(D, z, ctx);
            double uT = eval_u(D, UpperHalfPoint(x + step, y), ctx);
            Complex w = -1.0 / z.z();
            double uS = eval_u(D, UpperHalfPoint::from(w), ctx);
            rows.push_back({x, y, u, std::abs(uT - epsT * u), std::abs(uS + u)});
        }
    }
    return rows;
}

}  // namespace grhcot
