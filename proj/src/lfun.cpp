#include "grhcot/lfun.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <boost/math/special_functions/digamma.hpp>

#include "grhcot/stepfn.hpp"

namespace grhcot {

namespace {

constexpr int kBernTerms = 12;

template <typename Real>
const std::array<Real, kBernTerms>& em_coeffs() {
    // B_{2j} / (2j)!
    static const std::array<Real, kBernTerms> c = [] {
        std::array<Real, kBernTerms> out{};
        BigInt fact = 1;
        for (int j = 1; j <= kBernTerms; ++j) {
            fact *= (2 * j - 1) * (2 * j);
            Rational q = bernoulli(2 * j) / Rational(fact);
            out[std::size_t(j - 1)] = q.convert_to<Real>();
        }
        return out;
    }();
    return c;
}

template <typename Real>
struct EmOut {
    std::complex<Real> value;
    Real last;
};

// zeta(s,a) without the pole term (N+a)^{1-s}/(s-1).
template <typename Real>
EmOut<Real> em_nopole(std::complex<Real> s, Real a, i64 N) {
    using C = std::complex<Real>;
    C sum = 0;
    C comp = 0;
    for (i64 k = 0; k < N; ++k) {
        C t = std::exp(-s * std::log(Real(k) + a));
        C y = t - comp;
        C u = sum + y;
        comp = (u - sum) - y;
        sum = u;
    }
    Real x = Real(N) + a;
    C xs = std::exp(-s * std::log(x));
    sum += xs / Real(2);
    C fac = s;
    C pw = xs / x;
    Real last = 0;
    const auto& bc = em_coeffs<Real>();
    for (int j = 1; j <= kBernTerms; ++j) {
        C term = bc[std::size_t(j - 1)] * fac * pw;
        sum += term;
        last = std::abs(term);
        fac *= (s + Real(2 * j - 1)) * (s + Real(2 * j));
        pw /= x * x;
    }
    return {sum, last};
}

template <typename Real>
i64 initial_shift(std::complex<Real> s, Real a) {
    Real need = Real(10) + std::abs(s.imag()) + std::max(Real(0), -s.real()) - a;
    return std::max<i64>(0, i64(std::ceil(double(need))));
}

// (e^z - 1)/z
Complex expm1_over(Complex z) {
    if (std::abs(z) > 0.5) return (std::exp(z) - 1.0) / z;
    Complex term = 1, sum = 1;
    for (int k = 2; k < 30; ++k) {
        term *= z / double(k);
        sum += term;
        if (std::abs(term) < 1e-18) break;
    }
    return sum;
}

}  // namespace

template <typename Real>
std::complex<Real> hurwitz_zeta(std::complex<Real> s, Real a, const PrecisionContext& ctx, i64 min_shift) {
    using C = std::complex<Real>;
    if (!(a > 0)) throw DomainError("hurwitz_zeta needs a > 0");
    if (s == C(1)) throw DomainError("hurwitz_zeta: pole at s = 1");
    i64 N = std::max(min_shift, initial_shift(s, a));
    for (;;) {
        ctx.require_budget(N, "hurwitz_zeta");
        auto out = em_nopole(s, a, N);
        Real x = Real(N) + a;
        C val = out.value + std::exp((Real(1) - s) * std::log(x)) / (s - Real(1));
        if (out.last <= Real(ctx.rel_tol) * std::abs(val) || out.last == Real(0)) return val;
        N = std::max<i64>(2 * N, 16);
    }
}

template std::complex<double> hurwitz_zeta<double>(std::complex<double>, double, const PrecisionContext&, i64);
template std::complex<long double> hurwitz_zeta<long double>(std::complex<long double>, long double,
                                                             const PrecisionContext&, i64);

Complex hurwitz_zeta(Complex s, double a, const PrecisionContext& ctx) {
    return hurwitz_zeta<double>(s, a, ctx, 0);
}

double hurwitz_zeta_diff(double s, double a, double b, const PrecisionContext& ctx) {
    if (!(s > 0)) throw DomainError("hurwitz_zeta_diff needs s > 0");
    if (s == 1.0) return boost::math::digamma(b) - boost::math::digamma(a);
    return (hurwitz_zeta<double>(Complex(s), a, ctx, 0) - hurwitz_zeta<double>(Complex(s), b, ctx, 0)).real();
}

Complex periodic_dirichlet(const std::vector<double>& c, Complex s, const PrecisionContext& ctx) {
    const i64 M = i64(c.size());
    if (M < 1) throw DomainError("empty coefficient period");
    if (s == Complex(1)) {
        double acc = 0;
        for (i64 r = 1; r <= M; ++r)
            if (double w = c[std::size_t(r % M)]) acc += w * boost::math::digamma(double(r) / double(M));
        return -acc / double(M);
    }
    i64 N = initial_shift(s, 1.0 / double(M));
    for (;;) {
        ctx.require_budget(N * M, "periodic_dirichlet");
        Complex sum = 0, pole = 0;
        double last = 0;
        const bool near1 = std::abs(s - 1.0) < 0.1;
        for (i64 r = 1; r <= M; ++r) {
            double w = c[std::size_t(r % M)];
            if (w == 0) continue;
            double a = double(r) / double(M);
            auto out = em_nopole(s, a, N);
            sum += w * out.value;
            last = std::max(last, std::abs(w) * out.last);
            double lx = std::log(double(N) + a);
            if (near1)
                pole += w * (-lx) * expm1_over((1.0 - s) * lx);
            else
                pole += w * std::exp((1.0 - s) * lx) / (s - 1.0);
        }
        const Complex ms = std::exp(-s * std::log(double(M)));
        Complex val = ms * (sum + pole);
        if (last * std::abs(ms) * double(M) <= ctx.rel_tol * std::abs(val) || last == 0) return val;
        N = std::max<i64>(2 * N, 16);
    }
}

Complex L_chi(const Discriminant& D, Complex s, const PrecisionContext& ctx) {
    const auto& t = step_table(D);
    std::vector<double> c(t.chi_values().begin(), t.chi_values().end());
    return periodic_dirichlet(c, s, ctx);
}

double L_chi(const Discriminant& D, double s, const PrecisionContext& ctx) {
    return L_chi(D, Complex(s), ctx).real();
}

Rational h_prime(const Discriminant& D, const PrecisionContext& ctx) {
    double P = double(D.modulus());
    double v = std::sqrt(P) * L_chi(D, 1.0, ctx) / std::numbers::pi;
    for (int q = 1; q <= 6; ++q) {
        double p = std::round(v * q);
        if (std::abs(v - p / q) < 1e-6) return Rational(i64(p), q);
    }
    throw PrecisionError("h_prime: value " + std::to_string(v) + " does not snap to a small rational");
}

Complex mellin_C_closed(const Discriminant& D, Complex s, const PrecisionContext& ctx) {
    return -L_chi(D, -s, ctx) * L_chi(D, s + 1.0, ctx) / (s * (s + 1.0));
}

// Fubini: int_0^1 C(x)(x^{s-1} + x^{-s-2}) dx
//   = int_0^inf S(t) t^{-2} [t^{-s} A(t) + t^{s+1} B(t)] dt,
// A(t) = int_0^t S u^{s-1}, B(t) = int_0^t S u^{-s-2}; each plateau is done in closed form.
MellinCheck mellin_C_check(const Discriminant& D, Complex s, const PrecisionContext& ctx) {
    if (!(s.real() > -1 && s.real() < 0)) throw DomainError("mellin_C_check needs -1 < Re s < 0");
    const auto& tab = step_table(D);
    const i64 P = tab.period();
    const int kmin = 5, kmax = 11;
    const i64 Tmax = i64(1) << (2 * kmax);
    ctx.require_budget(Tmax, "mellin_C_check");

    std::vector<double> Ts;
    std::vector<Complex> IT;
    Complex A = 0, B = 0, I = 0, Icomp = 0;
    const Complex s1 = s + 1.0;
    Complex a_s = 0, a_m = 0;  // a^s, a^{-s-1} at the left end
    i64 next_T = i64(1) << (2 * kmin);
    for (i64 j = 0; j < Tmax; ++j) {
        const double a = double(j), b = double(j + 1);
        const Complex b_s = std::exp(s * std::log(b));
        const Complex b_m = std::exp(-s1 * std::log(b));
        const double sig = tab.plateau(j);
        if (sig != 0) {
            const double inv = (b - a) / (a * b);
            Complex term = sig * ((A - sig * a_s / s) * (a_m - b_m) / s1 + sig / s * inv +
                                  (B + sig * a_m / s1) * (b_s - a_s) / s - sig / s1 * inv);
            Complex y = term - Icomp;
            Complex u = I + y;
            Icomp = (u - I) - y;
            I = u;
            A += sig * (b_s - a_s) / s;
            B += sig * (b_m - a_m) / (-s1);
        }
        a_s = b_s;
        a_m = b_m;
        if (j + 1 == next_T) {
            Ts.push_back(double(next_T));
            IT.push_back(I);
            next_T *= 4;
        }
    }
    (void)P;

    std::vector<Complex> ex;
    if (std::abs(s + 0.5) < 1e-6)
        ex = {0.0, s, -1.0, s - 1.0, -2.0, s - 2.0, -3.0};
    else
        ex = {0.0, s, -1.0 - s, -1.0, s - 1.0, -2.0 - s, -2.0};

    auto fit = [&](std::size_t nterm) {
        const Eigen::Index m = Eigen::Index(Ts.size());
        Eigen::MatrixXcd M(m, Eigen::Index(nterm));
        Eigen::VectorXcd rhs(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (std::size_t e = 0; e < nterm; ++e)
                M(i, Eigen::Index(e)) = std::exp(ex[e] * std::log(Ts[std::size_t(i)]));
            rhs(i) = IT[std::size_t(i)];
        }
        Eigen::VectorXd norms = M.colwise().norm();
        for (Eigen::Index e = 0; e < M.cols(); ++e) M.col(e) /= norms(e);
        Eigen::VectorXcd sol = M.colPivHouseholderQr().solve(rhs);
        return Complex(sol(0) / norms(0));
    };
    MellinCheck out;
    out.numeric = fit(7);
    out.error_estimate = std::abs(out.numeric - fit(6));
    out.closed = mellin_C_closed(D, s, ctx);
    return out;
}

MellinCheck mellin_S_check(const Discriminant& D, double a, Complex s, const PrecisionContext& ctx) {
    if (!(a > 0 && a <= 1)) throw DomainError("mellin_S_check needs 0 < a <= 1");
    if (!(s.real() > 0)) throw DomainError("mellin_S_check needs Re s > 0");
    const auto& tab = step_table(D);
    const i64 P = tab.period();
    const double sig = s.real();
    const Complex s1 = s + 1.0;
    // neglected oscillating tail: max|prim| T^{-sig-1} (1 + |s+1|/(sig+1))
    const double c = tab.max_primitive() * (1 + std::abs(s1) / (sig + 1));
    const Complex closed = std::exp(s * std::log(a)) * L_chi(D, s, ctx) / s;
    const double target = ctx.rel_tol * std::max(std::abs(closed), 1e-300);
    double T = std::pow(c / target, 1.0 / (sig + 1));
    i64 periods = std::max<i64>(1, i64(std::ceil(T / double(P))));
    ctx.require_budget(periods * P, "mellin_S_check");
    const i64 Tend = periods * P;

    Complex sum = 0, comp = 0;
    Complex prev = 1.0;  // 1^{-s}
    for (i64 j = 1; j < Tend; ++j) {
        Complex next = std::exp(-s * std::log(double(j + 1)));
        int v = tab.plateau(j);
        if (v != 0) {
            Complex y = double(v) * (prev - next) / s - comp;
            Complex u = sum + y;
            comp = (u - sum) - y;
            sum = u;
        }
        prev = next;
    }
    Complex tail = tab.mean_value() * std::exp(-s * std::log(double(Tend))) / s;
    MellinCheck out;
    out.numeric = std::exp(s * std::log(a)) * (sum + tail);
    out.closed = closed;
    out.error_estimate = std::pow(a, sig) * c * std::pow(double(Tend), -sig - 1);
    return out;
}

}  // namespace grhcot
