#include "grhcot/qmf.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "grhcot/lfun.hpp"
#include "grhcot/stepfn.hpp"

namespace grhcot {

namespace {
constexpr double pi = std::numbers::pi;

i64 narrow(__int128 v) {
    if (v > __int128(INT64_MAX) || v < -__int128(INT64_MAX)) throw DomainError("rational overflow");
    return i64(v);
}

Fraction make128(__int128 num, __int128 den) {
    if (den == 0) throw DomainError("zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    __int128 a = num < 0 ? -num : num, b = den;
    while (b) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    if (a == 0) a = 1;
    return {narrow(num / a), narrow(den / a)};
}

double kahan_add(double& sum, double& comp, double x) {
    double y = x - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    return sum;
}
}  // namespace

Fraction Fraction::make(i64 num, i64 den) { return make128(num, den); }

std::string Fraction::str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Fraction operator+(const Fraction& a, const Fraction& b) {
    return make128(__int128(a.num) * b.den + __int128(b.num) * a.den, __int128(a.den) * b.den);
}
Fraction operator-(const Fraction& a, const Fraction& b) {
    return make128(__int128(a.num) * b.den - __int128(b.num) * a.den, __int128(a.den) * b.den);
}
Fraction operator*(const Fraction& a, const Fraction& b) {
    return make128(__int128(a.num) * b.num, __int128(a.den) * b.den);
}

// ---- H and C at rationals

double eval_H_rational(const Discriminant& D, const Fraction& x, const PrecisionContext& ctx) {
    ctx.validate();
    const auto& st = step_table(D);
    const i64 P = st.period();
    i64 p = pos_mod(x.num < 0 ? -x.num : x.num, P * x.den);
    if (2 * p > P * x.den) p = P * x.den - p;
    return pi / double(P * x.den) * h_value(st, p, x.den);
}

double eval_H_rational(const Discriminant& D, const ReducedFraction& x, const PrecisionContext& ctx) {
    return eval_H_rational(D, Fraction::make(x.num, x.den), ctx);
}

double eval_C(const Discriminant& D, const Fraction& x, const PrecisionContext& ctx) {
    ctx.validate();
    return C_reduced(step_table(D), x.abs());
}

namespace {

// s * int_0^T S(t) S(xt) t^{-s-1} dt + exact mean tail, x > 0
Bounded product_integral(const StepTable& st, double x, double s, const PrecisionContext& ctx) {
    ctx.validate();
    const double h = st.mean_value();
    const double dev = st.max_deviation();
    const double prim = st.max_primitive();
    const double scale = h * h * std::min(1.0, std::pow(x, s));
    const double tol = ctx.rel_tol * scale;
    double T = std::max({std::pow(2 * dev * dev / tol, 1 / s),
                         std::pow(4 * s * h * prim * (1 + 1 / x) / tol, 1 / (s + 1)),
                         std::max(1.0, 1 / x) + 1});
    const double segs = T * (1 + x);
    if (!(segs < 9e18)) throw BudgetExhausted("product integral: cutoff overflow");
    ctx.require_budget(i64(segs), "product integral");

    double t = std::max(1.0, 1 / x);
    i64 j = i64(std::floor(t));
    i64 k = i64(std::floor(x * t));
    if (double(k + 1) / x <= t) ++k;
    int va = st.plateau(j), vb = st.plateau(k);
    double sum = 0, comp = 0;
    const bool one = (s == 1.0);
    while (t < T) {
        const double na = double(j + 1), nb = double(k + 1) / x;
        const double tn = std::min({na, nb, T});
        const int w = va * vb;
        if (w != 0 && tn > t) {
            double seg = one ? (tn - t) / (t * tn) : -std::pow(t, -s) * std::expm1(-s * std::log1p((tn - t) / t));
            kahan_add(sum, comp, w * seg);
        }
        if (na <= nb) va = st.plateau(++j);
        if (nb <= na) vb = st.plateau(++k);
        t = tn;
    }
    Bounded out;
    out.value = sum + h * h * std::pow(T, -s);
    out.error_bound = dev * dev * std::pow(T, -s) + 2 * s * h * prim * std::pow(T, -s - 1) * (1 + 1 / x);
    return out;
}

}  // namespace

Bounded eval_C_quadrature(const Discriminant& D, double x, const PrecisionContext& ctx) {
    if (!std::isfinite(x)) throw DomainError("non-finite x");
    x = std::abs(x);
    if (x == 0) return {0, 0};
    return product_integral(step_table(D), x, 1.0, ctx);
}

double eval_C(const Discriminant& D, double x, const PrecisionContext& ctx) {
    return eval_C_quadrature(D, x, ctx).value;
}

// ---- J series (D = -4)

double sine_integral(double y) {
    if (y < 0) return -sine_integral(-y);
    if (y <= 4) {
        double term = y, sum = y;
        for (int k = 1; k < 60; ++k) {
            term *= -y * y / double((2 * k) * (2 * k + 1));
            double add = term / double(2 * k + 1);
            sum += add;
            if (std::abs(add) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    // continued fraction for E1(iy)
    using C = std::complex<double>;
    C b(1, y), c(1e300, 0), d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double a = -double(i) * double(i);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        C del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    h *= C(std::cos(y), -std::sin(y));
    return pi / 2 + h.imag();
}

double modified_cosine_integral(double y) {
    if (!(y > 0)) throw DomainError("J needs y > 0");
    if (y > 40) {
        // pi/2 - Si = f cos + g sin; J = (f - 1/y) cos + g sin
        const double iy2 = 1 / (y * y);
        double fm = 0, g = 0;
        double tf = 1 / y, tg = iy2;
        for (int k = 1; k < 30; ++k) {
            double nf = -tf * double((2 * k - 1) * (2 * k)) * iy2;
            double ng = (k == 1) ? tg : -tg * double((2 * k - 2) * (2 * k - 1)) * iy2;
            if (k > 1 && std::abs(nf) > std::abs(tf)) break;
            fm += nf;
            g += ng;
            tf = nf;
            tg = ng;
            if (std::abs(nf) < 1e-20 && std::abs(ng) < 1e-20) break;
        }
        return fm * std::cos(y) + g * std::sin(y);
    }
    return -std::cos(y) / y + pi / 2 - sine_integral(y);
}

SeriesValue eval_C_jseries(double x, i64 N) {
    if (N < 2) throw DomainError("J series needs N >= 2");
    x = std::abs(x);
    if (x == 0) return {0, 0, 0, 0};
    auto d = divisor_count_table(N);
    const Discriminant D(-4);
    double sum = 0, comp = 0, half = 0;
    for (i64 n = 1; n <= N; ++n) {
        int c = chi(D, n);
        if (c != 0) kahan_add(sum, comp, double(c) * double(d[std::size_t(n)]) * modified_cosine_integral(pi * double(n) * x / 2));
        if (n == N / 2) half = sum;
    }
    SeriesValue out;
    out.value = pi / 8 + x * sum;
    out.estimate = x * std::abs(sum - half);
    out.rigorous_bound = 8 / (pi * pi * x) * 2 * (std::log(double(N)) + 2) / double(N);
    out.terms = N;
    return out;
}

SeriesValue eval_C_jseries(double x, const PrecisionContext& ctx) {
    ctx.validate();
    x = std::abs(x);
    if (x == 0) return {0, 0, 0, 0};
    const double tol = ctx.rel_tol * std::max(std::abs(x) < 1 ? x : 1.0, 1e-300);
    double N = 16;
    while (16 / (pi * pi * x) * (std::log(N) + 2) / N > tol) {
        N *= 2;
        if (N > double(ctx.term_budget)) throw BudgetExhausted("J series: rigorous tail needs more terms than the budget");
    }
    return eval_C_jseries(x, i64(N));
}

// ---- H_s, C_s

double eval_Hs(const Discriminant& D, const Fraction& x, double s, const PrecisionContext& ctx) {
    if (!(s > 1)) throw DomainError("H_s needs s > 1");
    ctx.validate();
    const auto& st = step_table(D);
    const i64 M = st.period() * x.den;
    ctx.require_budget(M, "H_s period");
    std::vector<double> c(static_cast<std::size_t>(M));
    for (i64 r = 0; r < M; ++r)
        c[std::size_t(r)] = st.chi_at(r) * 0.5 * st.twice_value(r * x.num, x.den);
    return periodic_dirichlet(c, Complex(s), ctx).real();
}

double eval_Hs(const Discriminant& D, double x, double s, const PrecisionContext& ctx) {
    if (!(s > 1)) throw DomainError("H_s needs s > 1");
    ctx.validate();
    const auto& st = step_table(D);
    const double h = st.mean_value();
    const double Ls = L_chi(D, s, ctx);
    const double scale = std::max(std::abs(h * Ls), 1e-3);
    const double K = std::pow(st.max_deviation() / ((s - 1) * ctx.rel_tol * scale), 1 / (s - 1));
    if (!(K < double(ctx.term_budget))) throw BudgetExhausted("H_s: tail needs more terms than the budget");
    const i64 Kn = std::max<i64>(1, i64(std::ceil(K)));
    double sum = 0, comp = 0;
    for (i64 k = 1; k <= Kn; ++k) {
        int c = st.chi_at(k);
        if (c == 0) continue;
        double kx = double(k) * x;
        double fl = std::floor(kx);
        double Sv = (fl == kx && std::abs(kx) < 9e15) ? 0.5 * st.twice_value(i64(kx), 1) : st.plateau(i64(std::fmod(std::abs(fl), double(st.period()))));
        if (x < 0 && fl != kx) Sv = st.plateau(i64(std::fmod(std::abs(std::floor(-kx)), double(st.period()))));
        kahan_add(sum, comp, c * (Sv - h) * std::pow(double(k), -s));
    }
    return h * Ls + sum;
}

double eval_Cs(const Discriminant& D, const Fraction& x, double s, const PrecisionContext& ctx) {
    if (!(s > 0)) throw DomainError("C_s needs s > 0");
    ctx.validate();
    const auto& st = step_table(D);
    const i64 p = x.num < 0 ? -x.num : x.num, q = x.den;
    if (p == 0) return 0;
    const i64 P = st.period();
    const i64 per = P * q;  // period of t -> S(t) S(pt/q)
    ctx.require_budget(P * (p + q), "C_s segments");
    std::vector<i64> u;
    for (i64 j = 0; j <= per; ++j) u.push_back(j * p);
    for (i64 k = 0; k <= P * p; ++k) u.push_back(k * q);
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    const double span = double(per) * double(p);
    double sum = 0, comp = 0;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        int w = st.plateau(u[i] / p) * st.plateau(u[i] / q);
        if (w == 0) continue;
        double a = double(u[i]) / span, b = double(u[i + 1]) / span;
        kahan_add(sum, comp, w * hurwitz_zeta_diff(s, a, b, ctx));
    }
    return std::pow(double(per), -s) * sum;
}

Bounded eval_Cs(const Discriminant& D, double x, double s, const PrecisionContext& ctx) {
    if (!(s > 0)) throw DomainError("C_s needs s > 0");
    x = std::abs(x);
    if (x == 0) return {0, 0};
    return product_integral(step_table(D), x, s, ctx);
}

// ---- T(x, eps), D = -4

double eval_T_reg(double x, double eps, const PrecisionContext& ctx) {
    if (!(eps > 0)) throw DomainError("T needs eps > 0");
    ctx.validate();
    const double q1 = -std::expm1(-eps), q2 = -std::expm1(-2 * eps);
    double sum = 0, comp = 0;
    for (i64 k = 1;; k += 2) {
        double c = (k % 4 == 1) ? 1.0 : -1.0;
        double ang = std::fmod(double(k) * x, 4.0) * pi / 2;
        kahan_add(sum, comp, c / double(k) * std::atan2(std::cos(ang), std::sinh(double(k) * eps)));
        double bound = std::exp(-double(k + 1) * eps) / (double(k + 1) * q1 * q2);
        if (bound < ctx.rel_tol * std::max(std::abs(sum), 1e-3)) break;
        ctx.require_budget(k, "T arctan series");
    }
    return 0.5 * sum;
}

double eval_T_reg_expsum(double x, double eps, const PrecisionContext& ctx) {
    if (!(eps > 0)) throw DomainError("T needs eps > 0");
    ctx.validate();
    const double q1 = -std::expm1(-eps);
    // tail <= 2 e^{-(K+1)eps} / (sqrt(K+1) (1 - e^{-eps}))
    i64 K = 16;
    while (2 * std::exp(-double(K + 1) * eps) / (std::sqrt(double(K + 1)) * q1) > ctx.rel_tol * 1e-3) {
        K *= 2;
        ctx.require_budget(K, "T exponential series");
    }
    auto d = divisor_count_table(K);
    double sum = 0, comp = 0;
    for (i64 n = 1; n <= K; n += 2) {
        double c = (n % 4 == 1) ? 1.0 : -1.0;
        double ang = std::fmod(double(n) * x, 4.0) * pi / 2;
        kahan_add(sum, comp, c * double(d[std::size_t(n)]) / double(n) * std::exp(-double(n) * eps) * std::cos(ang));
    }
    return sum;
}

double H_abel(double x, double eps, const PrecisionContext& ctx) { return pi / 8 - 2 / pi * eval_T_reg(x, eps, ctx); }

// ---- group elements

namespace {
bool congruent_pm(i64 a, i64 b, i64 c, i64 d, i64 A, i64 B, i64 Cc, i64 Dd, i64 P) {
    auto eq = [P](i64 x, i64 y) { return pos_mod(x - y, P) == 0; };
    return (eq(a, A) && eq(b, B) && eq(c, Cc) && eq(d, Dd)) || (eq(a, -A) && eq(b, -B) && eq(c, -Cc) && eq(d, -Dd));
}
}  // namespace

GroupElement GroupElement::from_matrix(const Discriminant& D, i64 a, i64 b, i64 c, i64 d) {
    if (__int128(a) * d - __int128(b) * c != 1) throw DomainError("determinant must be 1");
    const i64 P = D.modulus();
    if (pos_mod(c, P) != 0 && pos_mod(a, P) != 0) throw DomainError("matrix is not in Gamma_(D)");
    GroupElement g;
    g.a = a;
    g.b = b;
    g.c = c;
    g.d = d;
    g.D = D;
    g.provenance = Provenance::Residue;
    if (congruent_pm(a, b, c, d, 1, 0, 0, 1, P))
        g.epsilon = 1;
    else if (congruent_pm(a, b, c, d, 0, -1, 1, 0, P))
        g.epsilon = -1;
    else
        throw DomainError("epsilon is only determined for elements = +-I or +-S mod |D|; supply a generator word");
    return g;
}

GroupElement GroupElement::from_word(const Discriminant& D, std::string_view word) {
    const i64 u = translation_step(D);
    GroupElement g;
    g.D = D;
    g.provenance = Provenance::Word;
    g.word = std::string(word);
    std::string w(word);
    for (char& ch : w)
        if (ch == '*' || ch == ',') ch = ' ';
    std::istringstream in(w);
    std::string tok;
    int count = 0;
    while (in >> tok) {
        i64 A, B, Cc, Dd;
        int eps;
        if (tok == "S") {
            A = 0, B = -1, Cc = 1, Dd = 0;
            eps = -1;
        } else if (tok[0] == 'T') {
            i64 k = 1;
            if (tok.size() > 1) {
                if (tok.size() < 3 || tok[1] != '^') throw DomainError("bad word token '" + tok + "'");
                try {
                    std::size_t used = 0;
                    k = std::stoll(tok.substr(2), &used);
                    if (used != tok.size() - 2) throw std::invalid_argument("trailing");
                } catch (const std::exception&) {
                    throw DomainError("bad exponent in '" + tok + "'");
                }
            }
            A = 1, B = k * u, Cc = 0, Dd = 1;
            eps = (D.even() && (k % 2 != 0)) ? -1 : 1;
        } else {
            throw DomainError("bad word token '" + tok + "'");
        }
        i64 na = narrow(__int128(g.a) * A + __int128(g.b) * Cc), nb = narrow(__int128(g.a) * B + __int128(g.b) * Dd);
        i64 nc = narrow(__int128(g.c) * A + __int128(g.d) * Cc), nd = narrow(__int128(g.c) * B + __int128(g.d) * Dd);
        g.a = na, g.b = nb, g.c = nc, g.d = nd;
        g.epsilon *= eps;
        ++count;
    }
    if (count == 0) throw DomainError("empty generator word");
    if (!D.even()) {
        const i64 P = D.modulus();
        if (pos_mod(g.c, P) != 0 && pos_mod(g.a, P) != 0) throw DomainError("word leaves Gamma_(D)");
    }
    return g;
}

GroupElement GroupElement::operator*(const GroupElement& o) const {
    if (!(D == o.D)) throw DomainError("mixed discriminants");
    GroupElement g;
    g.D = D;
    g.a = narrow(__int128(a) * o.a + __int128(b) * o.c);
    g.b = narrow(__int128(a) * o.b + __int128(b) * o.d);
    g.c = narrow(__int128(c) * o.a + __int128(d) * o.c);
    g.d = narrow(__int128(c) * o.b + __int128(d) * o.d);
    g.epsilon = epsilon * o.epsilon;
    g.provenance = (provenance == Provenance::Word && o.provenance == Provenance::Word) ? Provenance::Word : Provenance::Residue;
    g.word = word.empty() || o.word.empty() ? std::string() : word + " " + o.word;
    return g;
}

Fraction GroupElement::act(const Fraction& x) const {
    __int128 den = __int128(c) * x.num + __int128(d) * x.den;
    if (den == 0) throw DomainError("x is the pole of the action");
    return make128(__int128(a) * x.num + __int128(b) * x.den, den);
}

Fraction GroupElement::automorphy(const Fraction& x) const {
    __int128 n = __int128(c) * x.num + __int128(d) * x.den;
    return make128(n < 0 ? -n : n, x.den);
}

double cocycle_C_gamma(const GroupElement& g, const Fraction& x, const PrecisionContext& ctx) {
    if (g.is_pole(x)) throw DomainError("x is the pole of gamma");
    const double j = g.automorphy(x).value();
    return eval_H_rational(g.D, x, ctx) - double(g.epsilon) * j * eval_H_rational(g.D, g.act(x), ctx);
}

// ---- continuity probe

std::vector<Fraction> default_radii(const Fraction& x0, int k0, int k1) {
    i64 base = 2;
    for (i64 p : {2, 3, 5, 7, 11, 13}) {
        if (x0.den % p != 0) {
            base = p;
            break;
        }
    }
    std::vector<Fraction> r;
    for (int k = k0; k <= k1; ++k) {
        i64 den = 1;
        for (int i = 0; i < k; ++i) den *= base;
        r.push_back(Fraction::make(1, den));
    }
    return r;
}

namespace {
std::pair<double, double> slope_fit(const std::vector<double>& lr, const std::vector<double>& y) {
    const Eigen::Index m = Eigen::Index(lr.size());
    if (m < 3) return {0, 0};
    Eigen::MatrixXd A(m, 2);
    Eigen::VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        A(i, 0) = lr[std::size_t(i)];
        A(i, 1) = 1;
        b(i) = y[std::size_t(i)];
    }
    Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
    return {c(0), std::sqrt((A * c - b).squaredNorm() / double(m))};
}
}  // namespace

ContinuityReport continuity_probe(const Discriminant& D, ProbeFunction f, const Fraction& x0,
                                  const std::vector<Fraction>& radii, const PrecisionContext& ctx,
                                  const std::optional<GroupElement>& gamma) {
    if (f == ProbeFunction::CGamma && !gamma) throw DomainError("C_gamma probe needs a group element");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (radii[i].num <= 0) throw DomainError("radii must be positive");
        if (i && !(radii[i].value() < radii[i - 1].value())) throw DomainError("radii must decrease");
    }
    auto eval = [&](const Fraction& x) -> double {
        switch (f) {
            case ProbeFunction::H: return eval_H_rational(D, x, ctx);
            case ProbeFunction::C: return eval_C(D, x, ctx);
            case ProbeFunction::CGamma: return cocycle_C_gamma(*gamma, x, ctx);
        }
        return 0;
    };
    i64 J = 8;
    for (i64 p : {2, 3, 5, 7, 11, 13})
        if (x0.den % p != 0) {
            J = p == 2 ? 8 : p * p;
            break;
        }
    ContinuityReport rep;
    rep.function = f;
    rep.x0 = x0;
    rep.value_at_x0 = eval(x0);
    std::vector<double> lr, sl, sr;
    for (const auto& r : radii) {
        RadiusSample s;
        s.radius = r;
        double lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
        for (i64 j = (J + 1) / 2; j <= J; ++j) {
            Fraction off = r * Fraction::make(j, J);
            for (int side = 0; side < 2; ++side) {
                Fraction x = side ? x0 + off : x0 - off;
                if (f == ProbeFunction::CGamma && gamma->is_pole(x)) continue;
                double v = eval(x);
                lo[side] = std::min(lo[side], v);
                hi[side] = std::max(hi[side], v);
                if (j == J) (side ? s.right : s.left) = v;
            }
        }
        s.osc_left = hi[0] - lo[0];
        s.osc_right = hi[1] - lo[1];
        s.slope_left = (rep.value_at_x0 - s.left) / r.value();
        s.slope_right = (s.right - rep.value_at_x0) / r.value();
        rep.samples.push_back(s);
        lr.push_back(std::log(r.value()));
        sl.push_back(s.slope_left);
        sr.push_back(s.slope_right);
    }
    std::tie(rep.log_slope_left, rep.fit_residual_left) = slope_fit(lr, sl);
    std::tie(rep.log_slope_right, rep.fit_residual_right) = slope_fit(lr, sr);
    return rep;
}

// ---- asymptotic fits

namespace {

struct FitData {
    std::vector<long double> t;  // expansion variable (n or cn+d)
    std::vector<long double> y;
};

using RowFn = std::vector<long double> (*)(long double, int);

std::vector<long double> solve_ls(const FitData& fd, RowFn row, int ncols, double* residual) {
    using Mat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    const Eigen::Index m = Eigen::Index(fd.t.size());
    if (m < ncols + 2) throw DomainError("asymp_fit: too few sample points for the expansion");
    Mat A(m, ncols);
    Vec b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        auto r = row(fd.t[std::size_t(i)], ncols);
        for (int k = 0; k < ncols; ++k) A(i, k) = r[std::size_t(k)];
        b(i) = fd.y[std::size_t(i)];
    }
    Vec norms = A.colwise().norm();
    for (int k = 0; k < ncols; ++k) A.col(k) /= norms(k);
    Vec c = A.colPivHouseholderQr().solve(b);
    if (residual) *residual = double(std::sqrt((A * c - b).squaredNorm() / (long double)m));
    std::vector<long double> out(static_cast<std::size_t>(ncols));
    for (int k = 0; k < ncols; ++k) out[std::size_t(k)] = c(k) / norms(k);
    return out;
}

// column layouts; the first entry is the log coefficient where present
std::vector<long double> row_H1(long double n, int nc) {
    std::vector<long double> r{std::log(n)};
    for (int k = 0; k + 1 < nc; ++k) r.push_back(std::pow(n, -2.0L * k));
    return r;
}
std::vector<long double> row_C1(long double n, int nc) {
    std::vector<long double> r{std::log(n) / n, 1.0L};
    for (int k = 1; int(r.size()) < nc; ++k) r.push_back(std::pow(n, -(long double)k));
    return r;
}
std::vector<long double> row_Cinv(long double n, int nc) {
    std::vector<long double> r;
    const long double z = std::numbers::pi_v<long double> / (2 * n);
    for (int k = 0; k < nc; ++k) r.push_back(std::pow(z, (long double)(k + 1)));
    return r;
}
std::vector<long double> row_Halpha(long double t, int nc) {
    std::vector<long double> r{std::log(std::abs(t))};
    for (int k = 0; k + 1 < nc; ++k) r.push_back(std::pow(t, -(long double)k));
    return r;
}

}  // namespace

AsymptoticFit asymp_fit(const Discriminant& D, const AsymptoticRequest& req, const PrecisionContext& ctx) {
    ctx.validate();
    if (req.side != 1 && req.side != -1) throw DomainError("side must be +1 or -1");
    if (req.n_min < 2 || req.n_max < 10 * req.n_min / 10 || req.n_max <= req.n_min)
        throw DomainError("n range must be increasing and start at 2 or more");
    if (req.terms < 2) throw DomainError("need at least 2 expansion terms");
    const int sd = req.side;

    auto sample = [&](i64 n_min) {
        FitData fd;
        switch (req.target) {
            case AsymptoticTarget::H_at_1:
            case AsymptoticTarget::C_at_1:
                for (i64 m = n_min; m <= req.n_max; ++m) {
                    Fraction x = req.half_integer ? Fraction::make(2 * m + 1 + 2 * sd, 2 * m + 1)
                                                  : Fraction::make(m + sd, m);
                    long double n = req.half_integer ? (long double)m + 0.5L : (long double)m;
                    double v = req.target == AsymptoticTarget::H_at_1 ? sd * eval_H_rational(D, x, ctx) : eval_C(D, x, ctx);
                    fd.t.push_back(n);
                    fd.y.push_back(v);
                }
                break;
            case AsymptoticTarget::C_at_inverse_integers:
                for (i64 m = n_min; m <= req.n_max; ++m) {
                    if (pos_mod(m, 4) != pos_mod(req.residue, 4)) continue;
                    fd.t.push_back((long double)m);
                    fd.y.push_back(eval_C(D, Fraction::make(1, m), ctx));
                }
                break;
            case AsymptoticTarget::H_at_alpha:
                if (__int128(req.a) * req.d - __int128(req.b) * req.c != 1) throw DomainError("completion must have determinant 1");
                for (i64 m = n_min; m <= req.n_max; ++m) {
                    i64 n = sd * m;
                    i64 den = req.c * n + req.d;
                    if (den == 0) continue;
                    fd.t.push_back((long double)den);
                    fd.y.push_back(eval_H_rational(D, Fraction::make(req.a * n + req.b, den), ctx));
                }
                break;
        }
        return fd;
    };

    RowFn row = nullptr;
    bool has_log = true;
    std::vector<std::string> labels;
    int nc = req.terms;
    switch (req.target) {
        case AsymptoticTarget::H_at_1:
            row = row_H1;
            nc = req.terms + 1;
            for (int k = 0; k < req.terms; ++k) labels.push_back("h" + std::to_string(2 * k));
            break;
        case AsymptoticTarget::C_at_1:
            row = row_C1;
            nc = req.terms + 1;
            for (int k = 0; k < req.terms; ++k) labels.push_back("c" + std::to_string(k));
            break;
        case AsymptoticTarget::C_at_inverse_integers:
            row = row_Cinv;
            has_log = false;
            for (int k = 0; k < req.terms; ++k) labels.push_back("a" + std::to_string(k));
            break;
        case AsymptoticTarget::H_at_alpha:
            row = row_Halpha;
            nc = req.terms + 1;
            for (int k = 0; k < req.terms; ++k) labels.push_back("h" + std::to_string(k));
            break;
    }

    FitData full = sample(req.n_min);
    double resid = 0;
    auto best = solve_ls(full, row, nc, &resid);
    auto fewer = solve_ls(full, row, nc - 1, nullptr);
    FitData shifted = sample(std::min(2 * req.n_min, (req.n_min + req.n_max) / 2));
    std::vector<long double> alt;
    try {
        alt = solve_ls(shifted, row, nc, nullptr);
    } catch (const DomainError&) {
        alt = best;
    }

    AsymptoticFit fit;
    fit.target = req.target;
    fit.side = sd;
    fit.half_integer = req.half_integer;
    if (req.target == AsymptoticTarget::H_at_alpha) fit.alpha = Fraction::make(req.a, req.c);
    fit.residual = resid;
    fit.labels = labels;
    const int off = has_log ? 1 : 0;
    auto unc = [&](int k) {
        long double u = std::abs(best[std::size_t(k)] - alt[std::size_t(k)]);
        if (k < nc - 1) u = std::max(u, std::abs(best[std::size_t(k)] - fewer[std::size_t(k)]));
        return double(u);
    };
    if (has_log) {
        fit.log_coefficient = double(best[0]);
        fit.log_uncertainty = unc(0);
    }
    for (int k = off; k < nc; ++k) {
        fit.constants.push_back(double(best[std::size_t(k)]));
        fit.uncertainties.push_back(unc(k));
    }
    return fit;
}

std::string to_string(AsymptoticTarget t) {
    switch (t) {
        case AsymptoticTarget::H_at_1: return "H_at_1";
        case AsymptoticTarget::C_at_1: return "C_at_1";
        case AsymptoticTarget::C_at_inverse_integers: return "C_at_inverse_integers";
        case AsymptoticTarget::H_at_alpha: return "H_at_alpha";
    }
    return "?";
}

std::string to_string(ProbeFunction f) {
    switch (f) {
        case ProbeFunction::H: return "H";
        case ProbeFunction::C: return "C";
        case ProbeFunction::CGamma: return "C_gamma";
    }
    return "?";
}

}  // namespace grhcot
