#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "grhcot/cotsum.hpp"
#include "grhcot/gram.hpp"
#include "grhcot/lfun.hpp"
#include "grhcot/maass.hpp"
#include "grhcot/qmf.hpp"

using namespace grhcot;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void run(const char* id, const char* title, const std::function<Outcome()>& f) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = f();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s %s  %s  [%s] (%.2f s)\n", id, o.pass ? "PASS" : "FAIL", title, o.detail.c_str(), sec);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::vector<Fraction> random_rationals(int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<i64> un(-80, 80), ud(1, 50);
    std::vector<Fraction> v;
    while (int(v.size()) < count) {
        i64 n = un(rng);
        if (n != 0) v.push_back(Fraction::make(n, ud(rng)));
    }
    return v;
}

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome ac1() {
    auto t0 = std::chrono::steady_clock::now();
    const long double r2 = std::sqrt(2.0L), r3 = std::sqrt(3.0L);
    const long double a = 2 - 2 * std::sqrt(2 - r2), b = 6 - 2 * std::sqrt(2 + r2);
    const long double want[4][4] = {{1, 2 - r2, 2 - r3, a}, {2 - r2, 2, r2, 4 - 2 * r2}, {2 - r3, r2, 3, b}, {a, 4 - 2 * r2, b, 4}};
    CValueCache cache;
    Discriminant D(-4);
    double worst = 0;
    for (int m = 1; m <= 4; ++m)
        for (int n = 1; n <= 4; ++n) worst = std::max(worst, rel(c_value(D, m, n, {}, cache), double(want[m - 1][n - 1])));
    double c34 = rel(eval_cot<long double>(c_selection_rule(3, 4)), double(b));
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {worst <= 1e-12 && c34 <= 1e-12 && sec < 1.0,
            "max rel err " + fmt("%.2e", worst) + ", c34 rel err " + fmt("%.2e", c34)};
}

Outcome ac2() {
    Discriminant D(-4);
    CValueCache cache;
    double worst_sel = 0, worst_ratio = 0;
    for (i64 m = 1; m <= 16; ++m)
        for (i64 n = m; n <= 16; ++n) {
            double c = c_value(D, m, n, {}, cache);
            double sel = eval_cot<long double>(c_selection_rule(m, n));
            auto h = h_exact(D, m, n);
            h += h_exact(D, n, m);
            double hs = eval_cot<long double>(h);
            worst_sel = std::max({worst_sel, rel(sel, c), rel(hs, c)});
            auto o = c_integral_oracle(D, m, n, 1e6);
            worst_ratio = std::max(worst_ratio, std::abs(o.value - c) / o.error_bound);
        }
    return {worst_sel < 1e-12 && worst_ratio <= 1.0,
            "cot routes rel " + fmt("%.2e", worst_sel) + ", integral |err|/bound max " + fmt("%.3f", worst_ratio)};
}

Outcome ac3() {
    Discriminant D(-4);
    CValueCache cache;
    auto t0 = std::chrono::steady_clock::now();
    GramSweepState<double> st(D, cache, std::max(1u, std::thread::hardware_concurrency()));
    st.extend(512, {});
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    double worst = 0;
    for (const auto& r : st.records()) worst = std::max(worst, std::abs(r.dist2 - (pi / 4) / r.R));
    double wd = 0;
    for (i64 N : {1, 64, 256}) wd = std::max(wd, std::abs(distance_direct(D, N, {}, cache) - st.records()[std::size_t(N - 1)].dist2));
    return {worst <= 1e-10 && wd <= 1e-10 && sec < 60,
            "identity " + fmt("%.2e", worst) + ", direct " + fmt("%.2e", wd) + ", sweep " + fmt("%.1f s", sec)};
}

Outcome ac4() {
    Discriminant D(-4);
    CValueCache cache;
    GramSweepState<double> st(D, cache, std::max(1u, std::thread::hardware_concurrency()));
    st.extend(2048, {});
    const auto& r = st.records();
    bool mono = true;
    std::string Rs;
    double prev = 0;
    for (i64 N : {64, 128, 256, 512, 1024, 2048}) {
        double R = r[std::size_t(N - 1)].R;
        mono = mono && R > prev;
        prev = R;
        Rs += fmt("%.3f ", R);
    }
    auto f = fit_log(r, 256, 2048);
    return {mono && f.slope >= 3.5 && f.slope <= 6.5, "R = " + Rs + "slope " + fmt("%.4f", f.slope)};
}

Outcome ac5() {
    Discriminant D(-4);
    const double h0 = pi / 8 + std::numbers::egamma / 4 + 0.25 * std::log(8 / pi);
    auto f = asymp_fit(D, AsymptoticRequest{});
    double e0 = std::abs(f.constants[0] - 0.7706809118817), e0c = std::abs(f.constants[0] - h0);
    double e2 = std::abs(f.constants[1] - 0.01713472986);
    AsymptoticRequest r;
    r.target = AsymptoticTarget::C_at_inverse_integers;
    bool lead = true;
    double worst_lead = 0;
    for (int res = 0; res < 4; ++res) {
        r.residue = res;
        auto g = asymp_fit(D, r);
        // a0 (pi/2n) = pi/(8n)
        double e = std::abs(g.constants[0] * pi / 2 - pi / 8);
        worst_lead = std::max(worst_lead, e);
        lead = lead && e <= std::max(g.uncertainties[0] * pi / 2, 1e-12);
    }
    return {e0 <= 1e-6 && e0c <= 1e-6 && e2 <= 1e-6 && lead,
            "h0+ " + fmt("%.13f", f.constants[0]) + ", h2 " + fmt("%.11f", f.constants[1]) + ", C(1/n) lead err " +
                fmt("%.1e", worst_lead)};
}

Outcome ac6() {
    Discriminant D(-4);
    double w1 = 0, w2 = 0;
    for (const auto& x : random_rationals(50, 2024)) {
        w1 = std::max(w1, std::abs(eval_H_rational(D, x) + eval_H_rational(D, x + Fraction{2, 1}) - pi / 4));
        double rhs = eval_H_rational(D, x) + std::abs(x.value()) * eval_H_rational(D, Fraction::make(x.den, x.num));
        w2 = std::max(w2, std::abs(eval_C(D, x) - rhs));
    }
    double w3 = 0;
    for (i64 d : {-3, -7}) {
        Discriminant Dd(d);
        for (const auto& x : random_rationals(50, 77)) {
            double h = eval_H_rational(Dd, x);
            w3 = std::max(w3, std::abs(h - eval_H_rational(Dd, Fraction{-x.num, x.den})));
            w3 = std::max(w3, std::abs(h - eval_H_rational(Dd, x + Fraction{-d, 1})));
        }
    }
    return {w1 <= 1e-10 && w2 <= 1e-10 && w3 <= 1e-10,
            "period-2 " + fmt("%.1e", w1) + ", C=H+|x|H(1/x) " + fmt("%.1e", w2) + ", D=-3,-7 " + fmt("%.1e", w3)};
}

Outcome ac7() {
    PrecisionContext ctx;
    Discriminant D(-4);
    double w = 0;
    for (double s : {-0.5, -0.3}) {
        auto m = mellin_C_check(D, Complex(s, 0), ctx);
        w = std::max(w, std::abs(m.numeric - m.closed));
    }
    double ws = 0;
    auto a = mellin_S_check(D, 1.0, Complex(1, 0), ctx);
    auto b = mellin_S_check(D, 0.5, Complex(1, 0), ctx);
    auto c = mellin_S_check(Discriminant(-3), 1.0, Complex(2, 0), ctx);
    for (const auto& m : {a, b, c}) ws = std::max(ws, std::abs(m.numeric - m.closed));
    return {w <= 1e-6 && ws <= 1e-8, "C-transform " + fmt("%.1e", w) + ", S-transform " + fmt("%.1e", ws)};
}

Outcome ac8() {
    Discriminant D3(-3);
    auto g = GroupElement::from_matrix(D3, 4, -3, 3, -2);
    bool ok = g.epsilon == 1;
    std::string det;
    for (auto x0 : {Fraction{1, 1}, Fraction{0, 1}, Fraction{1, 2}, Fraction{2, 5}, Fraction{-1, 1}}) {
        auto r = continuity_probe(D3, ProbeFunction::CGamma, x0, default_radii(x0, 1, 8), {}, g);
        double first = std::max(r.samples.front().osc_left, r.samples.front().osc_right);
        double last = std::max(r.samples.back().osc_left, r.samples.back().osc_right);
        bool decays = last < 0.25 * first;
        for (std::size_t i = 1; i < r.samples.size(); ++i) {
            double a = std::max(r.samples[i - 1].osc_left, r.samples[i - 1].osc_right);
            double b = std::max(r.samples[i].osc_left, r.samples[i].osc_right);
            decays = decays && b <= a * 1.05;
        }
        ok = ok && decays;
        det += x0.str() + ":" + fmt("%.1e", last) + " ";
    }
    auto h = continuity_probe(D3, ProbeFunction::H, Fraction{1, 1}, default_radii(Fraction{1, 1}, 1, 8));
    double hosc = 1e300;
    for (const auto& s : h.samples) hosc = std::min(hosc, std::max(s.osc_left, s.osc_right));
    ok = ok && hosc > 0.1;
    return {ok, "C_gamma final osc " + det + "; H at 1 min osc " + fmt("%.3f", hosc)};
}

Outcome ac9() {
    Discriminant D(-4);
    PrecisionContext ctx;
    std::vector<double> xs{-1, -0.5, 0, 0.5, 1}, ys{0.4, 0.8, 1.2, 1.6, 2.0};
    double inv = 0;
    for (const auto& r : invariance_residuals(D, xs, ys, ctx))
        inv = std::max(inv, std::max(r.residual_T, r.residual_S) / std::max(1.0, std::abs(r.u)));
    double dual = 0;
    for (double y : {0.5, 1.0, 2.0})
        for (double sg : {1.0, -1.0}) {
            Complex z(0, sg * y);
            dual = std::max(dual, std::abs(psi_series(D, z, ctx) - psi_mellin(z, 0.5, ctx)));
        }
    Complex p = psi_mellin(1.0, 0.5, ctx);
    double contour = std::max(std::abs(psi_mellin(1.0, 0.3, ctx) - p), std::abs(psi_mellin(1.0, 0.7, ctx) - p));
    CValueCache cache;
    auto a = psi_from_C_check(Complex(0, 1), 2048, ctx, cache);
    auto b = psi_from_C_check(Complex(1, 1), 2048, ctx, cache);
    double ratio = std::abs(a.ratio - b.ratio) / std::abs(a.ratio);
    return {inv <= 1e-10 && dual <= 1e-8 && contour <= 1e-8 && ratio <= 1e-4,
            "invariance " + fmt("%.1e", inv) + ", series/Mellin " + fmt("%.1e", dual) + ", contour " + fmt("%.1e", contour) +
                ", ratio spread " + fmt("%.1e", ratio) + " (ratio " + fmt("%.8f", a.ratio.real()) + ")"};
}

Outcome ac10() {
    namespace fs = std::filesystem;
    const std::string cli = GRHCOT_CLI_PATH;
    const fs::path dir = fs::current_path() / "ac10";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cache = (dir / "cache.csv").string();
    unsigned maxt = std::max(4u, std::thread::hardware_concurrency());
    auto cmd = [&](unsigned threads, const std::string& out) {
        return "\"" + cli + "\" sweep --max-N 256 --cache \"" + cache + "\" --threads " + std::to_string(threads) +
               " --out \"" + (dir / out).string() + "\"";
    };
    int r1 = std::system(cmd(1, "cold.csv").c_str());
    bool warm = fs::exists(cache);
    int r2 = std::system(cmd(maxt, "warm.csv").c_str());
    std::string a = slurp((dir / "cold.csv").string()), b = slurp((dir / "warm.csv").string());
    bool same = !a.empty() && a == b;
    return {r1 == 0 && r2 == 0 && warm && same,
            "cold/1 thread vs warm/" + std::to_string(maxt) + " threads: " + (same ? "identical" : "different") + ", " +
                std::to_string(a.size()) + " bytes"};
}

}  // namespace

int main() {
    run("AC1", "exact anchors", ac1);
    run("AC2", "triple-oracle equivalence m,n<=16", ac2);
    run("AC3", "distance identity to N=512", ac3);
    run("AC4", "R(N) trend to N=2048", ac4);
    run("AC5", "asymptotic constants", ac5);
    run("AC6", "functional identities", ac6);
    run("AC7", "Mellin checks", ac7);
    run("AC8", "cocycle continuity", ac8);
    run("AC9", "Maass verification", ac9);
    run("AC10", "sweep determinism", ac10);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
