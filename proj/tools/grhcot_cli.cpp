#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

#include "grhcot/cotsum.hpp"
#include "grhcot/gram.hpp"
#include "grhcot/lfun.hpp"
#include "grhcot/maass.hpp"
#include "grhcot/numkernel.hpp"
#include "grhcot/qmf.hpp"
#include "grhcot/stepfn.hpp"

using namespace grhcot;
using json = nlohmann::ordered_json;

namespace {

struct RunConfig {
    i64 D = -4;
    double rel_tol = 1e-12;
    i64 budget = PrecisionContext{}.term_budget;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    std::string cache_path;
    std::string format = "csv";
    std::string out;
    std::string config_file;
    bool stats = false;
    bool rel_tol_given = false;

    PrecisionContext ctx() const {
        PrecisionContext c;
        c.rel_tol = rel_tol;
        c.term_budget = budget;
        c.validate();
        return c;
    }
    // real-argument quadratures run at 1e-7 unless a tolerance was asked for
    PrecisionContext real_ctx() const {
        auto c = ctx();
        if (!rel_tol_given) c.rel_tol = 1e-7;
        return c;
    }
};

RunConfig cfg;
CValueCache cache;
bool cache_dirty = false;
i64 ratio_grid = 2048;

json config_json() {
    json j;
    j["discriminant"] = cfg.D;
    j["rel_tol"] = cfg.rel_tol;
    j["term_budget"] = cfg.budget;
    j["threads"] = cfg.threads;
    j["cache"] = cfg.cache_path;
    j["format"] = cfg.format;
    j["out"] = cfg.out;
    if (!cfg.config_file.empty()) {
        std::ifstream in(cfg.config_file);
        std::stringstream ss;
        ss << in.rdbuf();
        j["config_file"] = cfg.config_file;
        j["config_text"] = ss.str();
    }
    return j;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json cplx(Complex z) { return json::array({num(z.real()), num(z.imag())}); }

class Output {
public:
    Output() {
        if (!cfg.out.empty()) {
            file_.open(cfg.out, std::ios::binary | std::ios::trunc);
            if (!file_) throw IoError("cannot open " + cfg.out);
        }
    }
    std::ostream& os() { return cfg.out.empty() ? std::cout : file_; }
    void json_doc(const json& j) { os() << j.dump(2) << '\n'; }
    // metadata next to a csv: <out>.json, or stderr when writing to stdout
    static void sidecar(const json& j) {
        if (cfg.out.empty()) {
            std::cerr << j.dump() << '\n';
            return;
        }
        std::ofstream f(cfg.out + ".json", std::ios::trunc);
        if (!f) throw IoError("cannot open " + cfg.out + ".json");
        f << j.dump(2) << '\n';
    }
    void close() {
        if (file_.is_open()) {
            file_.close();
            if (!file_) throw IoError("write failed: " + cfg.out);
        }
    }

private:
    std::ofstream file_;
};

json header(const std::string& command) {
    json j;
    j["command"] = command;
    j["config"] = config_json();
    return j;
}

bool want_json() { return cfg.format == "json"; }

struct XArg {
    bool rational = false;
    Fraction q;
    double v = 0;
};

i64 parse_int(std::string_view s) {
    i64 v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw DomainError("not an integer: " + std::string(s));
    return v;
}

XArg parse_x(const std::string& s) {
    XArg x;
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        x.rational = true;
        x.q = Fraction::make(parse_int(std::string_view(s).substr(0, slash)), parse_int(std::string_view(s).substr(slash + 1)));
        x.v = x.q.value();
        return x;
    }
    if (s.find_first_of(".eE") == std::string::npos) {
        x.rational = true;
        x.q = Fraction::make(parse_int(s), 1);
        x.v = x.q.value();
        return x;
    }
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x.v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(x.v)) throw DomainError("not a number: " + s);
    return x;
}

std::vector<i64> parse_ints(const std::string& s) {
    std::vector<i64> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) v.push_back(parse_int(tok));
    return v;
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) v.push_back(tok);
    return v;
}

// ---- cmn / matrix

struct CmnOpts {
    i64 m = 1, n = 1;
    bool exact = false;
};

int cmd_cmn(const CmnOpts& o) {
    if (o.m < 1 || o.n < 1) throw DomainError("m, n must be positive");
    const Discriminant D(cfg.D);
    const auto ctx = cfg.ctx();
    double v = c_value(D, o.m, o.n, ctx, cache);
    cache_dirty = true;
    std::string expr;
    double exact_value = 0;
    if (o.exact) {
        CotangentExpression e = D.value() == -4 ? c_selection_rule(o.m, o.n) : h_exact(D, o.m, o.n);
        if (D.value() != -4) e += h_exact(D, o.n, o.m);
        expr = e.str();
        exact_value = eval_cot<long double>(e, ctx);
    }
    Output out;
    if (want_json()) {
        json j = header("cmn");
        j["m"] = o.m;
        j["n"] = o.n;
        j["value"] = num(v);
        if (o.exact) {
            j["expression"] = expr;
            j["expression_value"] = num(exact_value);
        }
        out.json_doc(j);
    } else {
        out.os() << "m,n,value" << (o.exact ? ",expression" : "") << '\n';
        out.os() << o.m << ',' << o.n << ',' << format_double(v);
        if (o.exact) out.os() << ',' << expr;
        out.os() << '\n';
    }
    out.close();
    return 0;
}

int cmd_matrix(i64 N) {
    if (N < 1) throw DomainError("N must be positive");
    const Discriminant D(cfg.D);
    Eigen::MatrixXd C = gram_matrix(D, N, cfg.ctx(), cache, cfg.threads);
    cache_dirty = true;
    Output out;
    if (want_json()) {
        json j = header("matrix");
        j["N"] = N;
        json rows = json::array();
        for (i64 m = 0; m < N; ++m) {
            json r = json::array();
            for (i64 n = 0; n < N; ++n) r.push_back(num(C(m, n)));
            rows.push_back(r);
        }
        j["matrix"] = rows;
        out.json_doc(j);
    } else {
        out.os() << "m,n,value\n";
        for (i64 m = 0; m < N; ++m)
            for (i64 n = 0; n < N; ++n) out.os() << m + 1 << ',' << n + 1 << ',' << format_double(C(m, n)) << '\n';
    }
    out.close();
    return 0;
}

// ---- sweep / fit

json fit_json(const LogFit& f, i64 from, i64 to) {
    json j;
    j["from"] = from;
    j["to"] = to;
    j["points"] = f.points;
    j["slope"] = num(f.slope);
    j["intercept"] = num(f.intercept);
    j["residual"] = num(f.residual);
    return j;
}

struct SweepOpts {
    i64 max_N = 512;
    i64 fit_from = 0, fit_to = 0;
    bool long_double = false;
    bool compensated = false;
};

int cmd_sweep(const SweepOpts& o) {
    if (o.max_N < 1) throw DomainError("--max-N must be >= 1");
    const Discriminant D(cfg.D);
    std::vector<SweepRecord> rec;
    if (o.long_double) {
        GramSweepState<long double> st(D, cache, cfg.threads, o.compensated);
        st.extend(o.max_N, cfg.ctx());
        rec = st.records();
    } else {
        GramSweepState<double> st(D, cache, cfg.threads, o.compensated);
        st.extend(o.max_N, cfg.ctx());
        rec = st.records();
    }
    cache_dirty = true;
    const i64 from = o.fit_from > 0 ? o.fit_from : std::max<i64>(1, o.max_N / 8);
    const i64 to = o.fit_to > 0 ? o.fit_to : o.max_N;
    json fit = nullptr;
    if (to > from && from >= 1 && to <= o.max_N) fit = fit_json(fit_log(rec, from, to), from, to);

    Output out;
    json meta = header("sweep");
    meta["max_N"] = o.max_N;
    meta["scalar"] = o.long_double ? "long double" : "double";
    meta["compensated"] = o.compensated;
    meta["fit"] = fit;
    if (want_json()) {
        json rows = json::array();
        for (const auto& r : rec)
            rows.push_back({{"N", r.N}, {"R", num(r.R)}, {"dist2", num(r.dist2)}, {"logdetC", num(r.logdetC)}});
        meta["records"] = rows;
        out.json_doc(meta);
    } else {
        write_sweep_csv(out.os(), rec);
        Output::sidecar(meta);
    }
    out.close();
    return 0;
}

std::vector<SweepRecord> read_sweep_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "N,R,dist2,logdetC") throw grhcot::ParseError(1, "expected header N,R,dist2,logdetC");
    std::vector<SweepRecord> rec;
    std::size_t ln = 1;
    while (std::getline(in, line)) {
        ++ln;
        if (line.empty()) continue;
        auto f = split(line);
        if (f.size() != 4) throw grhcot::ParseError(ln, "expected 4 fields");
        SweepRecord r;
        try {
            r.N = std::stoll(f[0]);
            r.R = std::stod(f[1]);
            r.dist2 = std::stod(f[2]);
            r.logdetC = std::stod(f[3]);
        } catch (const std::exception&) {
            throw grhcot::ParseError(ln, "bad number");
        }
        rec.push_back(r);
    }
    return rec;
}

int cmd_fit(const std::string& in_path, i64 from, i64 to) {
    std::vector<SweepRecord> rec;
    if (in_path == "-") {
        rec = read_sweep_csv(std::cin);
    } else {
        std::ifstream in(in_path);
        if (!in) throw IoError("cannot open " + in_path);
        rec = read_sweep_csv(in);
    }
    if (rec.empty()) throw DomainError("no sweep records");
    if (to <= 0) to = rec.back().N;
    if (from <= 0) from = std::max<i64>(1, to / 8);
    LogFit f = fit_log(rec, from, to);
    Output out;
    if (want_json()) {
        json j = header("fit");
        j["input"] = in_path;
        j["fit"] = fit_json(f, from, to);
        out.json_doc(j);
    } else {
        out.os() << "from,to,points,slope,intercept,residual\n"
                 << from << ',' << to << ',' << f.points << ',' << format_double(f.slope) << ','
                 << format_double(f.intercept) << ',' << format_double(f.residual) << '\n';
    }
    out.close();
    return 0;
}

// ---- eval

struct EvalOpts {
    std::string function = "C";
    std::string x;
    std::optional<double> s, eps;
    i64 jseries_terms = i64(1) << 22;
};

int cmd_eval(const EvalOpts& o) {
    const Discriminant D(cfg.D);
    const XArg x = parse_x(o.x);
    const auto ctx = cfg.ctx();
    const auto rctx = cfg.real_ctx();
    auto need_s = [&] {
        if (!o.s) throw DomainError(o.function + " needs --s");
        return *o.s;
    };
    json extra = json::object();
    double value = 0, bound = 0;
    std::string route;
    const std::string& f = o.function;
    if (f == "H") {
        if (o.eps) {
            value = H_abel(x.v, *o.eps, rctx);
            route = "abel";
        } else if (x.rational) {
            value = eval_H_rational(D, x.q, ctx);
            route = "exact";
        } else {
            throw DomainError("H at a decimal input needs --eps (Abel regularisation) or a rational p/q");
        }
    } else if (f == "C") {
        if (x.rational) {
            value = eval_C(D, x.q, ctx);
            route = "exact";
        } else {
            auto b = eval_C_quadrature(D, x.v, rctx);
            value = b.value;
            bound = b.error_bound;
            route = "quadrature";
            if (D.value() == -4) {
                auto js = eval_C_jseries(x.v, o.jseries_terms);
                extra["jseries_value"] = num(js.value);
                extra["jseries_estimate"] = num(js.estimate);
                extra["jseries_terms"] = js.terms;
                extra["route_difference"] = num(std::abs(js.value - value));
            }
        }
    } else if (f == "Hs") {
        double s = need_s();
        value = x.rational ? eval_Hs(D, x.q, s, ctx) : eval_Hs(D, x.v, s, rctx);
        route = x.rational ? "exact" : "series";
    } else if (f == "Cs") {
        double s = need_s();
        if (x.rational) {
            value = eval_Cs(D, x.q, s, ctx);
            route = "exact";
        } else {
            auto b = eval_Cs(D, x.v, s, rctx);
            value = b.value;
            bound = b.error_bound;
            route = "quadrature";
        }
    } else if (f == "T") {
        if (!o.eps) throw DomainError("T needs --eps");
        value = eval_T_reg(x.v, *o.eps, ctx);
        route = "arctan";
    } else {
        throw DomainError("unknown function " + f);
    }
    Output out;
    if (want_json()) {
        json j = header("eval");
        j["function"] = f;
        j["x"] = o.x;
        j["s"] = o.s ? json(*o.s) : json(nullptr);
        j["eps"] = o.eps ? json(*o.eps) : json(nullptr);
        j["value"] = num(value);
        j["error_bound"] = num(bound);
        j["route"] = route;
        for (auto& [k, v] : extra.items()) j[k] = v;
        out.json_doc(j);
    } else {
        out.os() << "function,x,s,eps,value,error_bound,route\n"
                 << f << ',' << o.x << ',' << (o.s ? format_double(*o.s) : "") << ','
                 << (o.eps ? format_double(*o.eps) : "") << ',' << format_double(value) << ',' << format_double(bound)
                 << ',' << route << '\n';
        if (!extra.empty()) Output::sidecar(extra);
    }
    out.close();
    return 0;
}

// ---- probe

struct ProbeOpts {
    std::string kind = "continuity";
    std::string function = "H";
    std::string x0 = "1";
    int k0 = 1, k1 = 8;
    std::string gamma, word;
    std::string target = "H_at_1";
    int side = 1;
    bool half_integer = false;
    i64 n_min = 40, n_max = 800;
    int terms = 6;
    int residue = 1;
    std::string alpha = "1,0,1,1";
    std::string check = "all";
    i64 grid_M = 2048;
};

json continuity_json(const ContinuityReport& r) {
    json j;
    j["function"] = to_string(r.function);
    j["x0"] = r.x0.str();
    j["value_at_x0"] = num(r.value_at_x0);
    json s = json::array();
    for (const auto& x : r.samples)
        s.push_back({{"radius", x.radius.str()},
                     {"left", num(x.left)},
                     {"right", num(x.right)},
                     {"osc_left", num(x.osc_left)},
                     {"osc_right", num(x.osc_right)},
                     {"slope_left", num(x.slope_left)},
                     {"slope_right", num(x.slope_right)}});
    j["samples"] = s;
    j["log_slope_left"] = num(r.log_slope_left);
    j["log_slope_right"] = num(r.log_slope_right);
    j["fit_residual_left"] = num(r.fit_residual_left);
    j["fit_residual_right"] = num(r.fit_residual_right);
    return j;
}

bool decays(const ContinuityReport& r) {
    const auto& a = r.samples.front();
    const auto& b = r.samples.back();
    return std::max(b.osc_left, b.osc_right) < 0.5 * std::max(a.osc_left, a.osc_right);
}

Fraction parse_fraction(const std::string& s) {
    XArg x = parse_x(s);
    if (!x.rational) throw DomainError("expected a rational p/q: " + s);
    return x.q;
}

AsymptoticTarget parse_target(const std::string& s) {
    for (auto t : {AsymptoticTarget::H_at_1, AsymptoticTarget::C_at_1, AsymptoticTarget::C_at_inverse_integers,
                   AsymptoticTarget::H_at_alpha})
        if (to_string(t) == s) return t;
    throw DomainError("unknown target " + s);
}

json probe_maass(const std::string& check) {
    const auto ctx = cfg.ctx();
    const Discriminant D(cfg.D);
    const Complex I(0, 1);
    json j = json::object();
    auto want = [&](const char* c) { return check == "all" || check == c; };
    bool known = false;
    if (want("invariance")) {
        known = true;
        std::vector<double> xs{-1, -0.5, 0, 0.5, 1}, ys{0.4, 0.8, 1.2, 1.6, 2.0};
        auto rows = invariance_residuals(D, xs, ys, ctx);
        json t = json::array();
        double worst = 0;
        for (const auto& r : rows) {
            t.push_back({{"x", r.x}, {"y", r.y}, {"u", num(r.u)}, {"residual_T", num(r.residual_T)},
                         {"residual_S", num(r.residual_S)}});
            worst = std::max(worst, std::max(r.residual_T, r.residual_S) / std::max(1.0, std::abs(r.u)));
        }
        j["invariance"] = {{"translation", GroupElement::translation_step(D)},
                           {"epsilon_T", D.even() ? -1 : 1},
                           {"rows", t},
                           {"max_scaled_residual", num(worst)}};
    }
    if (want("psi") || want("contour") || want("ratio") || want("holomorphy")) {
        if (cfg.D != -4 && check != "all") throw DomainError("psi checks are for D = -4");
    }
    if (cfg.D == -4) {
        if (want("psi")) {
            known = true;
            json t = json::array();
            double worst = 0;
            for (double y : {0.5, 1.0, 2.0})
                for (double sg : {1.0, -1.0}) {
                    Complex z(0, sg * y);
                    Complex a = psi_series(D, z, ctx), b = psi_mellin(z, 0.5, ctx);
                    worst = std::max(worst, std::abs(a - b));
                    t.push_back({{"z", cplx(z)}, {"series", cplx(a)}, {"mellin", cplx(b)}, {"difference", num(std::abs(a - b))}});
                }
            j["psi"] = {{"rows", t}, {"max_difference", num(worst)}};
        }
        if (want("contour")) {
            known = true;
            json t = json::array();
            Complex ref = psi_mellin(1.0, 0.5, ctx);
            double worst = 0;
            for (double c : {0.3, 0.5, 0.7}) {
                Complex v = psi_mellin(1.0, c, ctx);
                worst = std::max(worst, std::abs(v - ref));
                t.push_back({{"c", c}, {"value", cplx(v)}});
            }
            j["contour"] = {{"z", cplx(1.0)}, {"rows", t}, {"max_spread", num(worst)}};
        }
        if (want("ratio")) {
            known = true;
            json t = json::array();
            std::vector<Complex> pts{I, 1.0 + I, 1.0 - I, -0.5 + 0.8 * I};
            Complex first{};
            double worst = 0;
            for (std::size_t k = 0; k < pts.size(); ++k) {
                auto p = psi_from_C_check(pts[k], ratio_grid, ctx, cache);
                if (k == 0) first = p.ratio;
                if (pts[k].imag() > 0) worst = std::max(worst, std::abs(p.ratio - first));
                t.push_back({{"z", cplx(pts[k])}, {"lhs", cplx(p.lhs)}, {"rhs", cplx(p.rhs)}, {"ratio", cplx(p.ratio)}});
            }
            cache_dirty = true;
            j["ratio"] = {{"grid_M", ratio_grid}, {"rows", t}, {"max_spread_upper", num(worst)}};
        }
        if (want("holomorphy")) {
            known = true;
            json t = json::array();
            double worst = 0;
            for (double dx : {-0.2, 0.0, 0.2})
                for (double dy : {-0.2, 0.0, 0.2}) {
                    Complex z0(1 + dx, dy);
                    double r = holomorphy_residual(z0, 1e-3, 0.5, ctx);
                    worst = std::max(worst, r);
                    t.push_back({{"z", cplx(z0)}, {"residual", num(r)}});
                }
            j["holomorphy"] = {{"h", 1e-3}, {"rows", t}, {"max_residual", num(worst)}};
        }
    }
    if (!known) throw DomainError("unknown maass check " + check);
    return j;
}

int cmd_probe(const ProbeOpts& o) {
    const Discriminant D(cfg.D);
    const auto ctx = cfg.ctx();
    ratio_grid = o.grid_M;
    json j = header("probe");
    j["kind"] = o.kind;
    if (o.kind == "continuity") {
        ProbeFunction f;
        if (o.function == "H") f = ProbeFunction::H;
        else if (o.function == "C") f = ProbeFunction::C;
        else throw DomainError("continuity --function must be H or C");
        Fraction x0 = parse_fraction(o.x0);
        auto r = continuity_probe(D, f, x0, default_radii(x0, o.k0, o.k1), ctx);
        j["report"] = continuity_json(r);
        j["decays"] = decays(r);
    } else if (o.kind == "cocycle") {
        GroupElement g;
        if (!o.word.empty()) {
            g = GroupElement::from_word(D, o.word);
        } else {
            auto v = parse_ints(o.gamma.empty() ? "4,-3,3,-2" : o.gamma);
            if (v.size() != 4) throw DomainError("--gamma takes a,b,c,d");
            g = GroupElement::from_matrix(D, v[0], v[1], v[2], v[3]);
        }
        j["gamma"] = {g.a, g.b, g.c, g.d};
        j["epsilon"] = g.epsilon;
        j["provenance"] = g.provenance == GroupElement::Provenance::Residue ? "residue" : "word";
        json reps = json::array();
        for (const auto& s : split(o.x0 == "1" ? std::string("1,0,1/2,2/5,-1") : o.x0)) {
            Fraction x0 = parse_fraction(s);
            if (g.is_pole(x0)) throw DomainError("x0 = " + s + " is the pole of gamma");
            auto r = continuity_probe(D, ProbeFunction::CGamma, x0, default_radii(x0, o.k0, o.k1), ctx, g);
            json c = continuity_json(r);
            c["decays"] = decays(r);
            reps.push_back(c);
        }
        j["reports"] = reps;
        // contrast: H at an odd/odd rational
        auto h = continuity_probe(D, ProbeFunction::H, Fraction{1, 1}, default_radii(Fraction{1, 1}, o.k0, o.k1), ctx);
        j["contrast"] = continuity_json(h);
        j["contrast"]["decays"] = decays(h);
    } else if (o.kind == "asymp") {
        AsymptoticRequest req;
        req.target = parse_target(o.target);
        req.n_min = o.n_min;
        req.n_max = o.n_max;
        req.side = o.side;
        req.half_integer = o.half_integer;
        req.terms = o.terms;
        req.residue = o.residue;
        auto v = parse_ints(o.alpha);
        if (v.size() != 4) throw DomainError("--alpha takes a,b,c,d");
        req.a = v[0], req.b = v[1], req.c = v[2], req.d = v[3];
        auto f = asymp_fit(D, req, ctx);
        j["target"] = to_string(f.target);
        j["side"] = f.side;
        j["half_integer"] = f.half_integer;
        j["log_coefficient"] = num(f.log_coefficient);
        j["log_uncertainty"] = num(f.log_uncertainty);
        j["labels"] = f.labels;
        json c = json::array(), u = json::array();
        for (double x : f.constants) c.push_back(num(x));
        for (double x : f.uncertainties) u.push_back(num(x));
        j["coefficients"] = c;
        j["uncertainties"] = u;
        j["residual"] = num(f.residual);
    } else if (o.kind == "maass") {
        j["check"] = o.check;
        j["results"] = probe_maass(o.check);
    } else {
        throw DomainError("unknown probe kind " + o.kind);
    }
    Output out;
    out.json_doc(j);
    out.close();
    return 0;
}

// ---- cache

int cmd_cache(const std::string& action, i64 N) {
    json j = header("cache");
    j["action"] = action;
    if (action == "stats") {
        // nothing beyond the summary below
    } else if (action == "warm") {
        if (N < 1) throw DomainError("warm needs --N >= 1");
        const Discriminant D(cfg.D);
        for (i64 n = 1; n <= N; ++n) gram_column(D, n, cache, cfg.threads);
        cache_dirty = true;
        j["N"] = N;
    } else if (action == "clear") {
        cache.clear();
        cache_dirty = true;
    } else {
        throw DomainError("unknown cache action " + action);
    }
    j["entries"] = cache.size();
    j["hits"] = cache.stats().hits;
    j["misses"] = cache.stats().misses;
    Output out;
    out.json_doc(j);
    out.close();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cotangent sums, Gram sweeps and quantum modular functions"};
    app.require_subcommand(1);
    app.config_formatter(std::make_shared<CLI::ConfigINI>());
    app.set_config("--config", "", "INI file of key=value defaults; flags override")->check(CLI::ExistingFile);

    if (const char* env = std::getenv("GRHCOT_CACHE")) cfg.cache_path = env;

    app.add_option("-D,--discriminant", cfg.D, "fundamental discriminant < 0")->capture_default_str();
    app.add_option("--rel-tol", cfg.rel_tol, "relative tolerance")->capture_default_str();
    app.add_option("--budget", cfg.budget, "term budget")->capture_default_str();
    app.add_option("--threads", cfg.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--cache", cfg.cache_path, "cache file (default $GRHCOT_CACHE)");
    app.add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_option("--out", cfg.out, "output file (default stdout)");
    app.add_flag("--stats", cfg.stats, "print cache hit/miss counters to stderr");

    CmnOpts cmn;
    auto* c_cmn = app.add_subcommand("cmn", "c_{m,n}");
    c_cmn->add_option("--m", cmn.m)->required();
    c_cmn->add_option("--n", cmn.n)->required();
    c_cmn->add_flag("--exact", cmn.exact, "also print the cotangent expression");

    i64 mat_N = 4;
    auto* c_mat = app.add_subcommand("matrix", "N x N matrix of c_{m,n}");
    c_mat->add_option("--N", mat_N)->required();

    SweepOpts sw;
    auto* c_sw = app.add_subcommand("sweep", "R(N), dist2, log det for N = 1..max-N");
    c_sw->add_option("--max-N", sw.max_N)->required();
    c_sw->add_option("--fit-from", sw.fit_from, "fit window start (default max-N/8)");
    c_sw->add_option("--fit-to", sw.fit_to, "fit window end (default max-N)");
    c_sw->add_flag("--long-double", sw.long_double);
    c_sw->add_flag("--compensated", sw.compensated, "compensated dot products");

    std::string fit_in = "-";
    i64 fit_from = 0, fit_to = 0;
    auto* c_fit = app.add_subcommand("fit", "R(N) ~ a log N + b over a window of a sweep csv");
    c_fit->add_option("--in", fit_in, "sweep csv, - for stdin")->capture_default_str();
    c_fit->add_option("--from", fit_from);
    c_fit->add_option("--to", fit_to);

    EvalOpts ev;
    auto* c_ev = app.add_subcommand("eval", "H, C, Hs, Cs, T at a point");
    c_ev->add_option("--function", ev.function)->check(CLI::IsMember({"H", "C", "Hs", "Cs", "T"}))->capture_default_str();
    c_ev->add_option("--x", ev.x, "p/q or integer for the exact route, decimal for the real route")->required();
    c_ev->add_option("--s", ev.s);
    c_ev->add_option("--eps", ev.eps);
    c_ev->add_option("--jseries-terms", ev.jseries_terms)->capture_default_str();

    ProbeOpts pr;
    auto* c_pr = app.add_subcommand("probe", "continuity, asymptotic, cocycle and Maass reports (JSON)");
    c_pr->add_option("--kind", pr.kind)->check(CLI::IsMember({"continuity", "asymp", "cocycle", "maass"}))->capture_default_str();
    c_pr->add_option("--function", pr.function)->capture_default_str();
    c_pr->add_option("--x0", pr.x0, "base point(s), comma separated for cocycle")->capture_default_str();
    c_pr->add_option("--k0", pr.k0)->capture_default_str();
    c_pr->add_option("--k1", pr.k1)->capture_default_str();
    c_pr->add_option("--gamma", pr.gamma, "a,b,c,d");
    c_pr->add_option("--word", pr.word, "word in S, T, T^k");
    c_pr->add_option("--target", pr.target)->capture_default_str();
    c_pr->add_option("--side", pr.side)->check(CLI::IsMember({-1, 1}))->capture_default_str();
    c_pr->add_flag("--half-integer", pr.half_integer);
    c_pr->add_option("--n-min", pr.n_min)->capture_default_str();
    c_pr->add_option("--n-max", pr.n_max)->capture_default_str();
    c_pr->add_option("--terms", pr.terms)->capture_default_str();
    c_pr->add_option("--residue", pr.residue)->capture_default_str();
    c_pr->add_option("--alpha", pr.alpha, "a,b,c,d completing alpha = a/c")->capture_default_str();
    c_pr->add_option("--check", pr.check)
        ->check(CLI::IsMember({"all", "invariance", "psi", "contour", "ratio", "holomorphy"}))
        ->capture_default_str();
    c_pr->add_option("--grid", pr.grid_M, "grid size for the psi/C ratio")->capture_default_str();

    std::string cache_action = "stats";
    i64 warm_N = 0;
    auto* c_ca = app.add_subcommand("cache", "inspect, warm or clear the C value cache");
    c_ca->add_option("action", cache_action)->check(CLI::IsMember({"stats", "warm", "clear"}))->capture_default_str();
    c_ca->add_option("--N", warm_N);

    for (auto* sc : app.get_subcommands({})) sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int r = app.exit(e);
        return r == 0 ? 0 : 2;
    }
    cfg.rel_tol_given = app.count("--rel-tol") > 0;
    if (auto* opt = app.get_option("--config"); opt->count() > 0) cfg.config_file = opt->as<std::string>();

    try {
        if (!cfg.cache_path.empty() && std::filesystem::exists(cfg.cache_path)) cache.load(cfg.cache_path);
        Discriminant(cfg.D);
        int rc = 0;
        if (*c_cmn) rc = cmd_cmn(cmn);
        else if (*c_mat) rc = cmd_matrix(mat_N);
        else if (*c_sw) rc = cmd_sweep(sw);
        else if (*c_fit) rc = cmd_fit(fit_in, fit_from, fit_to);
        else if (*c_ev) rc = cmd_eval(ev);
        else if (*c_pr) rc = cmd_probe(pr);
        else if (*c_ca) rc = cmd_cache(cache_action, warm_N);
        if (cache_dirty && !cfg.cache_path.empty()) cache.save(cfg.cache_path);
        if (cfg.stats) {
            auto s = cache.stats();
            std::cerr << "cache entries=" << cache.size() << " hits=" << s.hits << " misses=" << s.misses << '\n';
        }
        return rc;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return 2;
    } catch (const PrecisionError& e) {
        std::cerr << "precision error: " << e.what() << '\n';
        return 3;
    } catch (const BudgetExhausted& e) {
        std::cerr << "budget exhausted: " << e.what() << '\n';
        return 3;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 4;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
