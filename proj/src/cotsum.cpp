#include "grhcot/cotsum.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <tuple>

#include <boost/math/special_functions/digamma.hpp>

namespace grhcot {

void CotangentExpression::add(const Rational& coeff, ReducedFraction angle) {
    if (coeff == 0) return;
    angle.num = pos_mod(angle.num, angle.den);
    if (angle.num == 0) throw DomainError("cot pole in expression");
    Rational c = coeff;
    if (2 * angle.num > angle.den) {
        angle.num = angle.den - angle.num;
        c = -c;
    }
    auto it = std::lower_bound(terms_.begin(), terms_.end(), angle,
                               [](const CotTerm& t, const ReducedFraction& a) { return t.angle < a; });
    if (it != terms_.end() && it->angle == angle) {
        it->coeff += c;
        if (it->coeff == 0) terms_.erase(it);
    } else {
        terms_.insert(it, CotTerm{c, angle});
    }
}

CotangentExpression& CotangentExpression::operator+=(const CotangentExpression& o) {
    for (const auto& t : o.terms_) add(t.coeff, t.angle);
    return *this;
}

std::size_t CotangentExpression::half_integral_count() const {
    return std::size_t(std::count_if(terms_.begin(), terms_.end(),
                                     [](const CotTerm& t) { return denominator(t.coeff) != 1; }));
}

std::string CotangentExpression::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms_) {
        Rational c = t.coeff;
        if (c < 0) {
            os << (first ? "-" : " - ");
            c = -c;
        } else if (!first) {
            os << " + ";
        }
        if (c != 1) os << c << "*";
        os << "cot(" << (t.angle.num == 1 ? "" : std::to_string(t.angle.num)) << "pi/" << t.angle.den << ")";
        first = false;
    }
    return os.str();
}

CotangentExpression h_exact(const Discriminant& D, i64 m, i64 n) {
    if (m < 1 || n < 1) throw DomainError("h_exact needs m, n >= 1");
    const auto& st = step_table(D);
    const i64 den = st.period() * n;
    CotangentExpression e;
    for (i64 k = 1; 2 * k < den; ++k) {
        int c = st.chi_at(k);
        if (c == 0) continue;
        int tw = st.twice_value(k * m, n);
        if (tw == 0) continue;
        e.add(Rational(c * tw, 2), ReducedFraction::make(k, den));
    }
    return e;
}

CotangentExpression c_selection_rule(i64 m, i64 n) {
    if (m < 1 || n < 1) throw DomainError("c_selection_rule needs m, n >= 1");
    CotangentExpression e;
    const ReducedFraction half{1, 2};
    for (i64 j = 0; 2 * j <= m; ++j) {
        for (i64 k = 0; 2 * k <= n; ++k) {
            auto a = std::max(ReducedFraction::make(4 * j + 1, 4 * m), ReducedFraction::make(4 * k + 1, 4 * n));
            auto b = std::min({ReducedFraction::make(4 * j + 3, 4 * m), ReducedFraction::make(4 * k + 3, 4 * n), half});
            if (!(a < b)) continue;
            e.add(1, a);
            if (b != half) e.add(-1, b);
        }
    }
    return e;
}

namespace {

constexpr i64 kTableMaxDen = i64(1) << 20;
constexpr std::size_t kTableBudget = std::size_t(1) << 25;

class CotTableCache {
public:
    std::shared_ptr<const std::vector<double>> get(i64 den) {
        {
            std::shared_lock lock(mu_);
            auto it = tables_.find(den);
            if (it != tables_.end()) return it->second;
        }
        auto t = std::make_shared<std::vector<double>>(std::size_t((den - 1) / 2 + 1));
        (*t)[0] = 0;
        for (i64 k = 1; 2 * k < den; ++k) (*t)[std::size_t(k)] = cot_pi<double>(k, den);
        std::unique_lock lock(mu_);
        if (stored_ + t->size() <= kTableBudget) {
            auto [it, fresh] = tables_.emplace(den, t);
            if (fresh) stored_ += t->size();
            return it->second;
        }
        return t;
    }

private:
    std::shared_mutex mu_;
    std::unordered_map<i64, std::shared_ptr<const std::vector<double>>> tables_;
    std::size_t stored_ = 0;
};

CotTableCache& cot_tables() {
    static CotTableCache c;
    return c;
}

}  // namespace

double h_value(const StepTable& st, i64 m, i64 n) {
    const i64 P = st.period();
    const i64 den = P * n;
    const i64 K = (den - 1) / 2;
    const auto& v = st.interval_values();
    const auto& ch = st.chi_values();

    // S(k m / n): integer part j (mod P) and remainder rem over n, advanced incrementally
    const i64 qstep = pos_mod(m / n, P);
    const i64 rstep = m % n;
    i64 j = 0, rem = 0, kk = 0;
    double sum = 0;

    auto step = [&]() {
        rem += rstep;
        j += qstep;
        if (rem >= n) {
            rem -= n;
            ++j;
        }
        if (j >= P) j -= P;
        if (++kk == P) kk = 0;
    };
    auto twice = [&]() {
        return rem != 0 ? 2 * v[std::size_t(j)] : v[std::size_t(j)] + v[std::size_t(j == 0 ? P - 1 : j - 1)];
    };

    if (den <= kTableMaxDen) {
        auto tab = cot_tables().get(den);
        const double* c = tab->data();
        for (i64 k = 1; k <= K; ++k) {
            step();
            int x = ch[std::size_t(kk)];
            if (x == 0) continue;
            sum += double(x * twice()) * c[k];
        }
    } else {
        for (i64 k = 1; k <= K; ++k) {
            step();
            int x = ch[std::size_t(kk)];
            if (x == 0) continue;
            sum += double(x * twice()) * cot_pi<double>(k, den);
        }
    }
    return 0.5 * sum;
}

double C_reduced(const StepTable& st, const ReducedFraction& x) {
    if (x.num == 0) return 0;
    double h = h_value(st, x.num, x.den) + h_value(st, x.den, x.num);
    return std::numbers::pi / double(st.period() * x.den) * h;
}

std::size_t CValueCache::KeyHash::operator()(const Key& k) const noexcept {
    std::uint64_t h = std::uint64_t(k.D) * 0x9E3779B97F4A7C15ull;
    h ^= std::uint64_t(k.p) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    h ^= std::uint64_t(k.q) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    return std::size_t(h);
}

std::optional<double> CValueCache::find(i64 D, const ReducedFraction& x) const {
    std::shared_lock lock(mu_);
    auto it = map_.find(Key{D, x.num, x.den});
    if (it == map_.end()) {
        ++misses_;
        return std::nullopt;
    }
    ++hits_;
    return it->second;
}

void CValueCache::insert(i64 D, const ReducedFraction& x, double C) {
    std::unique_lock lock(mu_);
    map_.insert_or_assign(Key{D, x.num, x.den}, C);
}

void CValueCache::insert_batch(i64 D, const std::vector<std::pair<ReducedFraction, double>>& vals) {
    std::unique_lock lock(mu_);
    for (const auto& [x, C] : vals) map_.insert_or_assign(Key{D, x.num, x.den}, C);
}

double CValueCache::get(const StepTable& st, const ReducedFraction& x) {
    const i64 D = st.discriminant().value();
    if (auto v = find(D, x)) return *v;
    double C = C_reduced(st, x);
    insert(D, x, C);
    return C;
}

std::size_t CValueCache::size() const {
    std::shared_lock lock(mu_);
    return map_.size();
}

void CValueCache::clear() {
    std::unique_lock lock(mu_);
    map_.clear();
    hits_ = 0;
    misses_ = 0;
}

void CValueCache::write(std::ostream& out) const {
    std::vector<std::pair<Key, double>> rows;
    {
        std::shared_lock lock(mu_);
        rows.assign(map_.begin(), map_.end());
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return std::tie(a.first.D, a.first.q, a.first.p) < std::tie(b.first.D, b.first.q, b.first.p);
    });
    char buf[64];
    for (const auto& [k, v] : rows) {
        std::snprintf(buf, sizeof buf, "%a", v);
        out << k.D << ',' << k.p << ',' << k.q << ',' << buf << '\n';
    }
}

void CValueCache::read(std::istream& in) {
    std::string line;
    std::size_t no = 0;
    std::vector<std::pair<Key, double>> rows;
    while (std::getline(in, line)) {
        ++no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        i64 f[3];
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (int i = 0; i < 3; ++i) {
            auto r = std::from_chars(p, end, f[i]);
            if (r.ec != std::errc() || r.ptr == end || *r.ptr != ',')
                throw ParseError(no, "expected D,p,q,<hex-float>");
            p = r.ptr + 1;
        }
        std::string rest(p, end);
        char* stop = nullptr;
        double v = std::strtod(rest.c_str(), &stop);
        if (rest.empty() || stop != rest.c_str() + rest.size() || !std::isfinite(v))
            throw ParseError(no, "bad value '" + rest + "'");
        if (!Discriminant::is_fundamental(f[0]))
            throw ParseError(no, "bad discriminant " + std::to_string(f[0]));
        if (f[1] < 0 || f[2] < 1 || f[1] > f[2] || std::gcd(f[1], f[2]) != 1)
            throw ParseError(no, "fraction must be reduced with 0 <= p <= q");
        rows.push_back({Key{f[0], f[1], f[2]}, v});
    }
    std::unique_lock lock(mu_);
    for (const auto& [k, v] : rows) map_.insert_or_assign(k, v);
}

void CValueCache::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open cache file " + path.string());
    read(in);
}

void CValueCache::save(const std::filesystem::path& path) const {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw IoError("cannot write cache file " + tmp.string());
        write(out);
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move cache into place: " + ec.message());
}

CValueCache& default_cache() {
    static CValueCache c;
    return c;
}

double c_value(const Discriminant& D, i64 m, i64 n, const PrecisionContext& ctx, CValueCache& cache) {
    ctx.validate();
    auto [f, g] = reduce(std::min(m, n), std::max(m, n));
    const auto& st = step_table(D);
    double C = cache.get(st, f);
    return double(g) * (double(st.period() * f.den) / std::numbers::pi) * C;
}

double c_value(const Discriminant& D, i64 m, i64 n, const PrecisionContext& ctx) {
    return c_value(D, m, n, ctx, default_cache());
}

Bounded c_integral_oracle(const Discriminant& D, i64 m, i64 n, double T) {
    if (m < 1 || n < 1) throw DomainError("c_integral_oracle needs m, n >= 1");
    if (!(T >= 1)) throw DomainError("cutoff must be >= 1");
    const auto& st = step_table(D);
    const i64 P = st.period();
    const i64 mn = m * n;
    // breakpoints of one period as integers u, t = u/(mn)
    std::vector<i64> u;
    for (i64 j = 0; j <= m * P; ++j) u.push_back(j * n);
    for (i64 k = 0; k <= n * P; ++k) u.push_back(k * m);
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());

    const i64 K = i64(std::floor(T / double(P)));
    const double base = double(K * P);
    double sum = 0, comp = 0;
    auto acc = [&](double x) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    };
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        double w = double(st.plateau(u[i] / n)) * double(st.plateau(u[i] / m));
        if (w == 0) continue;
        double a = double(u[i]) / double(mn), b = double(u[i + 1]) / double(mn);
        if (K > 0) {
            using boost::math::digamma;
            double ap = a / double(P), bp = b / double(P);
            acc(w * ((digamma(bp) - digamma(ap)) - (digamma(bp + double(K)) - digamma(ap + double(K)))) / double(P));
        }
        double a2 = a + base, b2 = std::min(b + base, T);
        if (b2 > a2) acc(w * (b2 - a2) / (a2 * b2));
    }
    const double pre = double(P) / std::numbers::pi;
    double mx = st.max_value();
    return {pre * sum, mx * mx * pre / T};
}

}  // namespace grhcot
