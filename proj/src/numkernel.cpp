#include "grhcot/numkernel.hpp"

#include <cmath>
#include <mutex>
#include <numeric>

namespace grhcot {

ParseError::ParseError(std::size_t line_no, const std::string& what)
    : IoError("line " + std::to_string(line_no) + ": " + what), line(line_no) {}

void PrecisionContext::validate() const {
    if (!(rel_tol > 0) || !std::isfinite(rel_tol))
        throw DomainError("rel_tol must be positive");
    if (term_budget < 1)
        throw DomainError("term_budget must be at least 1");
}

void PrecisionContext::require_budget(i64 terms, const char* what) const {
    if (terms > term_budget)
        throw BudgetExhausted(std::string(what) + ": needs " + std::to_string(terms) +
                              " terms, budget is " + std::to_string(term_budget));
}

ReducedFraction ReducedFraction::make(i64 num, i64 den) {
    if (den <= 0 || num < 0)
        throw DomainError("reduced fraction needs num >= 0 and den > 0");
    i64 g = std::gcd(num, den);
    if (g == 0) g = 1;
    return {num / g, den / g};
}

std::string ReducedFraction::str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

std::strong_ordering operator<=>(const ReducedFraction& a, const ReducedFraction& b) {
    __int128 l = (__int128)a.num * b.den, r = (__int128)b.num * a.den;
    if (l < r) return std::strong_ordering::less;
    if (l > r) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

static bool squarefree(i64 m) {
    if (m == 0) return false;
    m = m < 0 ? -m : m;
    for (i64 p = 2; p * p <= m; ++p) {
        if (m % (p * p) == 0) return false;
        if (m % p == 0) m /= p;
    }
    return true;
}

bool Discriminant::is_fundamental(i64 D) {
    if (D >= 0) return false;
    i64 r = pos_mod(D, 4);
    if (r == 1) return squarefree(D);
    if (r == 0) {
        i64 m = D / 4;
        i64 mm = pos_mod(m, 4);
        return squarefree(m) && (mm == 2 || mm == 3);
    }
    return false;
}

Discriminant::Discriminant(i64 D) : D_(D) {
    if (!is_fundamental(D))
        throw DomainError("not a negative fundamental discriminant: " + std::to_string(D));
}

i64 floor_div(i64 a, i64 b) {
    i64 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

i64 pos_mod(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

// Kronecker symbol (a/n), Cohen's algorithm 1.4.10.
int kronecker(i64 a, i64 n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    if (a % 2 == 0 && n % 2 == 0) return 0;
    int k = 1;
    int v = 0;
    while (n % 2 == 0) {
        n /= 2;
        ++v;
    }
    if (v % 2 == 1) {
        i64 r = pos_mod(a, 8);
        if (r == 3 || r == 5) k = -k;
    }
    if (n < 0) {
        n = -n;
        if (a < 0) k = -k;
    }
    a = pos_mod(a, n);
    while (a != 0) {
        v = 0;
        while (a % 2 == 0) {
            a /= 2;
            ++v;
        }
        if (v % 2 == 1) {
            i64 r = n % 8;
            if (r == 3 || r == 5) k = -k;
        }
        if ((a & n & 2) != 0) k = -k;
        i64 t = n % a;
        n = a;
        a = t;
    }
    return n == 1 ? k : 0;
}

int chi(const Discriminant& D, i64 n) { return kronecker(D.value(), n); }

BigInt divisor_sigma(unsigned nu, i64 n) {
    if (n < 1) throw DomainError("divisor_sigma needs n >= 1");
    BigInt s = 0;
    for (i64 k = 1; k * k <= n; ++k) {
        if (n % k) continue;
        s += boost::multiprecision::pow(BigInt(k), nu);
        if (k != n / k) s += boost::multiprecision::pow(BigInt(n / k), nu);
    }
    return s;
}

std::vector<std::uint32_t> divisor_count_table(i64 nmax) {
    std::vector<std::uint32_t> d(std::size_t(nmax + 1), 0);
    for (i64 k = 1; k <= nmax; ++k)
        for (i64 j = k; j <= nmax; j += k) ++d[std::size_t(j)];
    return d;
}

namespace {
std::mutex bern_mu;
std::vector<Rational> bern_cache{Rational(1)};
}  // namespace

Rational bernoulli(int k) {
    if (k < 2 || k % 2 != 0) throw DomainError("bernoulli needs an even k >= 2");
    std::lock_guard lock(bern_mu);
    auto& B = bern_cache;
    for (int m = int(B.size()); m <= k; ++m) {
        // sum_{j<m} C(m+1, j) B_j + (m+1) B_m = 0
        Rational s = 0;
        BigInt binom = 1;
        for (int j = 0; j < m; ++j) {
            s += Rational(binom) * B[std::size_t(j)];
            binom = binom * (m + 1 - j) / (j + 1);
        }
        B.push_back(-s / Rational(m + 1));
    }
    return B[std::size_t(k)];
}

// Seidel boustrophedon triangle.
BigInt updown(int k) {
    if (k < 0) throw DomainError("updown needs k >= 0");
    std::vector<BigInt> row{1};
    for (int n = 1; n <= k; ++n) {
        std::vector<BigInt> next(std::size_t(n) + 1);
        next[0] = 0;
        for (int j = 1; j <= n; ++j)
            next[std::size_t(j)] = next[std::size_t(j - 1)] + row[std::size_t(n - j)];
        row = std::move(next);
    }
    return row.back();
}

std::pair<ReducedFraction, i64> reduce(i64 m, i64 n) {
    if (m < 1 || n < 1) throw DomainError("reduce needs m, n >= 1");
    i64 g = std::gcd(m, n);
    return {ReducedFraction{m / g, n / g}, g};
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace grhcot
