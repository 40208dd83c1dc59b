#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace grhcot {

using i64 = std::int64_t;
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Error categories map onto CLI exit codes 2, 3, 4.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct BudgetExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PrecisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : IoError {
    ParseError(std::size_t line, const std::string& what);
    std::size_t line;
};

struct PrecisionContext {
    double rel_tol = 1e-12;
    i64 term_budget = 400'000'000;

    void validate() const;
    void require_budget(i64 terms, const char* what) const;
};

// Nonnegative p/q in lowest terms.
struct ReducedFraction {
    i64 num = 0;
    i64 den = 1;

    static ReducedFraction make(i64 num, i64 den);
    double value() const { return double(num) / double(den); }
    long double value_ld() const { return (long double)num / (long double)den; }
    std::string str() const;

    friend bool operator==(const ReducedFraction&, const ReducedFraction&) = default;
    friend std::strong_ordering operator<=>(const ReducedFraction& a, const ReducedFraction& b);
};

class Discriminant {
public:
    explicit Discriminant(i64 D);

    i64 value() const { return D_; }
    i64 modulus() const { return -D_; }
    bool even() const { return D_ % 2 == 0; }

    static bool is_fundamental(i64 D);

    friend bool operator==(const Discriminant&, const Discriminant&) = default;

private:
    i64 D_;
};

int kronecker(i64 a, i64 n);
int chi(const Discriminant& D, i64 n);

BigInt divisor_sigma(unsigned nu, i64 n);
// d(n) for n = 0..nmax (entry 0 unused).
std::vector<std::uint32_t> divisor_count_table(i64 nmax);

Rational bernoulli(int k);
BigInt updown(int k);

std::pair<ReducedFraction, i64> reduce(i64 m, i64 n);

i64 floor_div(i64 a, i64 b);
i64 pos_mod(i64 a, i64 m);

double to_double(const Rational& r);

}  // namespace grhcot
