#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <memory>
#include <numbers>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "grhcot/numkernel.hpp"
#include "grhcot/stepfn.hpp"

namespace grhcot {

// cot(pi p/q) for 0 < p/q < 1, small-angle forms on both halves.
template <typename Scalar = double>
Scalar cot_pi(i64 p, i64 q) {
    const Scalar pi = std::numbers::pi_v<Scalar>;
    p = pos_mod(p, q);
    if (p == 0) throw DomainError("cot pole");
    if (2 * p == q) return Scalar(0);
    if (2 * p > q) return -cot_pi<Scalar>(q - p, q);
    if (4 * p <= q) return Scalar(1) / std::tan(pi * Scalar(p) / Scalar(q));
    return std::tan(pi * Scalar(q - 2 * p) / Scalar(2 * q));
}

struct CotTerm {
    Rational coeff;
    ReducedFraction angle;
};

// sum coeff * cot(pi * angle); angles kept in (0, 1/2], sorted, merged.
class CotangentExpression {
public:
    void add(const Rational& coeff, ReducedFraction angle);
    const std::vector<CotTerm>& terms() const { return terms_; }
    std::size_t half_integral_count() const;
    std::string str() const;

    CotangentExpression& operator+=(const CotangentExpression& o);

private:
    std::vector<CotTerm> terms_;
};

CotangentExpression h_exact(const Discriminant& D, i64 m, i64 n);
CotangentExpression c_selection_rule(i64 m, i64 n);

template <typename Scalar = double>
Scalar eval_cot(const CotangentExpression& e, const PrecisionContext& ctx = {}) {
    ctx.validate();
    Scalar s = 0;
    for (const auto& t : e.terms())
        s += t.coeff.template convert_to<Scalar>() * cot_pi<Scalar>(t.angle.num, t.angle.den);
    return s;
}

// Floating h_{m,n} through a cached cot table.
double h_value(const StepTable& st, i64 m, i64 n);
// C(p/q) = pi/(|D| q) (h_{p,q} + h_{q,p}); C(0) = 0.
double C_reduced(const StepTable& st, const ReducedFraction& x);

class CValueCache {
public:
    struct Key {
        i64 D, p, q;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept;
    };
    struct Stats {
        std::uint64_t hits = 0, misses = 0;
    };

    std::optional<double> find(i64 D, const ReducedFraction& x) const;
    void insert(i64 D, const ReducedFraction& x, double C);
    void insert_batch(i64 D, const std::vector<std::pair<ReducedFraction, double>>& vals);
    // C(p/q) for p <= q
    double get(const StepTable& st, const ReducedFraction& x);

    std::size_t size() const;
    Stats stats() const { return {hits_.load(), misses_.load()}; }
    void clear();

    void load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;
    void read(std::istream& in);
    void write(std::ostream& out) const;

private:
    mutable std::shared_mutex mu_;
    std::unordered_map<Key, double, KeyHash> map_;
    mutable std::atomic<std::uint64_t> hits_{0}, misses_{0};
};

CValueCache& default_cache();

double c_value(const Discriminant& D, i64 m, i64 n, const PrecisionContext& ctx, CValueCache& cache);
double c_value(const Discriminant& D, i64 m, i64 n, const PrecisionContext& ctx = {});

struct Bounded {
    double value = 0;
    double error_bound = 0;
};

// (|D|/pi) int_0^T S(mt) S(nt) dt / t^2 plus the bound max(S)^2 (|D|/pi) / T
Bounded c_integral_oracle(const Discriminant& D, i64 m, i64 n, double T);

}  // namespace grhcot
