#include "grhcot/stepfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "grhcot/lfun.hpp"

namespace grhcot {

StepTable::StepTable(const Discriminant& D) : D_(D), P_(D.modulus()) {
    v_.resize(std::size_t(P_));
    chi_.resize(std::size_t(P_));
    int acc = 0;
    i64 total = 0;
    for (i64 j = 0; j < P_; ++j) {
        chi_[std::size_t(j)] = chi(D, j);
        acc += chi_[std::size_t(j)];
        v_[std::size_t(j)] = acc;
        total += acc;
    }
    mean_ = Rational(total, P_);
    mean_d_ = to_double(mean_);
    max_ = *std::max_element(v_.begin(), v_.end());
    max_dev_ = 0;
    max_prim_ = 0;
    double prim = 0;
    for (int v : v_) {
        max_dev_ = std::max(max_dev_, std::abs(v - mean_d_));
        prim += v - mean_d_;
        max_prim_ = std::max(max_prim_, std::abs(prim));
    }
    // the primitive is piecewise linear, so the extremes sit at integers
}

int StepTable::twice_value(i64 num, i64 den) const {
    i64 r = pos_mod(num, P_ * den);
    i64 j = r / den;
    if (r % den != 0) return 2 * v_[std::size_t(j)];
    return v_[std::size_t(j)] + v_[std::size_t(pos_mod(j - 1, P_))];
}

const StepTable& step_table(const Discriminant& D) {
    static std::mutex mu;
    static std::map<i64, std::unique_ptr<StepTable>> tables;
    std::lock_guard lock(mu);
    auto& slot = tables[D.value()];
    if (!slot) slot = std::make_unique<StepTable>(D);
    return *slot;
}

Rational step_S(const Discriminant& D, i64 num, i64 den) {
    if (den == 0) throw DomainError("zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    return Rational(step_table(D).twice_value(num, den), 2);
}

Rational step_S(const Discriminant& D, const ReducedFraction& x) { return step_S(D, x.num, x.den); }

int step_S(const Discriminant& D, double x) {
    if (!std::isfinite(x)) throw DomainError("non-finite argument");
    const auto& t = step_table(D);
    double ax = std::abs(x);
    double n = std::round(ax);
    double eps = std::numeric_limits<double>::epsilon() * std::max(1.0, ax) * 4;
    if (std::abs(ax - n) <= eps && t.chi_at(i64(n)) != 0)
        throw DomainError("ambiguous breakpoint");
    double y = std::fmod(ax, double(t.period()));
    return t.plateau(i64(std::floor(y)));
}

double fourier_S_partial(const Discriminant& D, double x, i64 M) {
    if (M < 1) throw DomainError("M must be positive");
    const auto& t = step_table(D);
    double P = double(t.period());
    double s = 0;
    for (i64 m = 1; m <= M; ++m) {
        int c = t.chi_at(m);
        if (c == 0) continue;
        double ph = std::fmod(double(m) * x, P) / P;
        s += c * std::cos(2 * std::numbers::pi * ph) / double(m);
    }
    return to_double(h_prime(D, PrecisionContext{})) - std::sqrt(P) / std::numbers::pi * s;
}

std::vector<ReducedFraction> breakpoints_in(const Discriminant& D, const ReducedFraction& scale,
                                            double lo, double hi) {
    if (scale.num == 0) return {};
    const auto& t = step_table(D);
    // jumps at t = k * den / num for chi(k) != 0
    std::vector<ReducedFraction> out;
    i64 kmin = std::max<i64>(1, i64(std::floor(lo * scale.value())));
    i64 kmax = i64(std::floor(hi * scale.value())) + 1;
    for (i64 k = kmin; k <= kmax; ++k) {
        if (t.chi_at(k) == 0) continue;
        auto f = ReducedFraction::make(k * scale.den, scale.num);
        double v = f.value();
        if (v > lo && v <= hi) out.push_back(f);
    }
    return out;
}

std::vector<double> breakpoints_in(const Discriminant& D, double scale, double lo, double hi) {
    if (!(scale > 0)) throw DomainError("scale must be positive");
    const auto& t = step_table(D);
    std::vector<double> out;
    i64 kmin = std::max<i64>(1, i64(std::floor(lo * scale)));
    i64 kmax = i64(std::floor(hi * scale)) + 1;
    for (i64 k = kmin; k <= kmax; ++k) {
        if (t.chi_at(k) == 0) continue;
        double v = double(k) / scale;
        if (v > lo && v <= hi) out.push_back(v);
    }
    return out;
}

}  // namespace grhcot
