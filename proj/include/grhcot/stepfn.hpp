#pragma once

#include <vector>

#include "grhcot/numkernel.hpp"

namespace grhcot {

// Period data of S_D: entry j is S on (j, j+1), j = 0..|D|-1.
class StepTable {
public:
    explicit StepTable(const Discriminant& D);

    const Discriminant& discriminant() const { return D_; }
    i64 period() const { return P_; }
    const std::vector<int>& interval_values() const { return v_; }
    const std::vector<int>& chi_values() const { return chi_; }

    int plateau(i64 j) const { return v_[std::size_t(pos_mod(j, P_))]; }
    int chi_at(i64 k) const { return chi_[std::size_t(pos_mod(k, P_))]; }

    // 2*S(num/den), exact; den > 0, num of any sign.
    int twice_value(i64 num, i64 den) const;

    const Rational& mean() const { return mean_; }
    double mean_value() const { return mean_d_; }
    int max_value() const { return max_; }
    // sup |S - h'| and sup |int_0^t (S - h')|
    double max_deviation() const { return max_dev_; }
    double max_primitive() const { return max_prim_; }

private:
    Discriminant D_;
    i64 P_;
    std::vector<int> v_;
    std::vector<int> chi_;
    Rational mean_;
    double mean_d_;
    int max_;
    double max_dev_;
    double max_prim_;
};

// Shared per-D instance, built on first use.
const StepTable& step_table(const Discriminant& D);

Rational step_S(const Discriminant& D, const ReducedFraction& x);
Rational step_S(const Discriminant& D, i64 num, i64 den);
int step_S(const Discriminant& D, double x);

double fourier_S_partial(const Discriminant& D, double x, i64 M);

// Jumps of t -> S(scale*t) in (lo, hi].
std::vector<ReducedFraction> breakpoints_in(const Discriminant& D, const ReducedFraction& scale,
                                            double lo, double hi);
std::vector<double> breakpoints_in(const Discriminant& D, double scale, double lo, double hi);

}  // namespace grhcot
