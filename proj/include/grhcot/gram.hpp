#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "grhcot/cotsum.hpp"
#include "grhcot/numkernel.hpp"

namespace grhcot {

struct SweepRecord {
    i64 N = 0;
    double R = 0;
    double dist2 = 0;
    double logdetC = 0;
};

// Corner entry of the bordered matrix: N / (pi h'^2).
double corner_entry(const Discriminant& D, i64 N);

// C_N with entries c_{m,n}, filled through the cache.
Eigen::MatrixXd gram_matrix(const Discriminant& D, i64 N, const PrecisionContext& ctx, CValueCache& cache,
                            unsigned threads = 1);

// Column (c_{1,N}, ..., c_{N,N}); missing cache entries computed on `threads` workers.
Eigen::VectorXd gram_column(const Discriminant& D, i64 N, CValueCache& cache, unsigned threads);

template <typename Scalar = double>
class GramSweepState {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    GramSweepState(const Discriminant& D, CValueCache& cache, unsigned threads = 1, bool compensated = false);

    void extend(i64 upto, const PrecisionContext& ctx);

    const Discriminant& discriminant() const { return D_; }
    i64 size() const { return N_; }
    auto factor() const { return chol_.topLeftCorner(N_, N_).template triangularView<Eigen::Lower>(); }
    auto border_solution() const { return y_.head(N_); }
    Scalar quadratic_form() const { return q_; }
    Scalar log_det() const { return log_det_; }
    const std::vector<SweepRecord>& records() const { return records_; }

private:
    void reserve(i64 cap);
    Scalar dot(const Scalar* a, const Scalar* b, i64 n) const;

    Discriminant D_;
    CValueCache* cache_;
    unsigned threads_;
    bool compensated_;
    double kappa_;  // pi h'^2
    i64 N_ = 0;
    Matrix chol_;
    Vector y_;
    Vector work_;
    Scalar q_ = 0, q_comp_ = 0;
    Scalar log_det_ = 0;
    std::vector<SweepRecord> records_;
};

extern template class GramSweepState<double>;
extern template class GramSweepState<long double>;

template <typename Scalar>
void sweep_extend(GramSweepState<Scalar>& state, i64 upto, const PrecisionContext& ctx) {
    state.extend(upto, ctx);
}

// d(xi, V_N)^2 from a fresh LDLT solve of the normal equations.
double distance_direct(const Discriminant& D, i64 N, const PrecisionContext& ctx, CValueCache& cache);

struct LogFit {
    double slope = 0;
    double intercept = 0;
    double residual = 0;
    std::size_t points = 0;
};

LogFit fit_log(const std::vector<SweepRecord>& records, i64 from, i64 to);

double zero_bound(std::complex<double> rho);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records);
std::string format_double(double v);

}  // namespace grhcot
