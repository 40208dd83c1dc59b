#include "grhcot/gram.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>
#include <thread>

#include "grhcot/lfun.hpp"
#include "grhcot/stepfn.hpp"

namespace grhcot {

double corner_entry(const Discriminant& D, i64 N) {
    double h = step_table(D).mean_value();
    return double(N) / (std::numbers::pi * h * h);
}

Eigen::VectorXd gram_column(const Discriminant& D, i64 N, CValueCache& cache, unsigned threads) {
    const auto& st = step_table(D);
    const i64 Dv = D.value();
    std::vector<ReducedFraction> todo;
    for (i64 k = 1; k <= N; ++k) {
        auto f = reduce(k, N).first;
        if (!cache.find(Dv, f)) todo.push_back(f);
    }
    if (!todo.empty()) {
        std::vector<std::pair<ReducedFraction, double>> vals(todo.size());
        unsigned nt = std::max(1u, std::min<unsigned>(threads, unsigned(todo.size())));
        auto work = [&](unsigned t) {
            for (std::size_t i = t; i < todo.size(); i += nt) vals[i] = {todo[i], C_reduced(st, todo[i])};
        };
        if (nt == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < nt; ++t) pool.emplace_back(work, t);
            for (auto& th : pool) th.join();
        }
        cache.insert_batch(Dv, vals);
    }
    Eigen::VectorXd col(N);
    PrecisionContext ctx;
    for (i64 k = 1; k <= N; ++k) col(k - 1) = c_value(D, k, N, ctx, cache);
    return col;
}

Eigen::MatrixXd gram_matrix(const Discriminant& D, i64 N, const PrecisionContext& ctx, CValueCache& cache,
                            unsigned threads) {
    ctx.validate();
    Eigen::MatrixXd C(N, N);
    for (i64 n = 1; n <= N; ++n) {
        Eigen::VectorXd col = gram_column(D, n, cache, threads);
        C.col(n - 1).head(n) = col;
        C.row(n - 1).head(n) = col.transpose();
    }
    return C;
}

template <typename Scalar>
GramSweepState<Scalar>::GramSweepState(const Discriminant& D, CValueCache& cache, unsigned threads,
                                       bool compensated)
    : D_(D), cache_(&cache), threads_(std::max(1u, threads)), compensated_(compensated) {
    double h = step_table(D).mean_value();
    kappa_ = std::numbers::pi * h * h;
}

template <typename Scalar>
void GramSweepState<Scalar>::reserve(i64 cap) {
    if (chol_.rows() >= cap) return;
    chol_.conservativeResize(cap, cap);
    y_.conservativeResize(cap);
}

template <typename Scalar>
Scalar GramSweepState<Scalar>::dot(const Scalar* a, const Scalar* b, i64 n) const {
    if (!compensated_) {
        Scalar s = 0;
        for (i64 i = 0; i < n; ++i) s += a[i] * b[i];
        return s;
    }
    Scalar s = 0, c = 0;
    for (i64 i = 0; i < n; ++i) {
        Scalar p = a[i] * b[i];
        Scalar e = std::fma(a[i], b[i], -p);
        Scalar t = s + p;
        Scalar z = t - s;
        c += (s - (t - z)) + (p - z) + e;
        s = t;
    }
    return s + c;
}

template <typename Scalar>
void GramSweepState<Scalar>::extend(i64 upto, const PrecisionContext& ctx) {
    ctx.validate();
    if (upto <= N_) throw DomainError("sweep_extend needs upto > N");
    reserve(upto);
    for (i64 n = N_ + 1; n <= upto; ++n) {
        const i64 r = n - 1;
        Eigen::VectorXd col = gram_column(D_, n, *cache_, threads_);
        Scalar* row = chol_.row(r).data();
        for (i64 i = 0; i < r; ++i) {
            const Scalar* ri = chol_.row(i).data();
            row[i] = (Scalar(col(i)) - dot(ri, row, i)) / ri[i];
        }
        Scalar d2 = Scalar(col(r)) - dot(row, row, r);
        if (!(d2 > 0))
            throw PrecisionError("matrix not positive definite at N=" + std::to_string(n) +
                                 " (pivot " + std::to_string(double(d2)) + ")");
        row[r] = std::sqrt(d2);
        Scalar yn = (Scalar(n) - dot(row, y_.data(), r)) / row[r];
        y_(r) = yn;
        // Kahan-summed running |y|^2
        Scalar t = yn * yn - q_comp_;
        Scalar u = q_ + t;
        q_comp_ = (u - q_) - t;
        q_ = u;
        log_det_ += std::log(d2);
        N_ = n;

        double Q = double(q_);
        double gap = corner_entry(D_, n) - Q;
        if (!(gap > 0))
            throw PrecisionError("bordered matrix not positive definite at N=" + std::to_string(n));
        records_.push_back(SweepRecord{n, double(n) / gap, 1.0 - kappa_ * Q / double(n), double(log_det_)});
    }
}

template class GramSweepState<double>;
template class GramSweepState<long double>;

double distance_direct(const Discriminant& D, i64 N, const PrecisionContext& ctx, CValueCache& cache) {
    if (N < 1) throw DomainError("distance_direct needs N >= 1");
    Eigen::MatrixXd G = gram_matrix(D, N, ctx, cache) * (std::numbers::pi / double(D.modulus() * N));
    const double L1 = L_chi(D, 1.0, ctx);
    Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(N, 1.0, double(N)) * (L1 / double(N));
    Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw PrecisionError("Gram matrix not positive definite at N=" + std::to_string(N));
    Eigen::VectorXd x = ldlt.solve(b);
    return 1.0 - b.dot(x);
}

LogFit fit_log(const std::vector<SweepRecord>& records, i64 from, i64 to) {
    if (!(to > from && from >= 2)) throw DomainError("fit_log needs to > from >= 2");
    std::vector<const SweepRecord*> sel;
    for (const auto& r : records)
        if (r.N >= from && r.N <= to) sel.push_back(&r);
    if (sel.size() < 3) throw DomainError("fit_log needs at least 3 points in the window");
    const Eigen::Index m = Eigen::Index(sel.size());
    Eigen::MatrixXd A(m, 2);
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        A(i, 0) = std::log(double(sel[std::size_t(i)]->N));
        A(i, 1) = 1.0;
        y(i) = sel[std::size_t(i)]->R;
    }
    Eigen::Vector2d c = A.colPivHouseholderQr().solve(y);
    LogFit f;
    f.slope = c(0);
    f.intercept = c(1);
    f.residual = std::sqrt((A * c - y).squaredNorm() / double(m));
    f.points = sel.size();
    return f;
}

double zero_bound(std::complex<double> rho) {
    double d = rho.real() - 0.5;
    if (!(d > 0)) throw DomainError("zero_bound needs Re(rho) > 1/2");
    return std::numbers::pi / 8 * std::norm(rho) / d;
}

std::string format_double(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
    out << "N,R,dist2,logdetC\n";
    for (const auto& r : records)
        out << r.N << ',' << format_double(r.R) << ',' << format_double(r.dist2) << ','
            << format_double(r.logdetC) << '\n';
}

}  // namespace grhcot
