#include <doctest.h>

#include <Eigen/Cholesky>
#include <cmath>
#include <numbers>
#include <sstream>

#include "grhcot/gram.hpp"
#include "grhcot/lfun.hpp"

using namespace grhcot;

namespace {
constexpr double pi = std::numbers::pi;

std::vector<SweepRecord> sweep(i64 D, i64 N, unsigned threads = 1) {
    CValueCache cache;
    GramSweepState<double> st(Discriminant(D), cache, threads);
    st.extend(N, {});
    return st.records();
}
}  // namespace

TEST_CASE("N = 1") {
    auto r = sweep(-4, 1);
    REQUIRE(r.size() == 1);
    CHECK(r[0].R == doctest::Approx(pi / (4 - pi)).epsilon(1e-14));
    CHECK(r[0].dist2 == doctest::Approx(1 - pi / 4).epsilon(1e-14));
    CHECK(corner_entry(Discriminant(-4), 1) == doctest::Approx(4 / pi));
    CValueCache c;
    CHECK(distance_direct(Discriminant(-4), 1, {}, c) == doctest::Approx(1 - pi / 4).epsilon(1e-14));
}

TEST_CASE("distance identity and direct solve") {
    for (i64 d : {-4, -3}) {
        const double kappa = pi * to_double(h_prime(Discriminant(d), {})) * to_double(h_prime(Discriminant(d), {}));
        i64 N = d == -4 ? 512 : 128;
        auto r = sweep(d, N);
        for (const auto& x : r) {
            CHECK(std::abs(x.dist2 - kappa / x.R) < 1e-10);
            CHECK(x.dist2 > 0);
            CHECK(x.dist2 < 1);
        }
        for (i64 b : {1, 3}) 
            for (i64 n = b; 2 * n <= N; n *= 2) CHECK(r[std::size_t(2 * n - 1)].dist2 < r[std::size_t(n - 1)].dist2);
        CValueCache cache;
        for (i64 n : {1, 32, 64}) {
            double dd = distance_direct(Discriminant(d), n, {}, cache);
            CHECK(std::abs(dd - r[std::size_t(n - 1)].dist2) < 1e-10);
        }
    }
    CValueCache cache;
    auto r = sweep(-4, 256);
    CHECK(std::abs(distance_direct(Discriminant(-4), 256, {}, cache) - r.back().dist2) < 1e-10);
}

TEST_CASE("incremental factor against a fresh Cholesky") {
    const i64 N = 256;
    CValueCache cache;
    Discriminant D(-4);
    GramSweepState<double> st(D, cache, 1);
    st.extend(N, {});
    Eigen::MatrixXd C = gram_matrix(D, N, {}, cache);
    CHECK((C - C.transpose()).norm() == 0.0);
    Eigen::LLT<Eigen::MatrixXd> llt(C);
    REQUIRE(llt.info() == Eigen::Success);
    Eigen::MatrixXd L = llt.matrixL();
    Eigen::MatrixXd Li = st.factor();
    double worst = 0;
    for (i64 i = 0; i < N; ++i)
        for (i64 j = 0; j <= i; ++j) worst = std::max(worst, std::abs(L(i, j) - Li(i, j)) / std::abs(L(j, j)));
    CHECK(worst < 1e-12);
    CHECK(st.log_det() == doctest::Approx(2 * L.diagonal().array().log().sum()).epsilon(1e-12));
}

TEST_CASE("threads, precision modes and determinism") {
    auto a = sweep(-4, 128, 1), b = sweep(-4, 128, 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].R == b[i].R);
        CHECK(a[i].dist2 == b[i].dist2);
        CHECK(a[i].logdetC == b[i].logdetC);
    }
    CValueCache cache;
    GramSweepState<long double> ld(Discriminant(-4), cache, 1);
    ld.extend(128, {});
    GramSweepState<double> comp(Discriminant(-4), cache, 1, true);
    comp.extend(128, {});
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(std::abs(ld.records()[i].R - a[i].R) < 1e-9 * a[i].R);
        CHECK(std::abs(comp.records()[i].R - a[i].R) < 1e-9 * a[i].R);
    }
    // extending in pieces gives the same records
    GramSweepState<double> pieces(Discriminant(-4), cache, 2);
    pieces.extend(50, {});
    pieces.extend(128, {});
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(pieces.records()[i].R == a[i].R);
}

TEST_CASE("fit and zero bound") {
    std::vector<SweepRecord> r;
    for (i64 N = 1; N <= 100; ++N) r.push_back({N, 2 * std::log(double(N)) + 1, 0, 0});
    auto f = fit_log(r, 10, 100);
    CHECK(f.slope == doctest::Approx(2).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(1).epsilon(1e-12));
    CHECK(f.residual < 1e-12);
    CHECK(f.points == 91);
    CHECK(zero_bound({0.75, 0}) == doctest::Approx(9 * pi / 32));
    CHECK(zero_bound({1, 0}) == doctest::Approx(pi / 4));
    double e = 1e-6;
    CHECK(zero_bound({0.5 + e, 0}) * e == doctest::Approx(pi / 32).epsilon(1e-5));
}

TEST_CASE("csv output") {
    auto r = sweep(-4, 3);
    std::ostringstream os;
    write_sweep_csv(os, r);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "N,R,dist2,logdetC");
    for (const auto& x : r) {
        std::getline(is, line);
        auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
        CHECK(std::stoll(line.substr(0, c1)) == x.N);
        CHECK(std::stod(line.substr(c1 + 1, c2 - c1 - 1)) == x.R);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0 / 3) == "0.3333333333333333");
}
