#include <doctest.h>

#include <cmath>
#include <tuple>

#include "lexind/kernels.hpp"
#include "lexind/random.hpp"

using namespace lexind;

namespace {

DenseMatrix random_matrix(Rng& rng, std::size_t r, std::size_t c, double zero_fraction = 0.0) {
    DenseMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.bernoulli(zero_fraction) ? 0.0 : rng.normal();
    return m;
}

void check_close(const DenseMatrix& a, const DenseMatrix& b) {
    REQUIRE(a.rows() == b.rows());
    REQUIRE(a.cols() == b.cols());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / std::max(1.0, std::abs(a(i, j))));
    CHECK(worst <= 1e-12);
}

// Straight triple loop, independent of both kernel variants.
DenseMatrix naive_ab(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

}  // namespace

TEST_CASE("matmul kernels: serial, OpenMP and naive agree") {
    Rng rng(1);
    // Sizes straddle the parallel-work threshold.
    const std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> sizes{{3, 4, 5}, {64, 300, 256}, {200, 129, 131}};
    for (auto [m, k, n] : sizes) {
        DenseMatrix a = random_matrix(rng, m, k, 0.3), b = random_matrix(rng, k, n, 0.1);
        DenseMatrix s(m, n), o(m, n);
        kernels::serial::matmul_ab(a, b, s);
        kernels::omp::matmul_ab(a, b, o);
        check_close(naive_ab(a, b), s);
        check_close(s, o);

        DenseMatrix bt = b.transposed();
        std::vector<double> bias(n);
        for (auto& v : bias) v = rng.normal();
        DenseMatrix s2(m, n), o2(m, n);
        kernels::serial::matmul_abt(a, bt, bias, s2);
        kernels::omp::matmul_abt(a, bt, bias, o2);
        DenseMatrix expect = naive_ab(a, b);
        for (std::size_t i = 0; i < expect.rows(); ++i)
            for (std::size_t j = 0; j < expect.cols(); ++j) expect(i, j) += bias[j];
        check_close(expect, s2);
        check_close(s2, o2);

        DenseMatrix at = a.transposed();
        DenseMatrix s3(m, n), o3(m, n);
        kernels::serial::matmul_atb(at, b, s3);
        kernels::omp::matmul_atb(at, b, o3);
        check_close(naive_ab(a, b), s3);
        check_close(s3, o3);
    }
}

TEST_CASE("matmul_abt with empty bias") {
    Rng rng(2);
    DenseMatrix a = random_matrix(rng, 4, 3), b = random_matrix(rng, 5, 3);
    DenseMatrix s(4, 5), o(4, 5);
    kernels::serial::matmul_abt(a, b, {}, s);
    kernels::omp::matmul_abt(a, b, {}, o);
    check_close(naive_ab(a, b.transposed()), s);
    check_close(s, o);
}

TEST_CASE("centroid kernel") {
    Rng rng(3);
    const std::size_t dim = 50, words = 400;
    std::vector<float> table((words + 1) * dim, 0.0f);
    for (std::size_t i = 0; i < words * dim; ++i) table[i] = static_cast<float>(rng.normal());
    std::vector<std::vector<std::size_t>> docs(900);
    for (auto& d : docs) {
        std::size_t len = 1 + rng.index(20);
        for (std::size_t t = 0; t < len; ++t) d.push_back(rng.bernoulli(0.1) ? kernels::kMissing : rng.index(words));
    }
    DenseMatrix s(docs.size(), dim), o(docs.size(), dim);
    kernels::serial::centroids(docs, table, dim, s);
    kernels::omp::centroids(docs, table, dim, o);
    CHECK(s == o);
    // Independent check of one row.
    const auto& d = docs[7];
    for (std::size_t j = 0; j < dim; ++j) {
        double sum = 0.0;
        for (auto w : d)
            if (w != kernels::kMissing) sum += table[w * dim + j];
        CHECK(s(7, j) == doctest::Approx(sum / static_cast<double>(d.size())).epsilon(1e-12));
    }
}

TEST_CASE("knn kernel") {
    Rng rng(4);
    const std::size_t n = 300, dim = 12, k = 7;
    DenseMatrix unit = random_matrix(rng, n, dim);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (double v : unit.row(i)) s += v * v;
        for (auto& v : unit.row(i)) v /= std::sqrt(s);
    }
    // Duplicate a row to force exact ties.
    std::copy(unit.row(3).begin(), unit.row(3).end(), unit.row(10).begin());
    std::copy(unit.row(3).begin(), unit.row(3).end(), unit.row(20).begin());
    auto s = kernels::serial::knn_unit_rows(unit, k);
    auto o = kernels::omp::knn_unit_rows(unit, k);
    REQUIRE(s.size() == n);
    for (std::size_t i = 0; i < n; ++i) {
        REQUIRE(s[i].size() == k);
        REQUIRE(o[i].size() == k);
        for (std::size_t j = 0; j < k; ++j) {
            CHECK(s[i][j].index == o[i][j].index);
            CHECK(s[i][j].similarity == o[i][j].similarity);
            CHECK(s[i][j].index != i);
        }
        // Brute force: the k-th similarity bounds every excluded row.
        double kth = s[i][k - 1].similarity;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            bool chosen = false;
            for (const auto& nb : s[i]) chosen |= nb.index == j;
            if (!chosen) {
                double sim = 0.0;
                for (std::size_t d = 0; d < dim; ++d) sim += unit(i, d) * unit(j, d);
                CHECK(sim <= kth + 1e-12);
            }
        }
    }
    CHECK(s[3][0].index == 10);
    CHECK(s[3][1].index == 20);
    CHECK(s[10][0].index == 3);
}

TEST_CASE("assign_nearest kernel") {
    Rng rng(5);
    DenseMatrix pts = random_matrix(rng, 5000, 6), centers = random_matrix(rng, 9, 6);
    std::copy(centers.row(2).begin(), centers.row(2).end(), centers.row(5).begin());
    std::vector<std::size_t> as(5000), ao(5000);
    std::vector<double> ds(5000), dO(5000);
    kernels::serial::assign_nearest(pts, centers, as, ds);
    kernels::omp::assign_nearest(pts, centers, ao, dO);
    CHECK(as == ao);
    CHECK(ds == dO);
    for (std::size_t i = 0; i < 5000; i += 97) {
        double best = 1e300;
        std::size_t arg = 0;
        for (std::size_t c = 0; c < 9; ++c) {
            double d = 0.0;
            for (std::size_t j = 0; j < 6; ++j) d += (pts(i, j) - centers(c, j)) * (pts(i, j) - centers(c, j));
            if (d < best) {
                best = d;
                arg = c;
            }
        }
        CHECK(as[i] == arg);
        CHECK(as[i] != 5);
    }
}

TEST_CASE("thread count is reported") { CHECK(kernels::omp::max_threads() >= 1); }
