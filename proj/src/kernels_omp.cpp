#include <algorithm>
#include <cstdint>

#ifdef LEXIND_HAVE_OPENMP
#include <omp.h>
#endif

#include "lexind/error.hpp"
#include "lexind/kernels.hpp"

namespace lexind::kernels::omp {

int max_threads() {
#ifdef LEXIND_HAVE_OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace {

// Row-wide axpy; vectorises, and keeps the per-element summation order of
// the serial reference.
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) y[j] += alpha * x[j];
}

// Below this many multiply-adds the parallel region costs more than it saves.
constexpr std::size_t kParallelWork = 1 << 15;

}  // namespace

void matmul_abt(const DenseMatrix& a, const DenseMatrix& b, std::span<const double> bias, DenseMatrix& c) {
    if (a.cols() != b.cols() || (!bias.empty() && bias.size() != b.rows())) throw DimensionError("matmul_abt shapes");
    const DenseMatrix bt = b.transposed();
    const std::size_t m = a.rows(), n = b.rows(), kk = a.cols();
    c = DenseMatrix(m, n);
    const auto rows = static_cast<std::int64_t>(m);
#pragma omp parallel for schedule(static) if (m * n * kk > kParallelWork)
    for (std::int64_t ii = 0; ii < rows; ++ii) {
        auto i = static_cast<std::size_t>(ii);
        double* out = c.row(i).data();
        if (!bias.empty()) std::copy(bias.begin(), bias.end(), out);
        for (std::size_t k = 0; k < kk; ++k) {
            double aik = a(i, k);
            if (aik != 0.0) axpy(aik, bt.row(k).data(), out, n);
        }
    }
}

void matmul_ab(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c) {
    if (a.cols() != b.rows()) throw DimensionError("matmul_ab shapes");
    const std::size_t m = a.rows(), n = b.cols(), kk = a.cols();
    c = DenseMatrix(m, n);
    const auto rows = static_cast<std::int64_t>(m);
#pragma omp parallel for schedule(static) if (m * n * kk > kParallelWork)
    for (std::int64_t ii = 0; ii < rows; ++ii) {
        auto i = static_cast<std::size_t>(ii);
        double* out = c.row(i).data();
        for (std::size_t k = 0; k < kk; ++k) {
            double aik = a(i, k);
            if (aik != 0.0) axpy(aik, b.row(k).data(), out, n);
        }
    }
}

void matmul_atb(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c) {
    if (a.rows() != b.rows()) throw DimensionError("matmul_atb shapes");
    const std::size_t m = a.cols(), n = b.cols(), kk = a.rows();
    c = DenseMatrix(m, n);
    const auto rows = static_cast<std::int64_t>(m);
#pragma omp parallel for schedule(static) if (m * n * kk > kParallelWork)
    for (std::int64_t ii = 0; ii < rows; ++ii) {
        auto i = static_cast<std::size_t>(ii);
        double* out = c.row(i).data();
        for (std::size_t k = 0; k < kk; ++k) {
            double aki = a(k, i);
            if (aki != 0.0) axpy(aki, b.row(k).data(), out, n);
        }
    }
}

void centroids(std::span<const std::vector<std::size_t>> docs, std::span<const float> table, std::size_t dim,
               DenseMatrix& out) {
    out = DenseMatrix(docs.size(), dim);
    for (const auto& d : docs)
        if (d.empty()) throw DimensionError("centroid of an empty document");
    const auto count = static_cast<std::int64_t>(docs.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t dd = 0; dd < count; ++dd) {
        auto d = static_cast<std::size_t>(dd);
        double* row = out.row(d).data();
        for (std::size_t t : docs[d]) {
            if (t == kMissing) continue;
            const float* v = table.data() + t * dim;
            for (std::size_t j = 0; j < dim; ++j) row[j] += static_cast<double>(v[j]);
        }
        const double len = static_cast<double>(docs[d].size());
        for (std::size_t j = 0; j < dim; ++j) row[j] /= len;
    }
}

std::vector<std::vector<Neighbor>> knn_unit_rows(const DenseMatrix& unit, std::size_t k) {
    const std::size_t n = unit.rows(), dim = unit.cols();
    if (k >= n) throw DimensionError("knn needs more rows than neighbours");
    std::vector<std::vector<Neighbor>> result(n);
    const auto count = static_cast<std::int64_t>(n);
    auto better = [](const Neighbor& x, const Neighbor& y) {
        return x.similarity != y.similarity ? x.similarity > y.similarity : x.index < y.index;
    };
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t ii = 0; ii < count; ++ii) {
        auto i = static_cast<std::size_t>(ii);
        const double* ri = unit.row(i).data();
        std::vector<Neighbor> all;
        all.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double* rj = unit.row(j).data();
            double s = 0.0;
            for (std::size_t c = 0; c < dim; ++c) s += ri[c] * rj[c];
            all.push_back({j, s});
        }
        std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), better);
        all.resize(k);
        result[i] = std::move(all);
    }
    return result;
}

void assign_nearest(const DenseMatrix& points, const DenseMatrix& centers, std::span<std::size_t> assignment,
                    std::span<double> dist2) {
    if (points.cols() != centers.cols() || assignment.size() != points.rows() || dist2.size() != points.rows())
        throw DimensionError("assign_nearest shapes");
    const std::size_t dim = points.cols(), kc = centers.rows();
    const auto count = static_cast<std::int64_t>(points.rows());
#pragma omp parallel for schedule(static) if (points.rows() * kc * dim > kParallelWork)
    for (std::int64_t ii = 0; ii < count; ++ii) {
        auto i = static_cast<std::size_t>(ii);
        const double* p = points.row(i).data();
        std::size_t best = 0;
        double best_d = 0.0;
        for (std::size_t c = 0; c < kc; ++c) {
            const double* q = centers.row(c).data();
            double d = 0.0;
            for (std::size_t j = 0; j < dim; ++j) {
                double diff = p[j] - q[j];
                d += diff * diff;
            }
            if (c == 0 || d < best_d) {
                best = c;
                best_d = d;
            }
        }
        assignment[i] = best;
        dist2[i] = best_d;
    }
}

}  // namespace lexind::kernels::omp
