// Reference implementations: the obvious loops, kept for testing the
// OpenMP variants and for benchmarking against them.
#include <algorithm>

#include "lexind/error.hpp"
#include "lexind/kernels.hpp"

namespace lexind::kernels::serial {

void matmul_abt(const DenseMatrix& a, const DenseMatrix& b, std::span<const double> bias, DenseMatrix& c) {
    if (a.cols() != b.cols() || (!bias.empty() && bias.size() != b.rows())) throw DimensionError("matmul_abt shapes");
    c = DenseMatrix(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j) {
            double acc = bias.empty() ? 0.0 : bias[j];
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(j, k);
            c(i, j) = acc;
        }
}

void matmul_ab(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c) {
    if (a.cols() != b.rows()) throw DimensionError("matmul_ab shapes");
    c = DenseMatrix(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
            c(i, j) = acc;
        }
}

void matmul_atb(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c) {
    if (a.rows() != b.rows()) throw DimensionError("matmul_atb shapes");
    c = DenseMatrix(a.cols(), b.cols());
    for (std::size_t i = 0; i < a.cols(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.rows(); ++k) acc += a(k, i) * b(k, j);
            c(i, j) = acc;
        }
}

void centroids(std::span<const std::vector<std::size_t>> docs, std::span<const float> table, std::size_t dim,
               DenseMatrix& out) {
    out = DenseMatrix(docs.size(), dim);
    for (std::size_t d = 0; d < docs.size(); ++d) {
        if (docs[d].empty()) throw DimensionError("centroid of an empty document");
        for (std::size_t j = 0; j < dim; ++j) {
            double acc = 0.0;
            for (std::size_t t : docs[d])
                if (t != kMissing) acc += static_cast<double>(table[t * dim + j]);
            out(d, j) = acc / static_cast<double>(docs[d].size());
        }
    }
}

std::vector<std::vector<Neighbor>> knn_unit_rows(const DenseMatrix& unit, std::size_t k) {
    const std::size_t n = unit.rows();
    if (k >= n) throw DimensionError("knn needs more rows than neighbours");
    std::vector<std::vector<Neighbor>> result(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Neighbor> all;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double s = 0.0;
            for (std::size_t c = 0; c < unit.cols(); ++c) s += unit(i, c) * unit(j, c);
            all.push_back({j, s});
        }
        std::sort(all.begin(), all.end(), [](const Neighbor& x, const Neighbor& y) {
            return x.similarity != y.similarity ? x.similarity > y.similarity : x.index < y.index;
        });
        all.resize(k);
        result[i] = std::move(all);
    }
    return result;
}

void assign_nearest(const DenseMatrix& points, const DenseMatrix& centers, std::span<std::size_t> assignment,
                    std::span<double> dist2) {
    if (points.cols() != centers.cols() || assignment.size() != points.rows() || dist2.size() != points.rows())
        throw DimensionError("assign_nearest shapes");
    for (std::size_t i = 0; i < points.rows(); ++i) {
        std::size_t best = 0;
        double best_d = 0.0;
        for (std::size_t c = 0; c < centers.rows(); ++c) {
            double d = 0.0;
            for (std::size_t j = 0; j < points.cols(); ++j) {
                double diff = points(i, j) - centers(c, j);
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

}  // namespace lexind::kernels::serial
