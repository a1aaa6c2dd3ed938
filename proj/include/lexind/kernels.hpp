#pragma once

// Data-parallel inner loops. Each kernel has a plain serial reference in
// `kernels::serial` and an OpenMP variant in `kernels::omp`; the unqualified
// names forward to the OpenMP variant. Every output element of the OpenMP
// variants is produced by exactly one thread with a fixed loop order, so
// results do not depend on the thread count.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lexind/matrix.hpp"

namespace lexind::kernels {

inline constexpr std::size_t kMissing = static_cast<std::size_t>(-1);

struct Neighbor {
    std::size_t index;
    double similarity;
};

namespace serial {
// C = A * B^T + bias (bias broadcast over rows; may be empty). A: m x k, B: n x k, C: m x n.
void matmul_abt(const DenseMatrix& a, const DenseMatrix& b, std::span<const double> bias, DenseMatrix& c);
// C = A * B. A: m x k, B: k x n.
void matmul_ab(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c);
// C = A^T * B. A: k x m, B: k x n, C: m x n.
void matmul_atb(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c);
// Row d of `out` = sum of table rows for docs[d] (kMissing adds zero) / docs[d].size().
void centroids(std::span<const std::vector<std::size_t>> docs, std::span<const float> table, std::size_t dim,
               DenseMatrix& out);
// k most cosine-similar other rows of a matrix with unit-norm rows; ties go to the lower index.
std::vector<std::vector<Neighbor>> knn_unit_rows(const DenseMatrix& unit, std::size_t k);
// Nearest center by squared distance (ties go to the lower index).
void assign_nearest(const DenseMatrix& points, const DenseMatrix& centers, std::span<std::size_t> assignment,
                    std::span<double> dist2);
}  // namespace serial

namespace omp {
// C = A * B^T + bias (bias broadcast over rows; may be empty). A: m x k, B: n x k, C: m x n.
void matmul_abt(const DenseMatrix& a, const DenseMatrix& b, std::span<const double> bias, DenseMatrix& c);
// C = A * B. A: m x k, B: k x n.
void matmul_ab(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c);
// C = A^T * B. A: k x m, B: k x n, C: m x n.
void matmul_atb(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c);
// Row d of `out` = sum of table rows for docs[d] (kMissing adds zero) / docs[d].size().
void centroids(std::span<const std::vector<std::size_t>> docs, std::span<const float> table, std::size_t dim,
               DenseMatrix& out);
// k most cosine-similar other rows of a matrix with unit-norm rows; ties go to the lower index.
std::vector<std::vector<Neighbor>> knn_unit_rows(const DenseMatrix& unit, std::size_t k);
// Nearest center by squared distance (ties go to the lower index).
void assign_nearest(const DenseMatrix& points, const DenseMatrix& centers, std::span<std::size_t> assignment,
                    std::span<double> dist2);
// Threads an OpenMP parallel region would use (1 without OpenMP).
int max_threads();
}  // namespace omp

using omp::assign_nearest;
using omp::centroids;
using omp::knn_unit_rows;
using omp::matmul_ab;
using omp::matmul_abt;
using omp::matmul_atb;

}  // namespace lexind::kernels
