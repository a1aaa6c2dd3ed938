#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lexind/matrix.hpp"

namespace lexind {

// Product-moment correlation. Throws DimensionError for unequal or too short
// inputs and UndefinedCorrelationError when either side has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> x);
// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double stddev(std::span<const double> x);

struct RidgeModel {
    double intercept = 0.0;
    std::vector<double> coefficients;
    double lambda_used = 0.0;  // after any singularity bumps
    bool dual = false;         // solved in sample space (features > samples)

    double predict(std::span<const double> x) const;
};

// Minimises sum_i (y_i - a0 - x_i.a)^2 + lambda |a|^2 with the intercept
// unpenalised. Columns and targets are centred and the penalised Gram matrix
// is factored by Cholesky: X^T X + lambda I when features <= samples,
// otherwise the sample-space form X X^T + lambda I. A numerically singular
// system is retried with lambda + 1e-10, + 2e-10, + 3e-10.
RidgeModel ridge_fit(const DenseMatrix& x, std::span<const double> y, double lambda);
RidgeModel ridge_fit(const SparseMatrix& x, std::span<const double> y, double lambda);

// In-place lower Cholesky factor of a symmetric positive definite matrix.
// Returns false when a pivot is not safely positive.
bool cholesky_factor(DenseMatrix& a);
// Solves L L^T x = b given the factor from cholesky_factor.
std::vector<double> cholesky_solve(const DenseMatrix& l, std::span<const double> b);

struct EigenPairs {
    std::vector<double> values;  // ascending
    DenseMatrix vectors;         // n x k, column i pairs with values[i]
};

struct EigenOptions {
    std::size_t dense_threshold = 2000;  // cyclic Jacobi up to this size, Lanczos above
    std::size_t max_lanczos_steps = 0;   // per restart; 0 picks a size-based default
    std::size_t max_restarts = 0;        // 0 picks a default from k
    double tolerance = 1e-10;            // relative residual for Lanczos convergence
    std::uint64_t seed = 1;              // Lanczos start vectors
};

// Symmetric matrix-vector product y = A x.
using SymmetricOperator = std::function<void(std::span<const double> x, std::span<double> y)>;

// k algebraically smallest eigenpairs of a symmetric matrix. Eigenvector signs
// are fixed so that the largest-magnitude entry is positive.
EigenPairs sym_eig_smallest(const DenseMatrix& a, std::size_t k, const EigenOptions& options = {});
// Lanczos on an implicit operator of dimension n; `norm_bound` is any upper
// bound on the spectral norm, used to scale the convergence test.
EigenPairs sym_eig_smallest(const SymmetricOperator& op, std::size_t n, double norm_bound, std::size_t k,
                            const EigenOptions& options = {});

// All eigenpairs by cyclic Jacobi rotations, ascending.
EigenPairs jacobi_eigen(const DenseMatrix& a);

struct KMeansOptions {
    std::size_t restarts = 10;
    std::size_t max_iterations = 300;
    double tolerance = 1e-8;  // max centroid shift
    std::uint64_t seed = 0;
};

struct KMeansResult {
    std::vector<std::size_t> assignment;
    DenseMatrix centers;
    double wcss = 0.0;
    std::size_t iterations = 0;
    std::vector<double> objective_history;  // WCSS after each assignment step of the kept run
    std::size_t best_restart = 0;
};

// k-means++ seeding, Lloyd iterations, best of `restarts` by WCSS. Restarts
// run in parallel; each draws from its own stream so results depend only on
// the seed.
KMeansResult kmeans(const DenseMatrix& points, std::size_t k, const KMeansOptions& options = {});

}  // namespace lexind
