#include <cmath>
#include <limits>

#include "lexind/error.hpp"
#include "lexind/numerics.hpp"

namespace lexind {

double RidgeModel::predict(std::span<const double> x) const {
    if (x.size() != coefficients.size()) throw DimensionError("ridge predict: feature count mismatch");
    return intercept + dot(x, coefficients);
}

bool cholesky_factor(DenseMatrix& a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw DimensionError("cholesky: matrix is not square");
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
    const double tol = static_cast<double>(std::max<std::size_t>(n, 1)) * std::numeric_limits<double>::epsilon() *
                       std::max(max_diag, std::numeric_limits<double>::min());
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        if (!(d > tol)) return false;
        const double ljj = std::sqrt(d);
        a(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            const double* ri = a.row(i).data();
            const double* rj = a.row(j).data();
            for (std::size_t k = 0; k < j; ++k) s -= ri[k] * rj[k];
            a(i, j) = s / ljj;
        }
        for (std::size_t i = 0; i < j; ++i) a(i, j) = 0.0;
    }
    return true;
}

std::vector<double> cholesky_solve(const DenseMatrix& l, std::span<const double> b) {
    const std::size_t n = l.rows();
    if (b.size() != n) throw DimensionError("cholesky_solve: rhs length mismatch");
    std::vector<double> z(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
        double s = z[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * z[k];
        z[i] = s / l(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = z[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * z[k];
        z[ii] = s / l(ii, ii);
    }
    return z;
}

namespace {

constexpr int kMaxBumps = 3;
constexpr double kBump = 1e-10;

// Factors gram + (lambda + bump) I, bumping on failure.
DenseMatrix factor_with_bumps(const DenseMatrix& gram, double lambda, double& used) {
    for (int attempt = 0; attempt <= kMaxBumps; ++attempt) {
        used = lambda + kBump * attempt;
        DenseMatrix m = gram;
        for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) += used;
        if (cholesky_factor(m)) return m;
    }
    throw NumericalError("ridge: penalised Gram matrix is singular (lambda=" + std::to_string(lambda) +
                         ", bumped " + std::to_string(kMaxBumps) + " times)");
}

double sparse_dot(const SparseMatrix& x, std::size_t a, std::size_t b) {
    auto ia = x.row_indices(a), ib = x.row_indices(b);
    auto va = x.row_values(a), vb = x.row_values(b);
    double s = 0.0;
    std::size_t p = 0, q = 0;
    while (p < ia.size() && q < ib.size()) {
        if (ia[p] == ib[q]) {
            s += va[p++] * vb[q++];
        } else if (ia[p] < ib[q]) {
            ++p;
        } else {
            ++q;
        }
    }
    return s;
}

}  // namespace

RidgeModel ridge_fit(const SparseMatrix& x, std::span<const double> y, double lambda) {
    const std::size_t n = x.rows(), p = x.cols();
    if (y.size() != n) throw DimensionError("ridge: " + std::to_string(n) + " rows but " + std::to_string(y.size()) + " targets");
    if (n == 0) throw DimensionError("ridge: no samples");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DimensionError("ridge: lambda must be finite and >= 0");

    const double nn = static_cast<double>(n);
    std::vector<double> mu(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto idx = x.row_indices(i);
        auto val = x.row_values(i);
        for (std::size_t t = 0; t < idx.size(); ++t) mu[idx[t]] += val[t];
    }
    for (auto& m : mu) m /= nn;
    const double ybar = mean(y);
    std::vector<double> yc(n);
    for (std::size_t i = 0; i < n; ++i) yc[i] = y[i] - ybar;

    RidgeModel model;
    model.coefficients.assign(p, 0.0);
    if (p == 0) {
        model.intercept = ybar;
        model.lambda_used = lambda;
        return model;
    }

    if (p <= n) {
        // Centred Gram: X^T X - n mu mu^T.
        DenseMatrix gram(p, p);
        for (std::size_t i = 0; i < n; ++i) {
            auto idx = x.row_indices(i);
            auto val = x.row_values(i);
            for (std::size_t a = 0; a < idx.size(); ++a)
                for (std::size_t b = 0; b < idx.size(); ++b) gram(idx[a], idx[b]) += val[a] * val[b];
        }
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < p; ++b) gram(a, b) -= nn * mu[a] * mu[b];
        // X_c^T y_c equals X^T y_c because y_c sums to zero.
        std::vector<double> rhs(p, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            auto idx = x.row_indices(i);
            auto val = x.row_values(i);
            for (std::size_t t = 0; t < idx.size(); ++t) rhs[idx[t]] += val[t] * yc[i];
        }
        DenseMatrix l = factor_with_bumps(gram, lambda, model.lambda_used);
        model.coefficients = cholesky_solve(l, rhs);
    } else {
        // Sample space: a = X_c^T (X_c X_c^T + lambda I)^-1 y_c.
        std::vector<double> s(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            auto idx = x.row_indices(i);
            auto val = x.row_values(i);
            for (std::size_t t = 0; t < idx.size(); ++t) s[i] += val[t] * mu[idx[t]];
        }
        const double mumu = dot(mu, mu);
        DenseMatrix kernel(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                double v = sparse_dot(x, i, j) - s[i] - s[j] + mumu;
                kernel(i, j) = v;
                kernel(j, i) = v;
            }
        DenseMatrix l = factor_with_bumps(kernel, lambda, model.lambda_used);
        std::vector<double> alpha = cholesky_solve(l, yc);
        double alpha_sum = 0.0;
        for (double a : alpha) alpha_sum += a;
        for (std::size_t i = 0; i < n; ++i) {
            auto idx = x.row_indices(i);
            auto val = x.row_values(i);
            for (std::size_t t = 0; t < idx.size(); ++t) model.coefficients[idx[t]] += val[t] * alpha[i];
        }
        for (std::size_t j = 0; j < p; ++j) model.coefficients[j] -= mu[j] * alpha_sum;
        model.dual = true;
    }
    model.intercept = ybar - dot(mu, model.coefficients);
    for (double c : model.coefficients)
        if (!std::isfinite(c)) throw NumericalError("ridge: non-finite coefficient");
    return model;
}

RidgeModel ridge_fit(const DenseMatrix& x, std::span<const double> y, double lambda) {
    return ridge_fit(SparseMatrix::from_dense(x), y, lambda);
}

}  // namespace lexind
