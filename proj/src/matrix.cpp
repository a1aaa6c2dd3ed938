#include "lexind/matrix.hpp"

#include <cmath>

#include "lexind/error.hpp"

namespace lexind {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) throw DimensionError("matrix data length does not match shape");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    std::size_t cols = rows.empty() ? 0 : rows.front().size();
    DenseMatrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) throw DimensionError("ragged rows");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

bool DenseMatrix::all_finite() const noexcept {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

double DenseMatrix::max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& m) {
    SparseMatrix s(m.cols());
    std::vector<std::pair<std::size_t, double>> entries;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        entries.clear();
        for (std::size_t c = 0; c < m.cols(); ++c)
            if (m(r, c) != 0.0) entries.emplace_back(c, m(r, c));
        s.append_row(entries);
    }
    return s;
}

void SparseMatrix::append_row(std::span<const std::pair<std::size_t, double>> entries) {
    std::size_t prev = 0;
    bool first = true;
    for (const auto& [c, v] : entries) {
        if (c >= cols_) throw DimensionError("sparse column index out of range");
        if (!first && c <= prev) throw DimensionError("sparse column indices must be strictly ascending");
        indices_.push_back(c);
        values_.push_back(v);
        prev = c;
        first = false;
    }
    row_start_.push_back(indices_.size());
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != cols_ || y.size() != rows()) throw DimensionError("sparse multiply shape mismatch");
    for (std::size_t r = 0; r < rows(); ++r) {
        double acc = 0.0;
        for (std::size_t k = row_start_[r]; k < row_start_[r + 1]; ++k) acc += values_[k] * x[indices_[k]];
        y[r] = acc;
    }
}

DenseMatrix SparseMatrix::to_dense() const {
    DenseMatrix d(rows(), cols_);
    for (std::size_t r = 0; r < rows(); ++r)
        for (std::size_t k = row_start_[r]; k < row_start_[r + 1]; ++k) d(r, indices_[k]) = values_[k];
    return d;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(std::span<const double> a) noexcept { return std::sqrt(dot(a, a)); }

}  // namespace lexind
