#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lexind/error.hpp"
#include "lexind/numerics.hpp"
#include "lexind/random.hpp"

namespace lexind {

namespace {

void fix_signs(DenseMatrix& vectors) {
    for (std::size_t c = 0; c < vectors.cols(); ++c) {
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t r = 0; r < vectors.rows(); ++r) {
            // Strictly greater keeps the first of equal-magnitude entries.
            if (std::abs(vectors(r, c)) > best + 1e-12) {
                best = std::abs(vectors(r, c));
                arg = r;
            }
        }
        if (vectors(arg, c) < 0.0)
            for (std::size_t r = 0; r < vectors.rows(); ++r) vectors(r, c) = -vectors(r, c);
    }
}

EigenPairs sorted_pairs(const std::vector<double>& values, const DenseMatrix& vectors, std::size_t k) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    EigenPairs out;
    out.vectors = DenseMatrix(vectors.rows(), k);
    for (std::size_t i = 0; i < k; ++i) {
        out.values.push_back(values[order[i]]);
        for (std::size_t r = 0; r < vectors.rows(); ++r) out.vectors(r, i) = vectors(r, order[i]);
    }
    fix_signs(out.vectors);
    return out;
}

// Implicit QL on a symmetric tridiagonal matrix (diag d, off-diagonal e with
// e[i] coupling i and i+1). On return d holds eigenvalues and z (initialised
// to the identity) the eigenvectors as columns.
void tridiagonal_ql(std::vector<double>& d, std::vector<double> e, DenseMatrix& z) {
    const std::size_t n = d.size();
    if (n == 0) return;
    e.resize(n, 0.0);
    e[n - 1] = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
            }
            if (m != l) {
                if (++iter > 60) throw NumericalError("tridiagonal eigensolver did not converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                std::size_t i = m;
                bool early = false;
                while (i-- > l) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        early = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (std::size_t k = 0; k < n; ++k) {
                        f = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * f;
                        z(k, i) = c * z(k, i) - s * f;
                    }
                }
                if (early) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

}  // namespace

EigenPairs jacobi_eigen(const DenseMatrix& input) {
    const std::size_t n = input.rows();
    if (input.cols() != n) throw DimensionError("eigensolver: matrix is not square");
    DenseMatrix a = input;
    DenseMatrix v = DenseMatrix::identity(n);
    double frob = 0.0;
    for (double x : a.data()) frob += x * x;
    frob = std::sqrt(frob);
    const double threshold = 1e-15 * std::max(frob, std::numeric_limits<double>::min());
    constexpr int kMaxSweeps = 100;
    int sweep = 0;
    for (; sweep < kMaxSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (std::sqrt(off) <= threshold) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= std::numeric_limits<double>::min()) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a(r, p), arq = a(r, q);
                    const double np = c * arp - s * arq;
                    const double nq = s * arp + c * arq;
                    a(r, p) = np;
                    a(p, r) = np;
                    a(r, q) = nq;
                    a(q, r) = nq;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const double vrp = v(r, p), vrq = v(r, q);
                    v(r, p) = c * vrp - s * vrq;
                    v(r, q) = s * vrp + c * vrq;
                }
            }
        }
    }
    if (sweep == kMaxSweeps) throw NumericalError("Jacobi eigensolver did not converge");
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);
    return sorted_pairs(values, v, n);
}

EigenPairs sym_eig_smallest(const SymmetricOperator& op, std::size_t n, double norm_bound, std::size_t k,
                            const EigenOptions& options) {
    if (k == 0 || k > n) throw DimensionError("eigensolver: need 1 <= k <= n");
    const double scale = std::max(norm_bound, std::numeric_limits<double>::min());
    const double tol = options.tolerance * scale;
    const std::size_t default_steps = std::max<std::size_t>(300, 20 * k);
    const std::size_t max_restarts = options.max_restarts ? options.max_restarts : 4 * k + 10;

    std::vector<std::vector<double>> locked;
    std::vector<double> locked_values;
    std::vector<double> w(n), tmp(n);

    auto project_out = [&](std::vector<double>& x, const std::vector<std::vector<double>>& basis) {
        for (const auto& b : basis) {
            double c = dot(b, x);
            for (std::size_t i = 0; i < n; ++i) x[i] -= c * b[i];
        }
    };

    for (std::size_t restart = 0; restart < max_restarts; ++restart) {
        const std::size_t free_dim = n - locked.size();
        if (free_dim == 0) break;
        const std::size_t max_steps =
            std::min(free_dim, options.max_lanczos_steps ? options.max_lanczos_steps : default_steps);

        Rng rng(options.seed, restart);
        std::vector<double> q0(n);
        double q0n = 0.0;
        for (int attempt = 0; attempt < 5 && q0n < 1e-8; ++attempt) {
            for (auto& x : q0) x = rng.normal();
            project_out(q0, locked);
            project_out(q0, locked);
            q0n = norm2(q0);
        }
        if (q0n < 1e-8) break;
        for (auto& x : q0) x /= q0n;

        std::vector<std::vector<double>> basis{q0};
        std::vector<double> alpha, beta;
        std::vector<double> ritz;
        DenseMatrix ritz_vecs;
        std::vector<bool> converged;

        auto solve_projected = [&](double last_beta) {
            const std::size_t m = alpha.size();
            std::vector<double> d = alpha;
            std::vector<double> e(beta.begin(), beta.begin() + static_cast<std::ptrdiff_t>(m - 1));
            DenseMatrix z = DenseMatrix::identity(m);
            tridiagonal_ql(d, e, z);
            std::vector<std::size_t> order(m);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });
            ritz.assign(m, 0.0);
            ritz_vecs = DenseMatrix(m, m);
            converged.assign(m, false);
            for (std::size_t i = 0; i < m; ++i) {
                ritz[i] = d[order[i]];
                for (std::size_t r = 0; r < m; ++r) ritz_vecs(r, i) = z(r, order[i]);
                converged[i] = std::abs(last_beta * ritz_vecs(m - 1, i)) <= tol;
            }
        };

        const std::size_t want = std::min(k, free_dim);
        for (std::size_t j = 0; j < max_steps; ++j) {
            const auto& qj = basis[j];
            op(qj, w);
            project_out(w, locked);
            double a = dot(qj, w);
            alpha.push_back(a);
            for (std::size_t i = 0; i < n; ++i) w[i] -= a * qj[i];
            if (j > 0) {
                const auto& qp = basis[j - 1];
                for (std::size_t i = 0; i < n; ++i) w[i] -= beta[j - 1] * qp[i];
            }
            // Full reorthogonalisation, twice.
            for (int pass = 0; pass < 2; ++pass) {
                project_out(w, basis);
                project_out(w, locked);
            }
            double b = norm2(w);
            beta.push_back(b);
            const bool breakdown = b <= 1e-12 * scale;
            const bool last = j + 1 == max_steps;
            const std::size_t m = j + 1;
            if (breakdown || last || (m >= want && (m - want) % 10 == 0)) {
                solve_projected(breakdown ? 0.0 : b);
                bool done = true;
                for (std::size_t i = 0; i < std::min(want, m); ++i) done = done && converged[i];
                if (breakdown || last || (done && m >= want)) break;
            }
            for (std::size_t i = 0; i < n; ++i) tmp[i] = w[i] / b;
            basis.push_back(tmp);
        }

        // Lock converged pairs among the lowest `want` Ritz values.
        const std::size_t m = alpha.size();
        const double prev_kth = locked_values.size() >= k
                                    ? [&] {
                                          auto s = locked_values;
                                          std::sort(s.begin(), s.end());
                                          return s[k - 1];
                                      }()
                                    : std::numeric_limits<double>::infinity();
        double lowest_new = std::numeric_limits<double>::infinity();
        std::size_t newly = 0;
        for (std::size_t i = 0; i < std::min(want, m); ++i) {
            if (!converged[i]) continue;
            std::vector<double> y(n, 0.0);
            for (std::size_t r = 0; r < m; ++r) {
                const double c = ritz_vecs(r, i);
                for (std::size_t t = 0; t < n; ++t) y[t] += c * basis[r][t];
            }
            project_out(y, locked);
            double yn = norm2(y);
            if (yn < 0.5) continue;  // lost orthogonality; leave for a later restart
            for (auto& x : y) x /= yn;
            lowest_new = std::min(lowest_new, ritz[i]);
            locked.push_back(std::move(y));
            locked_values.push_back(ritz[i]);
            ++newly;
        }
        if (locked_values.size() >= k && std::isfinite(prev_kth) && (newly == 0 || lowest_new >= prev_kth - tol)) break;
        if (locked.size() >= n) break;
    }

    if (locked_values.size() < k)
        throw NumericalError("Lanczos eigensolver did not converge (" + std::to_string(locked_values.size()) + " of " +
                             std::to_string(k) + " eigenpairs)");
    DenseMatrix vecs(n, locked.size());
    for (std::size_t c = 0; c < locked.size(); ++c)
        for (std::size_t r = 0; r < n; ++r) vecs(r, c) = locked[c][r];
    return sorted_pairs(locked_values, vecs, k);
}

EigenPairs sym_eig_smallest(const DenseMatrix& a, std::size_t k, const EigenOptions& options) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw DimensionError("eigensolver: matrix is not square");
    if (k == 0 || k > n) throw DimensionError("eigensolver: need 1 <= k <= n");
    const double sym_tol = 1e-8 * std::max(1.0, a.max_abs());
    DenseMatrix sym = a;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(a(i, j) - a(j, i)) > sym_tol) throw DimensionError("eigensolver: matrix is not symmetric");
            double avg = 0.5 * (a(i, j) + a(j, i));
            sym(i, j) = avg;
            sym(j, i) = avg;
        }
    if (n <= options.dense_threshold) {
        EigenPairs all = jacobi_eigen(sym);
        EigenPairs out;
        out.values.assign(all.values.begin(), all.values.begin() + static_cast<std::ptrdiff_t>(k));
        out.vectors = DenseMatrix(n, k);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < k; ++c) out.vectors(r, c) = all.vectors(r, c);
        return out;
    }
    // Gershgorin bound on the spectral norm.
    double bound = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (double v : sym.row(i)) s += std::abs(v);
        bound = std::max(bound, s);
    }
    SymmetricOperator op = [&sym](std::span<const double> x, std::span<double> y) {
        for (std::size_t i = 0; i < sym.rows(); ++i) y[i] = dot(sym.row(i), x);
    };
    return sym_eig_smallest(op, n, bound, k, options);
}

}  // namespace lexind
