#include <cmath>
#include <limits>

#include "lexind/error.hpp"
#include "lexind/kernels.hpp"
#include "lexind/numerics.hpp"
#include "lexind/random.hpp"

namespace lexind {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        double diff = a[j] - b[j];
        d += diff * diff;
    }
    return d;
}

DenseMatrix plus_plus_seeds(const DenseMatrix& points, std::size_t k, Rng& rng) {
    const std::size_t n = points.rows();
    DenseMatrix centers(k, points.cols());
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    std::size_t chosen = rng.index(n);
    for (std::size_t c = 0; c < k; ++c) {
        auto src = points.row(chosen);
        std::copy(src.begin(), src.end(), centers.row(c).begin());
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], squared_distance(points.row(i), centers.row(c)));
            total += d2[i];
        }
        if (c + 1 == k) break;
        if (total <= 0.0) {
            // Every point coincides with a centre; pick uniformly.
            chosen = rng.index(n);
            continue;
        }
        double target = rng.uniform() * total;
        double acc = 0.0;
        chosen = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            acc += d2[i];
            if (acc > target && d2[i] > 0.0) {
                chosen = i;
                break;
            }
        }
    }
    return centers;
}

KMeansResult lloyd(const DenseMatrix& points, std::size_t k, const KMeansOptions& options, Rng& rng) {
    const std::size_t n = points.rows(), dim = points.cols();
    KMeansResult res;
    res.centers = plus_plus_seeds(points, k, rng);
    res.assignment.assign(n, 0);
    std::vector<double> dist2(n);
    for (std::size_t it = 0; it < options.max_iterations; ++it) {
        kernels::assign_nearest(points, res.centers, res.assignment, dist2);
        double wcss = 0.0;
        for (double d : dist2) wcss += d;
        res.objective_history.push_back(wcss);
        res.wcss = wcss;
        res.iterations = it + 1;

        DenseMatrix next(k, dim);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            auto c = res.assignment[i];
            ++counts[c];
            auto src = points.row(i);
            auto dst = next.row(c);
            for (std::size_t j = 0; j < dim; ++j) dst[j] += src[j];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // Re-seed an empty cluster at the point farthest from its centre.
                std::size_t far = 0;
                for (std::size_t i = 1; i < n; ++i)
                    if (dist2[i] > dist2[far]) far = i;
                auto src = points.row(far);
                std::copy(src.begin(), src.end(), next.row(c).begin());
                dist2[far] = 0.0;
                continue;
            }
            for (auto& x : next.row(c)) x /= static_cast<double>(counts[c]);
        }
        double shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) shift = std::max(shift, std::sqrt(squared_distance(next.row(c), res.centers.row(c))));
        res.centers = std::move(next);
        if (shift < options.tolerance) {
            // Final assignment against the settled centres.
            kernels::assign_nearest(points, res.centers, res.assignment, dist2);
            double final_wcss = 0.0;
            for (double d : dist2) final_wcss += d;
            res.objective_history.push_back(final_wcss);
            res.wcss = final_wcss;
            break;
        }
    }
    return res;
}

}  // namespace

KMeansResult kmeans(const DenseMatrix& points, std::size_t k, const KMeansOptions& options) {
    const std::size_t n = points.rows();
    if (k == 0) throw DimensionError("kmeans: k must be positive");
    if (k > n) throw DimensionError("kmeans: k=" + std::to_string(k) + " exceeds " + std::to_string(n) + " points");
    if (options.restarts == 0) throw DimensionError("kmeans: restarts must be positive");
    std::vector<KMeansResult> runs(options.restarts);
    const auto count = static_cast<std::int64_t>(options.restarts);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t r = 0; r < count; ++r) {
        Rng rng(options.seed, static_cast<std::uint64_t>(r));
        runs[static_cast<std::size_t>(r)] = lloyd(points, k, options, rng);
    }
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r)
        if (runs[r].wcss < runs[best].wcss) best = r;
    KMeansResult out = std::move(runs[best]);
    out.best_restart = best;
    return out;
}

}  // namespace lexind
