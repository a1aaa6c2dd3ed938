#include <algorithm>
#include <cmath>

#include "lexind/error.hpp"
#include "lexind/numerics.hpp"

namespace lexind {

double mean(std::span<const double> x) {
    if (x.empty()) throw DimensionError("mean of an empty vector");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double stddev(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    double m = mean(x), ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionError("pearson: vectors differ in length");
    if (x.size() < 2) throw DimensionError("pearson: need at least two observations");
    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    // Relative test so that values equal up to rounding count as constant.
    auto constant = [](double ss, double m, std::size_t n) {
        return ss <= 1e-28 * static_cast<double>(n) * std::max(1.0, m * m);
    };
    if (constant(sxx, mx, x.size()) || constant(syy, my, y.size()))
        throw UndefinedCorrelationError("pearson: zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace lexind
