#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace salem {

// Pairwise (cascade) summation: deterministic, error O(log n) ulps instead of O(n).
template <typename T>
T pairwise_sum(const T* data, std::size_t n) {
    if (n == 0) return T{};
    if (n <= 16) {
        T acc = data[0];
        for (std::size_t i = 1; i < n; ++i) acc += data[i];
        return acc;
    }
    std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

template <typename T>
T pairwise_sum(const std::vector<T>& v) {
    return pairwise_sum(v.data(), v.size());
}

struct LinFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t points = 0;
};

// Ordinary least squares y = slope*x + intercept.
inline LinFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    LinFit fit;
    fit.points = xs.size();
    const std::size_t n = xs.size();
    if (n < 2) {
        fit.intercept = n == 1 ? ys[0] : 0.0;
        fit.r_squared = 1.0;
        return fit;
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) { mx += xs[i]; my += ys[i]; }
    mx /= double(n);
    my /= double(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) {
        fit.intercept = my;
        fit.r_squared = 0.0;
        return fit;
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

} // namespace salem
