#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace xrl {

/// Solves the dense n x n system A x = b by Gaussian elimination with
/// partial pivoting. `a` is row-major and consumed in place.
inline std::vector<double> solve_linear(std::vector<double> a, std::vector<double> b, int n) {
    if (n <= 0 || a.size() != static_cast<std::size_t>(n) * n || b.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("solve_linear: bad dimensions");
    auto at = [&](int r, int c) -> double& { return a[static_cast<std::size_t>(r) * n + c]; };

    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(at(r, col)) > std::fabs(at(pivot, col))) pivot = r;
        if (std::fabs(at(pivot, col)) < 1e-300)
            throw std::runtime_error("solve_linear: singular system");
        if (pivot != col) {
            for (int c = col; c < n; ++c) std::swap(at(pivot, c), at(col, c));
            std::swap(b[pivot], b[col]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = at(r, col) / at(col, col);
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) at(r, c) -= f * at(col, c);
            b[r] -= f * b[col];
        }
    }

    std::vector<double> x(static_cast<std::size_t>(n));
    for (int r = n - 1; r >= 0; --r) {
        double sum = b[r];
        for (int c = r + 1; c < n; ++c) sum -= at(r, c) * x[c];
        x[r] = sum / at(r, r);
    }
    return x;
}

}  // namespace xrl
