#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xrl/linalg.hpp"
#include "xrl/rng.hpp"

namespace xrl {

using Series = std::vector<double>;

/// Pointwise arithmetic mean of equally long series (the per-agent
/// aggregation used for every plot and statistic).
inline Series mean_trace(const std::vector<Series>& traces) {
    if (traces.empty()) throw std::invalid_argument("mean_trace: no input traces");
    const std::size_t n = traces.front().size();
    for (const auto& t : traces)
        if (t.size() != n) throw std::invalid_argument("mean_trace: length mismatch");
    Series mean(n, 0.0);
    for (const auto& t : traces)
        for (std::size_t i = 0; i < n; ++i) mean[i] += t[i];
    for (double& v : mean) v /= static_cast<double>(traces.size());
    return mean;
}

/// Sample Pearson correlation coefficient. A zero-variance input has no
/// defined correlation; that case is reported as an empty optional rather
/// than silently collapsing to a number.
inline std::optional<double> pearson(const Series& x, const Series& y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
    if (x.size() < 2) throw std::invalid_argument("pearson: need at least 2 points");
    // constant series have no defined correlation; catch them exactly rather
    // than through a rounding-contaminated variance
    bool x_const = true, y_const = true;
    for (std::size_t i = 1; i < x.size(); ++i) {
        x_const = x_const && x[i] == x[0];
        y_const = y_const && y[i] == y[0];
    }
    if (x_const || y_const) return std::nullopt;
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Mean squared pointwise difference.
inline double mse(const Series& x, const Series& y) {
    if (x.size() != y.size()) throw std::invalid_argument("mse: length mismatch");
    if (x.empty()) throw std::invalid_argument("mse: empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        sum += d * d;
    }
    return sum / static_cast<double>(x.size());
}

/// Control signal: each point scaled by an independent Gaussian factor with
/// mean 1 and standard deviation 0.2, then clamped back into [0, 1] so the
/// result remains a probability trace.
inline Series noisy_control(const Series& trace, Rng& rng) {
    Series out(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i)
        out[i] = std::clamp(trace[i] * rng.gauss(1.0, 0.2), 0.0, 1.0);
    return out;
}

namespace detail {

/// Convolution weights of the least-squares local polynomial fit evaluated
/// at the window center: w = A (A^T A)^{-1} e0 with A[i][k] = i^k over
/// positions -h..h.
inline std::vector<double> savgol_weights(int window, int order) {
    const int h = window / 2;
    const int m = order + 1;
    std::vector<double> ata(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = -h; i <= h; ++i) {
        double pi = 1.0;
        std::vector<double> powers(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k) {
            powers[static_cast<std::size_t>(k)] = pi;
            pi *= i;
        }
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < m; ++c)
                ata[static_cast<std::size_t>(r) * m + c] +=
                    powers[static_cast<std::size_t>(r)] * powers[static_cast<std::size_t>(c)];
    }
    std::vector<double> e0(static_cast<std::size_t>(m), 0.0);
    e0[0] = 1.0;
    const std::vector<double> z = solve_linear(std::move(ata), std::move(e0), m);

    std::vector<double> w(static_cast<std::size_t>(window), 0.0);
    for (int i = -h; i <= h; ++i) {
        double pi = 1.0;
        double acc = 0.0;
        for (int k = 0; k < m; ++k) {
            acc += z[static_cast<std::size_t>(k)] * pi;
            pi *= i;
        }
        w[static_cast<std::size_t>(i + h)] = acc;
    }
    return w;
}

// mirror index: reflection without repeating the edge sample
inline std::size_t mirror_index(long long k, std::size_t n) {
    const long long last = static_cast<long long>(n) - 1;
    while (k < 0 || k > last) {
        if (k < 0) k = -k;
        if (k > last) k = 2 * last - k;
    }
    return static_cast<std::size_t>(k);
}

}  // namespace detail

/// Savitzky-Golay smoothing: least-squares local polynomial fit of the given
/// order over an odd-length window, applied as a convolution. Edges use
/// mirror padding, so the output has the input's length. Inside the interior
/// (at least half a window away from either end) polynomials of degree at
/// most `order` pass through unchanged.
inline Series savgol(const Series& trace, int window, int order) {
    if (window <= 0 || window % 2 == 0) throw std::invalid_argument("savgol: window must be odd and positive");
    if (order < 0 || order >= window) throw std::invalid_argument("savgol: order must be < window");
    if (trace.size() < static_cast<std::size_t>(window))
        throw std::invalid_argument("savgol: trace shorter than window");

    const auto w = detail::savgol_weights(window, order);
    const int h = window / 2;
    Series out(trace.size(), 0.0);
    for (std::size_t i = 0; i < trace.size(); ++i) {
        double acc = 0.0;
        for (int j = -h; j <= h; ++j)
            acc += w[static_cast<std::size_t>(j + h)] *
                   trace[detail::mirror_index(static_cast<long long>(i) + j, trace.size())];
        out[i] = acc;
    }
    return out;
}

/// Labeled symmetric matrix of pairwise correlations with a unit diagonal.
/// Entries without a defined correlation (zero-variance series) stay empty.
struct CorrelationMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<std::optional<double>>> values;

    std::optional<double> at(std::size_t r, std::size_t c) const { return values[r][c]; }
};

inline CorrelationMatrix correlation_matrix(const std::vector<std::pair<std::string, Series>>& traces) {
    if (traces.size() < 2) throw std::invalid_argument("correlation_matrix: need at least 2 traces");
    CorrelationMatrix cm;
    cm.labels.reserve(traces.size());
    for (const auto& [label, series] : traces) cm.labels.push_back(label);
    cm.values.assign(traces.size(), std::vector<std::optional<double>>(traces.size()));
    for (std::size_t i = 0; i < traces.size(); ++i) {
        cm.values[i][i] = 1.0;
        for (std::size_t j = i + 1; j < traces.size(); ++j) {
            const auto r = pearson(traces[i].second, traces[j].second);
            cm.values[i][j] = r;
            cm.values[j][i] = r;
        }
    }
    return cm;
}

struct MseRow {
    std::string method;
    std::vector<double> values;  // one per action label
};

struct MseTable {
    std::vector<std::string> action_labels;
    std::vector<MseRow> rows;
};

/// MSE of every candidate method against the baseline traces, one column per
/// action. `others` holds, per method, one series per action aligned with
/// `baseline`.
inline MseTable mse_table(const std::vector<Series>& baseline,
                          const std::vector<std::pair<std::string, std::vector<Series>>>& others,
                          const std::vector<std::string>& action_labels) {
    if (baseline.size() != action_labels.size())
        throw std::invalid_argument("mse_table: baseline/action label mismatch");
    MseTable table;
    table.action_labels = action_labels;
    for (const auto& [method, series_per_action] : others) {
        if (series_per_action.size() != baseline.size())
            throw std::invalid_argument("mse_table: action count mismatch for " + method);
        MseRow row;
        row.method = method;
        for (std::size_t a = 0; a < baseline.size(); ++a)
            row.values.push_back(mse(series_per_action[a], baseline[a]));
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace xrl
