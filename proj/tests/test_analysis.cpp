#include <doctest.h>

#include <cmath>
#include <vector>

#include "xrl/analysis.hpp"
#include "xrl/rng.hpp"

#include "support/oracles.hpp"

using namespace xrl;

namespace {

Series random_series(Rng& rng, std::size_t n, double lo = 0.0, double hi = 1.0) {
    Series s(n);
    for (double& v : s) v = lo + (hi - lo) * rng.uniform01();
    return s;
}

}  // namespace

TEST_CASE("mean trace") {
    SUBCASE("a single trace is its own mean") {
        const Series t{0.1, 0.4, 0.9};
        CHECK(mean_trace({t}) == t);
    }

    SUBCASE("two constant traces average pointwise") {
        const Series a(5, 0.2), b(5, 0.4);
        for (double v : mean_trace({a, b})) CHECK(v == doctest::Approx(0.3));
    }

    SUBCASE("twenty random traces match an independent two-pass fold") {
        Rng rng(1);
        std::vector<Series> traces;
        for (int i = 0; i < 20; ++i) traces.push_back(random_series(rng, 50));
        const Series mean = mean_trace(traces);
        for (std::size_t i = 0; i < mean.size(); ++i) {
            std::vector<double> column;
            for (const auto& t : traces) column.push_back(t[i]);
            CHECK(mean[i] == doctest::Approx(oracles::two_pass_mean(column)).epsilon(1e-12));
        }
    }

    SUBCASE("errors") {
        CHECK_THROWS_AS(mean_trace({}), std::invalid_argument);
        CHECK_THROWS_AS(mean_trace({Series{1.0}, Series{1.0, 2.0}}), std::invalid_argument);
    }
}

TEST_CASE("pearson correlation") {
    SUBCASE("perfect correlation and anti-correlation") {
        const Series x{1, 2, 3, 4};
        Series y = x;
        CHECK(*pearson(x, y) == doctest::Approx(1.0));
        for (double& v : y) v = -v;
        CHECK(*pearson(x, y) == doctest::Approx(-1.0));
    }

    SUBCASE("hand-computed value") {
        const Series x{1, 2, 3};
        const Series y{2, 4, 7};
        // 5 / sqrt(2 * 38/3)
        CHECK(*pearson(x, y) == doctest::Approx(0.9933992677987828).epsilon(1e-9));
        CHECK(*pearson(x, y) == doctest::Approx(oracles::brute_pearson(x, y)).epsilon(1e-12));
    }

    SUBCASE("zero variance is reported as undefined, never as zero") {
        const Series flat(4, 0.5);
        const Series vary{0.1, 0.2, 0.3, 0.4};
        CHECK_FALSE(pearson(flat, vary).has_value());
        CHECK_FALSE(pearson(vary, flat).has_value());
    }

    SUBCASE("agrees with the brute-force formula on random inputs") {
        Rng rng(2);
        for (int trial = 0; trial < 100; ++trial) {
            const Series x = random_series(rng, 40, -3.0, 5.0);
            const Series y = random_series(rng, 40, -1.0, 1.0);
            CHECK(*pearson(x, y) == doctest::Approx(oracles::brute_pearson(x, y)).epsilon(1e-9));
        }
    }

    SUBCASE("invariant under positive affine transforms") {
        Rng rng(3);
        const Series x = random_series(rng, 30);
        const Series y = random_series(rng, 30);
        Series x2 = x;
        for (double& v : x2) v = 2.5 * v + 7.0;
        CHECK(*pearson(x2, y) == doctest::Approx(*pearson(x, y)).epsilon(1e-9));
    }

    SUBCASE("bounded in [-1, 1]") {
        Rng rng(4);
        for (int trial = 0; trial < 50; ++trial) {
            const auto r = pearson(random_series(rng, 10), random_series(rng, 10));
            CHECK(*r >= -1.0);
            CHECK(*r <= 1.0);
        }
    }

    SUBCASE("errors") {
        CHECK_THROWS_AS(pearson(Series{1}, Series{1}), std::invalid_argument);
        CHECK_THROWS_AS(pearson(Series{1, 2}, Series{1, 2, 3}), std::invalid_argument);
    }
}

TEST_CASE("mean squared error") {
    CHECK(mse(Series{1, 2}, Series{1, 2}) == 0.0);
    CHECK(mse(Series{0, 0}, Series{1, 1}) == doctest::Approx(1.0));
    CHECK(mse(Series{0.1, 0.2}, Series{0.3, 0.0}) == doctest::Approx(0.04).epsilon(1e-12));

    SUBCASE("symmetric, nonnegative, zero only on equality") {
        Rng rng(5);
        for (int trial = 0; trial < 50; ++trial) {
            const Series x = random_series(rng, 20);
            const Series y = random_series(rng, 20);
            CHECK(mse(x, y) == doctest::Approx(mse(y, x)));
            CHECK(mse(x, y) > 0.0);
            CHECK(mse(x, y) == doctest::Approx(oracles::brute_mse(x, y)).epsilon(1e-9));
        }
    }

    SUBCASE("errors") {
        CHECK_THROWS_AS(mse(Series{}, Series{}), std::invalid_argument);
        CHECK_THROWS_AS(mse(Series{1}, Series{1, 2}), std::invalid_argument);
    }
}

TEST_CASE("noisy control signal") {
    SUBCASE("zero traces stay zero under multiplicative noise") {
        Rng rng(6);
        const Series zero(100, 0.0);
        CHECK(noisy_control(zero, rng) == zero);
    }

    SUBCASE("the mean factor is one") {
        Rng rng(7);
        const Series half(10000, 0.5);
        const Series noisy = noisy_control(half, rng);
        double mean = 0.0;
        for (double v : noisy) mean += v;
        mean /= static_cast<double>(noisy.size());
        CHECK(mean == doctest::Approx(0.5).epsilon(0.02));
    }

    SUBCASE("output never leaves [0,1]") {
        Rng rng(8);
        Series high(5000, 0.98);
        const Series noisy = noisy_control(high, rng);
        for (double v : noisy) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("Savitzky-Golay smoothing") {
    SUBCASE("constant traces pass through unchanged") {
        const Series flat(40, 0.7);
        const Series out = savgol(flat, 15, 3);
        REQUIRE(out.size() == flat.size());
        for (double v : out) CHECK(v == doctest::Approx(0.7).epsilon(1e-12));
    }

    SUBCASE("cubic polynomials are reproduced exactly in the interior") {
        Series poly(60);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const double x = static_cast<double>(i) / 10.0;
            poly[i] = 0.3 + 0.8 * x - 0.24 * x * x + 0.011 * x * x * x;
        }
        const Series out = savgol(poly, 15, 3);
        for (std::size_t i = 7; i + 7 < poly.size(); ++i)
            CHECK(out[i] == doctest::Approx(poly[i]).epsilon(1e-9));
    }

    SUBCASE("interior response matches an independent least-squares fit") {
        Rng rng(9);
        const Series input = random_series(rng, 50);
        const Series out = savgol(input, 15, 3);
        std::vector<double> xs(15);
        for (int i = 0; i < 15; ++i) xs[static_cast<std::size_t>(i)] = i - 7;
        for (std::size_t i = 7; i + 7 < input.size(); ++i) {
            const std::vector<double> ys(input.begin() + static_cast<long>(i) - 7,
                                         input.begin() + static_cast<long>(i) + 8);
            CHECK(out[i] == doctest::Approx(oracles::polyfit_eval(xs, ys, 3, 0.0)).epsilon(1e-9));
        }
    }

    SUBCASE("impulse response gives the convolution weights") {
        Series impulse(31, 0.0);
        impulse[15] = 1.0;
        const Series out = savgol(impulse, 15, 3);
        // the weight at offset j is the least-squares fit evaluated with a
        // unit sample at -j
        std::vector<double> xs(15);
        for (int i = 0; i < 15; ++i) xs[static_cast<std::size_t>(i)] = i - 7;
        for (int j = -7; j <= 7; ++j) {
            std::vector<double> ys(15, 0.0);
            ys[static_cast<std::size_t>(7 - j)] = 1.0;
            CHECK(out[static_cast<std::size_t>(15 + j)] ==
                  doctest::Approx(oracles::polyfit_eval(xs, ys, 3, 0.0)).epsilon(1e-9));
        }
    }

    SUBCASE("linear in its input") {
        Rng rng(10);
        const Series x = random_series(rng, 40);
        const Series y = random_series(rng, 40);
        Series combo(40);
        for (std::size_t i = 0; i < 40; ++i) combo[i] = 1.7 * x[i] - 0.4 * y[i];
        const Series sx = savgol(x, 11, 2), sy = savgol(y, 11, 2), sc = savgol(combo, 11, 2);
        for (std::size_t i = 0; i < 40; ++i)
            CHECK(sc[i] == doctest::Approx(1.7 * sx[i] - 0.4 * sy[i]).epsilon(1e-9));
    }

    SUBCASE("preconditions") {
        const Series data(20, 0.0);
        CHECK_THROWS_AS(savgol(data, 14, 3), std::invalid_argument);  // even window
        CHECK_THROWS_AS(savgol(data, 15, 15), std::invalid_argument); // order too high
        CHECK_THROWS_AS(savgol(data, 21, 3), std::invalid_argument);  // trace too short
    }
}

TEST_CASE("correlation matrix") {
    SUBCASE("two identical traces give all ones") {
        const Series t{0.1, 0.5, 0.8};
        const auto cm = correlation_matrix({{"a", t}, {"b", t}});
        REQUIRE(cm.labels.size() == 2);
        for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t c = 0; c < 2; ++c) CHECK(*cm.at(r, c) == doctest::Approx(1.0));
    }

    SUBCASE("exactly symmetric with a unit diagonal") {
        Rng rng(11);
        std::vector<std::pair<std::string, Series>> traces;
        for (int i = 0; i < 5; ++i)
            traces.emplace_back("t" + std::to_string(i), random_series(rng, 25));
        const auto cm = correlation_matrix(traces);
        for (std::size_t r = 0; r < 5; ++r) {
            CHECK(*cm.at(r, r) == 1.0);
            for (std::size_t c = 0; c < 5; ++c) CHECK(cm.at(r, c) == cm.at(c, r));
        }
    }

    SUBCASE("undefined entries propagate as empty") {
        const Series flat(6, 0.2);
        Rng rng(12);
        const auto cm = correlation_matrix({{"flat", flat}, {"x", random_series(rng, 6)}});
        CHECK(*cm.at(0, 0) == 1.0);  // the diagonal is 1 by definition
        CHECK_FALSE(cm.at(0, 1).has_value());
        CHECK_FALSE(cm.at(1, 0).has_value());
    }

    SUBCASE("needs at least two traces") {
        CHECK_THROWS_AS(correlation_matrix({{"only", Series{1, 2}}}), std::invalid_argument);
    }
}

TEST_CASE("mse table layout") {
    const std::vector<Series> baseline{{0.1, 0.2}, {0.3, 0.4}, {0.5, 0.6}};
    std::vector<std::pair<std::string, std::vector<Series>>> others;
    others.emplace_back("learning", std::vector<Series>{{0.1, 0.2}, {0.3, 0.4}, {0.5, 0.6}});
    others.emplace_back("noisy", std::vector<Series>{{0.2, 0.2}, {0.3, 0.5}, {0.4, 0.6}});

    const auto table = mse_table(baseline, others, {"a_L", "a_R", "a_S"});
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].method == "learning");
    for (double v : table.rows[0].values) CHECK(v == 0.0);  // self vs self
    CHECK(table.rows[1].values[0] == doctest::Approx(0.005));
    CHECK(table.rows[1].values[1] == doctest::Approx(0.005));
    CHECK(table.rows[1].values[2] == doctest::Approx(0.005));
    CHECK(table.action_labels.size() == 3);
}
