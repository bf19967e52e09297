#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "ergopt/grid_function.hpp"
#include "ergopt/rng.hpp"

using namespace ergopt;

namespace {

GridFunction sampled(const std::vector<double>& xs, double (*f)(double)) {
    std::vector<double> ys(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) ys[i] = f(xs[i]);
    return GridFunction(xs, ys);
}

} // namespace

TEST_CASE("grid function interpolation and domain") {
    GridFunction g({0.0, 1.0, 2.0}, {0.0, 2.0, 3.0});
    CHECK(g(0.5) == doctest::Approx(1.0));
    CHECK(g(1.5) == doctest::Approx(2.5));
    CHECK(g(2.0) == 3.0);
    CHECK_THROWS_AS(g(2.5), std::domain_error);
    CHECK_THROWS_AS(GridFunction({0.0, 0.0}, {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("conjugate of the zero function is zero") {
    auto xs = uniform_grid(0.0, 2.0, 101);
    GridFunction zero(xs, std::vector<double>(xs.size(), 0.0));
    GridFunction star = concave_conjugate(zero, uniform_grid(0.0, 1.0, 51));
    for (double y : star.ys) CHECK(y == doctest::Approx(0.0)); // minimizer y = 0
}

TEST_CASE("conjugate worked example: g(y) = min(y, 1) on [0, 2]") {
    auto ys_grid = uniform_grid(0.0, 2.0, 201); // contains the kink at 1
    std::vector<double> vals(ys_grid.size());
    for (size_t i = 0; i < ys_grid.size(); ++i) vals[i] = std::min(ys_grid[i], 1.0);
    GridFunction g(ys_grid, vals);
    auto xg = uniform_grid(0.0, 2.0, 81);
    GridFunction star = concave_conjugate(g, xg);
    for (size_t i = 0; i < star.xs.size(); ++i) {
        double x = star.xs[i];
        double expect = x <= 1.0 ? x - 1.0 : 0.0;
        CHECK(star.ys[i] == doctest::Approx(expect).epsilon(1e-14));
    }
    // g*(0) = -max g
    CHECK(star(0.0) == doctest::Approx(-1.0));
}

TEST_CASE("conjugate equals brute force on random bounded grid functions") {
    for (int trial = 0; trial < 50; ++trial) {
        int n = 20 + static_cast<int>(uniform01(11, trial) * 200);
        auto xs = uniform_grid(0.0, 1.0 + 3.0 * uniform01(12, trial), n);
        std::vector<double> ys(xs.size());
        for (size_t i = 0; i < ys.size(); ++i)
            ys[i] = 2.0 * uniform01(13, trial * 1000 + static_cast<int>(i)) - 1.0;
        GridFunction g(xs, ys);
        auto xg = uniform_grid(0.0, 2.0, 97);
        GridFunction star = concave_conjugate(g, xg);
        for (size_t i = 0; i < xg.size(); ++i)
            CHECK(std::abs(star.ys[i] - conjugate_bruteforce(g, xg[i])) <= 1e-12);
        CHECK(star.concavity_margin() >= -1e-12);
    }
}

TEST_CASE("conjugation reverses order") {
    auto xs = uniform_grid(0.0, 2.0, 120);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> lo(xs.size()), hi(xs.size());
        for (size_t i = 0; i < xs.size(); ++i) {
            lo[i] = uniform01(21, trial * 500 + static_cast<int>(i));
            hi[i] = lo[i] + uniform01(22, trial * 500 + static_cast<int>(i));
        }
        GridFunction g1(xs, lo), g2(xs, hi);
        auto xg = uniform_grid(0.0, 1.5, 60);
        GridFunction s1 = concave_conjugate(g1, xg), s2 = concave_conjugate(g2, xg);
        for (size_t i = 0; i < xg.size(); ++i) CHECK(s1.ys[i] >= s2.ys[i] - 1e-12);
    }
}

TEST_CASE("double conjugation reproduces concave non-decreasing functions on [0,1]") {
    // mirrors the capped-conjugate chain: theta2 = min(g*, g*(1)), then *
    auto run = [](double (*f)(double)) {
        auto xs = uniform_grid(0.0, 4.0, 1601); // node at every quarter, includes 1
        GridFunction g = sampled(xs, f);
        GridFunction gs = concave_conjugate(g, xs);
        double cap = gs(1.0);
        std::vector<double> capped(gs.ys.size());
        for (size_t i = 0; i < gs.ys.size(); ++i) capped[i] = std::min(gs.ys[i], cap);
        GridFunction g2(xs, capped);
        GridFunction back = concave_conjugate(g2, xs);
        // the conjugate pair is fixed only after the +g*(1) shift
        for (size_t i = 0; i < xs.size() && xs[i] <= 1.0; ++i)
            CHECK(back.ys[i] + cap == doctest::Approx(g.ys[i]).epsilon(1e-9).scale(1.0));
    };
    run(+[](double x) { return std::min(x, 1.0); });
    run(+[](double x) { return std::sqrt(std::min(x, 1.0)); });
}

TEST_CASE("upper concave hull oracle") {
    auto xs = uniform_grid(0.0, 1.0, 400);
    std::vector<double> ys(xs.size());
    for (size_t i = 0; i < xs.size(); ++i)
        ys[i] = std::sin(3.0 * xs[i]) * 0.3 + 0.5 * xs[i] + 0.2 * uniform01(31, i);
    GridFunction g(xs, ys);
    GridFunction hull = upper_concave_hull(g);
    // hull dominates the samples, is concave, and touches the samples
    double min_gap = 1e300;
    for (size_t i = 0; i < xs.size(); ++i) {
        CHECK(hull.ys[i] >= ys[i] - 1e-12);
        min_gap = std::min(min_gap, hull.ys[i] - ys[i]);
    }
    CHECK(min_gap <= 1e-12);
    CHECK(hull.concavity_margin() >= -1e-10);
}
