#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "ergopt/maps.hpp"

using namespace ergopt;

namespace {

// Independent bisection oracle for the implicit speed function of the
// inverse Manneville-Pomeau branch: v = x^s (1-v)^(s+1).
double mp_inverse_v_bisect(double s, double x) {
    auto residual = [&](double v) { return v - std::pow(x, s) * std::pow(1.0 - v, s + 1.0); };
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (residual(mid) > 0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("mp family evaluates the neutral form exactly") {
    IntervalMap mp = IntervalMap::manneville_pomeau(1.0);
    CHECK(mp(0.25) == doctest::Approx(0.3125).epsilon(1e-15));
    CHECK(mp(0.0) == 0.0);
    CHECK(mp.orientation() == Orientation::AwayFromZero);
    CHECK(mp.branch_count() == 2);
    // branch cut: c(1+c) = 1
    double c = *mp.branch_cut();
    CHECK(c * (1.0 + c) == doctest::Approx(1.0).epsilon(1e-14));
    // neutral form on [0, c]
    for (double x : {0.01, 0.1, 0.3, 0.5}) {
        CHECK(mp(x) == doctest::Approx(x * (1.0 + mp.V().eval(x))).epsilon(1e-15));
    }
}

TEST_CASE("farey maps and inverse branches") {
    IntervalMap f1 = IntervalMap::farey(1.0);
    CHECK(f1(0.5) == doctest::Approx(1.0).epsilon(1e-14)); // x/(1-x) at 1/2
    IntervalMap g1 = IntervalMap::farey_inverse(1.0);
    CHECK(g1(1.0) == doctest::Approx(0.5).epsilon(1e-15)); // x/(1+x) at 1

    // closed form x = y/(1+y) for the first branch of F_1
    CHECK(f1.inverse_branch(0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(f1.inverse_branch(0, 0.0) == 0.0);

    // second branch of the farey map is strictly decreasing
    CHECK(f1.branch(1).increasing == false);
    double prev = f1(0.51);
    for (double x : {0.6, 0.7, 0.8, 0.9, 1.0}) {
        double cur = f1(x);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("log family") {
    IntervalMap t = IntervalMap::log_family(0.5, 0.2);
    CHECK(t(0.75) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(t(0.0) == 0.0);
    CHECK(*t.lambda() == doctest::Approx(2.0));
    // parameters breaking the monotonicity of the neutral branch are rejected
    CHECK_THROWS_AS(IntervalMap::log_family(0.5, 1.0), std::invalid_argument);
    // the speed-function handle stays available for any tau in (0,1], theta > 0
    RegVaryingFn v = make_v_log(1.0, 1.0);
    CHECK(v.sigma == 1.0);
    CHECK(v.eval(0.0) == 0.0);
}

TEST_CASE("mp-inverse speed function solves the implicit identity") {
    IntervalMap u = IntervalMap::mp_inverse(0.5);
    double v_oracle = mp_inverse_v_bisect(0.5, 0.25);
    double v = u.V().eval(0.25);
    CHECK(std::abs(v - std::pow(0.25, 0.5) * std::pow(1.0 - v, 1.5)) <= 1e-14);
    CHECK(v == doctest::Approx(v_oracle).epsilon(1e-12));
    // U_s(x) = x (1 - V(x)), single decreasing-to-zero branch
    CHECK(u.branch_count() == 1);
    CHECK(u(0.25) == doctest::Approx(0.25 * (1.0 - v)).epsilon(1e-15));
    // inverse branch is the forward MP map restricted to [0, c]
    double y = u(0.25);
    CHECK(u.inverse_branch(0, y) == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("parameter validation names the constraint") {
    CHECK_THROWS_WITH_AS(IntervalMap::manneville_pomeau(-1.0), "mp: s must be > 0",
                         std::invalid_argument);
    CHECK_THROWS_AS(IntervalMap::farey(1.5), std::invalid_argument);
    CHECK_THROWS_AS(make_map("nope", {}), std::invalid_argument);
    CHECK_THROWS_AS(make_map("mp", {}), std::invalid_argument);
    CHECK(make_map("farey-g", {{"rho", 1.0}}).orientation() == Orientation::TowardZero);
}

TEST_CASE("inverse_branch rejects values outside the branch image") {
    IntervalMap g1 = IntervalMap::farey_inverse(1.0);
    CHECK_THROWS_AS(g1.inverse_branch(0, 0.9), std::domain_error); // image is [0, 1/2]
}

TEST_CASE("branch round-trip: inverse o eval = identity") {
    for (const IntervalMap& m :
         {IntervalMap::manneville_pomeau(0.5), IntervalMap::farey(1.0), IntervalMap::h_family(0.5),
          IntervalMap::farey_inverse(0.7), IntervalMap::mp_inverse(0.5),
          IntervalMap::log_family(0.5, 0.2)}) {
        for (int b = 0; b < m.branch_count(); ++b) {
            const Branch& br = m.branch(b);
            for (int i = 1; i < 1000; ++i) {
                double x = br.lo + (br.hi - br.lo) * i / 1000.0;
                double rt = m.inverse_branch(b, br.eval(x));
                CHECK(std::abs(rt - x) <= 1e-12);
            }
        }
    }
}

TEST_CASE("neutral fixed point: orbit side matches orientation") {
    IntervalMap mp = IntervalMap::manneville_pomeau(0.5);
    IntervalMap g1 = IntervalMap::farey_inverse(1.0);
    for (int i = 1; i <= 100; ++i) {
        double x = *mp.branch_cut() * i / 101.0;
        CHECK(mp(x) > x); // away from zero
        double y = g1.V().valid_radius * i / 101.0;
        CHECK(g1(y) < y); // toward zero
    }
}

TEST_CASE("class-J right branch expands at the declared rate") {
    for (const IntervalMap& m : {IntervalMap::h_family(1.0), IntervalMap::manneville_pomeau(0.5),
                                 IntervalMap::log_family(0.5, 0.2)}) {
        REQUIRE(m.in_class_J());
        double lambda = *m.lambda();
        double c = *m.branch_cut();
        for (int i = 0; i < 500; ++i) {
            double x = c + (1.0 - c) * (i + 0.5) / 501.0;
            double y = x + (1.0 - c) / 501.0 * 0.4;
            CHECK(std::abs(m(y) - m(x)) >= lambda * std::abs(y - x) * (1.0 - 1e-9));
        }
    }
}

TEST_CASE("regular variation ratios") {
    // pure power: ratio is exactly t^s at every level
    RegVaryingFn vp = make_v_power(0.5);
    RegVarReport rp = check_regular_variation(vp, {0.5, 2.0}, 20);
    for (const auto& s : rp.series)
        for (double r : s.ratio) CHECK(r == doctest::Approx(s.target).epsilon(1e-12));

    // farey speed function, rho = 1: ratios approach the power target
    RegVaryingFn vf = make_v_farey(1.0);
    RegVarReport rf = check_regular_variation(vf, {0.5}, 30);
    CHECK(rf.series[0].deviation_at_deepest < 1e-6);

    // log-perturbed speed function: convergence is logarithmically slow;
    // the deviation sequence decreases but is still visible at depth 40
    RegVaryingFn vl = make_v_log(0.5, 1.0);
    RegVarReport rl = check_regular_variation(vl, {0.5}, 40);
    const auto& ratios = rl.series[0].ratio;
    REQUIRE(ratios.size() >= 10);
    double dev_first = std::abs(ratios[1] - rl.series[0].target);
    double dev_last = std::abs(ratios.back() - rl.series[0].target);
    CHECK(dev_last < dev_first);
    CHECK(dev_last > 1e-4);
    CHECK(rl.series[0].target == doctest::Approx(std::pow(0.5, 0.5)));
}

TEST_CASE("speed functions are increasing and in (0,1) on the certified radius") {
    for (const RegVaryingFn& v : {make_v_power(0.5), make_v_farey(0.5), make_v_farey(1.0),
                                  make_v_farey_inverse(1.0), make_v_log(0.5, 1.0),
                                  make_v_mp_inverse(0.5)}) {
        double prev = 0.0;
        for (int i = 1; i <= 400; ++i) {
            double x = v.valid_radius * i / 400.0;
            double val = v.eval(x);
            CHECK(val > prev);
            CHECK(val < 1.0);
            prev = val;
        }
    }
}
