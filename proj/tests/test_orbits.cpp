#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "ergopt/orbits.hpp"

using namespace ergopt;

namespace {

WSchedule farey_g1_schedule(double w0 = 0.5, double gamma = 0.5, int k_max = 12, long long n1 = 4) {
    return generate_schedule(IntervalMap::farey_inverse(1.0), w0, gamma, k_max, n1);
}

} // namespace

TEST_CASE("farey-g orbit matches the closed form w_n = w0/(1 + n w0)") {
    WSchedule s = farey_g1_schedule();
    // w0 = 1/2 gives w_n = 1/(n+2) by induction on x -> x/(1+x)
    for (long long n = 0; n <= s.n_max(); n += 97)
        CHECK(std::abs(s.w_at(n) - 1.0 / (static_cast<double>(n) + 2.0)) <= 1e-12);
    CHECK(s.w_at(10) == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
}

TEST_CASE("away-from-zero schedules iterate the inverse branch") {
    IntervalMap mp = IntervalMap::manneville_pomeau(0.5);
    WSchedule s = generate_schedule(mp, 0.25, 0.5, 5, 4);
    // w_1 solves x(1 + sqrt(x)) = 0.25: independent bisection oracle
    double lo = 0.0, hi = 0.25;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (mid * (1.0 + std::sqrt(mid)) > 0.25 ? hi : lo) = mid;
    }
    CHECK(s.w_at(1) == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-13));
    // round-trip: T(w_{n+1}) = w_n
    for (long long n = 0; n < 40; ++n)
        CHECK(std::abs(mp(s.w_at(n + 1)) - s.w_at(n)) <= 1e-12);
}

TEST_CASE("iteration times follow the geometric rounding rule") {
    WSchedule s = farey_g1_schedule(0.5, 0.5, 6, 4);
    CHECK(s.n(1) == 4);
    CHECK(s.n(2) == 8);
    CHECK(s.n(3) == 16);
    CHECK(s.n(4) == 32);
    // strict-increase floor engages when rounding collides
    WSchedule t = farey_g1_schedule(0.5, 0.97, 8, 2);
    for (int k = 1; k < t.k_max(); ++k) CHECK(t.n(k + 1) > t.n(k));
}

TEST_CASE("generate_schedule validates inputs") {
    IntervalMap g1 = IntervalMap::farey_inverse(1.0);
    CHECK_THROWS_AS(generate_schedule(g1, 1.5, 0.5, 5, 4), std::invalid_argument);
    CHECK_THROWS_AS(generate_schedule(g1, 0.5, 1.5, 5, 4), std::invalid_argument);
    CHECK_THROWS_AS(generate_schedule(g1, 0.5, 0.5, 2, 4), std::invalid_argument);
    // orbit budget rejection names the requested depth
    CHECK_THROWS_AS(generate_schedule(g1, 0.5, 0.5, 25, 4, 1000), std::invalid_argument);
}

TEST_CASE("scale function b by bracketed inversion") {
    // V = x^s: b(n) = n^(1/s)
    CHECK(scale_b(make_v_power(0.5), 100.0) == doctest::Approx(10000.0).epsilon(1e-10));
    // V = x: b(n) = n
    CHECK(scale_b(make_v_power(1.0), 7.0) == doctest::Approx(7.0).epsilon(1e-10));
    // farey-g speed function W(x) = x/(1+x): b^-1(x) = x+1, so b(5) = 4
    CHECK(scale_b(make_v_farey_inverse(1.0), 5.0) == doctest::Approx(4.0).epsilon(1e-10));
    // below the invertible range
    CHECK_THROWS_AS(scale_b(make_v_farey_inverse(1.0), 1.0), std::domain_error);
    CHECK_THROWS_AS(scale_b(make_v_power(0.5), 0.5), std::invalid_argument);
}

TEST_CASE("asymptotic ratios against farey-g closed forms") {
    WSchedule s = farey_g1_schedule(0.5, 0.5, 16, 4); // n_max = 131072
    std::vector<long long> cps = {100, 1000, 10000, 100000};
    AsymptoticReport rep = asymptotic_report(s, cps);
    for (const auto& row : rep.rows) {
        double n = static_cast<double>(row.n);
        // ratio_i = (n-1)/(n+2), ratio_ii = n(n-1)/((n+2)(n+3))
        CHECK(row.ratio_i == doctest::Approx((n - 1.0) / (n + 2.0)).epsilon(1e-8));
        CHECK(row.ratio_ii ==
              doctest::Approx(n * (n - 1.0) / ((n + 2.0) * (n + 3.0))).epsilon(1e-8));
    }
    CHECK_THROWS_AS(asymptotic_report(s, {s.n_max() + 1}), std::invalid_argument);
}

TEST_CASE("ratio_iii cancels exactly for pure powers on geometric times") {
    IntervalMap mp = IntervalMap::manneville_pomeau(0.5);
    WSchedule s = generate_schedule(mp, 0.3, 0.5, 10, 64);
    AsymptoticReport rep = asymptotic_report(s, {64});
    for (const auto& kr : rep.k_rows) {
        // b(n) = n^2, n_k exactly geometric: full cancellation
        CHECK(kr.ratio_iii == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("b-inverse asymptotics along the orbit") {
    // b^-1(1/w_n) ~ n sigma
    WSchedule s = farey_g1_schedule(0.5, 0.5, 16, 4);
    const RegVaryingFn& V = s.map.V();
    for (long long n : {1000LL, 10000LL, 100000LL}) {
        double r = scale_b_inverse(V, 1.0 / s.w_at(n)) / (static_cast<double>(n) * s.sigma);
        CHECK(std::abs(r - 1.0) < 5.0 / static_cast<double>(n) + 1e-3);
    }
}

TEST_CASE("gate arithmetic matches hand-computed values") {
    GateArithmetic a = gate_arithmetic(0.96, 0.5, 1.01);
    CHECK(a.gamma_pow == doctest::Approx(0.884736).epsilon(1e-12));
    CHECK(a.gate1); // 0.884736 > 6/7
    GateArithmetic b = gate_arithmetic(0.9, 0.5, 1.01);
    CHECK(b.gamma_pow == doctest::Approx(0.729).epsilon(1e-12));
    CHECK_FALSE(b.gate1); // 0.729 < 6/7
    GateArithmetic c = gate_arithmetic(0.96, 0.5, 1.05);
    CHECK(c.gate2_lhs == doctest::Approx(1.1025));
    CHECK(c.gate2_rhs == doctest::Approx(1.032192).epsilon(1e-6));
    CHECK_FALSE(c.gate2);
}

TEST_CASE("gate report engages the head-trim search on gate-2 failure") {
    // gamma = 0.96 with the 5%-inflated C0 can never satisfy gate 2
    // (C0 >= 1.05 forces C0^2 >= 1.1025 > (7/6) 0.96^3); the trim search
    // reports that no trim helps.
    IntervalMap mp = IntervalMap::manneville_pomeau(0.5);
    WSchedule s = generate_schedule(mp, 0.3, 0.96, 40, 50);
    GateReport rep = estimate_C0_and_gates(s);
    CHECK(rep.arith.gate1);
    CHECK_FALSE(rep.arith.gate2);
    CHECK(rep.recommended_trim == -1);
    CHECK(rep.gate3);

    // gamma = 0.99 with a deep start passes all three gates
    WSchedule s2 = generate_schedule(mp, 0.3, 0.99, 40, 2000);
    GateReport rep2 = estimate_C0_and_gates(s2);
    CHECK(rep2.all_pass());
}

TEST_CASE("trimming the pair sample never increases the empirical constant") {
    WSchedule s = farey_g1_schedule(0.5, 0.8, 20, 8);
    double prev = c0_at_trim(s, s.n(1));
    CHECK(s.C0 == doctest::Approx(prev));
    for (int k = 2; k <= s.k_max(); ++k) {
        double cur = c0_at_trim(s, s.n(k));
        CHECK(cur <= prev + 1e-15);
        prev = cur;
    }
}

TEST_CASE("window count: farey-g enumeration oracle") {
    WSchedule s = farey_g1_schedule(0.5, 0.7, 26, 50);
    int k = s.k_max() - 1;
    double z = s.w_at(s.n(k - 1)); // anchor-adjacent start, toward-zero variant
    WindowCountResult res = window_count(s, k, z);
    // oracle: the orbit of z is w_m = 1/(m+2), enumerate directly
    long long count = 0;
    for (long long j = 0; j < s.n(k) - s.n(k - 1); ++j) {
        double x = 1.0 / (static_cast<double>(s.n(k - 1) + j) + 2.0);
        double dist = std::abs(x - s.w_at(s.n(k)));
        if (dist >= res.R_k && dist <= res.window_cap) ++count;
    }
    CHECK(res.count == count);
    CHECK(res.count > 0);

    // out-of-interval z is rejected with the interval named
    CHECK_THROWS_AS(window_count(s, k, s.w_at(s.n(k)) * 0.5), std::invalid_argument);
}

TEST_CASE("window count: single-step windows are empty and flagged") {
    // gamma close to 1 with a tiny n1 makes m_k = 1: the only iterate sits a
    // full gap away from the anchor, outside [R_k, d/3]
    WSchedule s = farey_g1_schedule(0.5, 0.97, 8, 2);
    WindowCountResult res = window_count(s, 2, s.w_at(s.n(1)));
    CHECK(res.count == 0);
    CHECK(res.window_empty);
    CHECK_FALSE(res.pass_C1);
    // the inner radius never exceeds the window cap (C0 > 1, n b(n) increasing)
    for (int k = 2; k <= s.k_max(); ++k) CHECK_FALSE(window_count(s, k, s.w_at(s.n(k - 1))).degenerate);
}

TEST_CASE("window count bounds hold past the onset for a gate-passing config") {
    IntervalMap mp = IntervalMap::manneville_pomeau(0.5);
    WSchedule s = generate_schedule(mp, 0.3, 0.96, 60, 400);
    int onset = -1;
    for (int k = 2; k <= s.k_max(); ++k) {
        WindowCountResult res = window_count(s, k, s.w_at(s.n(k)));
        if (res.pass_C1 && res.pass_C2) {
            if (onset < 0) onset = k;
        } else {
            onset = -1;
        }
    }
    CHECK(onset >= 2); // all k past the onset pass through k_max
}
