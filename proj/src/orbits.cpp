#include "ergopt/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ergopt/root_finding.hpp"

namespace ergopt {

double scale_b_inverse(const RegVaryingFn& V, double x) {
    return 1.0 / V.eval(1.0 / x);
}

double scale_b(const RegVaryingFn& V, double n) {
    if (!(n >= 1.0)) throw std::invalid_argument("scale_b: n must be >= 1");
    double v_edge = V.eval(V.valid_radius);
    if (1.0 / n > v_edge * (1.0 + 1e-12))
        throw std::domain_error("scale_b: n = " + std::to_string(n) +
                                " below invertible range (need n >= " +
                                std::to_string(1.0 / v_edge) + ")");
    // Find z in (0, valid_radius] with V(z) = 1/n; then b(n) = 1/z.
    double target = 1.0 / n;
    double hi = V.valid_radius;
    double lo = hi;
    while (V.eval(lo) > target) {
        lo *= 0.5;
        if (lo < 1e-300) throw std::domain_error("scale_b: underflow while bracketing");
    }
    if (lo == hi) return 1.0 / hi;
    RootOptions opt;
    opt.rel_tol = 1e-13;
    double z = solve_bracketed([&](double x) { return V.eval(x) - target; }, lo, hi, V.deriv, opt);
    return 1.0 / z;
}

double WSchedule::gamma_pow() const { return std::pow(gamma_time, 1.0 + 1.0 / sigma); }

namespace {

double pair_needed_constant(const WSchedule& s, long long i, long long j, double b_i, double b_j) {
    double d = s.dist(i, j);
    double sp = std::pow(s.sigma, 1.0 + 1.0 / s.sigma);
    double span = static_cast<double>(j - i);
    double needed_upper = d * sp * static_cast<double>(i) * b_i / span;
    double needed_lower = span / (d * sp * static_cast<double>(j) * b_j);
    return std::max(needed_upper, needed_lower);
}

} // namespace

WSchedule generate_schedule(const IntervalMap& map, double w0, double gamma_time, int k_max,
                            long long n1, long long orbit_budget) {
    const RegVaryingFn& V = map.V();
    if (!(w0 > 0.0 && w0 < V.valid_radius))
        throw std::invalid_argument("generate_schedule: w0 must lie in (0, valid_radius) = (0, " +
                                    std::to_string(V.valid_radius) + ")");
    if (!(gamma_time > 0.0 && gamma_time < 1.0))
        throw std::invalid_argument("generate_schedule: gamma_time must lie in (0,1)");
    if (k_max < 3) throw std::invalid_argument("generate_schedule: k_max must be >= 3");
    if (n1 < 1) throw std::invalid_argument("generate_schedule: n1 must be >= 1");

    WSchedule s;
    s.map = map;
    s.sigma = V.sigma;
    s.gamma_time = gamma_time;
    s.w0 = w0;

    s.nk.resize(k_max);
    for (int k = 1; k <= k_max; ++k) {
        long long target = std::llround(static_cast<double>(n1) *
                                        std::pow(gamma_time, -static_cast<double>(k - 1)));
        s.nk[k - 1] = (k == 1) ? n1 : std::max(s.nk[k - 2] + 1, target);
    }
    long long n_top = s.nk.back();
    if (n_top + 1 > orbit_budget)
        throw std::invalid_argument("generate_schedule: n_{k_max} = " + std::to_string(n_top) +
                                    " exceeds orbit budget " + std::to_string(orbit_budget));

    s.w.resize(static_cast<size_t>(n_top) + 2);
    s.w[0] = w0;
    const bool toward = map.orientation() == Orientation::TowardZero;
    for (long long n = 0; n <= n_top; ++n) {
        double next = toward ? map(s.w[static_cast<size_t>(n)])
                             : map.inverse_branch(0, s.w[static_cast<size_t>(n)]);
        if (!(next > 0.0) || !(next < s.w[static_cast<size_t>(n)]))
            throw std::runtime_error("generate_schedule: orbit not strictly decreasing at n = " +
                                     std::to_string(n));
        s.w[static_cast<size_t>(n) + 1] = next;
    }

    s.b_nk.resize(k_max);
    for (int k = 1; k <= k_max; ++k) s.b_nk[k - 1] = scale_b(V, static_cast<double>(s.n(k)));

    // Deterministic sandwich pair sample on [n_1, n_kmax]: every (n_k, n_l),
    // consecutive pairs at the n_k's and at a geometric fill, and half-window
    // midpoint pairs. Sorted by i so trims keep a nested subset.
    auto b_of = [&](long long n) { return scale_b(V, static_cast<double>(n)); };
    std::vector<WSchedule::SandwichPair> pairs;
    for (int k = 1; k <= k_max; ++k)
        for (int l = k + 1; l <= k_max; ++l)
            pairs.push_back({s.n(k), s.n(l),
                             pair_needed_constant(s, s.n(k), s.n(l), s.b_at(k), s.b_at(l))});
    auto add_pair = [&](long long i, long long j) {
        if (i < s.n(1) || j > n_top || i >= j) return;
        pairs.push_back({i, j, pair_needed_constant(s, i, j, b_of(i), b_of(j))});
    };
    for (int k = 1; k <= k_max; ++k) add_pair(s.n(k), s.n(k) + 1);
    for (long long m = n1; m < n_top; m *= 2) add_pair(m, m + 1);
    for (int k = 1; k < k_max; ++k) {
        long long mid = (s.n(k) + s.n(k + 1)) / 2;
        add_pair(s.n(k), mid);
        add_pair(mid, s.n(k + 1));
    }
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.i < b.i || (a.i == b.i && a.j < b.j); });
    s.pairs = std::move(pairs);

    double raw = 1.0 + 1e-12;
    for (const auto& p : s.pairs) raw = std::max(raw, p.needed);
    s.C0_raw = raw;
    s.C0 = 1.05 * raw;
    return s;
}

double c0_at_trim(const WSchedule& sched, long long i_min) {
    double raw = 1.0 + 1e-12;
    for (const auto& p : sched.pairs)
        if (p.i >= i_min) raw = std::max(raw, p.needed);
    return 1.05 * raw;
}

AsymptoticReport asymptotic_report(const WSchedule& sched, const std::vector<long long>& checkpoints) {
    AsymptoticReport rep;
    const RegVaryingFn& V = sched.map.V();
    double sp1 = std::pow(sched.sigma, 1.0 / sched.sigma);
    double sp2 = std::pow(sched.sigma, 1.0 + 1.0 / sched.sigma);
    for (long long n : checkpoints) {
        if (n < 1 || n + 1 > sched.n_max() + 1)
            throw std::invalid_argument("asymptotic_report: checkpoint " + std::to_string(n) +
                                        " outside generated range [1, " +
                                        std::to_string(sched.n_max()) + "]");
        AsymptoticReport::Row row;
        row.n = n;
        row.w_n = sched.w_at(n);
        row.b_n = scale_b(V, static_cast<double>(n));
        row.ratio_i = row.w_n * sp1 * row.b_n;
        row.ratio_ii = sched.dist(n, n + 1) * sp2 * static_cast<double>(n) * row.b_n;
        rep.rows.push_back(row);
    }
    double gp = sched.gamma_pow();
    for (int k = 1; k < sched.k_max(); ++k) {
        AsymptoticReport::KRow kr;
        kr.k = k;
        kr.n_k = sched.n(k);
        kr.n_k1 = sched.n(k + 1);
        double nr = static_cast<double>(kr.n_k) / static_cast<double>(kr.n_k1);
        kr.ratio_iii = nr * (sched.b_at(k) / sched.b_at(k + 1)) / gp;
        rep.k_rows.push_back(kr);
    }
    return rep;
}

GateArithmetic gate_arithmetic(double gamma, double sigma, double C0) {
    GateArithmetic g;
    g.gamma_pow = std::pow(gamma, 1.0 + 1.0 / sigma);
    g.gate1_lhs = g.gamma_pow;
    g.gate1_rhs = 6.0 / 7.0;
    g.gate1 = g.gate1_lhs > g.gate1_rhs;
    g.gate2_lhs = C0 * C0;
    g.gate2_rhs = (7.0 / 6.0) * g.gamma_pow;
    g.gate2 = C0 > 1.0 && g.gate2_lhs <= g.gate2_rhs;
    return g;
}

GateReport estimate_C0_and_gates(const WSchedule& sched) {
    GateReport rep;
    rep.C0 = sched.C0;
    rep.arith = gate_arithmetic(sched.gamma_time, sched.sigma, sched.C0);

    double gp = sched.gamma_pow();
    rep.gate3 = true;
    rep.gate3_worst = 1e300;
    for (int k = 1; k < sched.k_max(); ++k) {
        double ratio = static_cast<double>(sched.n(k)) * sched.b_at(k) /
                       (static_cast<double>(sched.n(k + 1)) * sched.b_at(k + 1));
        if (ratio < rep.gate3_worst) {
            rep.gate3_worst = ratio;
            rep.gate3_worst_k = k;
        }
    }
    rep.gate3 = rep.gate3_worst >= 0.5 * gp;

    if (!rep.arith.gate2) {
        for (int k = 2; k <= sched.k_max(); ++k) {
            double c0t = c0_at_trim(sched, sched.n(k));
            if (gate_arithmetic(sched.gamma_time, sched.sigma, c0t).gate2) {
                rep.recommended_trim = sched.n(k);
                rep.C0_at_trim = c0t;
                break;
            }
        }
    }
    return rep;
}

double window_radius(const WSchedule& sched, int k) {
    if (k < 2 || k > sched.k_max())
        throw std::invalid_argument("window_radius: k must lie in [2, k_max]");
    double d = sched.dist(sched.n(k), sched.n(k - 1));
    double nbk = static_cast<double>(sched.n(k)) * sched.b_at(k);
    double nbkm1 = static_cast<double>(sched.n(k - 1)) * sched.b_at(k - 1);
    return (1.0 / (3.0 * sched.C0 * sched.C0 * sched.C0)) * (nbkm1 / nbk) * d;
}

double counting_constant_C1(const WSchedule& sched) {
    double C0 = sched.C0;
    double sp = std::pow(sched.sigma, 1.0 + 1.0 / sched.sigma);
    return 0.25 * (1.0 / C0 - 1.0 / (C0 * C0)) * sp;
}

double counting_constant_C2(const WSchedule& sched) {
    double C0 = sched.C0;
    double sigma = sched.sigma;
    double gamma = sched.gamma_time;
    double gp = sched.gamma_pow();
    double C1 = counting_constant_C1(sched);
    double C1p = 0.5 * C1 / (std::pow(C0, sigma + 1.0) *
                             std::pow(sigma, (sigma + 1.0) * (sigma + 1.0) / sigma)) *
                 std::pow(1.0 - gamma, sigma + 1.0) * gp;
    double C1pp = std::pow(sigma * gp / (2.0 * (1.0 - gamma) * C0), sigma);
    return C1p * C1pp;
}

WindowCountResult window_count(const WSchedule& sched, int k, double z) {
    if (k < 2 || k > sched.k_max())
        throw std::invalid_argument("window_count: k must lie in [2, k_max]");
    const bool toward = sched.orientation() == Orientation::TowardZero;
    const double w_k = sched.w_at(sched.n(k));
    const double w_km1 = sched.w_at(sched.n(k - 1));
    const double d = w_km1 - w_k;
    const double nbkm1 = static_cast<double>(sched.n(k - 1)) * sched.b_at(k - 1);

    WindowCountResult res;
    res.R_k = window_radius(sched, k);
    res.window_cap = d / 3.0;
    res.degenerate = res.R_k > res.window_cap;

    double lo = toward ? w_k + res.R_k : w_k;
    double hi = toward ? w_km1 : w_km1 - res.R_k;
    if (z < lo - 1e-15 || z > hi + 1e-15)
        throw std::invalid_argument("window_count: z outside lemma interval [" + std::to_string(lo) +
                                    ", " + std::to_string(hi) + "]");

    const double anchor = toward ? w_k : w_km1;
    long long m_k = sched.n(k) - sched.n(k - 1);
    if (!res.degenerate) {
        double x = z;
        for (long long j = 0; j < m_k; ++j) {
            double dist = std::abs(x - anchor);
            if (dist >= res.R_k && dist <= res.window_cap) ++res.count;
            x = sched.map(x);
        }
    }

    res.window_empty = res.count == 0;
    res.C1 = counting_constant_C1(sched);
    res.lower_C1 = res.C1 * nbkm1 * d;
    res.C2 = counting_constant_C2(sched);
    res.lower_C2 = res.C2 / sched.map.V().eval(w_k);
    res.pass_C1 = static_cast<double>(res.count) >= res.lower_C1;
    res.pass_C2 = static_cast<double>(res.count) >= res.lower_C2;
    return res;
}

} // namespace ergopt
