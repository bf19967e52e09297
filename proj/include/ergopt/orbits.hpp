#pragma once

#include <cstdint>
#include <vector>

#include "ergopt/maps.hpp"
#include "ergopt/parallel.hpp"

namespace ergopt {

/// b^{-1}(x) = 1/V(1/x).
double scale_b_inverse(const RegVaryingFn& V, double x);

/// b(n): bracketed inversion of x -> 1/V(1/x) to 1e-12 relative. Rejects n
/// below the invertible range (1/b(n) must stay within V's certified radius).
double scale_b(const RegVaryingFn& V, double n);

/// A neutral-branch orbit w_0 > w_1 > ... -> 0 together with iteration times
/// n_k ~ n_1 * gamma^-(k-1) and the empirical Remark-type distance constant.
struct WSchedule {
    IntervalMap map;
    double sigma = 0.0;
    double gamma_time = 0.0;
    double w0 = 0.0;
    std::vector<double> w;        // w[0..n_max+1]
    std::vector<long long> nk;    // nk[k-1] = n_k, k = 1..k_max
    std::vector<double> b_nk;     // b(n_k)
    double C0 = 0.0;              // inflated empirical constant (pairs with i >= n_1)
    double C0_raw = 0.0;

    struct SandwichPair {
        long long i = 0, j = 0;
        double needed = 0.0; // smallest constant making both sides hold for this pair
    };
    std::vector<SandwichPair> pairs; // sorted by i; nested under trims

    int k_max() const { return static_cast<int>(nk.size()); }
    long long n(int k) const { return nk.at(static_cast<size_t>(k) - 1); }
    double b_at(int k) const { return b_nk.at(static_cast<size_t>(k) - 1); }
    long long n_max() const { return nk.back(); }
    double w_at(long long n) const { return w.at(static_cast<size_t>(n)); }
    double dist(long long i, long long j) const { return std::abs(w_at(i) - w_at(j)); }
    Orientation orientation() const { return map.orientation(); }
    double gamma_pow() const; // gamma^(1 + 1/sigma)
};

/// Generates the orbit (forward iterates for TowardZero maps, neutral-branch
/// preimages for AwayFromZero) up to n_{k_max}+1 and estimates C0 as the
/// smallest constant covering a deterministic pair sample, inflated by 5%.
WSchedule generate_schedule(const IntervalMap& map, double w0, double gamma_time, int k_max,
                            long long n1, long long orbit_budget = 20'000'000);

/// Smallest constant covering all sampled pairs with i >= i_min (1.05x inflated).
double c0_at_trim(const WSchedule& sched, long long i_min);

struct AsymptoticReport {
    struct Row {
        long long n = 0;
        double w_n = 0.0, b_n = 0.0;
        double ratio_i = 0.0;  // w_n sigma^(1/sigma) b(n)
        double ratio_ii = 0.0; // d(w_n, w_{n+1}) sigma^(1+1/sigma) n b(n)
    };
    struct KRow {
        int k = 0;
        long long n_k = 0, n_k1 = 0;
        double ratio_iii = 0.0; // (n_k/n_{k+1}) (b(n_k)/b(n_{k+1})) gamma^-(1+1/sigma)
    };
    std::vector<Row> rows;
    std::vector<KRow> k_rows;
};

AsymptoticReport asymptotic_report(const WSchedule& sched, const std::vector<long long>& checkpoints);

/// Pure arithmetic of the three schedule gates, testable without an orbit.
struct GateArithmetic {
    double gamma_pow = 0.0;
    bool gate1 = false;
    double gate1_lhs = 0.0, gate1_rhs = 0.0; // gamma_pow > 6/7
    bool gate2 = false;
    double gate2_lhs = 0.0, gate2_rhs = 0.0; // C0^2 <= (7/6) gamma_pow
};
GateArithmetic gate_arithmetic(double gamma, double sigma, double C0);

struct GateReport {
    double C0 = 0.0;
    GateArithmetic arith;
    bool gate3 = false;
    double gate3_worst = 0.0; // min_k n_k b(n_k) / (n_{k+1} b(n_{k+1})) vs gamma_pow/2
    int gate3_worst_k = 0;
    long long recommended_trim = -1; // smallest index floor passing gate 2, -1 if none helps
    double C0_at_trim = 0.0;
    bool all_pass() const { return arith.gate1 && arith.gate2 && gate3; }
};

GateReport estimate_C0_and_gates(const WSchedule& sched);

/// R_k, the inner window radius attached to the k-th anchor (k >= 2).
double window_radius(const WSchedule& sched, int k);
/// Counting constants derived from the schedule's C0, sigma and gamma.
double counting_constant_C1(const WSchedule& sched);
double counting_constant_C2(const WSchedule& sched);

struct WindowCountResult {
    long long count = 0;
    double R_k = 0.0;
    double window_cap = 0.0; // (1/3) d(w_{n_k}, w_{n_{k-1}})
    double lower_C1 = 0.0;   // C1 n_{k-1} b(n_{k-1}) d(w_{n_k}, w_{n_{k-1}})
    double lower_C2 = 0.0;   // C2 / V(w_{n_k})
    double C1 = 0.0, C2 = 0.0;
    // R_k < d/3 holds identically (C0 > 1, n b(n) increasing), so the window
    // never collapses outright; "k too small" shows up as an empty count.
    bool degenerate = false;
    bool window_empty = false;
    bool pass_C1 = false, pass_C2 = false;
};

/// Exact iterate count inside the k-th anchor window, by direct iteration
/// from z. TowardZero anchors at w_{n_k} with z in [w_{n_k}+R_k, w_{n_{k-1}}];
/// AwayFromZero anchors at w_{n_{k-1}} with z in [w_{n_k}, w_{n_{k-1}}-R_k].
WindowCountResult window_count(const WSchedule& sched, int k, double z);

} // namespace ergopt
