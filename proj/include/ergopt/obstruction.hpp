#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ergopt/moduli.hpp"
#include "ergopt/orbits.hpp"

namespace ergopt {

struct BumpInterval {
    int k = 0;
    double lo = 0.0, core_lo = 0.0, core_hi = 0.0, hi = 0.0;
    int sign = 0;       // +1 unit bump, -1 xi-scaled bump, 0 inert
    double width = 0.0; // smaller of the two transition widths
};

/// The compactly supported potential f(x) = Phi(x) w(d(x,S)) built from a
/// schedule: unit bumps where the orbit must gain height, -xi bumps where the
/// stopping argument drains it, supported on disjoint intervals around the
/// anchor points S = {w_{n_k}} u {0}.
class CounterexamplePotential {
public:
    CounterexamplePotential(std::shared_ptr<const WSchedule> sched, Modulus omega, double xi,
                            bool obstruction_regime);

    double operator()(double x) const;
    double dist_to_S(double x) const;
    double partition_sum(double x) const; // sum of all hats at x
    const BumpInterval* bump_for(double x) const;

    const WSchedule& schedule() const { return *sched_; }
    std::shared_ptr<const WSchedule> schedule_ptr() const { return sched_; }
    const Modulus& omega() const { return omega_; }
    double xi() const { return xi_; }
    bool obstruction_regime() const { return obstruction_regime_; }
    const std::vector<BumpInterval>& bumps() const { return bumps_; }
    const BumpInterval* bump_of_k(int k) const;
    int positive_sign() const; // residue class (mod 3) carrying the unit bumps
    static double hat(const BumpInterval& b, double x);

private:
    std::shared_ptr<const WSchedule> sched_;
    Modulus omega_;
    double xi_;
    bool obstruction_regime_;
    std::vector<double> S_;            // anchor points, ascending
    std::vector<BumpInterval> bumps_;  // ascending in x (k descending)
};

/// Builds the potential after checking the schedule gates (throws, naming the
/// failing gate) and tagging the omega/V regime (proceeds with a warning flag
/// when the ratio is not in the obstruction regime).
CounterexamplePotential build_potential(std::shared_ptr<const WSchedule> sched, Modulus omega,
                                        double xi);

/// Compensated Birkhoff sum f(x) + f(Tx) + ... + f(T^{n-1} x).
double birkhoff_sum(const IntervalMap& map, const std::function<double(double)>& f, double x,
                    long long n);

struct PositiveSumRow {
    int k = 0;
    long long n_k = 0;
    double w_nk = 0.0;
    double sum = 0.0;         // Birkhoff sum over the connecting orbit segment
    double lower_bound = 0.0; // (C2 / V) * w(R)
    double running_min = 0.0;
};

struct PositiveSumsReport {
    std::vector<PositiveSumRow> rows;
    double C5 = 0.0; // final running min of certified sums
    double last_window_variation = 0.0;
    bool pass = false;
};

/// Certifies the positively-signed orbit segments: sums computed from the
/// stored orbit, bounds from the counting lemma, running min = empirical C5.
PositiveSumsReport verify_positive_sums(const CounterexamplePotential& P,
                                        const std::vector<int>& k_range,
                                        ExecPolicy policy = ExecPolicy::Serial);

struct XiCalibration {
    double xi_star = 0.0;
    double sup_ratio = 0.0;
    double bridging = 0.0; // (3/7) C0 sigma^(1+1/sigma) / C1
    bool stabilized = true;
    std::vector<std::pair<int, double>> ratios;
};

XiCalibration calibrate_xi(const CounterexamplePotential& P);

struct StoppingResult {
    int k = -1;          // bump index, -1 when x is outside every unit bump
    long long p = 0, q = 0, n_x = 1;
    double sum = 0.0;    // S_{n_x} f(x)
    double L_k = 0.0, L_k1 = 0.0;
    bool p_within_cap = true;
    bool unguarded = false; // the draining bump is outside the built range
    bool escaped = false;
    long long escape_iterate = -1;
};

/// Runs the stopping-time argument from x: p = exit time from the unit bump,
/// q = hitting time of the drain window, and the accumulated Birkhoff sum.
StoppingResult verify_stopping(const CounterexamplePotential& P, double x);

struct MaxAverageCandidate {
    std::string kind;   // "delta0" | "periodic" | "empirical"
    std::string detail;
    double average = 0.0;
};

struct MaxAverageResult {
    double m = 0.0;
    MaxAverageCandidate witness;
    std::vector<MaxAverageCandidate> candidates;
    int words_skipped = 0;
};

/// Max Birkhoff average over: the Dirac mass at 0, every periodic orbit of
/// period <= max_period found by iterating composed inverse branches, and
/// empirical averages over random starts.
MaxAverageResult estimate_max_average(const IntervalMap& map, const std::function<double(double)>& f,
                                      int max_period, int orbit_budget,
                                      long long orbit_length = 100'000, std::uint64_t seed = 7,
                                      ExecPolicy policy = ExecPolicy::Serial);

struct ViolationRow {
    int k = 0;
    double w_nk = 0.0;
    double increment = 0.0; // lower bound on u(w_{n_k}) - u(previous anchor)
};

struct ViolationCertificate {
    std::vector<ViolationRow> rows;
    double C5 = 0.0;
    bool obstruction_certified = false;
    bool insufficient_depth = false;
    std::string reason;
};

/// The forced-increment table: any sub-action u must gain at least C5 across
/// infinitely many anchor steps while the anchors tend to 0; certified only
/// when the positive sums stabilized and the max average vanished.
ViolationCertificate subaction_violation_certificate(const CounterexamplePotential& P, int K,
                                                     const PositiveSumsReport& sums,
                                                     double m_estimate);

} // namespace ergopt
