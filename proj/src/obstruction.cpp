#include "ergopt/obstruction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ergopt/kahan.hpp"
#include "ergopt/rng.hpp"

namespace ergopt {

namespace {

int sign_of(Orientation o, int k) {
    int r = k % 3;
    if (o == Orientation::TowardZero) return r == 1 ? 1 : (r == 2 ? -1 : 0);
    return r == 1 ? -1 : (r == 2 ? 1 : 0);
}

double variation_of_tail(const std::vector<double>& vals, size_t window) {
    if (vals.empty()) return 0.0;
    size_t start = vals.size() > window ? vals.size() - window : 0;
    double mx = vals[start], mn = vals[start];
    for (size_t i = start; i < vals.size(); ++i) {
        mx = std::max(mx, vals[i]);
        mn = std::min(mn, vals[i]);
    }
    return mx > 0.0 ? (mx - mn) / mx : 1.0;
}

} // namespace

CounterexamplePotential::CounterexamplePotential(std::shared_ptr<const WSchedule> sched,
                                                 Modulus omega, double xi, bool obstruction_regime)
    : sched_(std::move(sched)), omega_(std::move(omega)), xi_(xi),
      obstruction_regime_(obstruction_regime) {
    if (!(xi_ > 0)) throw std::invalid_argument("CounterexamplePotential: xi must be > 0");
    const WSchedule& s = *sched_;
    for (int k = s.k_max(); k >= 1; --k) S_.push_back(s.w_at(s.n(k)));

    for (int k = s.k_max() - 1; k >= 2; --k) {
        double wk = s.w_at(s.n(k));
        double wkp = s.w_at(s.n(k + 1)); // below wk
        double wkm = s.w_at(s.n(k - 1)); // above wk
        BumpInterval b;
        b.k = k;
        b.lo = (3.0 * wk + 2.0 * wkp) / 5.0;
        b.core_lo = (2.0 * wk + wkp) / 3.0;
        b.core_hi = (2.0 * wk + wkm) / 3.0;
        b.hi = (3.0 * wk + 2.0 * wkm) / 5.0;
        b.sign = sign_of(s.orientation(), k);
        b.width = std::min(b.core_lo - b.lo, b.hi - b.core_hi);
        if (!(b.lo < b.core_lo && b.core_lo < b.core_hi && b.core_hi < b.hi))
            throw std::runtime_error("CounterexamplePotential: degenerate bump at k = " +
                                     std::to_string(k));
        bumps_.push_back(b);
    }
}

double CounterexamplePotential::dist_to_S(double x) const {
    // 0 is an anchor, so d(x, S) <= x; this also covers the tail below the
    // deepest stored anchor.
    double d = x;
    auto it = std::lower_bound(S_.begin(), S_.end(), x);
    if (it != S_.end()) d = std::min(d, *it - x);
    if (it != S_.begin()) d = std::min(d, x - *(it - 1));
    return d;
}

const BumpInterval* CounterexamplePotential::bump_for(double x) const {
    auto it = std::upper_bound(bumps_.begin(), bumps_.end(), x,
                               [](double v, const BumpInterval& b) { return v < b.lo; });
    if (it == bumps_.begin()) return nullptr;
    const BumpInterval& b = *(it - 1);
    return (x > b.lo && x < b.hi) ? &b : nullptr;
}

const BumpInterval* CounterexamplePotential::bump_of_k(int k) const {
    for (const auto& b : bumps_)
        if (b.k == k) return &b;
    return nullptr;
}

int CounterexamplePotential::positive_sign() const {
    return sched_->orientation() == Orientation::TowardZero ? 1 : 2;
}

double CounterexamplePotential::hat(const BumpInterval& b, double x) {
    if (x <= b.lo || x >= b.hi) return 0.0;
    if (x < b.core_lo) return (x - b.lo) / (b.core_lo - b.lo);
    if (x <= b.core_hi) return 1.0;
    return (b.hi - x) / (b.hi - b.core_hi);
}

double CounterexamplePotential::partition_sum(double x) const {
    const BumpInterval* b = bump_for(x);
    return b ? hat(*b, x) : 0.0;
}

double CounterexamplePotential::operator()(double x) const {
    const BumpInterval* b = bump_for(x);
    if (!b || b->sign == 0) return 0.0;
    double phi = hat(*b, x);
    if (phi == 0.0) return 0.0;
    double scale = b->sign > 0 ? 1.0 : -xi_;
    return scale * phi * omega_(dist_to_S(x));
}

CounterexamplePotential build_potential(std::shared_ptr<const WSchedule> sched, Modulus omega,
                                        double xi) {
    GateReport gates = estimate_C0_and_gates(*sched);
    if (!gates.arith.gate1)
        throw std::invalid_argument("build_potential: gate 1 fails (gamma^(1+1/sigma) = " +
                                    std::to_string(gates.arith.gate1_lhs) + " <= 6/7)");
    if (!gates.arith.gate2)
        throw std::invalid_argument("build_potential: gate 2 fails (C0^2 = " +
                                    std::to_string(gates.arith.gate2_lhs) + " > (7/6) gamma^(1+1/sigma) = " +
                                    std::to_string(gates.arith.gate2_rhs) + ")");
    if (!gates.gate3)
        throw std::invalid_argument("build_potential: gate 3 fails (min n_k b(n_k)/(n_{k+1} b(n_{k+1})) = " +
                                    std::to_string(gates.gate3_worst) + " at k = " +
                                    std::to_string(gates.gate3_worst_k) + ")");
    LiminfReport regime = liminf_ratio(omega, sched->map.V(), 8);
    bool obstruction = regime.tag == RatioRegime::ObstructionRegime;
    return CounterexamplePotential(std::move(sched), std::move(omega), xi, obstruction);
}

double birkhoff_sum(const IntervalMap& map, const std::function<double(double)>& f, double x,
                    long long n) {
    if (n < 0) throw std::invalid_argument("birkhoff_sum: n must be >= 0");
    KahanSum acc;
    double cur = x;
    for (long long j = 0; j < n; ++j) {
        acc += f(cur);
        cur = map(cur);
    }
    return acc;
}

PositiveSumsReport verify_positive_sums(const CounterexamplePotential& P,
                                        const std::vector<int>& k_range, ExecPolicy policy) {
    const WSchedule& s = P.schedule();
    const bool toward = s.orientation() == Orientation::TowardZero;
    std::vector<int> ks;
    for (int k : k_range) {
        if (k < 2 || k > s.k_max() - 1) continue;
        if (sign_of(s.orientation(), k) != 1) continue;
        ks.push_back(k);
    }
    std::sort(ks.begin(), ks.end());

    PositiveSumsReport rep;
    rep.rows.resize(ks.size());
    for_each_index(policy, static_cast<std::ptrdiff_t>(ks.size()), [&](std::ptrdiff_t idx) {
        int k = ks[static_cast<size_t>(idx)];
        PositiveSumRow row;
        row.k = k;
        row.n_k = s.n(k);
        row.w_nk = s.w_at(s.n(k));
        KahanSum acc;
        if (toward) {
            // Segment w_{n_{k-1}} -> w_{n_k}, m_k steps along the stored orbit.
            for (long long n = s.n(k - 1); n < s.n(k); ++n) acc += P(s.w_at(n));
            row.lower_bound = counting_constant_C2(s) / s.map.V().eval(s.w_at(s.n(k))) *
                              P.omega()(window_radius(s, k));
        } else {
            // Segment w_{n_{k+1}} -> w_{n_k}: T^j(w_{n_{k+1}}) = w_{n_{k+1}-j}.
            for (long long n = s.n(k + 1); n > s.n(k); --n) acc += P(s.w_at(n));
            row.lower_bound = counting_constant_C2(s) / s.map.V().eval(s.w_at(s.n(k + 1))) *
                              P.omega()(window_radius(s, k + 1));
        }
        row.sum = acc;
        rep.rows[static_cast<size_t>(idx)] = row;
    });

    std::vector<double> running;
    double mn = 1e300;
    for (auto& row : rep.rows) {
        mn = std::min(mn, row.sum);
        row.running_min = mn;
        running.push_back(mn);
    }
    rep.C5 = rep.rows.empty() ? 0.0 : mn;
    rep.last_window_variation = variation_of_tail(running, 10);
    rep.pass = !rep.rows.empty() && rep.C5 > 0.0 && rep.last_window_variation < 0.2;
    return rep;
}

XiCalibration calibrate_xi(const CounterexamplePotential& P) {
    const WSchedule& s = P.schedule();
    const Modulus& w = P.omega();
    const bool toward = s.orientation() == Orientation::TowardZero;
    XiCalibration cal;
    double sup = 0.0;
    for (int k = 2; k <= s.k_max() - 1; ++k) {
        double d_wide = s.dist(s.n(k + 1), s.n(k - 1));
        double num = static_cast<double>(s.n(k + 1)) * s.b_at(k + 1) * d_wide * w(d_wide);
        double den;
        if (toward) {
            den = static_cast<double>(s.n(k)) * s.b_at(k) * s.dist(s.n(k), s.n(k + 1)) *
                  w(window_radius(s, k + 1));
        } else {
            den = static_cast<double>(s.n(k - 1)) * s.b_at(k - 1) * s.dist(s.n(k), s.n(k - 1)) *
                  w(window_radius(s, k));
        }
        double r = num / den;
        cal.ratios.emplace_back(k, r);
        sup = std::max(sup, r);
    }
    cal.sup_ratio = sup;
    cal.bridging = (3.0 / 7.0) * s.C0 * std::pow(s.sigma, 1.0 + 1.0 / s.sigma) /
                   counting_constant_C1(s);
    cal.xi_star = 1.10 * cal.bridging * sup;

    size_t q = cal.ratios.size() / 4;
    if (q >= 1 && cal.ratios.size() >= 8) {
        double sup_rest = 0.0, sup_last = 0.0;
        for (size_t i = 0; i < cal.ratios.size(); ++i) {
            if (i + q < cal.ratios.size())
                sup_rest = std::max(sup_rest, cal.ratios[i].second);
            else
                sup_last = std::max(sup_last, cal.ratios[i].second);
        }
        cal.stabilized = sup_last <= 1.2 * sup_rest;
    }
    return cal;
}

StoppingResult verify_stopping(const CounterexamplePotential& P, double x) {
    const WSchedule& s = P.schedule();
    const bool toward = s.orientation() == Orientation::TowardZero;
    StoppingResult res;
    const BumpInterval* b = P.bump_for(x);
    if (!b || b->sign != 1) {
        res.n_x = 1;
        res.sum = P(x);
        return res;
    }
    res.k = b->k;
    int drain_k = toward ? b->k + 1 : b->k - 1; // the adjacent -xi bump
    if (!P.bump_of_k(drain_k)) {
        res.unguarded = true;
        return res;
    }
    int radius_k = toward ? b->k + 1 : b->k; // window radius index for the drain
    double R = window_radius(s, radius_k);
    double target = s.w_at(s.n(toward ? b->k + 1 : b->k - 1));

    auto Lcap = [&](int k) {
        return std::ceil((3.0 / 7.0) * s.C0 * std::pow(s.sigma, 1.0 + 1.0 / s.sigma) *
                         static_cast<double>(s.n(k)) * s.b_at(k) * s.dist(s.n(k), s.n(k - 1)));
    };
    res.L_k = Lcap(b->k);
    res.L_k1 = b->k + 1 <= s.k_max() ? Lcap(b->k + 1) : 0.0;

    const long long budget = 4 * (s.n_max() - s.n(1)) + 1000;
    KahanSum acc;
    double cur = x;
    long long p = 0;
    for (;;) {
        acc += P(cur);
        cur = s.map(cur);
        ++p;
        if (!(cur > b->lo && cur < b->hi)) break;
        if (p > budget) {
            res.escaped = true;
            res.escape_iterate = p;
            return res;
        }
    }
    res.p = p;
    res.p_within_cap = res.L_k1 == 0.0 ? true : static_cast<double>(p) <= res.L_k + res.L_k1 - 2.0;

    long long q = 0;
    for (;;) {
        acc += P(cur);
        cur = s.map(cur);
        ++q;
        if (std::abs(cur - target) < R) break;
        bool overshoot = toward ? cur < s.w_at(s.n_max()) : cur > s.w_at(s.n(1));
        if (q > budget || overshoot) {
            res.escaped = true;
            res.escape_iterate = p + q;
            return res;
        }
    }
    res.q = q;
    res.n_x = p + q;
    res.sum = acc;
    return res;
}

MaxAverageResult estimate_max_average(const IntervalMap& map, const std::function<double(double)>& f,
                                      int max_period, int orbit_budget, long long orbit_length,
                                      std::uint64_t seed, ExecPolicy policy) {
    if (map.branch_count() > 2)
        throw std::invalid_argument("estimate_max_average: more than 2 inverse branches");
    MaxAverageResult res;
    res.candidates.push_back({"delta0", "x=0", f(0.0)});

    // Periodic orbits: every branch word of length <= max_period, found by
    // iterating the composed inverse branches to their fixed point. The
    // all-neutral word collapses to the fixed point 0, already counted.
    struct Word {
        int p;
        unsigned code;
    };
    std::vector<Word> words;
    if (map.branch_count() == 2) {
        for (int p = 1; p <= max_period; ++p)
            for (unsigned code = 1; code < (1u << p); ++code) words.push_back({p, code});
    }
    struct WordResult {
        bool ok = false;
        bool nonconverged = false;
        double avg = 0.0;
        double x0 = 0.0;
    };
    std::vector<WordResult> wres(words.size());
    for_each_index(policy, static_cast<std::ptrdiff_t>(words.size()), [&](std::ptrdiff_t i) {
        const Word& wd = words[static_cast<size_t>(i)];
        int digits[32];
        for (int j = 0; j < wd.p; ++j) digits[j] = (wd.code >> (wd.p - 1 - j)) & 1u;
        double x = 0.5;
        bool feasible = true;
        bool converged = false;
        for (int iter = 0; iter < 50000; ++iter) {
            double prev = x;
            try {
                for (int j = wd.p - 1; j >= 0; --j) x = map.inverse_branch(digits[j], x);
            } catch (const std::domain_error&) {
                feasible = false;
                break;
            }
            if (std::abs(x - prev) <= 1e-15 * std::max(1.0, std::abs(x))) {
                converged = true;
                break;
            }
        }
        if (!feasible) return;
        if (!converged) {
            wres[static_cast<size_t>(i)].nonconverged = true;
            return;
        }
        KahanSum acc;
        double pt = x;
        for (int j = 0; j < wd.p; ++j) {
            acc += f(pt);
            pt = map.branch(digits[j]).eval(pt);
        }
        wres[static_cast<size_t>(i)] = {true, false, static_cast<double>(acc) / wd.p, x};
    });
    for (size_t i = 0; i < words.size(); ++i) {
        if (wres[i].nonconverged) ++res.words_skipped;
        if (!wres[i].ok) continue;
        std::string bits;
        for (int j = 0; j < words[i].p; ++j)
            bits += char('0' + ((words[i].code >> (words[i].p - 1 - j)) & 1u));
        res.candidates.push_back({"periodic", "p=" + std::to_string(words[i].p) + " word=" + bits +
                                                  " x0=" + std::to_string(wres[i].x0),
                                  wres[i].avg});
    }

    std::vector<double> emp(static_cast<size_t>(orbit_budget), 0.0);
    for_each_index(policy, orbit_budget, [&](std::ptrdiff_t i) {
        double x = uniform01(seed, static_cast<std::uint64_t>(i));
        KahanSum acc;
        for (long long j = 0; j < orbit_length; ++j) {
            acc += f(x);
            x = map(x);
        }
        emp[static_cast<size_t>(i)] = static_cast<double>(acc) / static_cast<double>(orbit_length);
    });
    for (int i = 0; i < orbit_budget; ++i)
        res.candidates.push_back(
            {"empirical", "start=" + std::to_string(uniform01(seed, static_cast<std::uint64_t>(i))),
             emp[static_cast<size_t>(i)]});

    res.witness = res.candidates.front();
    res.m = res.witness.average;
    for (const auto& c : res.candidates) {
        if (c.average > res.m) {
            res.m = c.average;
            res.witness = c;
        }
    }
    return res;
}

ViolationCertificate subaction_violation_certificate(const CounterexamplePotential& P, int K,
                                                     const PositiveSumsReport& sums,
                                                     double m_estimate) {
    (void)P;
    ViolationCertificate cert;
    for (const auto& row : sums.rows) {
        if (row.k > K) continue;
        cert.rows.push_back({row.k, row.w_nk, row.sum});
    }
    cert.insufficient_depth = cert.rows.empty();
    if (cert.insufficient_depth) {
        cert.reason = "no qualifying k <= K: insufficient depth";
        return cert;
    }
    cert.C5 = cert.rows.front().increment;
    for (const auto& r : cert.rows) cert.C5 = std::min(cert.C5, r.increment);

    if (std::abs(m_estimate) > 1e-9) {
        cert.reason = "max ergodic average estimate " + std::to_string(m_estimate) +
                      " not 0 within tolerance";
    } else if (!sums.pass) {
        cert.reason = "segment sums do not stabilize above 0 (C5 = " + std::to_string(sums.C5) +
                      ", tail variation = " + std::to_string(sums.last_window_variation) + ")";
    } else {
        cert.obstruction_certified = true;
        cert.reason = "every continuous sub-action must increase by >= C5 = " +
                      std::to_string(cert.C5) + " across infinitely many anchors tending to 0";
    }
    return cert;
}

} // namespace ergopt
