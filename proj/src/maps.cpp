#include "ergopt/maps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ergopt/root_finding.hpp"

namespace ergopt {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

// Largest r <= hi with V(r) <= 1 - margin, assuming V increasing on (0, hi].
double shrink_below_unit(const std::function<double(double)>& v, double hi, double margin = 1e-9) {
    if (v(hi) < 1.0 - margin) return hi;
    double lo = hi;
    while (v(lo) >= 1.0 - margin) lo *= 0.5;
    return solve_bracketed([&](double x) { return v(x) - (1.0 - margin); }, lo, hi * (1 + 1e-15));
}

double solve_mp_v(double s, double x) {
    // v = x^s (1-v)^(s+1), convex increasing residual: Newton from 0 converges.
    if (x <= 0.0) return 0.0;
    double xs = std::pow(x, s);
    double v = 0.0;
    for (int i = 0; i < 64; ++i) {
        double one_m = 1.0 - v;
        double pw = std::pow(one_m, s);
        double f = v - xs * pw * one_m;       // v - x^s (1-v)^(s+1)
        double df = 1.0 + (s + 1.0) * xs * pw;
        double step = f / df;
        v -= step;
        if (std::abs(step) <= 1e-16 * (1.0 + std::abs(v))) break;
    }
    return v;
}

} // namespace

RegVaryingFn make_v_power(double s) {
    require(s > 0, "V power index s must be > 0");
    RegVaryingFn v;
    v.sigma = s;
    v.valid_radius = 1.0 - 1e-9; // keep V strictly below 1 on the certified range
    v.eval = [s](double x) { return std::pow(x, s); };
    v.deriv = [s](double x) { return s * std::pow(x, s - 1.0); };
    return v;
}

RegVaryingFn make_v_farey(double rho) {
    require(rho > 0 && rho <= 1, "farey rho must be in (0,1]");
    RegVaryingFn v;
    v.sigma = rho;
    v.eval = [rho](double x) { return std::pow(1.0 - std::pow(x, rho), -1.0 / rho) - 1.0; };
    v.deriv = [rho](double x) {
        return std::pow(x, rho - 1.0) * std::pow(1.0 - std::pow(x, rho), -1.0 / rho - 1.0);
    };
    // V reaches 1 at (1 - 2^-rho)^(1/rho) <= branch cut; stay strictly below.
    v.valid_radius = std::pow(1.0 - std::pow(2.0, -rho), 1.0 / rho) * (1.0 - 1e-6);
    return v;
}

RegVaryingFn make_v_farey_inverse(double rho) {
    require(rho > 0 && rho <= 1, "farey rho must be in (0,1]");
    RegVaryingFn v;
    v.sigma = rho;
    v.valid_radius = 1.0;
    v.eval = [rho](double x) { return 1.0 - std::pow(1.0 + std::pow(x, rho), -1.0 / rho); };
    v.deriv = [rho](double x) {
        return std::pow(x, rho - 1.0) * std::pow(1.0 + std::pow(x, rho), -1.0 / rho - 1.0);
    };
    return v;
}

RegVaryingFn make_v_log(double tau, double theta) {
    require(tau > 0 && tau <= 1, "log-family tau must be in (0,1]");
    require(theta > 0, "log-family theta must be > 0");
    double K = std::pow(2.0, tau) / std::pow(std::log(2.0), theta + 1.0);
    RegVaryingFn v;
    v.sigma = tau;
    v.eval = [K, tau, theta](double x) {
        if (x <= 0.0) return 0.0;
        return K * std::pow(x, tau) * std::pow(std::abs(std::log(x)), theta + 1.0);
    };
    // V is increasing only up to exp(-(theta+1)/tau); certify below that and below V = 1.
    double x_mono = std::exp(-(theta + 1.0) / tau);
    double hi = std::min(0.5, x_mono);
    v.valid_radius = shrink_below_unit(v.eval, hi);
    return v;
}

RegVaryingFn make_v_mp_inverse(double s) {
    require(s > 0, "mp-inverse s must be > 0");
    RegVaryingFn v;
    v.sigma = s;
    v.valid_radius = 1.0;
    v.eval = [s](double x) { return solve_mp_v(s, x); };
    v.deriv = [s](double x) {
        if (x <= 0.0) return 0.0;
        double val = solve_mp_v(s, x);
        double pw = std::pow(1.0 - val, s);
        return s * (val / x) / (1.0 + (s + 1.0) * std::pow(x, s) * pw);
    };
    return v;
}

IntervalMap IntervalMap::manneville_pomeau(double s) {
    require(s > 0, "mp: s must be > 0");
    IntervalMap m;
    m.family_ = MapFamily::MP;
    m.id_ = "mp(s=" + std::to_string(s) + ")";
    m.orientation_ = Orientation::AwayFromZero;
    auto lift = [s](double x) { return x * (1.0 + std::pow(x, s)); };
    auto dlift = [s](double x) { return 1.0 + (s + 1.0) * std::pow(x, s); };
    double c = solve_bracketed([&](double x) { return lift(x) - 1.0; }, 0.0, 1.0,
                               [&](double x) { return dlift(x); });
    m.cut_ = c;
    m.V_ = make_v_power(s);
    m.V_.valid_radius = c;
    m.lambda_ = dlift(c); // right branch expands at rate >= T'(c)

    Branch b0;
    b0.lo = 0.0;
    b0.hi = c;
    b0.image_lo = 0.0;
    b0.image_hi = 1.0;
    b0.eval = [lift](double x) { return std::min(lift(x), 1.0); };
    b0.deriv = dlift;
    Branch b1;
    b1.lo = c;
    b1.hi = 1.0;
    b1.image_lo = 0.0;
    b1.image_hi = 1.0;
    b1.eval = [lift](double x) { return std::clamp(lift(x) - 1.0, 0.0, 1.0); };
    b1.deriv = dlift;
    m.branches_ = {b0, b1};
    return m;
}

IntervalMap IntervalMap::mp_inverse(double s) {
    require(s > 0, "mp-inverse: s must be > 0");
    IntervalMap m;
    m.family_ = MapFamily::MPInverse;
    m.id_ = "mp-inverse(s=" + std::to_string(s) + ")";
    m.orientation_ = Orientation::TowardZero;
    auto lift = [s](double x) { return x * (1.0 + std::pow(x, s)); };
    auto dlift = [s](double x) { return 1.0 + (s + 1.0) * std::pow(x, s); };
    double c = solve_bracketed([&](double x) { return lift(x) - 1.0; }, 0.0, 1.0,
                               [&](double x) { return dlift(x); });
    m.V_ = make_v_mp_inverse(s);

    Branch b0;
    b0.lo = 0.0;
    b0.hi = 1.0;
    b0.image_lo = 0.0;
    b0.image_hi = c;
    auto V = m.V_;
    b0.eval = [V](double x) { return x * (1.0 - V.eval(x)); };
    b0.deriv = [V](double x) { return (1.0 - V.eval(x)) - x * V.deriv(x); };
    b0.inverse = [lift, c](double y) { return std::min(lift(y), 1.0); }; // T_s on [0,c]
    m.branches_ = {b0};
    return m;
}

IntervalMap IntervalMap::farey(double rho) {
    IntervalMap m;
    m.family_ = MapFamily::FareyF;
    m.id_ = "farey-f(rho=" + std::to_string(rho) + ")";
    m.orientation_ = Orientation::AwayFromZero;
    m.V_ = make_v_farey(rho);
    double c = std::pow(2.0, -1.0 / rho);
    m.cut_ = c;

    Branch b0;
    b0.lo = 0.0;
    b0.hi = c;
    b0.image_lo = 0.0;
    b0.image_hi = 1.0;
    b0.eval = [rho](double x) {
        return std::min(x * std::pow(1.0 - std::pow(x, rho), -1.0 / rho), 1.0);
    };
    b0.deriv = [rho](double x) { return std::pow(1.0 - std::pow(x, rho), -1.0 / rho - 1.0); };
    b0.inverse = [rho](double y) { return y * std::pow(1.0 + std::pow(y, rho), -1.0 / rho); };
    Branch b1;
    b1.lo = c;
    b1.hi = 1.0;
    b1.image_lo = 0.0;
    b1.image_hi = 1.0;
    b1.increasing = false;
    b1.eval = [rho](double x) {
        return std::clamp(std::pow(1.0 - std::pow(x, rho), 1.0 / rho) / x, 0.0, 1.0);
    };
    b1.inverse = [rho](double y) { return std::pow(1.0 + std::pow(y, rho), -1.0 / rho); };
    m.branches_ = {b0, b1};
    return m;
}

IntervalMap IntervalMap::farey_inverse(double rho) {
    IntervalMap m;
    m.family_ = MapFamily::FareyG;
    m.id_ = "farey-g(rho=" + std::to_string(rho) + ")";
    m.orientation_ = Orientation::TowardZero;
    m.V_ = make_v_farey_inverse(rho);

    Branch b0;
    b0.lo = 0.0;
    b0.hi = 1.0;
    b0.image_lo = 0.0;
    b0.image_hi = std::pow(2.0, -1.0 / rho);
    b0.eval = [rho](double x) { return x * std::pow(1.0 + std::pow(x, rho), -1.0 / rho); };
    b0.deriv = [rho](double x) { return std::pow(1.0 + std::pow(x, rho), -1.0 / rho - 1.0); };
    b0.inverse = [rho](double y) { return y * std::pow(1.0 - std::pow(y, rho), -1.0 / rho); };
    m.branches_ = {b0};
    return m;
}

IntervalMap IntervalMap::h_family(double rho) {
    IntervalMap m = farey(rho);
    m.family_ = MapFamily::H;
    m.id_ = "h(rho=" + std::to_string(rho) + ")";
    double c = *m.cut_;
    double p = std::pow(2.0, 1.0 / rho);
    double slope = p / (p - 1.0);
    m.lambda_ = slope;
    Branch b1;
    b1.lo = c;
    b1.hi = 1.0;
    b1.image_lo = 0.0;
    b1.image_hi = 1.0;
    b1.eval = [p](double x) { return std::clamp((p * x - 1.0) / (p - 1.0), 0.0, 1.0); };
    b1.deriv = [slope](double) { return slope; };
    b1.inverse = [p](double y) { return ((p - 1.0) * y + 1.0) / p; };
    m.branches_[1] = b1;
    return m;
}

IntervalMap IntervalMap::log_family(double tau, double theta) {
    require(tau > 0 && tau < 1, "log: tau must be in (0,1)");
    require(theta > 0, "log: theta must be > 0");
    IntervalMap m;
    m.family_ = MapFamily::Log;
    m.id_ = "log(tau=" + std::to_string(tau) + ",theta=" + std::to_string(theta) + ")";
    m.orientation_ = Orientation::AwayFromZero;
    m.V_ = make_v_log(tau, theta);
    m.cut_ = 0.5;
    m.lambda_ = 2.0;
    double K = std::pow(2.0, tau) / std::pow(std::log(2.0), theta + 1.0);

    Branch b0;
    b0.lo = 0.0;
    b0.hi = 0.5;
    b0.image_lo = 0.0;
    b0.image_hi = 1.0;
    b0.eval = [K, tau, theta](double x) {
        if (x <= 0.0) return 0.0;
        double v = x + K * std::pow(x, 1.0 + tau) * std::pow(std::abs(std::log(x)), theta + 1.0);
        return std::min(v, 1.0);
    };
    b0.deriv = [K, tau, theta](double x) {
        if (x <= 0.0) return 1.0;
        double u = -std::log(x);
        return 1.0 + K * std::pow(x, tau) * std::pow(u, theta) * ((1.0 + tau) * u - (theta + 1.0));
    };
    // The neutral branch is monotone onto [0,1] only for theta below
    // (2+tau) log 2 - 1; reject parameters that break it.
    for (int i = 1; i <= 2000; ++i) {
        double a = 0.5 * (i - 1) / 2000.0, b = 0.5 * i / 2000.0;
        if (b0.eval(a) >= b0.eval(b))
            throw std::invalid_argument("log: branch 0 not increasing on [0,1/2] for tau=" +
                                        std::to_string(tau) + ", theta=" + std::to_string(theta));
    }
    Branch b1;
    b1.lo = 0.5;
    b1.hi = 1.0;
    b1.image_lo = 0.0;
    b1.image_hi = 1.0;
    b1.eval = [](double x) { return 2.0 * x - 1.0; };
    b1.deriv = [](double) { return 2.0; };
    b1.inverse = [](double y) { return 0.5 * (y + 1.0); };
    m.branches_ = {b0, b1};
    return m;
}

IntervalMap IntervalMap::custom(RegVaryingFn V, Orientation orientation) {
    require(static_cast<bool>(V.eval), "custom: V.eval required");
    require(V.valid_radius > 0, "custom: V.valid_radius must be > 0");
    IntervalMap m;
    m.family_ = MapFamily::Custom;
    m.id_ = "custom";
    m.orientation_ = orientation;
    m.V_ = V;
    if (orientation == Orientation::TowardZero) {
        Branch b0;
        b0.lo = 0.0;
        b0.hi = 1.0;
        auto f = [V](double x) { return x <= 0.0 ? 0.0 : x * (1.0 - V.eval(x)); };
        b0.image_lo = 0.0;
        b0.image_hi = f(1.0);
        b0.eval = f;
        m.branches_ = {b0};
    } else {
        auto lift = [V](double x) { return x <= 0.0 ? 0.0 : x * (1.0 + V.eval(x)); };
        double c = solve_bracketed([&](double x) { return lift(x) - 1.0; }, 0.0, 1.0);
        m.cut_ = c;
        m.lambda_ = 1.0 / (1.0 - c);
        Branch b0;
        b0.lo = 0.0;
        b0.hi = c;
        b0.image_lo = 0.0;
        b0.image_hi = 1.0;
        b0.eval = [lift](double x) { return std::min(lift(x), 1.0); };
        Branch b1; // affine expanding completion
        b1.lo = c;
        b1.hi = 1.0;
        b1.image_lo = 0.0;
        b1.image_hi = 1.0;
        b1.eval = [c](double x) { return std::clamp((x - c) / (1.0 - c), 0.0, 1.0); };
        b1.deriv = [c](double) { return 1.0 / (1.0 - c); };
        b1.inverse = [c](double y) { return c + y * (1.0 - c); };
        m.branches_ = {b0, b1};
    }
    return m;
}

int IntervalMap::branch_for(double x) const {
    for (int i = 0; i + 1 < branch_count(); ++i)
        if (x <= branches_[i].hi) return i;
    return branch_count() - 1;
}

double IntervalMap::operator()(double x) const {
    if (x <= 0.0) return 0.0;
    return branches_[branch_for(x)].eval(x);
}

double IntervalMap::inverse_branch(int branch, double y) const {
    const Branch& b = branches_.at(branch);
    if (b.inverse) {
        double lo = std::min(b.image_lo, b.image_hi);
        double hi = std::max(b.image_lo, b.image_hi);
        if (y < lo - 1e-12 || y > hi + 1e-12)
            throw std::domain_error("inverse_branch " + std::to_string(branch) + " of " + id_ +
                                    ": value outside image [" + std::to_string(lo) + ", " +
                                    std::to_string(hi) + "]");
        return std::clamp(b.inverse(y), b.lo, b.hi);
    }
    return invert_monotone(b.eval, y, b.lo, b.hi, b.increasing,
                           "inverse_branch " + std::to_string(branch) + " of " + id_, b.deriv);
}

IntervalMap make_map(const std::string& family, const std::map<std::string, double>& params) {
    auto get = [&](const std::string& key) {
        auto it = params.find(key);
        if (it == params.end())
            throw std::invalid_argument("make_map(" + family + "): missing parameter '" + key + "'");
        return it->second;
    };
    if (family == "mp") return IntervalMap::manneville_pomeau(get("s"));
    if (family == "mp-inverse") return IntervalMap::mp_inverse(get("s"));
    if (family == "farey-f") return IntervalMap::farey(get("rho"));
    if (family == "farey-g") return IntervalMap::farey_inverse(get("rho"));
    if (family == "h") return IntervalMap::h_family(get("rho"));
    if (family == "log") return IntervalMap::log_family(get("tau"), get("theta"));
    throw std::invalid_argument("make_map: unknown family '" + family + "'");
}

RegVarReport check_regular_variation(const RegVaryingFn& V, const std::vector<double>& t_set, int depth) {
    if (depth < 1) throw std::invalid_argument("check_regular_variation: depth must be >= 1");
    for (double t : t_set)
        if (t <= 0) throw std::invalid_argument("check_regular_variation: t values must be > 0");

    RegVarReport report;
    report.levels_requested = depth + 1;
    int achieved = depth + 1;
    for (double t : t_set) {
        RegVarReport::Series s;
        s.t = t;
        s.target = std::pow(t, V.sigma);
        for (int j = 0; j <= depth; ++j) {
            double x = V.valid_radius * std::pow(2.0, -j);
            double tx = t * x;
            if (tx > V.valid_radius && t > 1.0) continue; // argument past certified range
            double vx = V.eval(x);
            double vtx = V.eval(tx);
            if (!(vx > 0) || !(vtx > 0) || !std::isfinite(vx) || !std::isfinite(vtx)) {
                achieved = std::min(achieved, j);
                report.truncated = true;
                break;
            }
            s.x.push_back(x);
            s.ratio.push_back(vtx / vx);
        }
        if (!s.ratio.empty()) s.deviation_at_deepest = std::abs(s.ratio.back() - s.target);
        report.series.push_back(std::move(s));
    }
    report.levels_achieved = achieved;
    return report;
}

} // namespace ergopt
