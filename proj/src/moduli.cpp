#include "ergopt/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ergopt/rng.hpp"

namespace ergopt {

namespace {

constexpr int kScanPoints = 10000;

// Largest grid value h0 on a log-spaced scan such that every consecutive
// triple inside (0, h0] passes the second-difference concavity test, shrunk
// by two grid steps as a guard against between-node curvature sign changes.
double scan_concavity_switch(const std::function<double(double)>& g, double lo, double hi) {
    std::vector<double> xs(kScanPoints), ys(kScanPoints);
    double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < kScanPoints; ++i) {
        xs[i] = std::exp(llo + (lhi - llo) * i / (kScanPoints - 1));
        ys[i] = g(xs[i]);
    }
    int last_ok = 1;
    for (int i = 1; i + 1 < kScanPoints; ++i) {
        double a = xs[i - 1], b = xs[i], c = xs[i + 1];
        double lin = ys[i - 1] + (ys[i + 1] - ys[i - 1]) * (b - a) / (c - a);
        if (ys[i] >= lin - 1e-14 * std::max(1.0, std::abs(ys[i]))) {
            last_ok = i + 1;
        } else {
            break;
        }
    }
    return xs[std::max(0, last_ok - 2)];
}

} // namespace

Modulus make_omega_alpha_beta(double alpha, double beta) {
    bool holder_only = (beta == 0.0 && alpha > 0.0 && alpha <= 1.0);
    bool general = (alpha >= 0.0 && alpha < 1.0 && beta >= 0.0 && alpha + beta > 0.0);
    if (!holder_only && !general)
        throw std::invalid_argument(
            "make_omega_alpha_beta: need alpha in [0,1), beta >= 0, alpha+beta > 0 "
            "(or beta = 0 with alpha in (0,1]); alpha = beta = 0 is the degenerate modulus");

    auto raw = [alpha, beta](double h) {
        if (h <= 0.0) return 0.0;
        double v = std::pow(h, alpha);
        if (beta != 0.0) v *= std::pow(-std::log(h), -beta);
        return v;
    };
    double h0 = (beta == 0.0) ? 1.0 : scan_concavity_switch(raw, 1e-9, 0.999);

    Modulus m;
    m.kind = ModulusKind::AlphaBeta;
    m.alpha = alpha;
    m.beta = beta;
    m.h0 = h0;
    m.eval = [raw, h0](double h) {
        if (h <= 0.0) return 0.0;
        return raw(std::min(h, h0));
    };
    return m;
}

Modulus make_omega_log(double k) {
    if (!(k > 0)) throw std::invalid_argument("make_omega_log: k must be > 0");
    // h (k log(1/h) + 1) is concave for every h > 0 but stops increasing at
    // exp((1-k)/k); continue linearly with the slope there (zero for k >= 1).
    double h1 = std::min(1.0, std::exp((1.0 - k) / k));
    auto raw = [k](double h) { return h * (k * std::log(1.0 / h) + 1.0); };
    double slope = (1.0 - k) - k * std::log(h1);
    if (slope < 0.0) slope = 0.0;
    double cap = raw(h1);

    Modulus m;
    m.kind = ModulusKind::LogK;
    m.k = k;
    m.h0 = h1;
    m.eval = [raw, h1, slope, cap](double h) {
        if (h <= 0.0) return 0.0;
        if (h <= h1) return raw(h);
        return cap + slope * (h - h1);
    };
    return m;
}

Modulus make_modulus_custom(std::function<double(double)> eval, std::optional<double> h0) {
    Modulus m;
    m.kind = ModulusKind::Custom;
    m.h0 = h0;
    m.eval = std::move(eval);
    return m;
}

Modulus compose(const Modulus& outer, const Modulus& inner) {
    Modulus m;
    m.kind = ModulusKind::Composite;
    auto f = outer.eval;
    auto g = inner.eval;
    m.eval = [f, g](double h) { return f(g(h)); };
    return m;
}

ModulusCheckReport check_modulus(const Modulus& omega, std::span<const double> grid, ExecPolicy policy) {
    if (grid.size() < 3) throw std::invalid_argument("check_modulus: need at least 3 grid points");
    for (size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] < grid[i + 1]) || grid[i] < 0.0 || grid[i + 1] > 1.0)
            throw std::invalid_argument("check_modulus: grid must be strictly increasing in [0,1]");

    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(grid.size());
    std::vector<double> w(n);
    for (std::ptrdiff_t i = 0; i < n; ++i) w[i] = omega(grid[i]);

    ModulusCheckReport r;

    double mono_margin = omega(0.0) == 0.0 ? 0.0 : -std::abs(omega(0.0));
    for (std::ptrdiff_t i = 0; i + 1 < n; ++i) mono_margin = std::min(mono_margin, w[i + 1] - w[i]);
    r.monotone = mono_margin >= -1e-15;

    std::vector<double> conc(n, 0.0);
    for_each_index(policy, n - 2, [&](std::ptrdiff_t j) {
        std::ptrdiff_t i = j + 1;
        double a = grid[i - 1], b = grid[i], c = grid[i + 1];
        double lin = w[i - 1] + (w[i + 1] - w[i - 1]) * (b - a) / (c - a);
        conc[i] = w[i] - lin;
    });
    r.concavity_margin = *std::min_element(conc.begin(), conc.end());
    r.concave = r.concavity_margin >= -1e-12;

    // Subadditivity w(a+b) <= w(a) + w(b) over a decimated pair sample.
    std::ptrdiff_t stride = std::max<std::ptrdiff_t>(1, n / 128);
    std::vector<double> sub(n, 1e300);
    for_each_index(policy, n, [&](std::ptrdiff_t j) {
        double best = 1e300;
        for (std::ptrdiff_t i = 0; i < n; i += stride) {
            double a = grid[i], b = grid[j];
            best = std::min(best, omega(a) + omega(b) - omega(a + b));
        }
        sub[j] = best;
    });
    r.subadditivity_margin = *std::min_element(sub.begin(), sub.end());
    r.subadditive = r.subadditivity_margin >= -1e-12;

    const double chis[] = {0.1, 0.5, 2.0, 10.0};
    std::vector<double> sand(n, 1e300);
    for_each_index(policy, n, [&](std::ptrdiff_t j) {
        double h = grid[j];
        if (h <= 0.0) {
            sand[j] = 0.0;
            return;
        }
        double best = 1e300;
        for (double chi : chis) {
            double lower = (chi / (1.0 + chi)) * omega(h);
            double upper = (chi + 1.0) * omega(h);
            double mid = omega(chi * h);
            best = std::min({best, mid - lower, upper - mid});
        }
        sand[j] = best;
    });
    r.sandwich_margin = *std::min_element(sand.begin(), sand.end());
    r.sandwich = r.sandwich_margin >= -1e-12;
    return r;
}

double sandwich_scan(const Modulus& omega, int draws, std::uint64_t seed, ExecPolicy policy) {
    std::vector<double> slack(draws, 1e300);
    for_each_index(policy, draws, [&](std::ptrdiff_t i) {
        double u = uniform01(seed, 2 * static_cast<std::uint64_t>(i));
        double v = uniform01(seed, 2 * static_cast<std::uint64_t>(i) + 1);
        double chi = std::pow(10.0, -3.0 + 6.0 * u);  // log-uniform in [1e-3, 1e3]
        double h = std::pow(10.0, -12.0 + 12.0 * v);  // log-uniform in [1e-12, 1]
        double lower = (chi / (1.0 + chi)) * omega(h);
        double upper = (chi + 1.0) * omega(h);
        double mid = omega(chi * h);
        slack[i] = std::min(mid - lower, upper - mid);
    });
    return *std::min_element(slack.begin(), slack.end());
}

LiminfReport liminf_ratio(const Modulus& omega, const RegVaryingFn& V, int decades) {
    if (decades < 2) throw std::invalid_argument("liminf_ratio: decades must be >= 2");
    LiminfReport rep;
    for (int j = 0; j <= decades; ++j) {
        double x = V.valid_radius * std::pow(10.0, -j);
        double vx = V.eval(x);
        double wx = omega(x);
        if (!(vx > 0.0) || !(wx > 0.0) || !std::isfinite(vx) || !std::isfinite(wx)) {
            rep.truncated = true;
            break;
        }
        rep.x.push_back(x);
        rep.ratio.push_back(wx / vx);
    }
    if (rep.truncated || rep.ratio.size() < 3) {
        rep.tag = RatioRegime::Inconclusive;
        return rep;
    }
    size_t m = rep.ratio.size();
    double a = rep.ratio[m - 3], b = rep.ratio[m - 2], c = rep.ratio[m - 1];
    double mx = std::max({a, b, c}), mn = std::min({a, b, c});
    if (mn > 0.0 && mx / mn <= 1.2)
        rep.tag = RatioRegime::ObstructionRegime; // stabilized positive liminf
    else if (c > b && b > a)
        rep.tag = RatioRegime::ObstructionRegime; // diverging ratio
    else if (c < b && b < a)
        rep.tag = RatioRegime::VanishingRatio;
    else
        rep.tag = RatioRegime::Inconclusive;
    return rep;
}

NormEstimate modulus_norm(std::span<const std::pair<double, double>> samples, const Modulus& omega,
                          int random_pairs, std::uint64_t seed) {
    if (samples.size() < 2) throw std::invalid_argument("modulus_norm: need at least 2 samples");
    std::vector<std::pair<double, double>> pts(samples.begin(), samples.end());
    std::sort(pts.begin(), pts.end());

    NormEstimate est;
    auto consider = [&](const std::pair<double, double>& p, const std::pair<double, double>& q) {
        double d = std::abs(p.first - q.first);
        if (d == 0.0) return;
        double num = std::abs(p.second - q.second);
        double den = omega(d);
        if (den == 0.0) {
            if (num != 0.0) est.infinite = true;
            return;
        }
        est.value = std::max(est.value, num / den);
    };
    for (size_t i = 0; i + 1 < pts.size(); ++i) consider(pts[i], pts[i + 1]);
    for (int r = 0; r < random_pairs; ++r) {
        size_t i = static_cast<size_t>(uniform01(seed, 2 * r) * pts.size());
        size_t j = static_cast<size_t>(uniform01(seed, 2 * r + 1) * pts.size());
        i = std::min(i, pts.size() - 1);
        j = std::min(j, pts.size() - 1);
        if (i != j) consider(pts[i], pts[j]);
    }
    return est;
}

} // namespace ergopt
