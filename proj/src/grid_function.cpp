#include "ergopt/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ergopt {

GridFunction::GridFunction(std::vector<double> x, std::vector<double> y)
    : xs(std::move(x)), ys(std::move(y)) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("GridFunction: need matching xs/ys with >= 2 nodes");
    for (size_t i = 0; i + 1 < xs.size(); ++i)
        if (!(xs[i] < xs[i + 1]))
            throw std::invalid_argument("GridFunction: xs must be strictly increasing");
}

double GridFunction::operator()(double x) const {
    double fuzz = 1e-9 * std::max(1.0, std::abs(xs.back()));
    if (x < xs.front() - fuzz || x > xs.back() + fuzz)
        throw std::domain_error("GridFunction: evaluation at " + std::to_string(x) +
                                " outside [" + std::to_string(xs.front()) + ", " +
                                std::to_string(xs.back()) + "]");
    x = std::clamp(x, xs.front(), xs.back());
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    size_t hi = std::min(static_cast<size_t>(it - xs.begin()), xs.size() - 1);
    if (hi == 0) hi = 1;
    size_t lo = hi - 1;
    double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + t * (ys[hi] - ys[lo]);
}

double GridFunction::concavity_margin() const {
    double margin = 0.0;
    for (size_t i = 1; i + 1 < xs.size(); ++i) {
        double t = (xs[i] - xs[i - 1]) / (xs[i + 1] - xs[i - 1]);
        double lin = ys[i - 1] + t * (ys[i + 1] - ys[i - 1]);
        margin = std::min(margin, ys[i] - lin);
    }
    return margin;
}

namespace {

struct Line {
    double m = 0.0, b = 0.0;
    double at(double x) const { return m * x + b; }
};

// With three lines of decreasing slope a, mid, c: mid never appears on the
// lower envelope iff a and c already cross at or below it.
bool middle_useless(const Line& a, const Line& mid, const Line& c) {
    return (c.b - a.b) * (a.m - mid.m) <= (mid.b - a.b) * (a.m - c.m);
}

} // namespace

GridFunction concave_conjugate(const GridFunction& g, std::span<const double> x_grid) {
    if (g.size() == 0 || x_grid.size() < 2)
        throw std::invalid_argument("concave_conjugate: empty grid");

    // Lines y*x - g(y) in decreasing slope order; stack holds the lower
    // envelope left-to-right.
    std::vector<Line> env;
    env.reserve(g.size());
    for (size_t idx = g.size(); idx-- > 0;) {
        Line line{g.xs[idx], -g.ys[idx]};
        if (!env.empty() && env.back().m == line.m) {
            if (line.b >= env.back().b) continue;
            env.pop_back();
        }
        while (env.size() >= 2 && middle_useless(env[env.size() - 2], env.back(), line))
            env.pop_back();
        env.push_back(line);
    }

    std::vector<double> xs(x_grid.begin(), x_grid.end());
    std::vector<double> ys(xs.size());
    size_t ptr = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i > 0 && xs[i] < xs[i - 1])
            throw std::invalid_argument("concave_conjugate: x_grid must be sorted");
        while (ptr + 1 < env.size() && env[ptr + 1].at(xs[i]) <= env[ptr].at(xs[i])) ++ptr;
        ys[i] = env[ptr].at(xs[i]);
    }
    GridFunction out(std::move(xs), std::move(ys));
    out.concave_flag = true;
    return out;
}

double conjugate_bruteforce(const GridFunction& g, double x) {
    double best = x * g.xs[0] - g.ys[0];
    for (size_t i = 1; i < g.size(); ++i) best = std::min(best, x * g.xs[i] - g.ys[i]);
    return best;
}

GridFunction upper_concave_hull(const GridFunction& g) {
    const size_t n = g.size();
    std::vector<size_t> hull;
    hull.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        while (hull.size() >= 2) {
            size_t o = hull[hull.size() - 2], a = hull.back();
            // Pop a while the chain o -> a -> i turns upward (slope increases).
            double lhs = (g.ys[a] - g.ys[o]) * (g.xs[i] - g.xs[a]);
            double rhs = (g.ys[i] - g.ys[a]) * (g.xs[a] - g.xs[o]);
            if (lhs < rhs)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(i);
    }
    std::vector<double> ys(n);
    size_t seg = 0;
    for (size_t i = 0; i < n; ++i) {
        while (seg + 1 < hull.size() && g.xs[hull[seg + 1]] < g.xs[i]) ++seg;
        size_t a = hull[seg], b = hull[std::min(seg + 1, hull.size() - 1)];
        if (a == b) {
            ys[i] = g.ys[a];
        } else {
            double t = (g.xs[i] - g.xs[a]) / (g.xs[b] - g.xs[a]);
            ys[i] = g.ys[a] + t * (g.ys[b] - g.ys[a]);
        }
    }
    GridFunction out(g.xs, std::move(ys));
    out.concave_flag = true;
    return out;
}

std::vector<double> log_graded_grid(double lo, double hi, int n) {
    if (!(lo > 0 && hi > lo) || n < 3)
        throw std::invalid_argument("log_graded_grid: need 0 < lo < hi and n >= 3");
    std::vector<double> xs(static_cast<size_t>(n));
    xs[0] = 0.0;
    double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 1; i < n; ++i)
        xs[static_cast<size_t>(i)] = std::exp(llo + (lhi - llo) * (i - 1) / (n - 2));
    xs.back() = hi;
    return xs;
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
    if (!(hi > lo) || n < 2) throw std::invalid_argument("uniform_grid: need lo < hi and n >= 2");
    std::vector<double> xs(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        xs[static_cast<size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    xs.back() = hi;
    return xs;
}

} // namespace ergopt
