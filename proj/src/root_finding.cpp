#include "ergopt/root_finding.hpp"

#include <algorithm>

namespace ergopt {

double solve_bracketed(const std::function<double(double)>& f,
                       double lo, double hi,
                       const std::function<double(double)>& df,
                       RootOptions opt) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0))
        throw std::domain_error("solve_bracketed: no sign change on bracket");

    double x = 0.5 * (lo + hi);
    int newton_left = df ? opt.max_newton : 0;
    for (int iter = 0; iter < opt.max_bisect; ++iter) {
        double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx > 0) == (fhi > 0)) {
            hi = x;
            fhi = fx;
        } else {
            lo = x;
            flo = fx;
        }
        double width = hi - lo;
        if (width <= opt.rel_tol * std::max(std::abs(lo), std::abs(hi)))
            return 0.5 * (lo + hi);

        double next = 0.5 * (lo + hi);
        if (newton_left > 0) {
            double d = df(x);
            if (d != 0.0 && std::isfinite(d)) {
                double xn = x - fx / d;
                if (xn > lo && xn < hi) next = xn;
            }
            --newton_left;
        }
        if (next == x) next = 0.5 * (lo + hi); // stalled Newton: bisect
        x = next;
    }
    return 0.5 * (lo + hi);
}

double invert_monotone(const std::function<double(double)>& g,
                       double y, double lo, double hi, bool increasing,
                       const std::string& context,
                       const std::function<double(double)>& dg,
                       RootOptions opt) {
    double glo = g(lo);
    double ghi = g(hi);
    double ylo = increasing ? glo : ghi;
    double yhi = increasing ? ghi : glo;
    // Tolerate float fuzz right at the image boundary.
    double fuzz = 1e-12 * std::max({1.0, std::abs(ylo), std::abs(yhi)});
    if (y < ylo - fuzz || y > yhi + fuzz)
        throw std::domain_error(context + ": value " + std::to_string(y) +
                                " outside image [" + std::to_string(ylo) + ", " +
                                std::to_string(yhi) + "]");
    if (y <= ylo) return increasing ? lo : hi;
    if (y >= yhi) return increasing ? hi : lo;
    auto h = [&](double x) { return g(x) - y; };
    return solve_bracketed(h, lo, hi, dg, opt);
}

} // namespace ergopt
