#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace ergopt {

struct RootOptions {
    double rel_tol = 1e-14;
    int max_newton = 60;
    int max_bisect = 200;
};

/// Solves f(x) = 0 for x in [lo, hi], f continuous and of opposite signs at
/// the endpoints. Newton steps (when df is given) are taken only while they
/// stay inside the current bracket; otherwise the step bisects. Falls back to
/// pure bisection after max_newton Newton attempts.
double solve_bracketed(const std::function<double(double)>& f,
                       double lo, double hi,
                       const std::function<double(double)>& df = nullptr,
                       RootOptions opt = {});

/// Convenience: solve g(x) = y on [lo, hi] with g strictly monotone.
/// `increasing` declares the direction of g. Throws std::domain_error with
/// `context` in the message when y is outside [g(lo), g(hi)].
double invert_monotone(const std::function<double(double)>& g,
                       double y, double lo, double hi, bool increasing,
                       const std::string& context,
                       const std::function<double(double)>& dg = nullptr,
                       RootOptions opt = {});

} // namespace ergopt
