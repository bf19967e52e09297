#pragma once

#include <span>
#include <vector>

namespace ergopt {

/// A sampled real function on a strictly increasing 1-D grid with piecewise
/// linear interpolation. Evaluation outside [xs.front(), xs.back()] throws.
struct GridFunction {
    std::vector<double> xs;
    std::vector<double> ys;
    bool concave_flag = false;

    GridFunction() = default;
    GridFunction(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    size_t size() const { return xs.size(); }
    double x_min() const { return xs.front(); }
    double x_max() const { return xs.back(); }

    /// Worst three-point concavity slack over consecutive triples (>= -tol
    /// for a concave sample).
    double concavity_margin() const;
};

/// Discrete concave conjugate g*(x) = min_{y in grid} [x y - g(y)], evaluated
/// on `x_grid` by the sorted-slope lower-envelope method (linear time after
/// the grids are sorted). The result is concave; it is non-decreasing when
/// the y-grid is nonnegative.
GridFunction concave_conjugate(const GridFunction& g, std::span<const double> x_grid);

/// Brute-force reference for the conjugate (used by tests and the acceptance
/// suite as the independent oracle).
double conjugate_bruteforce(const GridFunction& g, double x);

/// Upper concave hull of the sampled points (monotone-chain), returned as a
/// grid function on the same xs. Independent oracle for the smallest concave
/// majorant of a sampled function.
GridFunction upper_concave_hull(const GridFunction& g);

/// Strictly increasing grid on [0, hi]: 0 followed by `n-1` geometrically
/// spaced nodes from `lo` to `hi`.
std::vector<double> log_graded_grid(double lo, double hi, int n);

/// Uniform grid on [lo, hi] with n nodes.
std::vector<double> uniform_grid(double lo, double hi, int n);

} // namespace ergopt
