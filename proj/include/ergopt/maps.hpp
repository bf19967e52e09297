#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ergopt {

/// Local speed function V of an intermittent map, regularly varying at 0:
/// V(t x)/V(x) -> t^sigma as x -> 0. `valid_radius` is the certified range
/// on which 0 < V < 1 and V is increasing.
struct RegVaryingFn {
    double sigma = 0.0;
    double valid_radius = 0.0;
    std::function<double(double)> eval;
    std::function<double(double)> deriv; // may be null

    double operator()(double x) const { return eval(x); }
};

RegVaryingFn make_v_power(double s);               // V(x) = x^s
RegVaryingFn make_v_farey(double rho);             // V(x) = (1-x^rho)^(-1/rho) - 1
RegVaryingFn make_v_farey_inverse(double rho);     // W(x) = 1 - (1+x^rho)^(-1/rho)
RegVaryingFn make_v_log(double tau, double theta); // V(x) = 2^tau/(log 2)^(theta+1) x^tau |log x|^(theta+1)
RegVaryingFn make_v_mp_inverse(double s);          // V solves V = x^s (1-V)^(s+1)

enum class Orientation {
    AwayFromZero, // T(x) = x(1+V(x)) near 0
    TowardZero    // T(x) = x(1-V(x)) near 0
};

enum class MapFamily { MP, MPInverse, FareyF, FareyG, H, Log, Custom };

struct Branch {
    double lo = 0.0, hi = 1.0; // domain; branch 0 owns [lo,hi], later branches (lo,hi]
    double image_lo = 0.0, image_hi = 1.0;
    bool increasing = true;
    std::function<double(double)> eval;
    std::function<double(double)> deriv;   // may be null
    std::function<double(double)> inverse; // closed form, may be null
};

/// A piecewise interval map of [0,1] with a neutral fixed point at 0.
/// Immutable after construction; all evaluations are pure.
class IntervalMap {
public:
    IntervalMap() = default; // empty; assign from a factory before use

    static IntervalMap manneville_pomeau(double s);
    static IntervalMap mp_inverse(double s);
    static IntervalMap farey(double rho);
    static IntervalMap farey_inverse(double rho);
    static IntervalMap h_family(double rho);
    static IntervalMap log_family(double tau, double theta);
    static IntervalMap custom(RegVaryingFn V, Orientation orientation);

    double operator()(double x) const; // total on [0,1]
    double inverse_branch(int branch, double y) const;

    int branch_for(double x) const;
    int branch_count() const { return static_cast<int>(branches_.size()); }
    const Branch& branch(int i) const { return branches_.at(i); }

    Orientation orientation() const { return orientation_; }
    const RegVaryingFn& V() const { return V_; }
    double sigma() const { return V_.sigma; }
    std::optional<double> branch_cut() const { return cut_; }
    std::optional<double> lambda() const { return lambda_; }
    bool in_class_J() const { return lambda_.has_value() && branch_count() == 2; }
    MapFamily family() const { return family_; }
    const std::string& id() const { return id_; }

private:
    MapFamily family_ = MapFamily::Custom;
    std::string id_;
    Orientation orientation_ = Orientation::AwayFromZero;
    RegVaryingFn V_;
    std::optional<double> cut_;
    std::optional<double> lambda_;
    std::vector<Branch> branches_;
};

/// String-keyed factory used by the CLI config: family ids are
/// "mp", "mp-inverse", "farey-f", "farey-g", "h", "log".
IntervalMap make_map(const std::string& family, const std::map<std::string, double>& params);

struct RegVarReport {
    struct Series {
        double t = 0.0;
        double target = 0.0; // t^sigma
        std::vector<double> x;
        std::vector<double> ratio; // V(t x_j)/V(x_j)
        double deviation_at_deepest = 0.0;
    };
    std::vector<Series> series;
    int levels_requested = 0;
    int levels_achieved = 0;
    bool truncated = false;
};

/// Tabulates V(t x_j)/V(x_j) on x_j = valid_radius * 2^-j, j = 0..depth.
/// Truncates (and flags) when evaluation underflows at depth.
RegVarReport check_regular_variation(const RegVaryingFn& V, const std::vector<double>& t_set, int depth);

} // namespace ergopt
