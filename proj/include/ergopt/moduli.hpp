#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ergopt/maps.hpp"
#include "ergopt/parallel.hpp"

namespace ergopt {

enum class ModulusKind { AlphaBeta, LogK, Composite, Custom };

/// A modulus of continuity with certification data. `h0` is the switch point
/// above which the defining formula is replaced by its continuation
/// (constant for the alpha-beta family, constant-slope for the log family).
struct Modulus {
    ModulusKind kind = ModulusKind::Custom;
    double alpha = 0.0, beta = 0.0, k = 0.0;
    std::optional<double> h0;
    std::function<double(double)> eval;

    double operator()(double h) const { return eval(h); }
};

Modulus make_omega_alpha_beta(double alpha, double beta);
Modulus make_omega_log(double k);
Modulus make_modulus_custom(std::function<double(double)> eval, std::optional<double> h0 = std::nullopt);
Modulus compose(const Modulus& outer, const Modulus& inner);

struct ModulusCheckReport {
    bool monotone = false;
    bool concave = false;
    bool subadditive = false;
    bool sandwich = false;
    double concavity_margin = 0.0;    // most negative interpolation slack seen
    double subadditivity_margin = 0.0;
    double sandwich_margin = 0.0;
    bool pass() const { return monotone && concave && subadditive && sandwich; }
};

ModulusCheckReport check_modulus(const Modulus& omega, std::span<const double> grid,
                                 ExecPolicy policy = ExecPolicy::Serial);

/// Worst slack of (chi/(1+chi)) w(h) <= w(chi h) <= (chi+1) w(h) over `draws`
/// deterministic pseudo-random (chi, h) pairs; negative slack = violation.
double sandwich_scan(const Modulus& omega, int draws, std::uint64_t seed,
                     ExecPolicy policy = ExecPolicy::Serial);

enum class RatioRegime { ObstructionRegime, VanishingRatio, Inconclusive };

struct LiminfReport {
    std::vector<double> x;
    std::vector<double> ratio; // omega(x)/V(x)
    RatioRegime tag = RatioRegime::Inconclusive;
    bool truncated = false;
};

/// Classifies the small-scale behavior of omega/V on x_j = valid_radius*10^-j.
LiminfReport liminf_ratio(const Modulus& omega, const RegVaryingFn& V, int decades);

struct NormEstimate {
    double value = 0.0;
    bool infinite = false; // omega(d) = 0 with a nonzero increment seen
};

/// Lower estimate of |phi|_omega = sup |phi(x)-phi(y)| / omega(d(x,y)) from
/// all adjacent pairs plus a deterministic budget of random pairs.
NormEstimate modulus_norm(std::span<const std::pair<double, double>> samples, const Modulus& omega,
                          int random_pairs = 4096, std::uint64_t seed = 0x5eed);

} // namespace ergopt
