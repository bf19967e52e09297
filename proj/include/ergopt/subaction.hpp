#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ergopt/grid_function.hpp"
#include "ergopt/maps.hpp"
#include "ergopt/moduli.hpp"
#include "ergopt/parallel.hpp"

namespace ergopt {

struct AssumptionAReport {
    bool certified = false;
    double gamma_A = 0.0, xi0 = 0.0, eta0 = 0.0;
    double violating_h = 0.0, violating_xi = 0.0;
    double min_sample_gamma = 0.0; // smallest per-sample exponent seen
};

/// Searches (gamma, xi0, eta0) over a lattice (gamma in {0.05,...,2.00} step
/// 0.05; xi0 in {1.1, 1.5, 2}; eta0 in {1/2, 1/4, 1/8}) for the largest gamma
/// with w(xi h)/V(xi h) >= xi^gamma w(h)/V(h) on all sampled (h, xi). Returns
/// the violating pair when no lattice gamma certifies.
AssumptionAReport check_assumption_A(const Modulus& omega, const RegVaryingFn& V,
                                     std::span<const double> grid,
                                     std::span<const double> xi_samples);

struct OmegaPipeline {
    GridFunction theta0;      // omega/V on [0,1], 0 at 0
    GridFunction theta1;      // running max, capped past 1
    GridFunction theta1_star; // concave conjugate
    GridFunction theta2;      // min(theta1*, theta1*(1))
    GridFunction theta2_star; // concave conjugate: smallest concave majorant of theta1 on [0,1]
    GridFunction Omega;       // theta2* + theta1*(1)
    double theta1_star_at_1 = 0.0;
    double chain_slack = 0.0; // min of theta1-theta0 and theta2*-theta1 on [0,1]
    std::vector<std::string> warnings;
};

/// Runs the conjugation pipeline producing the sub-action modulus Omega on a
/// log-graded grid over [0, x_max]. Throws if the monotone chain or
/// Omega(0) = 0 fail beyond 1e-10.
OmegaPipeline build_Omega(const Modulus& omega, const RegVaryingFn& V, int grid_size,
                          double x_max = 4.0, bool assumption_certified = true);

struct ExpansionData {
    double rho_T = 0.0;
    double C7 = 0.0;      // min{ 2^-(sigma+2), (lambda-1) 2^-(sigma+2), xi0-1, 1/eta0-1 }
    double C8 = 0.0;      // (1+C7)^gamma_A - 1
    double lambda = 0.0;  // sampled right-branch expansion rate
    double gamma_A = 0.0, xi0 = 0.0, eta0 = 0.0;
    double rho_T_omega = 0.0; // min(rho_T, eta0)
    bool degenerate = false;  // constants too small to be useful
};

/// Estimates the local expansion constants of a two-branch map (class-J
/// shape). Throws when the right branch is not uniformly expanding.
ExpansionData expansion_data(const IntervalMap& map, const AssumptionAReport& A);

struct SubactionResult {
    GridFunction U;
    int k_used = 0;
    bool converged = false;
    double final_delta = 0.0;
    bool cap_exceeded = false;
    std::string note;
};

/// Value recursion g_k(x) = max over preimages y of [f(y) - m + g_{k-1}(y)]
/// with linear interpolation; U = pointwise running max. Stops after the
/// running max stalls below eps for 10 consecutive k, or at k_cap.
SubactionResult compute_subaction(const IntervalMap& map, const std::function<double(double)>& f,
                                  double m, std::span<const double> grid, double eps, int k_cap,
                                  ExecPolicy policy = ExecPolicy::Serial,
                                  double sanity_cap = std::numeric_limits<double>::infinity());

/// Exhaustive preimage-tree supremum max_{k<=depth} sup_{T^k y = x}
/// S_k(f-m)(y); the independent oracle for compute_subaction at small depth.
double subaction_tree_sup(const IntervalMap& map, const std::function<double(double)>& f, double m,
                          double x, int depth);

struct SubactionVerification {
    double max_residual = 0.0; // max over fine grid of f + U - U o T - m
    double tol = 0.0;          // 2 |f|_w Omega(grid spacing) + eps
    bool pass = false;
    double grid_spacing = 0.0;
    double U_norm_estimate = 0.0; // lower estimate of |U|_Omega
    double norm_bound = 0.0;      // L C8^-1 |f|_w
    bool within_norm_bound = true;
    int L = 0;
};

SubactionVerification verify_subaction(const IntervalMap& map,
                                       const std::function<double(double)>& f, double m,
                                       const GridFunction& U, const GridFunction& Omega,
                                       double f_omega_norm, double eps,
                                       const ExpansionData* expansion = nullptr,
                                       ExecPolicy policy = ExecPolicy::Serial);

struct PairingCheck {
    double worst_slack = 0.0; // min of Omega(d0) - Omega(d1) - C8 w(d1)
    long long samples = 0;
    long long skipped = 0;
};

/// Samples pairs within rho_T_omega, pulls back one step through each branch
/// with the distance-minimizing partner preimage, and reports the worst slack
/// of the pairing inequality.
PairingCheck backward_pairing_check(const IntervalMap& map, const GridFunction& Omega,
                                    const Modulus& omega, const ExpansionData& expansion,
                                    int n_samples, std::uint64_t seed,
                                    ExecPolicy policy = ExecPolicy::Serial);

} // namespace ergopt
