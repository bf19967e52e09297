#include "ergopt/subaction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ergopt/rng.hpp"

namespace ergopt {

AssumptionAReport check_assumption_A(const Modulus& omega, const RegVaryingFn& V,
                                     std::span<const double> grid,
                                     std::span<const double> xi_samples) {
    const double xi0_lattice[] = {1.1, 1.5, 2.0};
    const double eta0_lattice[] = {0.5, 0.25, 0.125};

    auto theta0 = [&](double h) { return omega(h) / V.eval(h); };

    AssumptionAReport best;
    best.min_sample_gamma = 1e300;
    double global_min_gamma = 1e300;
    double viol_h = 0.0, viol_xi = 0.0;

    for (double xi0 : xi0_lattice) {
        for (double eta0 : eta0_lattice) {
            double min_gamma = 1e300;
            double worst_h = 0.0, worst_xi = 0.0;
            bool any = false;
            for (double h : grid) {
                if (!(h > 0.0) || h >= eta0) continue;
                double t_h = theta0(h);
                if (!(t_h > 0.0) || !std::isfinite(t_h)) continue;
                for (double xi : xi_samples) {
                    if (!(xi > 1.0) || xi > xi0) continue;
                    double t_xh = theta0(xi * h);
                    if (!(t_xh > 0.0) || !std::isfinite(t_xh)) continue;
                    double g = std::log(t_xh / t_h) / std::log(xi);
                    any = true;
                    if (g < min_gamma) {
                        min_gamma = g;
                        worst_h = h;
                        worst_xi = xi;
                    }
                }
            }
            if (!any) continue;
            if (min_gamma < global_min_gamma) {
                global_min_gamma = min_gamma;
                viol_h = worst_h;
                viol_xi = worst_xi;
            }
            // Largest lattice gamma below the sampled minimum.
            double cert = std::floor((min_gamma + 1e-12) / 0.05) * 0.05;
            cert = std::min(cert, 2.0);
            if (cert >= 0.05 && (!best.certified || cert > best.gamma_A)) {
                best.certified = true;
                best.gamma_A = cert;
                best.xi0 = xi0;
                best.eta0 = eta0;
                best.min_sample_gamma = min_gamma;
            }
        }
    }
    if (!best.certified) {
        best.violating_h = viol_h;
        best.violating_xi = viol_xi;
        best.min_sample_gamma = global_min_gamma == 1e300 ? 0.0 : global_min_gamma;
    }
    return best;
}

OmegaPipeline build_Omega(const Modulus& omega, const RegVaryingFn& V, int grid_size, double x_max,
                          bool assumption_certified) {
    if (grid_size < 16) throw std::invalid_argument("build_Omega: grid_size too small");
    x_max = std::max(1.0, x_max);

    std::vector<double> xs = log_graded_grid(1e-10, x_max, grid_size);
    if (std::find(xs.begin(), xs.end(), 1.0) == xs.end()) {
        xs.push_back(1.0);
        std::sort(xs.begin(), xs.end());
    }
    size_t unit_end = static_cast<size_t>(std::upper_bound(xs.begin(), xs.end(), 1.0) - xs.begin());
    std::vector<double> xs_unit(xs.begin(), xs.begin() + unit_end); // [0, 1]

    OmegaPipeline pipe;
    if (!assumption_certified)
        pipe.warnings.push_back("assumption A not pre-certified; pipeline computed anyway");

    std::vector<double> t0(xs_unit.size(), 0.0);
    bool clamped = false;
    for (size_t i = 1; i < xs_unit.size(); ++i) {
        double v = V.eval(xs_unit[i]);
        double val = omega(xs_unit[i]) / v;
        if (!(v > 0.0) || !std::isfinite(val)) {
            val = 0.0;
            clamped = true;
        }
        t0[i] = val;
    }
    if (clamped) pipe.warnings.push_back("omega/V not finite everywhere inside (0,1]; clamped to 0");
    pipe.theta0 = GridFunction(xs_unit, t0);

    std::vector<double> t1(xs.size());
    double running = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i < xs_unit.size()) running = std::max(running, t0[i]);
        t1[i] = running;
    }
    pipe.theta1 = GridFunction(xs, t1);

    pipe.theta1_star = concave_conjugate(pipe.theta1, xs);
    pipe.theta1_star_at_1 = pipe.theta1_star(1.0);

    std::vector<double> t2(xs.size());
    for (size_t i = 0; i < xs.size(); ++i)
        t2[i] = std::min(pipe.theta1_star.ys[i], pipe.theta1_star_at_1);
    pipe.theta2 = GridFunction(xs, t2);

    pipe.theta2_star = concave_conjugate(pipe.theta2, xs);

    std::vector<double> om(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) om[i] = pipe.theta2_star.ys[i] + pipe.theta1_star_at_1;
    pipe.Omega = GridFunction(xs, om);
    pipe.Omega.concave_flag = true;

    double slack = 1e300;
    for (size_t i = 0; i < xs_unit.size(); ++i) {
        slack = std::min(slack, pipe.theta1.ys[i] - pipe.theta0.ys[i]);
        slack = std::min(slack, pipe.theta2_star.ys[i] - pipe.theta1.ys[i]);
    }
    pipe.chain_slack = slack;
    if (slack < -1e-10)
        throw std::runtime_error("build_Omega: theta chain violated (slack = " +
                                 std::to_string(slack) + ")");
    if (std::abs(pipe.Omega.ys[0]) > 1e-10)
        throw std::runtime_error("build_Omega: Omega(0) = " + std::to_string(pipe.Omega.ys[0]));
    return pipe;
}

ExpansionData expansion_data(const IntervalMap& map, const AssumptionAReport& A) {
    if (map.branch_count() != 2 || !map.branch_cut())
        throw std::invalid_argument("expansion_data: map must have two branches");
    if (!A.certified) throw std::invalid_argument("expansion_data: assumption A not certified");

    const double c = *map.branch_cut();
    const Branch& right = map.branch(1);

    double lambda = 1e300;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
        double a = c + (1.0 - c) * (i + 0.0) / n + 1e-12;
        double b = c + (1.0 - c) * (i + 1.0) / n;
        lambda = std::min(lambda, std::abs(right.eval(b) - right.eval(a)) / (b - a));
    }
    lambda -= 1e-6;
    if (!(lambda > 1.0))
        throw std::invalid_argument("expansion_data: right branch not uniformly expanding "
                                    "(sampled lambda = " + std::to_string(lambda) + " <= 1)");

    const RegVaryingFn& V = map.V();
    double sigma = V.sigma;
    auto halving_ok = [&](double r) {
        for (int i = 0; i < 200; ++i) {
            double h = r * std::pow(1e-12 / r, i / 199.0);
            if (V.eval(0.5 * h) < V.eval(h) / std::pow(2.0, sigma + 1.0) - 1e-15) return false;
        }
        return true;
    };
    auto separation_ok = [&](double r) {
        double lo = std::max(c - 0.5 * r, 1e-12);
        double hi = std::min(c + 0.5 * r, 1.0);
        return map(lo) - map(hi) >= 0.5;
    };
    double rho = std::min(c, 1.0 - c);
    bool found = false;
    for (int i = 0; i < 80; ++i) {
        if (halving_ok(rho) && separation_ok(rho)) {
            found = true;
            break;
        }
        rho *= 0.7;
    }

    ExpansionData e;
    e.lambda = lambda;
    e.rho_T = found ? rho : 0.0;
    e.gamma_A = A.gamma_A;
    e.xi0 = A.xi0;
    e.eta0 = A.eta0;
    double base = std::pow(2.0, -(sigma + 2.0));
    e.C7 = std::min({base, (lambda - 1.0) * base, A.xi0 - 1.0, 1.0 / A.eta0 - 1.0});
    e.C8 = std::pow(1.0 + e.C7, A.gamma_A) - 1.0;
    e.rho_T_omega = std::min(e.rho_T, A.eta0);
    e.degenerate = !found || e.C8 < 1e-9 || e.rho_T_omega < 1e-6;
    return e;
}

namespace {

struct NodeRef {
    size_t idx = 0;
    double t = 0.0;
};

NodeRef locate(const std::vector<double>& xs, double x) {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    size_t hi = std::min(static_cast<size_t>(it - xs.begin()), xs.size() - 1);
    if (hi == 0) hi = 1;
    size_t lo = hi - 1;
    return {lo, (x - xs[lo]) / (xs[hi] - xs[lo])};
}

} // namespace

SubactionResult compute_subaction(const IntervalMap& map, const std::function<double(double)>& f,
                                  double m, std::span<const double> grid, double eps, int k_cap,
                                  ExecPolicy policy, double sanity_cap) {
    std::vector<double> xs(grid.begin(), grid.end());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(xs.size());
    if (n < 2) throw std::invalid_argument("compute_subaction: grid too small");

    const int nb = map.branch_count();
    // Preimages and their interpolation anchors are static across iterations.
    std::vector<std::vector<NodeRef>> refs(nb, std::vector<NodeRef>(xs.size()));
    std::vector<std::vector<double>> fval(nb, std::vector<double>(xs.size()));
    for (int b = 0; b < nb; ++b) {
        for_each_index(policy, n, [&](std::ptrdiff_t i) {
            double y = map.inverse_branch(b, xs[static_cast<size_t>(i)]);
            refs[b][static_cast<size_t>(i)] = locate(xs, y);
            fval[b][static_cast<size_t>(i)] = f(y);
        });
    }

    std::vector<double> g(xs.size(), 0.0), g_next(xs.size(), 0.0), U(xs.size(), 0.0);
    SubactionResult res;
    int stall = 0;
    std::vector<double> deltas(xs.size(), 0.0);
    for (int k = 1; k <= k_cap; ++k) {
        for_each_index(policy, n, [&](std::ptrdiff_t i) {
            size_t ii = static_cast<size_t>(i);
            double best = -1e300;
            for (int b = 0; b < nb; ++b) {
                const NodeRef& r = refs[b][ii];
                double gy = g[r.idx] * (1.0 - r.t) + g[r.idx + 1] * r.t;
                best = std::max(best, fval[b][ii] - m + gy);
            }
            g_next[ii] = best;
            double u_new = std::max(U[ii], best);
            deltas[ii] = u_new - U[ii];
            U[ii] = u_new;
        });
        std::swap(g, g_next);
        double delta = *std::max_element(deltas.begin(), deltas.end());
        res.final_delta = delta;
        res.k_used = k;
        stall = delta < eps ? stall + 1 : 0;
        if (stall >= 10) {
            res.converged = true;
            break;
        }
        if (*std::max_element(U.begin(), U.end()) > sanity_cap) {
            res.cap_exceeded = true;
            res.note = "running max exceeded the continuity cap; m may be underestimated";
            break;
        }
    }
    if (!res.converged && !res.cap_exceeded)
        res.note = "k_cap reached with residual growth " + std::to_string(res.final_delta) +
                   "; m may be underestimated";
    res.U = GridFunction(xs, U);
    return res;
}

double subaction_tree_sup(const IntervalMap& map, const std::function<double(double)>& f, double m,
                          double x, int depth) {
    if (depth == 0) return 0.0;
    double best = 0.0;
    for (int b = 0; b < map.branch_count(); ++b) {
        double y;
        try {
            y = map.inverse_branch(b, x);
        } catch (const std::domain_error&) {
            continue;
        }
        best = std::max(best, f(y) - m + subaction_tree_sup(map, f, m, y, depth - 1));
    }
    return best;
}

SubactionVerification verify_subaction(const IntervalMap& map,
                                       const std::function<double(double)>& f, double m,
                                       const GridFunction& U, const GridFunction& Omega,
                                       double f_omega_norm, double eps,
                                       const ExpansionData* expansion, ExecPolicy policy) {
    if (U.x_min() > 0.0 || U.x_max() < 1.0)
        throw std::invalid_argument("verify_subaction: U grid must cover [0,1]");
    if (Omega.x_max() < 1.0)
        throw std::invalid_argument("verify_subaction: Omega grid must cover [0,1]");

    SubactionVerification rep;
    double spacing = 0.0;
    for (size_t i = 0; i + 1 < U.xs.size(); ++i)
        if (U.xs[i] <= 1.0) spacing = std::max(spacing, U.xs[i + 1] - U.xs[i]);
    rep.grid_spacing = spacing;
    rep.tol = 2.0 * f_omega_norm * Omega(std::min(spacing, Omega.x_max())) + eps;

    // Residual on a 4x-refined grid.
    std::vector<double> fine;
    for (size_t i = 0; i + 1 < U.xs.size(); ++i) {
        if (U.xs[i] > 1.0) break;
        double a = U.xs[i], b = std::min(U.xs[i + 1], 1.0);
        for (int j = 0; j < 4; ++j) fine.push_back(a + (b - a) * j / 4.0);
    }
    fine.push_back(1.0);
    std::vector<double> resid(fine.size());
    for_each_index(policy, static_cast<std::ptrdiff_t>(fine.size()), [&](std::ptrdiff_t i) {
        double x = fine[static_cast<size_t>(i)];
        resid[static_cast<size_t>(i)] = f(x) + U(x) - U(map(x)) - m;
    });
    rep.max_residual = *std::max_element(resid.begin(), resid.end());
    rep.pass = rep.max_residual <= rep.tol;

    std::vector<std::pair<double, double>> samples;
    for (size_t i = 0; i < U.xs.size(); ++i)
        if (U.xs[i] <= 1.0) samples.emplace_back(U.xs[i], U.ys[i]);
    Modulus om_mod = make_modulus_custom([&Omega](double h) {
        return h <= 0.0 ? 0.0 : Omega(std::min(h, Omega.x_max()));
    });
    rep.U_norm_estimate = modulus_norm(samples, om_mod).value;
    if (expansion) {
        rep.L = static_cast<int>(std::ceil(2.0 / expansion->rho_T_omega)) + 1;
        rep.norm_bound = rep.L / expansion->C8 * f_omega_norm;
        rep.within_norm_bound = rep.U_norm_estimate <= rep.norm_bound;
    }
    return rep;
}

PairingCheck backward_pairing_check(const IntervalMap& map, const GridFunction& Omega,
                                    const Modulus& omega, const ExpansionData& expansion,
                                    int n_samples, std::uint64_t seed, ExecPolicy policy) {
    const double rho = expansion.rho_T_omega;
    if (!(rho > 0)) throw std::invalid_argument("backward_pairing_check: rho_T_omega must be > 0");
    std::vector<double> slack(static_cast<size_t>(n_samples), 1e300);
    std::vector<int> used(static_cast<size_t>(n_samples), 0);
    for_each_index(policy, n_samples, [&](std::ptrdiff_t i) {
        std::uint64_t id = static_cast<std::uint64_t>(i);
        double x0 = uniform01(seed, 3 * id);
        double d_lo = 1e-6;
        double d0 = d_lo * std::pow(rho / d_lo, uniform01(seed, 3 * id + 1)) * (1.0 - 1e-9);
        double y0 = uniform01(seed, 3 * id + 2) < 0.5 ? x0 - d0 : x0 + d0;
        if (y0 < 0.0 || y0 > 1.0) y0 = std::clamp(y0, 0.0, 1.0);
        d0 = std::abs(x0 - y0);
        if (!(d0 > 0.0) || d0 >= rho) return;

        double worst = 1e300;
        bool any = false;
        for (int bx = 0; bx < map.branch_count(); ++bx) {
            double x1;
            try {
                x1 = map.inverse_branch(bx, x0);
            } catch (const std::domain_error&) {
                continue;
            }
            double d1 = 1e300, y1_best = 0.0;
            for (int by = 0; by < map.branch_count(); ++by) {
                try {
                    double y1 = map.inverse_branch(by, y0);
                    if (std::abs(x1 - y1) < d1) {
                        d1 = std::abs(x1 - y1);
                        y1_best = y1;
                    }
                } catch (const std::domain_error&) {
                }
            }
            (void)y1_best;
            if (d1 == 1e300) continue;
            any = true;
            worst = std::min(worst, Omega(d0) - Omega(d1) - expansion.C8 * omega(d1));
        }
        if (any) {
            slack[static_cast<size_t>(i)] = worst;
            used[static_cast<size_t>(i)] = 1;
        }
    });
    PairingCheck out;
    out.worst_slack = 1e300;
    for (int i = 0; i < n_samples; ++i) {
        if (used[static_cast<size_t>(i)]) {
            out.worst_slack = std::min(out.worst_slack, slack[static_cast<size_t>(i)]);
            ++out.samples;
        } else {
            ++out.skipped;
        }
    }
    return out;
}

} // namespace ergopt
