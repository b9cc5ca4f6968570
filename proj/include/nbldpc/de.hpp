#ifndef NBLDPC_DE_HPP
#define NBLDPC_DE_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "nbldpc/degree.hpp"

namespace nbldpc {

/// Inputs of the bit-erasure recursion: binary-image degree distributions
/// (already converted), the average label row weight d_m, and the channel
/// erasure probability eps0.
struct DEParams {
    int p = 1;
    DegreeDistribution lambda_hat;
    DegreeDistribution rho_hat;
    double d_m = 1.0;
    double eps0 = 0.0;

    static DEParams from_symbol_distributions(const DegreeDistribution& lambda,
                                              const DegreeDistribution& rho, int p,
                                              double eps0) {
        DEParams d;
        d.p = p;
        auto prof = uniform_label_profile(p);
        d.lambda_hat = convert_distribution(lambda, prof);
        d.rho_hat = convert_distribution(rho, prof);
        d.d_m = prof.d_m;
        d.eps0 = eps0;
        return d;
    }
};

struct DETrajectory {
    std::vector<double> bit_eps;    // eps^(0), eps^(1), ...
    std::vector<double> sym_gamma;  // gamma^(l) = 1-(1-eps^(l))^p
    bool converged = false;
    double fixed_point = 0.0;
};

/// One step of the bit recursion:
///   xi(eps) = eps0 * sum_i hat{lambda}_i (1 - sum_j hat{rho}_j (1-eps)^{j-d_m})^{i-1}.
/// The exponent j-d_m is a real power; at eps=1 the inner term is 0 by continuity.
inline double bit_step(double eps, const DEParams& params) {
    if (params.eps0 == 0.0) return 0.0;
    const double base = 1.0 - eps;
    double inner = 0.0;
    if (base > 0.0) {
        for (auto& [j, c] : params.rho_hat.coeffs) inner += c * std::pow(base, j - params.d_m);
    }
    double y = 1.0 - inner;
    if (y < 0.0) y = 0.0;
    if (y > 1.0) y = 1.0;
    double s = 0.0;
    for (auto& [i, c] : params.lambda_hat.coeffs) s += c * std::pow(y, i - 1);
    double out = params.eps0 * s;
    if (out < 0.0) out = 0.0;
    if (out > params.eps0) out = params.eps0;
    return out;
}

inline double bit_to_symbol(double eps, int p) {
    return 1.0 - std::pow(1.0 - eps, p);
}

inline double symbol_to_bit(double gamma, int p) {
    return 1.0 - std::pow(1.0 - gamma, 1.0 / p);
}

/// Symbol-domain step: gamma -> 1 - (1 - xi(1-(1-gamma)^{1/p}))^p.
inline double symbol_step(double gamma, const DEParams& params) {
    return bit_to_symbol(bit_step(symbol_to_bit(gamma, params.p), params), params.p);
}

/// Iterates the symbol recursion from gamma0 (default 1-(1-eps0)^p).
/// Stops on gamma < tol (converged), on a relative stall |dgamma| < tol*gamma
/// (a genuine fixed point), or after max_iter steps.
inline DETrajectory run_de(const DEParams& params, double gamma0, double tol, int max_iter) {
    if (tol <= 0) throw std::invalid_argument("run_de: tol must be positive");
    DETrajectory traj;
    double g = gamma0 < 0 ? bit_to_symbol(params.eps0, params.p) : gamma0;
    traj.sym_gamma.push_back(g);
    traj.bit_eps.push_back(symbol_to_bit(g, params.p));
    for (int l = 0; l < max_iter; ++l) {
        double ng = symbol_step(g, params);
        traj.sym_gamma.push_back(ng);
        traj.bit_eps.push_back(symbol_to_bit(ng, params.p));
        if (ng < tol) {
            traj.converged = true;
            traj.fixed_point = ng;
            return traj;
        }
        if (std::abs(ng - g) < tol * ng) {
            traj.fixed_point = ng;
            return traj;
        }
        g = ng;
    }
    traj.fixed_point = g;
    return traj;
}

inline DETrajectory run_de(const DEParams& params, double tol = 1e-10, int max_iter = 5000) {
    return run_de(params, -1.0, tol, max_iter);
}

/// Largest eps0 for which the recursion converges to zero; bisection with
/// run_de(tol=1e-10, max_iter=5000) as the convergence probe.
inline double find_threshold(const DegreeDistribution& lambda, const DegreeDistribution& rho,
                             int p, double tol) {
    if (tol < 1e-5) throw std::invalid_argument("find_threshold: tol below 1e-5");
    auto prof = uniform_label_profile(p);
    DEParams params;
    params.p = p;
    params.lambda_hat = convert_distribution(lambda, prof);
    params.rho_hat = convert_distribution(rho, prof);
    params.d_m = prof.d_m;
    double lo = 0.0, hi = 1.0;
    while (hi - lo > tol) {
        params.eps0 = 0.5 * (lo + hi);
        if (run_de(params).converged)
            lo = params.eps0;
        else
            hi = params.eps0;
    }
    return 0.5 * (lo + hi);
}

/// L = integral over [gammaL, gamma0] of dgamma / (gamma * ln(gamma/f(gamma))),
/// composite trapezoid on grid_points log-spaced gammas. Requires the
/// contraction f(gamma) < gamma on the whole interval.
struct IterationCountResult {
    double L = 0.0;
    bool clamped = false;  // integrand limited near a stall; L unreliable
};

inline IterationCountResult iteration_count_map(const std::function<double(double)>& f,
                                                double gamma0, double gammaL,
                                                int grid_points = 2000) {
    if (!(gammaL > 0) || !(gammaL < gamma0))
        throw std::invalid_argument("iteration_count: need 0 < gammaL < gamma0");
    IterationCountResult res;
    const double lg0 = std::log(gamma0), lgL = std::log(gammaL);
    std::vector<double> xs(grid_points), ys(grid_points);
    for (int i = 0; i < grid_points; ++i) {
        double t = static_cast<double>(i) / (grid_points - 1);
        double g = std::exp(lgL + t * (lg0 - lgL));
        double fg = f(g);
        if (fg >= g)
            throw std::domain_error("iteration_count: contraction f(gamma) < gamma violated");
        double denom = std::log(g / fg);
        if (denom < 1e-12) {
            denom = 1e-12;
            res.clamped = true;
        }
        xs[i] = g;
        ys[i] = 1.0 / (g * denom);
    }
    for (int i = 0; i + 1 < grid_points; ++i)
        res.L += 0.5 * (ys[i] + ys[i + 1]) * (xs[i + 1] - xs[i]);
    return res;
}

inline IterationCountResult iteration_count(const DEParams& params, double gamma0, double gammaL,
                                            int grid_points = 2000) {
    return iteration_count_map([&](double g) { return symbol_step(g, params); }, gamma0, gammaL,
                               grid_points);
}

/// g(gammaL) = ((1-gammaL)^{1/p} - (1-eps0)) * Np / L, in recovered bits per
/// iteration. eps0 is the bit erasure probability at the start of the
/// measured segment (the channel value when the segment is the whole run).
inline double ops_per_iteration(double gammaL, double eps0, long long N, int p, double L) {
    if (L <= 0) throw std::invalid_argument("ops_per_iteration: L must be positive");
    const double np = static_cast<double>(N) * p;
    return (std::pow(1.0 - gammaL, 1.0 / p) - (1.0 - eps0)) * np / L;
}

}  // namespace nbldpc

#endif
